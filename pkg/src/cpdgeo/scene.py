"""Declarative scene configs: YAML in, surfaces + residual reports out.

A scene file holds nested key-value sections:

    ambient:       kind (euclidean | warped), dim, rho (expression in t)
    field:         kind (constant | radial | warped), components / center
    construction:  exactly one of profile / transnormal / graph
    checks:        names, per-name tolerance overrides, target_H
    output:        mesh_path, report_path, grid [n_u, n_v]

See the scenes/ directory of the repository for worked examples.
"""

import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .cmc import catenary_profile, mean_curvature_at
from .config import DEFAULTS
from .construct import (GraphFunction, GraphSurface, cpd_surface_r3,
                        graph_in_warped_product)
from .curves import (Plane, ProfileCurve, circle_curve, ellipse_curve,
                     line_curve, vertical_profile)
from .errors import CpdGeoError, ExpressionError, SceneError
from .fields import ConformalField, WarpedProduct
from .polyline import Polyline
from .transnormal import CircleBase, LineBase, TransnormalSpec, transnormal_from_distance
from .verify import (DEFAULT_TOLERANCES, ReportEntry, ResidualReport, VerifyConfig,
                     check_angle_constancy, check_gradient_norm_on_levels,
                     check_principal_direction, check_T_geodesic)

CHECK_NAMES = ("principal_direction", "angle_constancy", "t_geodesic",
               "gradient_norm_levels", "mean_curvature", "eikonal")

_CHECK_TO_ENTRY = {
    "principal_direction": "1_principal_direction",
    "angle_constancy": "2_angle_constancy",
    "t_geodesic": "3_T_geodesic",
}


@dataclass
class SceneConfig:
    name: str
    ambient: WarpedProduct
    field: ConformalField
    surface: object                 # ParametricImmersion (graph or sweep)
    graph: GraphFunction            # None unless the construction is a graph
    transnormal_spec: object        # None unless the construction is transnormal
    checks: list
    tolerances: dict
    target_H: float
    mesh_path: str
    report_path: str
    grid: tuple
    base_dir: str = "."


def _get(section, key, kind=None, default=KeyError, where=""):
    if key not in section:
        if default is KeyError:
            raise SceneError("missing required key", field=f"{where}{key}")
        return default
    val = section[key]
    if kind is not None and not isinstance(val, kind):
        raise SceneError(f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}",
                         field=f"{where}{key}")
    return val


def _expression(text, variables, field_name):
    from .expr import parse_expression
    try:
        e = parse_expression(text)
    except ExpressionError as exc:
        raise SceneError(f"malformed expression: {exc}", field=field_name) from None
    unknown = e.free_variables() - set(variables)
    if unknown:
        raise SceneError(f"expression uses unknown variables {sorted(unknown)}",
                         field=field_name)
    return e


def load_scene(path):
    """Parse and validate a scene file; raises SceneError on any defect."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise SceneError(f"scene file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise SceneError(f"scene file does not parse: {exc}") from None
    if not isinstance(raw, dict):
        raise SceneError("scene file must hold a mapping of sections")
    return build_scene(raw, base_dir=os.path.dirname(os.path.abspath(path)),
                       name=os.path.splitext(os.path.basename(path))[0])


def build_scene(raw, base_dir=".", name="scene"):
    ambient = _build_ambient(raw.get("ambient", {}))
    conf_field = _build_field(raw.get("field", {}), ambient)
    construction = _get(raw, "construction", dict)
    kinds = [k for k in ("profile", "transnormal", "graph") if k in construction]
    if len(kinds) != 1:
        raise SceneError(f"exactly one construction required, found {kinds or 'none'}",
                         field="construction")
    surface, graph, tspec = _build_construction(
        kinds[0], construction[kinds[0]], ambient, conf_field, base_dir)

    checks_sec = raw.get("checks", {}) or {}
    names = _get(checks_sec, "names", list, default=[], where="checks.")
    for n in names:
        if n not in CHECK_NAMES:
            raise SceneError(f"unknown check {n!r}; known: {', '.join(CHECK_NAMES)}",
                             field="checks.names")
    tols = _get(checks_sec, "tolerances", dict, default={}, where="checks.")
    target_H = float(_get(checks_sec, "target_H", (int, float), default=0.0, where="checks."))

    out = raw.get("output", {}) or {}
    grid = _get(out, "grid", list, default=[51, 51], where="output.")
    if len(grid) != 2 or not all(isinstance(g, int) and g >= 2 for g in grid):
        raise SceneError("grid must be two integers >= 2", field="output.grid")

    return SceneConfig(
        name=name, ambient=ambient, field=conf_field, surface=surface, graph=graph,
        transnormal_spec=tspec, checks=list(names), tolerances=dict(tols),
        target_H=target_H,
        mesh_path=_get(out, "mesh_path", str, default=f"{name}.obj", where="output."),
        report_path=_get(out, "report_path", str, default=f"{name}.report", where="output."),
        grid=(int(grid[0]), int(grid[1])), base_dir=base_dir)


def _build_ambient(sec):
    kind = _get(sec, "kind", str, default="euclidean", where="ambient.")
    dim = int(_get(sec, "dim", int, default=3, where="ambient."))
    interval = _get(sec, "interval", list, default=[-10.0, 10.0], where="ambient.")
    if kind == "euclidean":
        return WarpedProduct.flat(dim - 1, tuple(interval))
    if kind != "warped":
        raise SceneError(f"unknown ambient kind {kind!r}", field="ambient.kind")
    rho_text = _get(sec, "rho", str, where="ambient.")
    e = _expression(rho_text, ("t",), "ambient.rho")
    rho = e.compile(("t",))
    rho_p = e.diff("t").simplify().compile(("t",))
    try:
        return WarpedProduct(tuple(interval), dim - 1, rho=rho, rho_prime=rho_p)
    except ValueError as exc:
        raise SceneError(str(exc), field="ambient.rho") from None


def _build_field(sec, ambient):
    kind = _get(sec, "kind", str, default="warped", where="field.")
    if kind == "constant":
        comp = _get(sec, "components", list, where="field.")
        v = np.asarray(comp, dtype=float)
        if v.size != ambient.dim or np.linalg.norm(v) < 1e-12:
            raise SceneError(f"need a nonzero vector of length {ambient.dim}",
                             field="field.components")
        return ConformalField.constant(v)
    if kind == "radial":
        center = _get(sec, "center", list, default=[0.0] * ambient.dim, where="field.")
        if len(center) != ambient.dim:
            raise SceneError(f"center must have length {ambient.dim}", field="field.center")
        return ConformalField.radial(center)
    if kind == "warped":
        return ambient.field()
    raise SceneError(f"unknown field kind {kind!r}", field="field.kind")


def _build_gamma(sec):
    kind = _get(sec, "kind", str, where="construction.profile.gamma.")
    if kind == "circle":
        return circle_curve(float(sec.get("radius", 1.0)))
    if kind == "ellipse":
        return ellipse_curve(float(sec.get("a", 2.0)), float(sec.get("b", 1.0)))
    if kind == "line":
        return line_curve(length=float(sec.get("length", 2.0)))
    raise SceneError(f"unknown base curve {kind!r}", field="construction.profile.gamma.kind")


def _build_beta(sec):
    kind = _get(sec, "kind", str, where="construction.profile.beta.")
    dom = _get(sec, "domain", list, default=None, where="construction.profile.beta.")
    if kind == "catenary":
        return catenary_profile(tuple(dom) if dom else (-1.2, 1.2))
    if kind == "vertical":
        d = tuple(dom) if dom else (0.0, 2.0)
        return vertical_profile(d[0], d[1], offset=float(sec.get("offset", 0.0)))
    if kind == "expr":
        if dom is None:
            raise SceneError("missing domain", field="construction.profile.beta.domain")
        ef = _expression(_get(sec, "f", str, where="construction.profile.beta."),
                         ("t",), "construction.profile.beta.f")
        eg = _expression(_get(sec, "g", str, where="construction.profile.beta."),
                         ("t",), "construction.profile.beta.g")
        return ProfileCurve(
            ef.compile(("t",)), eg.compile(("t",)), tuple(dom),
            df=ef.diff("t").simplify().compile(("t",)),
            dg=eg.diff("t").simplify().compile(("t",)),
            d2f=ef.diff("t").diff("t").simplify().compile(("t",)),
            d2g=eg.diff("t").diff("t").simplify().compile(("t",)),
            name="expr")
    raise SceneError(f"unknown profile kind {kind!r}", field="construction.profile.beta.kind")


def _build_construction(kind, sec, ambient, conf_field, base_dir):
    if kind == "profile":
        named = sec.get("named")
        if named == "catenoid":
            gamma, beta = circle_curve(1.0), catenary_profile()
        elif named == "cylinder":
            gamma, beta = circle_curve(1.0), vertical_profile(0.0, 2.0)
        elif named == "plane":
            gamma, beta = line_curve(point=(-1.0, 0.0), length=2.0), vertical_profile(0.0, 2.0)
        elif named is not None:
            raise SceneError(f"unknown named surface {named!r}",
                             field="construction.profile.named")
        else:
            gamma = _build_gamma(_get(sec, "gamma", dict, where="construction.profile."))
            beta = _build_beta(_get(sec, "beta", dict, where="construction.profile."))
        try:
            return cpd_surface_r3(gamma, beta), None, None
        except CpdGeoError as exc:
            raise SceneError(str(exc), field="construction.profile") from None

    if kind == "graph":
        dom = _get(sec, "domain", list, where="construction.graph.")
        text = _get(sec, "F", str, where="construction.graph.")
        _expression(text, ("x", "y"), "construction.graph.F")
        F = GraphFunction.from_expression(text, dom)
        return graph_in_warped_product(F, ambient), F, None

    # transnormal
    where = "construction.transnormal."
    b_text = _get(sec, "b", str, where=where)
    eb = _expression(b_text, ("s",), where + "b")
    b = eb.compile(("s",))
    bp = eb.diff("s").simplify().compile(("s",))
    s0 = float(_get(sec, "s0", (int, float), where=where))
    tube = float(_get(sec, "tube", (int, float), where=where))
    dom = _get(sec, "domain", list, where=where)
    side = _get(sec, "side", str, default="positive", where=where)
    if "base_polyline_path" in sec:
        path = os.path.join(base_dir, sec["base_polyline_path"])
        if not os.path.exists(path):
            raise SceneError(f"polyline file not found: {path}",
                             field=where + "base_polyline_path")
        base = Polyline.from_csv(path, closed=bool(sec.get("closed", True)),
                                 normal_side=sec.get("normal_side", "right"))
    else:
        bsec = _get(sec, "base", dict, where=where)
        bkind = _get(bsec, "kind", str, where=where + "base.")
        if bkind == "circle":
            base = CircleBase(float(bsec.get("radius", 1.0)),
                              tuple(bsec.get("center", (0.0, 0.0))))
        elif bkind == "line":
            base = LineBase(tuple(bsec.get("point", (0.0, 0.0))),
                            tuple(bsec.get("normal", (0.0, 1.0))))
        else:
            raise SceneError(f"unknown base kind {bkind!r}", field=where + "base.kind")
    try:
        spec = TransnormalSpec(b=b, s0=s0, base=base, tube=tube, domain=dom,
                               side=side, bp=bp)
        F = transnormal_from_distance(spec)
    except CpdGeoError as exc:
        raise SceneError(str(exc), field="construction.transnormal") from None
    return graph_in_warped_product(F, ambient), F, spec


# ---------------------------------------------------------------------------
# running a scene


def run_checks(scene, grid=None, tol_overrides=None):
    """Run the scene's requested checks and assemble the report."""
    tols = dict(scene.tolerances)
    if tol_overrides:
        tols.update(tol_overrides)
    shape = grid or (33, 33)
    vtols = {}
    for short, entry in _CHECK_TO_ENTRY.items():
        if short in tols:
            vtols[entry] = float(tols[short])
    if "gradient_norm_levels" in tols:
        vtols["4_grad_h_levels"] = float(tols["gradient_norm_levels"])
        vtols["5_grad_F_levels"] = float(tols["gradient_norm_levels"])
    cfg = VerifyConfig(grid=shape, tolerances=vtols, name=scene.name)

    M, X = scene.surface, scene.field
    if isinstance(M, GraphSurface):
        X = M.warped.field()
    axes = M.grid(cfg.grid, cfg.margin)

    entries = []
    for check in scene.checks:
        if check == "principal_direction":
            entries.append(check_principal_direction(M, X, axes, cfg.tol("1_principal_direction")))
        elif check == "angle_constancy":
            entries.append(check_angle_constancy(M, X, axes, cfg.tol("2_angle_constancy")))
        elif check == "t_geodesic":
            entries.append(check_T_geodesic(M, X, axes, cfg.tol("3_T_geodesic")))
        elif check == "gradient_norm_levels":
            entries.extend(check_gradient_norm_on_levels(
                M, X, axes, tol_h=cfg.tol("4_grad_h_levels"), tol_F=cfg.tol("5_grad_F_levels")))
        elif check == "mean_curvature":
            entries.append(_check_mean_curvature(M, axes, scene.target_H,
                                                 float(tols.get("mean_curvature", 1e-6))))
        elif check == "eikonal":
            entries.append(_check_eikonal(scene, axes, float(tols.get("eikonal", DEFAULTS.tol_eik))))
    meta = [("surface", scene.name), ("grid", f"{shape[0]}x{shape[1]}"),
            ("margin", f"{cfg.margin:g}"), ("geodesic_step", f"{cfg.geodesic_step:g}")]
    return ResidualReport(entries, meta)


def _check_mean_curvature(M, axes, target, tol):
    from .immersion import shape_data
    residuals = []
    worst, worst_r = None, -1.0
    for x in axes[0]:
        for y in axes[1]:
            r = abs(shape_data(M, (x, y)).mean_curvature - target)
            residuals.append(r)
            if r > worst_r:
                worst, worst_r = (float(x), float(y)), r
    return ReportEntry.from_residuals("mean_curvature", residuals, worst, tol)


def _check_eikonal(scene, axes, tol):
    from .transnormal import eikonal_residual
    if scene.transnormal_spec is None or scene.graph is None:
        return ReportEntry.skipped("eikonal_residual", "not-a-transnormal-construction", tol)
    stats = eikonal_residual(scene.graph, scene.transnormal_spec.b, axes, tol)
    return ReportEntry.from_residuals(
        "eikonal_residual", list(stats.per_point), stats.worst_point, tol)


def generate_mesh(scene, grid=None):
    """Evaluate the surface on a full grid and return (points, normals, flip)."""
    nu, nv = grid or scene.grid
    M = scene.surface
    dom = M.usable_domain()
    us = np.linspace(dom[0][0], dom[0][1], nu)
    vs = np.linspace(dom[1][0], dom[1][1], nv)
    pts = np.empty((nu, nv, 3))
    nrm = np.empty((nu, nv, 3))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            pts[i, j] = M.point((u, v))
            nrm[i, j] = M.unit_normal((u, v))
    # orient the triangle winding with the stored normal
    mid = (us[nu // 2], vs[nv // 2])
    J = M.partials(mid)
    from .immersion import generalized_cross
    flip = bool(np.dot(generalized_cross(J), M.unit_normal(mid)) < 0.0)
    return pts, nrm, flip
