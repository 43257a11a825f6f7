"""Constant-mean-curvature machinery.

Profiles (f, g) swept along a base circle of curvature kappa have principal
curvatures lambda = f''/g' and mu = g' kappa / (1 - f kappa); imposing
lambda + mu = H0 (trace convention: the unit cylinder has H = 1, the unit
sphere H = 2) gives the profile ODE integrated here.  Its orbits are the
profiles of the constant-mean-curvature surfaces of revolution: plane,
cylinder, sphere, catenoid, unduloid, nodoid.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import derivatives as der
from .config import DEFAULTS
from .construct import GraphFunction, ProfileSweepSurface, graph_in_warped_product
from .curves import ProfileCurve
from .errors import CpdGeoError
from .fields import WarpedProduct
from .immersion import fundamental_forms, shape_data
from .transnormal import ResidualStats
from .verify import ReportEntry, ResidualReport


def catenary_profile(domain=(-1.2, 1.2)):
    """Arc-length catenary: f(t) = sqrt(1 + t^2) + 1, g(t) = asinh(t).

    Swept along a unit circle this produces the standard catenoid; at t = 0
    the profile sits at (f, g) = (2, 0) with (f', g') = (0, 1) and the two
    principal curvatures are +1 and -1.
    """
    return ProfileCurve(
        lambda t: np.sqrt(1.0 + t * t) + 1.0,
        np.arcsinh,
        domain,
        df=lambda t: t / np.sqrt(1.0 + t * t),
        dg=lambda t: 1.0 / np.sqrt(1.0 + t * t),
        d2f=lambda t: (1.0 + t * t) ** -1.5,
        d2g=lambda t: -t * (1.0 + t * t) ** -1.5,
        name="catenary",
    )


@dataclass
class ProfileSolution:
    """Sampled orbit of the constant-mean-curvature profile ODE."""

    t: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    g: np.ndarray
    gp: np.ndarray
    target_H: float
    base_kappa: float
    classification: str = "unknown"
    focal_stop: bool = False
    turning_stop: bool = False

    def max_unit_speed_violation(self):
        return float(np.abs(self.fp**2 + self.gp**2 - 1.0).max())

    def max_H_violation(self):
        """Max |lambda + mu - H0| along the orbit, from the sampled state."""
        fpp = self.gp * (self.target_H
                         - self.gp * self.base_kappa / (1.0 - self.f * self.base_kappa))
        lam = fpp / self.gp
        mu = self.gp * self.base_kappa / (1.0 - self.f * self.base_kappa)
        return float(np.abs(lam + mu - self.target_H).max())

    def to_profile_curve(self):
        """Cubic-spline interpolant of the orbit as a ProfileCurve."""
        sf = CubicSpline(self.t, self.f)
        sg = CubicSpline(self.t, self.g)
        return ProfileCurve(sf, sg, (float(self.t[0]), float(self.t[-1])),
                            df=sf.derivative(), dg=sg.derivative(),
                            d2f=sf.derivative(2), d2g=sg.derivative(2),
                            name=f"ode-profile[{self.classification}]")

    def write_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write("t,f,fp,g,gp\n")
            for row in zip(self.t, self.f, self.fp, self.g, self.gp):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _ode_rhs(f, fp, H0, kappa):
    gp = np.sqrt(max(1.0 - fp * fp, 0.0))
    mu = gp * kappa / (1.0 - f * kappa)
    return fp, gp * (H0 - mu), gp


def cmc_profile_ode(H0, kappa, f0, fp0, t_range=(-1.0, 1.0), step=1e-3):
    """Integrate the profile ODE f'' = g'(H0 - g' kappa / (1 - f kappa)).

    Initial data (f0, f'0) is posed at t = 0 with g(0) = 0 and g' > 0; the
    orbit is integrated by RK4 over both halves of t_range in the (f, f')
    phase plane, g recovered by quadrature of g' = sqrt(1 - f'^2), so the
    unit-speed constraint holds by construction (f' is clamped to [-1, 1]
    each step).  Integration stops early with a flag when the focal set is
    hit (1 - f kappa -> 0) or the profile turns vertical (|f'| -> 1).
    """
    if abs(fp0) >= 1.0:
        raise ValueError("need |f'(0)| < 1")
    if abs(1.0 - f0 * kappa) < DEFAULTS.eps_focal:
        raise ValueError("initial data on the focal set (1 - f0 kappa = 0)")
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    if t_lo > 0.0 or t_hi < 0.0:
        raise ValueError("t_range must contain the initial time 0")

    def sweep(t_end):
        h = step if t_end > 0 else -step
        n = int(round(abs(t_end) / step))
        ts = [0.0]
        ys = [(float(f0), float(fp0), 0.0)]
        focal = turning = False
        for k in range(n):
            f, fp, g = ys[-1]
            if abs(1.0 - f * kappa) < 1e3 * DEFAULTS.eps_focal:
                focal = True
                break
            if abs(fp) > 1.0 - 1e-10:
                turning = True
                break
            k1 = _ode_rhs(f, fp, H0, kappa)
            k2 = _ode_rhs(f + 0.5 * h * k1[0], fp + 0.5 * h * k1[1], H0, kappa)
            k3 = _ode_rhs(f + 0.5 * h * k2[0], fp + 0.5 * h * k2[1], H0, kappa)
            k4 = _ode_rhs(f + h * k3[0], fp + h * k3[1], H0, kappa)
            f += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            fp += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            g += h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            fp = min(max(fp, -1.0), 1.0)  # keep (f', g') on the unit circle
            ts.append(ts[-1] + h)
            ys.append((f, fp, g))
        return ts, ys, focal, turning

    ts_b, ys_b, focal_b, turn_b = sweep(t_lo)
    ts_f, ys_f, focal_f, turn_f = sweep(t_hi)
    ts = np.array(ts_b[::-1] + ts_f[1:])
    ys = np.array(ys_b[::-1] + ys_f[1:])
    sol = ProfileSolution(
        t=ts, f=ys[:, 0], fp=ys[:, 1], g=ys[:, 2],
        gp=np.sqrt(np.clip(1.0 - ys[:, 1] ** 2, 0.0, None)),
        target_H=float(H0), base_kappa=float(kappa),
        focal_stop=focal_b or focal_f, turning_stop=turn_b or turn_f,
    )
    sol.classification = classify_profile(sol)
    return sol


def classify_profile(sol, tol=1e-6):
    """Label an orbit: plane, cylinder, sphere, catenoid-type, unduloid, nodoid.

    Discriminators: a straight base (kappa = 0) gives planes and right
    circular cylinders; f identically zero is the cylinder fixed point;
    vanishing target H is catenoid-type; orbits matching the circle
    (f - 1/kappa)^2 + (2/H)^2 f'^2 = (2/H)^2 are spheres; otherwise a
    turning point (g' -> 0) separates nodoids from unduloids.
    """
    H0, kappa = sol.target_H, sol.base_kappa
    if abs(kappa) < 1e-12:
        return "plane" if abs(H0) < 1e-12 else "cylinder"
    if np.abs(sol.f).max() < 1e-8:
        return "cylinder"
    if abs(H0) < 1e-12:
        return "catenoid-type"
    R = 2.0 / H0
    sphere_res = np.abs((sol.f - 1.0 / kappa) ** 2 + R * R * sol.fp**2 - R * R).max()
    if sphere_res < max(tol, 1e-6) * R * R:
        return "sphere"
    if sol.focal_stop:
        return "unknown"
    if sol.turning_stop or sol.gp.min() < 1e-6:
        return "nodoid"
    return "unduloid"


# ---------------------------------------------------------------------------
# slice checks on profile sweep surfaces


def slice_curvature_check(M, t_values=None, n_s=64, n_random=100, seed=0,
                          tol_variation=1e-6, tol_split=1e-5):
    """Check the slices (s-curves at fixed t) of a profile sweep surface.

    Per slice: the ambient curvature |c' x c''| / |c'|^3 and the geodesic
    curvature inside the surface must be constant along the slice.  At
    random points, the second fundamental forms of slice-in-ambient,
    slice-in-surface, and surface-in-ambient must satisfy the additive
    splitting, and so must the mean curvature vectors (with the profile
    direction's curvature share subtracted).
    """
    if not isinstance(M, ProfileSweepSurface):
        raise TypeError("slice checks need a profile sweep surface")
    (s_lo, s_hi), (t_lo, t_hi) = M.usable_domain()
    if t_values is None:
        t_values = np.linspace(t_lo, t_hi, 7)[1:-1]
    ss = np.linspace(s_lo, s_hi, n_s)

    amb_spreads, geo_spreads = [], []
    worst_amb = worst_geo = None
    best_amb = best_geo = -1.0
    for t in t_values:
        point, velocity, acceleration = M.slice_curve(t)
        amb_vals, geo_vals = [], []
        for s in ss:
            v = velocity(s)
            a = acceleration(s)
            speed = np.linalg.norm(v)
            amb_vals.append(float(np.linalg.norm(np.cross(v, a)) / speed**3))
            uhat = v / speed
            k_vec = (a - np.dot(a, uhat) * uhat) / speed**2
            w = M.partials((s, t))[1]  # unit profile direction
            geo_vals.append(float(np.dot(k_vec, w)))
        sa = float(max(amb_vals) - min(amb_vals))
        sg = float(max(geo_vals) - min(geo_vals))
        amb_spreads.append(sa)
        geo_spreads.append(sg)
        if sa > best_amb:
            worst_amb, best_amb = (float(t),), sa
        if sg > best_geo:
            worst_geo, best_geo = (float(t),), sg

    rng = np.random.default_rng(seed)
    split2, split10 = [], []
    worst2 = worst10 = None
    best2 = best10 = -1.0
    for _ in range(n_random):
        s = float(rng.uniform(s_lo, s_hi))
        t = float(rng.uniform(t_lo, t_hi))
        point, velocity, acceleration = M.slice_curve(t)
        v = velocity(s)
        a = acceleration(s)
        speed = np.linalg.norm(v)
        uhat = v / speed
        k_vec = (a - np.dot(a, uhat) * uhat) / speed**2   # slice-in-ambient form
        w = M.partials((s, t))[1]
        nu = M.unit_normal((s, t))
        G, B = fundamental_forms(M, (s, t))
        alpha_uu = (B[0, 0] / G[0, 0]) * nu               # surface-in-ambient form
        alpha_t = np.dot(k_vec, w) * w                    # slice-in-surface form
        r2 = float(np.linalg.norm(k_vec - alpha_t - alpha_uu))
        H_vec = float(np.trace(np.linalg.solve(G, B))) * nu
        alpha_TT = (B[1, 1] / G[1, 1]) * nu
        r10 = float(np.linalg.norm(k_vec - (alpha_t + H_vec - alpha_TT)))
        split2.append(r2)
        split10.append(r10)
        if r2 > best2:
            worst2, best2 = (s, t), r2
        if r10 > best10:
            worst10, best10 = (s, t), r10

    entries = [
        ReportEntry.from_residuals("slice_ambient_curvature_variation",
                                   amb_spreads, worst_amb, tol_variation),
        ReportEntry.from_residuals("slice_geodesic_curvature_variation",
                                   geo_spreads, worst_geo, tol_variation),
        ReportEntry.from_residuals("splitting_second_form", split2, worst2, tol_split),
        ReportEntry.from_residuals("splitting_mean_curvature", split10, worst10, tol_split),
    ]
    return ResidualReport(entries, [("surface", M.name), ("n_slices", str(len(t_values)))])


# ---------------------------------------------------------------------------
# graphs over a flat base


def mean_curvature_at(F, x):
    """Mean curvature (trace convention) of the graph of F over a flat base.

    Equals minus the divergence of grad F / sqrt(1 + |grad F|^2): positive
    for caps curving away from the base (round sphere of radius R: 2/R).
    """
    g = F.gradient(x)
    Hf = F.hessian(x)
    W2 = 1.0 + float(g @ g)
    return float((g @ Hf @ g - W2 * np.trace(Hf)) / W2**1.5)


def graph_mean_curvature(F, grid_axes):
    """Field of graph mean curvatures over a tensor grid."""
    xs, ys = grid_axes
    return np.array([[mean_curvature_at(F, np.array([x, y])) for y in ys] for x in xs])


def bochner_residual(F, grid_axes, tol=None):
    """Pointwise residual of the standard gradient-Laplacian identity

        1/2 Laplacian |grad F|^2 = |Hess F|^2 + <grad F, grad Laplacian F>

    on a flat base (the base Ricci term vanishes).  Symbolic derivatives
    are used when F carries an expression; otherwise both sides come from
    nested finite differences, with a wider outer step.
    """
    xs, ys = grid_axes
    if F.expr is not None and F.variables is not None:
        e, vs = F.expr, F.variables
        grads = [e.diff(v) for v in vs]
        G_expr = None
        for g in grads:
            term = g * g
            G_expr = term if G_expr is None else G_expr + term
        lap_G = None
        for v in vs:
            term = G_expr.diff(v).diff(v)
            lap_G = term if lap_G is None else lap_G + term
        lap_F = None
        for g, v in zip(grads, vs):
            term = g.diff(v)
            lap_F = term if lap_F is None else lap_F + term
        hess_fns = [[grads[i].diff(vs[j]).compile(vs) for j in range(len(vs))]
                    for i in range(len(vs))]
        lhs_fn = lap_G.compile(vs)
        grad_fns = [g.compile(vs) for g in grads]
        glap_fns = [lap_F.diff(v).compile(vs) for v in vs]

        def residual(p):
            lhs = 0.5 * lhs_fn(*p)
            hs = sum(hess_fns[i][j](*p) ** 2 for i in range(len(vs)) for j in range(len(vs)))
            cross = sum(grad_fns[i](*p) * glap_fns[i](*p) for i in range(len(vs)))
            return abs(lhs - hs - cross)
    else:
        h_out = 10.0 * F.fd_step

        def grad_sq(p):
            g = F.gradient(p)
            return float(g @ g)

        def residual(p):
            lhs = 0.0
            for i in range(len(p)):
                ei = np.zeros(len(p))
                ei[i] = 1.0
                lhs += der.numerical_derivative(lambda s: grad_sq(p + s * ei), 0.0, 2, h_out)
            lhs *= 0.5
            Hf = F.hessian(p)
            rhs = float(np.sum(Hf * Hf)) + float(F.gradient(p) @ F.grad_laplacian(p))
            return abs(lhs - rhs)

    vals = []
    worst, worst_r = None, -1.0
    for x in xs:
        for y in ys:
            r = float(residual(np.array([x, y])))
            vals.append(r)
            if r > worst_r:
                worst, worst_r = (float(x), float(y)), r
    vals = np.asarray(vals)
    if tol is None:
        tol = DEFAULTS.tol_num if F.expr is not None else 1e-4
    return ResidualStats(max=float(vals.max()), mean=float(vals.mean()),
                         worst_point=worst, n_points=vals.size, tol=tol, per_point=vals)


# ---------------------------------------------------------------------------
# the constant-angle dichotomy


@dataclass
class DichotomyReport:
    """Outcome of the eikonal + constant-Laplacian rigidity check.

    When |grad F| and Laplacian F are both constant on the grid (within
    tol_hypothesis), the Hessian must vanish, the graph's second
    fundamental form must vanish (totally geodesic), and the unit
    projection T of the vertical field must be parallel.  Over a flat base
    the totally geodesic and cylinder conclusions overlap (a plane is also
    a cylinder over a line); the verdict reports the measurement, not the
    case split.
    """

    hypothesis_met: bool
    grad_norm_spread: float
    laplacian_spread: float
    verdict: str
    max_hessian: float = float("nan")
    max_second_form: float = float("nan")
    max_T_parallel: float = float("nan")
    note: str = ""

    def render(self):
        lines = [
            f"hypothesis_met\t{str(self.hypothesis_met).lower()}",
            f"grad_norm_spread\t{self.grad_norm_spread:.9e}",
            f"laplacian_spread\t{self.laplacian_spread:.9e}",
            f"max_hessian\t{self.max_hessian:.9e}",
            f"max_second_form\t{self.max_second_form:.9e}",
            f"max_T_parallel\t{self.max_T_parallel:.9e}",
            f"verdict\t{self.verdict}",
        ]
        if self.note:
            lines.append(f"note\t{self.note}")
        return "\n".join(lines) + "\n"


def dichotomy_check(F, grid_axes, tol_hypothesis=1e-6, tol_flat=1e-6):
    """Check the rigidity of constant-angle CMC graphs over a flat base.

    The hypotheses (constant |grad F|, constant Laplacian) are measured
    first; when violated the report says so with the measured spreads and
    performs no further checks.
    """
    xs, ys = grid_axes
    pts = [np.array([x, y]) for x in xs for y in ys]
    gnorms = np.array([float(np.linalg.norm(F.gradient(p))) for p in pts])
    laps = np.array([F.laplacian(p) for p in pts])
    g_spread = float(gnorms.max() - gnorms.min())
    l_spread = float(laps.max() - laps.min())
    if g_spread > tol_hypothesis or l_spread > tol_hypothesis:
        return DichotomyReport(
            hypothesis_met=False, grad_norm_spread=g_spread, laplacian_spread=l_spread,
            verdict="hypothesis-not-met",
            note="|grad F| or Laplacian F is not constant on the grid")

    max_hess = max(float(np.linalg.norm(F.hessian(p))) for p in pts)
    W = WarpedProduct.flat(F.dim)
    M = graph_in_warped_product(F, W)
    max_second = max(float(np.linalg.norm(fundamental_forms(M, p)[1])) for p in pts)

    c = float(gnorms.mean())
    if c < 1e-12:
        max_par = 0.0
        note = "grad F = 0: the graph is a horizontal slice"
    else:
        def T_field(p):
            g = F.gradient(p)
            return np.concatenate([[c * c], g]) / (c * np.sqrt(1.0 + c * c))

        max_par = 0.0
        for p in pts:
            Jt = der.fd_jacobian(T_field, p, 1e-5, richardson=True)
            max_par = max(max_par, float(np.linalg.norm(Jt)))
        note = ("flat base: the totally geodesic and cylinder conclusions overlap "
                "(a plane is a cylinder over a line)")

    ok = max_hess <= tol_flat and max_second <= tol_flat and max_par <= tol_flat
    return DichotomyReport(
        hypothesis_met=True, grad_norm_spread=g_spread, laplacian_spread=l_spread,
        verdict="totally-geodesic" if ok else "nonflat-despite-hypotheses",
        max_hessian=max_hess, max_second_form=max_second, max_T_parallel=max_par,
        note=note)
