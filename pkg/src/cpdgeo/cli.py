"""Command-line front door.

Subcommands: generate (scene -> mesh + report), verify (scene -> report),
profile (constant-mean-curvature profile ODE -> CSV + classification),
transnormal (scene -> level-set CSVs + eikonal report).

Exit codes: 0 all requested checks pass, 1 a check failed, 2 input error.
"""

import argparse
import os
import sys

from .errors import CpdGeoError, SceneError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def _parse_tols(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise SceneError(f"--tol expects NAME=VALUE, got {item!r}")
        name, val = item.split("=", 1)
        try:
            out[name] = float(val)
        except ValueError:
            raise SceneError(f"--tol {name}: {val!r} is not a number") from None
    return out


def _add_common(p):
    p.add_argument("scene", help="scene config file (YAML sections)")
    p.add_argument("--grid", nargs=2, type=int, metavar=("NU", "NV"),
                   help="check-grid override")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                   help="tolerance override (repeatable)")
    p.add_argument("--report", help="report path override")


def cmd_generate(args):
    from .objio import export_obj
    from .scene import generate_mesh, load_scene, run_checks

    scene = load_scene(args.scene)
    mesh_path = args.out or os.path.join(scene.base_dir, scene.mesh_path)
    report_path = args.report or os.path.join(scene.base_dir, scene.report_path)
    pts, nrm, flip = generate_mesh(scene)
    nverts, nfaces = export_obj(pts, mesh_path, normals=nrm, flip_faces=flip)
    report = run_checks(scene, grid=tuple(args.grid) if args.grid else None,
                        tol_overrides=_parse_tols(args.tol))
    report.write(report_path)
    print(f"mesh: {mesh_path} ({nverts} vertices, {nfaces} faces)")
    print(f"report: {report_path}")
    sys.stdout.write(report.render())
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def cmd_verify(args):
    from .scene import load_scene, run_checks

    scene = load_scene(args.scene)
    report = run_checks(scene, grid=tuple(args.grid) if args.grid else None,
                        tol_overrides=_parse_tols(args.tol))
    report_path = args.report or os.path.join(scene.base_dir, scene.report_path)
    report.write(report_path)
    sys.stdout.write(report.render())
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def cmd_profile(args):
    from .cmc import cmc_profile_ode

    try:
        sol = cmc_profile_ode(args.H, args.kappa, args.f0, args.fp0,
                              t_range=(-args.t_max, args.t_max), step=args.step)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.out:
        sol.write_csv(args.out)
        print(f"csv: {args.out} ({sol.t.size} samples)")
    if sol.focal_stop:
        print("warning: orbit stopped at the focal set (partial data)")
    if sol.turning_stop:
        print("warning: profile turned vertical (partial data)")
    print(f"classification: {sol.classification}")
    return EXIT_OK


def cmd_transnormal(args):
    from .polyline import write_polyline_csv
    from .scene import load_scene, run_checks
    from .transnormal import level_set_extract

    scene = load_scene(args.scene)
    if scene.transnormal_spec is None or scene.graph is None:
        raise SceneError("scene does not hold a transnormal construction",
                         field="construction")
    if "eikonal" not in scene.checks:
        scene.checks.append("eikonal")
    report = run_checks(scene, grid=tuple(args.grid) if args.grid else None,
                        tol_overrides=_parse_tols(args.tol))
    report_path = args.report or os.path.join(scene.base_dir, scene.report_path)
    report.write(report_path)

    out_dir = args.out_dir or scene.base_dir
    os.makedirs(out_dir, exist_ok=True)
    F = scene.graph
    axes = F.grid((args.grid[0], args.grid[1]) if args.grid else (101, 101))
    if args.levels:
        levels = [float(tok) for tok in args.levels.split(",")]
    else:
        import numpy as np
        vals = [F.value(np.array([x, y])) for x in axes[0] for y in axes[1]]
        lo, hi = min(vals), max(vals)
        levels = [lo + q * (hi - lo) for q in (0.25, 0.5, 0.75)]
    n_written = 0
    for k, c in enumerate(levels):
        for m, poly in enumerate(level_set_extract(F, c, axes)):
            path = os.path.join(out_dir, f"level_{k}_{m}.csv")
            write_polyline_csv(path, poly)
            n_written += 1
    print(f"levels: {n_written} polylines in {out_dir}")
    sys.stdout.write(report.render())
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def build_parser():
    ap = argparse.ArgumentParser(prog="cpdgeo", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a scene: mesh + residual report")
    _add_common(g)
    g.add_argument("--out", help="mesh path override")
    g.set_defaults(fn=cmd_generate)

    v = sub.add_parser("verify", help="run a scene's checks without writing a mesh")
    _add_common(v)
    v.set_defaults(fn=cmd_verify)

    p = sub.add_parser("profile", help="integrate a constant-mean-curvature profile")
    p.add_argument("--H", type=float, required=True, help="target mean curvature (trace)")
    p.add_argument("--kappa", type=float, required=True, help="base-circle curvature")
    p.add_argument("--f0", type=float, required=True)
    p.add_argument("--fp0", type=float, required=True)
    p.add_argument("--t-max", type=float, default=1.0, dest="t_max")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out", help="CSV output path (t,f,fp,g,gp)")
    p.set_defaults(fn=cmd_profile)

    t = sub.add_parser("transnormal", help="level sets + eikonal report of a scene")
    _add_common(t)
    t.add_argument("--levels", help="comma-separated level values")
    t.add_argument("--out-dir", dest="out_dir", help="directory for level CSVs")
    t.set_defaults(fn=cmd_transnormal)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except CpdGeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
