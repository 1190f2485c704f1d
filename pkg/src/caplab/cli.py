"""Command-line front end: ``caplab {solve|sweep|dual|spectrum|verify|figure1}``.

Exit codes: 0 success, 1 failed verification or other library error,
2 no contact / unreachable radius, 3 singular neck, 4 spectral truncation
too small.  Outputs are assembled in memory and written atomically, so
a failing command leaves no partial files.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .dual import dual_surface
from .errors import (
    AssemblyError,
    CaplabError,
    NoContactError,
    SingularityError,
    StepFailure,
    TruncationError,
)
from .figures import write_figure1
from .rotational import (
    DEFAULT_T_MAX,
    DEFAULT_TOL,
    default_sweep_grid,
    find_capillary_boundary,
    find_free_boundary,
    integrate_profile,
    solve_for_radius,
    sweep_family,
)
from .spectral import index_nullity, make_problem
from .surface import build_annulus, build_catenoid
from .verify import SUITES, run_suites, suite_seed

log = logging.getLogger("caplab")

EXIT_OK, EXIT_FAIL, EXIT_NO_CONTACT, EXIT_SINGULAR, EXIT_TRUNCATION = 0, 1, 2, 3, 4


def _manifest(args, command: str, **kw) -> io.RunManifest:
    echo = {k: v for k, v in vars(args).items() if k != "func"}
    return io.RunManifest(command, echo, **kw)


def _finish(out: Path, manifest: io.RunManifest, files) -> None:
    for path, schema in files:
        manifest.add_output(path, schema, out)
    io.write_manifest(out, manifest)


def _build_from_args(args):
    if getattr(args, "catenoid", False):
        return None, build_catenoid(args.n_t, args.n_s)
    if args.target_R is not None:
        profile, contact = solve_for_radius(args.target_R, args.branch, args.tol, args.t_max)
    else:
        profile = integrate_profile(args.r0, args.t_max, args.tol)
        if args.t_b is not None:
            contact = find_capillary_boundary(profile, args.t_b)
        else:
            contact = find_free_boundary(profile)
    return profile, build_annulus(profile, contact, args.n_t, args.n_s)


def cmd_solve(args) -> int:
    profile, surface = _build_from_args(args)
    with io.staged_output(args.out) as out:
        files = []
        if profile is not None:
            files.append((io.write_profile_csv(out / "profile.csv", profile), "profile.csv"))
        csv_path, json_path = io.write_surface(out / "surface", surface)
        files += [(csv_path, "lattice.csv"), (json_path, "lattice.json")]
        contact = surface.contact.to_dict()
        contact["r0"] = None if profile is None else profile.r0
        files.append((io.write_json(out / "contact.json", contact), "json"))
        tol = {"integrator": args.tol}
        _finish(out, _manifest(args, "solve", tolerances=tol, residuals=surface.meta), files)
    print(f"R = {surface.R:.12f}  gamma = {surface.gamma:.12f}  t_plus = {surface.contact.t_plus:.12f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = default_sweep_grid(args.n)
    res = sweep_family(grid, args.t_max, args.tol)
    summary = {"R_bar": res.R_bar, "r0_bar": res.r0_bar, "exceeds_half_pi": res.exceeds_half_pi}
    with io.staged_output(args.out) as out:
        path = io.write_sweep_csv(out / "sweep.csv", res)
        m = _manifest(args, "sweep", tolerances={"integrator": args.tol}, residuals=summary)
        _finish(out, m, [(path, "sweep.csv")])
    print(f"R_bar = {res.R_bar:.10f} at r0 = {res.r0_bar:.6f}; exceeds pi/2: {res.exceeds_half_pi}")
    return EXIT_OK


def cmd_dual(args) -> int:
    if args.surface:
        surface = io.load_surface(args.surface)
        base_hash = io.sha256_file(Path(args.surface))
    else:
        _, surface = _build_from_args(args)
    dual = dual_surface(surface)
    with io.staged_output(args.out) as out:
        files = []
        if not args.surface:
            c, j = io.write_surface(out / "base", surface)
            files = [(c, "lattice.csv"), (j, "lattice.json")]
            base_hash = io.sha256_file(j)
        header = {
            "contact": dual.dual_params.to_dict(),
            "base_sha256": base_hash,
            "residuals": dual.meta,
            "measured_radius": dual.measured_radius(),
        }
        c, j = io.write_lattice(out / "dual", dual.t, dual.s, dual.points, dual.normals, header)
        files += [(c, "lattice.csv"), (j, "lattice.json")]
        _finish(out, _manifest(args, "dual", residuals=dual.meta), files)
    p = dual.dual_params
    print(f"dual R = {p.R:.12f}  gamma = {p.gamma:.12f}  epsilon = {p.epsilon}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    if args.builtin == "catenoid":
        surface = build_catenoid(256, 32)
    elif args.builtin == "clifford":
        profile = integrate_profile(1 / np.sqrt(2))
        surface = build_annulus(profile, find_free_boundary(profile))
    else:
        surface = io.load_surface(args.surface)
    problem = make_problem(surface, args.form, args.modes, args.nodes)
    report = index_nullity(problem)
    text = io.dumps_json(report.to_dict())
    if args.out:
        io.atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    log.info("ind=%d nul=%d ind0=%d", report.ind, report.nul, report.ind0)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = suite_seed(args.seed)
    result = run_suites(args.suite, seed)
    text = io.dumps_json(result)
    if args.out:
        io.atomic_write_text(args.out, text)
    for chk in result["checks"]:
        print(f"{chk['verdict']:4s}  {chk['check']}  fine={chk['residuals']['fine']:.3e}")
    if not result["passed"]:
        print(f"first failing check: {result['first_failure']}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_figure1(args) -> int:
    start = time.perf_counter()
    with io.staged_output(args.out) as out:
        index = write_figure1(out)
        files = [(out / p["file"], "svg") for p in index["panels"]] + [(out / "index.json", "json")]
        m = _manifest(args, "figure1", residuals={"seconds": round(time.perf_counter() - start, 3)})
        _finish(out, m, files)
    for p in index["panels"]:
        print(f"{p['file']}: R = {p['R']:.6f}")
    return EXIT_OK


def _surface_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--r0", type=float, help="neck radius r(0)")
    g.add_argument("--target-R", type=float, help="solve for the neck reaching this cap radius")
    g.add_argument("--catenoid", action="store_true", help="critical catenoid in the unit ball")
    p.add_argument("--branch", choices=("pre", "post"), default="pre",
                   help="family branch for --target-R (before or after the largest radius)")
    p.add_argument("--t-b", type=float, default=None, help="capillary truncation parameter")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--t-max", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--n-t", type=int, default=256)
    p.add_argument("--n-s", type=int, default=32)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="caplab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="integrate a profile and truncate it")
    _surface_args(p)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="free-boundary radius along a grid of necks")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--t-max", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dual", help="polar dual of a surface")
    _surface_args(p, required=False)
    p.add_argument("--surface", type=Path, help="lattice JSON header written by solve")
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("spectrum", help="index and nullity of an index form")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--surface", type=Path, help="lattice JSON header written by solve")
    g.add_argument("--builtin", choices=("clifford", "catenoid"))
    p.add_argument("--form", choices=("QS", "QA"), default="QS")
    p.add_argument("--modes", type=int, default=8, help="Fourier truncation K")
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run property suites at two resolutions")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--seed", type=int, default=0, help="overridden by CAPLAB_SEED")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure1", help="profile curves of five annuli and their duals")
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_figure1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="caplab: %(message)s")
    if args.command == "dual" and not args.surface and args.r0 is None \
            and args.target_R is None and not args.catenoid:
        parser.error("dual needs --surface, --r0, --target-R or --catenoid")
    try:
        return args.func(args)
    except NoContactError as exc:
        print(f"caplab: no contact: {exc}", file=sys.stderr)
        return EXIT_NO_CONTACT
    except (SingularityError, StepFailure) as exc:
        print(f"caplab: singular profile: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except TruncationError as exc:
        print(f"caplab: truncation: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (AssemblyError, CaplabError) as exc:
        print(f"caplab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
