"""``whirl-lab`` command line: build, analyze and verify whirl curves.

Datasets default to CSV, reports (analyze, verify) to JSON. Every JSON
document is ``{"meta": {...}, "data": {...}}`` where ``meta`` records the
flags, library versions and seed, and nothing time dependent, so equal
flags give byte-identical output.
"""
import argparse
import os
import platform
import sys

import numpy as np

from . import __version__
from . import io as wio
from .constructor import (WhirlParams, build_tangent, example_legendre_helix,
                          example_non_legendre, integrate_curve)
from .errors import EmptyDomain, GeodesicPoint, TooFewSamples, WhirlLabError
from .frames import (KAPPA_MIN, SOURCES, frame_identities, frenet_apparatus, reeb_identities,
                     verify_frenet)
from .magnetic import MagneticParams, check_magnetic_whirl, integrate_magnetic, unit_velocity
from .nullcurves import NullProfile, evaluate_profile, profile_identities, verify_null_system
from .suites import SUITES, run_suites
from .whirl import (THRESHOLDS, assess, legendre_torsion_check, torsion_ode_residual,
                    u_form_residual, whirl_identities)

EXIT_OK, EXIT_ERROR, EXIT_TRUNCATED = 0, 1, 2


def _meta(args, **extra):
    flags = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items())
             if k not in ("func", "output")}
    meta = {
        "command": args.command,
        "flags": flags,
        "versions": {"whirl_lab": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "seed": getattr(args, "seed", None),
    }
    meta.update(extra)
    return meta


def _fail(exc):
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


def _frames_or_none(series):
    try:
        return frenet_apparatus(series)
    except TooFewSamples:
        return None


def _emit_dataset(args, series, frames, **meta):
    cols = wio.series_columns(series, frames)
    with wio.open_output(args.output) as out:
        if args.format == "json":
            wio.write_json(out, _meta(args, source=series.source, **meta), cols)
        else:
            wio.write_csv(out, cols)


# -- subcommands -----------------------------------------------------------

def cmd_construct(args):
    try:
        params = WhirlParams(rho=args.rho, lambda0=args.lambda0, eps1=args.eps1, eps2=args.eps2,
                             v0=args.v0, beta0=args.beta0, branch=args.branch,
                             s_start=args.s_start, s_end=args.s_end, step=args.step,
                             origin=tuple(args.origin))
        field = build_tangent(params)
    except EmptyDomain as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TRUNCATED
    except (WhirlLabError, ValueError) as exc:
        return _fail(exc)
    series = integrate_curve(field)
    _emit_dataset(args, series, _frames_or_none(series), truncated_at=field.truncated_at)
    if field.truncated_at is not None:
        print(f"warning: Q < 0 from s = {field.truncated_at:.17g}; dataset truncated",
              file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_example(args):
    try:
        if args.name == "legendre-helix":
            kw = {"R": args.R, "omega": args.omega, "step": args.step or 1e-3}
            if args.s_start is not None:
                kw["s_start"] = args.s_start
            if args.s_end is not None:
                kw["s_end"] = args.s_end
            series = example_legendre_helix(**kw)
        else:
            lo = 0.0 if args.s_start is None else args.s_start
            hi = 1.0 if args.s_end is None else args.s_end
            series = example_non_legendre((lo, hi), args.step or 1e-4, branch=args.branch)
    except (WhirlLabError, ValueError) as exc:
        return _fail(exc)
    _emit_dataset(args, series, _frames_or_none(series))
    return EXIT_OK


def analyze_series(series, rho=None, tol=None, kappa_min=KAPPA_MIN):
    """Full analysis document for a curve: assessment plus every residual report."""
    frames = frenet_apparatus(series, kappa_min)
    res = assess(series, frames, tol)
    reports = verify_frenet(series, frames) + reeb_identities(series, frames) \
        + frame_identities(series, frames)
    doc = {
        "source": series.source,
        "n_samples": len(series),
        "n_frenet": len(frames),
        "excluded": dict(frames.excluded),
        "causal": {"eps1": int(frames.eps1[0]), "eps2": int(frames.eps2[0]),
                   "eps3": int(frames.eps3[0])},
        "kappa": {"min": float(np.min(frames.kappa)), "max": float(np.max(frames.kappa))},
        "tau": {"min": float(np.min(frames.tau)), "max": float(np.max(frames.tau))},
        "assessment": res.to_dict(),
        "thresholds": dict(THRESHOLDS),
        "legendre": None,
        "rho_used": None,
    }
    if res.is_legendre:
        check = legendre_torsion_check(series, frames, legendre_tol=res.tol)
        doc["legendre"] = {"ok": check.ok, "tau": check.tau_report.to_dict(),
                           "eta_B": check.eta_B_report.to_dict()}
    else:
        rho_use = rho if rho is not None else res.rho_hat
        if rho_use is not None:
            doc["rho_used"] = rho_use
            reports += [torsion_ode_residual(series, frames, rho_use),
                        u_form_residual(series, frames, rho_use),
                        *whirl_identities(series, frames, rho_use)]
    doc["residuals"] = {r.name: r.to_dict() for r in reports}
    return doc


def cmd_analyze(args):
    try:
        series = wio.read_series(args.input, args.source)
        doc = analyze_series(series, args.rho, args.tol, args.kappa_min)
    except (WhirlLabError, ValueError, OSError) as exc:
        return _fail(exc)
    with wio.open_output(args.output) as out:
        wio.write_report(out, _meta(args), doc, args.format)
    return EXIT_OK


def cmd_magnetic(args):
    try:
        if args.velocity is not None:
            t0 = tuple(args.velocity)
        else:
            t0 = unit_velocity(args.v0, args.angle, args.eps1)
        params = MagneticParams(args.q, t0, tuple(args.origin), args.s_start, args.s_end,
                                args.step)
        series = integrate_magnetic(params)
        try:
            frames = frenet_apparatus(series)
        except GeodesicPoint:
            # q = 0 with a horizontal start: a geodesic, no Frenet data.
            frames = report = None
        else:
            report = check_magnetic_whirl(series, frames)
    except (WhirlLabError, ValueError) as exc:
        return _fail(exc)
    _emit_dataset(args, series, frames, initial_velocity=list(t0),
                  whirl=report.to_dict() if report else None)
    return EXIT_OK


def cmd_null_profile(args):
    try:
        prof = NullProfile(args.k, args.rho, args.delta, (args.s_start, args.s_end, args.samples))
    except ValueError as exc:
        return _fail(exc)
    st = evaluate_profile(prof)
    reports = verify_null_system(st, prof) + profile_identities(st, prof)
    cols = {"s": st.s, "x": st.x, "y": st.y, "z": st.z, "tau": st.tau,
            "dx": prof.dx(st.s), "dy": prof.dy(st.s), "dz": prof.dz(st.s)}
    with wio.open_output(args.output) as out:
        if args.format == "json":
            wio.write_json(out, _meta(args, residuals={r.name: r.max_abs for r in reports}), cols)
        else:
            wio.write_csv(out, cols)
    worst = max(r.max_abs for r in reports)
    if worst > args.tol:
        print(f"error: profile residual {worst:.3e} exceeds {args.tol:g}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_verify(args):
    names = SUITES if not args.suite or "all" in args.suite else \
        tuple(s for s in SUITES if s in args.suite)
    results = run_suites(names, seed=args.seed, tolerance=args.tolerance,
                         grid_size=args.grid_size)
    failures = [f"{suite}.{c.name}" for suite, checks in results.items()
                for c in checks if not c.passed]
    data = {
        "passed": not failures,
        "failures": failures,
        "suites": {suite: [c.to_dict() for c in checks] for suite, checks in results.items()},
    }
    with wio.open_output(args.output) as out:
        wio.write_report(out, _meta(args), data, args.format)
    if failures:
        print("failed: " + ", ".join(failures), file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _sign(text):
    value = int(text)
    if value not in (1, -1):
        raise argparse.ArgumentTypeError("must be 1 or -1")
    return value


def _output_flags(p, default_format):
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def build_parser():
    parser = argparse.ArgumentParser(prog="whirl-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a non-Legendre whirl curve by quadratures")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--lambda0", type=float, required=True)
    p.add_argument("--eps1", type=_sign, default=1)
    p.add_argument("--eps2", type=_sign, default=1)
    p.add_argument("--v0", type=float, default=1.0)
    p.add_argument("--beta0", type=float, default=0.0)
    p.add_argument("--branch", type=_sign, default=1, help="sign in front of sqrt(Q)")
    p.add_argument("--s-start", type=float, default=0.0)
    p.add_argument("--s-end", type=float, default=1.0)
    p.add_argument("--step", type=_positive, default=1e-4)
    p.add_argument("--origin", type=float, nargs=3, default=[0.0, 0.0, 0.0])
    _output_flags(p, "csv")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("example", help="emit one of the worked example curves")
    p.add_argument("--name", choices=("legendre-helix", "non-legendre"), required=True)
    p.add_argument("--R", type=float, default=1.0, help="helix radius")
    p.add_argument("--omega", type=float, default=1.0, help="helix angular rate")
    p.add_argument("--branch", type=_sign, default=1)
    p.add_argument("--s-start", type=float, default=None)
    p.add_argument("--s-end", type=float, default=None)
    p.add_argument("--step", type=_positive, default=None)
    _output_flags(p, "csv")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("analyze", help="Frenet data, whirl test and residuals of a dataset")
    p.add_argument("input", help="CSV or JSON dataset")
    p.add_argument("--source", choices=SOURCES, default=None,
                   help="provenance, sets default tolerances (JSON meta or 'integrated')")
    p.add_argument("--rho", type=float, default=None,
                   help="whirl constant for the torsion ODE (default: fitted rho_hat)")
    p.add_argument("--tol", type=_positive, default=None, help="whirl/Legendre tolerance")
    p.add_argument("--kappa-min", type=_positive, default=KAPPA_MIN)
    _output_flags(p, "json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("magnetic", help="integrate a contact magnetic trajectory")
    p.add_argument("--q", type=float, required=True, help="charge; 0 gives a geodesic")
    p.add_argument("--v0", type=float, default=0.0, help="Reeb component of T(0)")
    p.add_argument("--angle", type=float, default=0.0, help="horizontal direction of T(0)")
    p.add_argument("--eps1", type=_sign, default=1, help="causal character of T")
    p.add_argument("--velocity", type=float, nargs=3, default=None,
                   help="explicit frame components of T(0), overrides --v0/--angle")
    p.add_argument("--s-start", type=float, default=0.0)
    p.add_argument("--s-end", type=float, default=10.0)
    p.add_argument("--step", type=_positive, default=1e-4)
    p.add_argument("--origin", type=float, nargs=3, default=[0.0, 0.0, 0.0])
    _output_flags(p, "csv")
    p.set_defaults(func=cmd_magnetic)

    p = sub.add_parser("null-profile", help="evaluate a closed-form null whirl profile")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--delta", type=_sign, required=True)
    p.add_argument("--s-start", type=float, default=0.0)
    p.add_argument("--s-end", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--tol", type=_positive, default=1e-10)
    _output_flags(p, "csv")
    p.set_defaults(func=cmd_null_profile)

    p = sub.add_parser("verify", help="run the seeded identity battery")
    p.add_argument("--suite", action="append", choices=(*SUITES, "all"), default=None,
                   help="suite to run, repeatable (default: all)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=None,
                   help="override every residual tolerance")
    p.add_argument("--grid-size", type=int, default=16, help="number of null profiles")
    _output_flags(p, "json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "s_end", None) is not None and getattr(args, "s_start", None) is not None \
            and not args.s_end > args.s_start:
        return _fail(ValueError("s_range must be non-degenerate (s_end > s_start)"))
    try:
        return args.func(args)
    except BrokenPipeError:
        # Reader went away (e.g. piped into head); stop quietly.
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
