"""Command line entry point: ``fene2d <subcommand> ...``.

Exit status is 0 on success, 1 when a run aborts or a check fails and 2 on
usage errors (argparse's own convention).
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..configspace import FeneParams, build_basis
from .config import ConfigError, load_config
from .runner import EXIT_FAIL, EXIT_OK, EXIT_USAGE

log = logging.getLogger("fene2d")


def _cmd_simulate(args) -> int:
    from .runner import run_simulation

    rc = load_config(args.config)
    res = run_simulation(rc, args.out)
    if res.status != EXIT_OK:
        print(res.message, file=sys.stderr)
    else:
        print(f"wrote {len(res.rows)} samples to {args.out}")
    return res.status


def _cmd_heat_baseline(args) -> int:
    from .runner import heat_baseline

    rc = load_config(args.config)
    res = heat_baseline(rc, args.out)
    print(f"wrote {len(res.rows)} samples to {args.out}")
    return res.status


def _cmd_gap(args) -> int:
    from ..fokker_planck import spectral_gap

    lam = spectral_gap(build_basis(FeneParams(args.k, args.nr, 2)))
    ref = spectral_gap(build_basis(FeneParams(args.k, args.nr + 8, 2)))
    print(f"lambda1={lam:.12g} delta={abs(ref - lam):.3e}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from . import suites

    if args.suite == "decay":
        mass = suites.MassLog()
        checks = suites.check_algebraic_decay(mass, args.tier) + [mass.check()]
    else:
        checks = suites.run_suite(args.suite)
    for c in checks:
        print(c.line(), flush=True)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def _cmd_fit(args) -> int:
    from ..analysis.fits import decay_fit, exp_fit
    from .io import read_series

    cols = read_series(args.csv)
    if args.col not in cols or "t" not in cols:
        print(f"column {args.col!r} not found; have {', '.join(cols)}", file=sys.stderr)
        return EXIT_USAGE
    fit = (decay_fit if args.model == "power" else exp_fit)(cols["t"], cols[args.col], (args.t0, args.t1))
    if args.model == "power":
        print(f"exponent={fit.exponent:.4f} r2={fit.r2:.4f}")
    else:
        print(f"rate={fit.rate:.4f} r2={fit.r2:.4f}")
    return EXIT_OK


def _cmd_besov(args) -> int:
    from ..analysis.dyadic import besov_b011, dyadic_family, l1_norm
    from ..fluid import TorusGrid
    from .io import load_checkpoint

    ck = load_checkpoint(args.checkpoint)
    c = ck.config
    grid = TorusGrid(c.nx, c.ny, c.L)
    uh = np.array(ck.uh)
    b = besov_b011(uh, dyadic_family(grid)) if np.any(uh) else 0.0
    print(f"t={ck.t:.6g} besov_b011={b:.10g} l1={l1_norm(grid, grid.to_physical(uh)):.10g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fene2d", description="2D co-rotation FENE dumbbell laboratory")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("simulate", help="run the coupled model from a config file")
    s.add_argument("config")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=_cmd_simulate)

    s = sub.add_parser("heat-baseline", help="linear heat flow of the configured initial velocity")
    s.add_argument("config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_heat_baseline)

    s = sub.add_parser("gap", help="spectral gap of the Fokker-Planck operator")
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--nr", type=int, required=True)
    s.set_defaults(func=_cmd_gap)

    from .suites import SUITES

    s = sub.add_parser("verify", help="run a named property suite")
    s.add_argument("--suite", required=True, choices=sorted(SUITES))
    s.add_argument("--tier", choices=("reduced", "full"), default="reduced",
                   help="grid tier for the decay suite")
    s.set_defaults(func=_cmd_verify)

    s = sub.add_parser("fit", help="fit a decay law to a series.csv column")
    s.add_argument("--csv", required=True)
    s.add_argument("--col", required=True)
    s.add_argument("--t0", type=float, required=True)
    s.add_argument("--t1", type=float, required=True)
    s.add_argument("--model", choices=("power", "exp"), default="power")
    s.set_defaults(func=_cmd_fit)

    s = sub.add_parser("besov", help="homogeneous B^0_{1,1} and L1 norms of a checkpoint velocity")
    s.add_argument("--checkpoint", required=True)
    s.set_defaults(func=_cmd_besov)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE if isinstance(e, ConfigError) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
