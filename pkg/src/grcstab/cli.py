"""Command-line entry point: ``grcstab`` / ``python -m grcstab``."""
from __future__ import annotations

import argparse
import logging
import sys

from .harness import RunSpec, run


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="grcstab",
        description="Compare BiCGSTAB and GRC-BiCGSTAB on a sparse linear system.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", metavar="PATH", help="Matrix Market coordinate file")
    src.add_argument("--problem", choices=["pde1", "toeplitz"], help="generated problem")
    p.add_argument("--nx", type=int, default=5, help="pde1 interior points per axis (n = nx^3)")
    p.add_argument("--conv", type=float, default=1000.0, help="pde1 convection coefficient")
    p.add_argument("--n", type=int, default=100, help="toeplitz dimension")
    p.add_argument("--stencil", help='toeplitz stencil "offset:value,..."')
    p.add_argument("--rhs", help="'ones' (b = A*1) or a vector file; default: problem's own")
    p.add_argument("--solver", choices=["bicgstab", "grc-bicgstab", "both"], default="both")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--theta", type=float, default=0.5, help="inner BiCGSTAB threshold")
    p.add_argument("--window", type=int, default=5, help="GRC window parameter j")
    p.add_argument("--max-outer", type=int, default=500)
    p.add_argument("--max-inner", type=int, default=None, help="inner cap (default 2n)")
    p.add_argument("--max-iters", type=int, default=None,
                   help="standalone BiCGSTAB cap (default 10n)")
    p.add_argument("--shadow", choices=["r0", "random"], default="r0")
    p.add_argument("--alpha", choices=["paper", "minres"], default="minres")
    p.add_argument("--absolute", action="store_true",
                   help="stop on ||r|| < tol instead of ||r||/||r0|| < tol")
    p.add_argument("--out", metavar="DIR", default="results")
    p.add_argument("--seed", type=int, default=0, help="seed for --shadow random")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = vars(args)
    opts.pop("verbose")
    try:
        spec = RunSpec(**opts)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        report = run(spec)
    except (OSError, ValueError) as exc:
        print(f"grcstab: error: {exc}", file=sys.stderr)
        return 2
    print(report.table)
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
