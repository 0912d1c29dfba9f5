from __future__ import annotations

import argparse
import json
import logging
import sys

import mpmath

from sphere_det.config import get_settings
from sphere_det.db import ResultStore
from sphere_det.errors import InvalidDimensionError, SphereDetError
from sphere_det.hessians import conjecture_mismatches, conjecture_table
from sphere_det.kernels import alpha_seq_detL_terms, alpha_seq_s3_F, alpha_seq_terms, green_s3_delta, taylor_regular_part
from sphere_det.models import SphereSpec
from sphere_det.regsum import z1_numeric_oracle
from sphere_det.report import AlphaRow, OutputFormat, render_alpha, render_cells
from sphere_det.selftest import run_selftest
from sphere_det.spectral import z1
from sphere_det.tables import refresh_table

logger = logging.getLogger("sphere_det.cli")

ROUTE_TOLERANCE = 1e-8


class UsageError(Exception):
    pass


def odd_dimension(raw: str) -> int:
    try:
        return SphereSpec(int(raw)).n
    except (ValueError, InvalidDimensionError) as exc:
        raise argparse.ArgumentTypeError(f"n must be an odd integer >= 3, got {raw!r}") from exc


def cmd_z1(args: argparse.Namespace) -> int:
    value = z1(SphereSpec(args.n))
    numerator, denominator = value.numerator, value.denominator
    print(f"{numerator}/{denominator}" if denominator != 1 else f"{numerator}")
    print(mpmath.nstr(mpmath.mpf(numerator) / denominator, args.digits))
    return 0


def cmd_tr_inv_laplacian(args: argparse.Namespace) -> int:
    results: dict[str, str] = {}
    if args.route in (None, "kernel"):
        results["kernel"] = str(taylor_regular_part(green_s3_delta(), 0)[0])
    if args.route in (None, "spectral"):
        results["spectral"] = repr(z1_numeric_oracle(SphereSpec(args.n)))
    print(json.dumps(results, indent=2))
    if args.route is None:
        kernel = float(taylor_regular_part(green_s3_delta(), 0)[0])
        spectral = float(results["spectral"])
        if abs(kernel - spectral) > ROUTE_TOLERANCE:
            print(f"routes disagree: kernel {kernel}, spectral {spectral}", file=sys.stderr)
            return 1
    return 0


def cmd_alpha(args: argparse.Namespace) -> int:
    if args.k_max < 0:
        raise UsageError("--k-max must be >= 0")
    if args.functional == "detprime":
        if args.n != 3:
            raise UsageError("the detprime sequence is only available for n = 3")
        terms = alpha_seq_terms(alpha_seq_s3_F(), args.k_max)
    else:
        terms = alpha_seq_detL_terms(args.n, args.k_max)
    rows = [AlphaRow(k, term) for k, term in enumerate(terms)]
    print(render_alpha(rows, OutputFormat(args.format), args.digits))
    return 0


def cmd_conjecture_table(args: argparse.Namespace) -> int:
    if args.k_max < 2:
        raise UsageError("--k-max must be >= 2")
    db_path = args.db or get_settings().db_path
    if db_path:
        cells = refresh_table(ResultStore(db_path), args.n_max, args.k_max, args.workers)
    else:
        cells = conjecture_table(args.n_max, args.k_max, args.workers)
    print(render_cells(cells, OutputFormat(args.format), args.digits))
    mismatches = conjecture_mismatches(cells)
    if mismatches:
        logger.warning("%d cells disagree with the predicted sign pattern", len(mismatches))
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    results = run_selftest(quick=args.quick)
    for result in results:
        print(result.line())
    failed = [result for result in results if not result.ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Exact determinant Hessians and Fourier data on odd spheres")
    parser.add_argument("--verbose", "-v", action="store_true")

    sub = parser.add_subparsers(required=True)

    z1_cmd = sub.add_parser("z1")
    z1_cmd.add_argument("--n", type=odd_dimension, required=True)
    z1_cmd.add_argument("--digits", type=int, default=20)
    z1_cmd.set_defaults(func=cmd_z1)

    tr = sub.add_parser("tr-inv-laplacian")
    tr.add_argument("--n", type=int, choices=[3], default=3)
    tr.add_argument("--route", choices=["spectral", "kernel"])
    tr.set_defaults(func=cmd_tr_inv_laplacian)

    alpha = sub.add_parser("alpha")
    alpha.add_argument("--functional", choices=["detprime", "detL"], required=True)
    alpha.add_argument("--n", type=odd_dimension, default=3)
    alpha.add_argument("--k-max", type=int, default=10)
    alpha.add_argument("--format", choices=[f.value for f in OutputFormat], default="md")
    alpha.add_argument("--digits", type=int, default=20)
    alpha.set_defaults(func=cmd_alpha)

    table = sub.add_parser("conjecture-table")
    table.add_argument("--n-max", type=odd_dimension, default=17)
    table.add_argument("--k-max", type=int, default=20)
    table.add_argument("--format", choices=[f.value for f in OutputFormat], default="md")
    table.add_argument("--digits", type=int, default=20)
    table.add_argument("--db")
    table.add_argument("--workers", type=int)
    table.set_defaults(func=cmd_conjecture_table)

    selftest = sub.add_parser("selftest")
    selftest.add_argument("--quick", action="store_true")
    selftest.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        level = "DEBUG" if args.verbose else get_settings().log_level
        logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except SphereDetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
