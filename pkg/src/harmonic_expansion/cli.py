"""Command-line front end.

Examples::

    harmonic-expansion coeffs --p-max 9
    harmonic-expansion eval --family ramanujan --n 1 --r 1
    harmonic-expansion verify --family dtw --n-range 1..200 --r-range 1..8 --format csv
    harmonic-expansion gamma --n 1000 --r 4
    harmonic-expansion decompose --n 10 --r 2

Exit codes: 0 success, 1 usage or guard error, 2 indeterminate cells,
3 violation (or a failed residual check).
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Sequence, TextIO

from .coefficients import d_coefficient, r_closed
from .expansions import (
    HARMONIC_GUARD,
    Family,
    evaluate,
    exact_harmonic,
    gamma_enclosure,
)
from .numerics import (
    CEILING,
    FLOOR,
    PrecisionError,
    floor_log10,
    format_decimal,
    format_rational,
    format_scientific,
)
from .verification import alternating_tail_fraction, decompose_error, sweep, write_sweep_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INDETERMINATE = 2
EXIT_VIOLATION = 3

P_MAX_LIMIT = 200
R_LIMIT = 200
DEFAULT_DIGITS = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def digits_to_bits(digits: int) -> int:
    return math.ceil(digits * 3.322) + 64


def parse_range(text: str) -> range:
    """``a..b`` inclusive."""
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    return range(lo, hi + 1)


def _precision_digits(text: str) -> int:
    value = int(text)
    if not 16 <= value <= 10000:
        raise argparse.ArgumentTypeError("precision must be in [16, 10000] digits")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=_precision_digits, default=DEFAULT_DIGITS,
                        help="working precision in decimal digits (default 64)")
    common.add_argument("--format", choices=("table", "csv"), default="table")

    parser = _Parser(prog="harmonic-expansion", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeffs", parents=[common], help="exact D_p and R_p table")
    p.add_argument("p_max_pos", nargs="?", type=int, metavar="P_MAX")
    p.add_argument("--p-max", type=int, default=None)

    p = sub.add_parser("eval", parents=[common], help="evaluate one partial sum against exact H_n")
    p.add_argument("--family", choices=[f.value for f in Family], default=Family.RAMANUJAN.value)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", "--K", dest="r", type=int, default=1)

    p = sub.add_parser("verify", parents=[common], help="sweep error fractions over a grid")
    p.add_argument("--family", choices=[f.value for f in Family], default=Family.RAMANUJAN.value)
    p.add_argument("--n-range", type=parse_range, required=True)
    p.add_argument("--r-range", type=parse_range, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", default=None, help="also write the CSV report here")

    p = sub.add_parser("gamma", parents=[common], help="enclose Euler's constant")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=3)

    p = sub.add_parser("decompose", parents=[common], help="split the 1/m-series error")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    return parser


def _check_n(n: int) -> None:
    if not 1 <= n <= HARMONIC_GUARD:
        raise UsageError(f"n must be in [1, {HARMONIC_GUARD}], got {n}")


def _check_r(r: int) -> None:
    if not 0 <= r <= R_LIMIT:
        raise UsageError(f"r must be in [0, {R_LIMIT}], got {r}")


def _emit_pairs(pairs: list[tuple[str, str]], fmt: str, out: TextIO) -> None:
    if fmt == "csv":
        out.write(",".join(k for k, _ in pairs) + "\n")
        out.write(",".join(v for _, v in pairs) + "\n")
    else:
        width = max(len(k) for k, _ in pairs)
        for key, value in pairs:
            out.write(f"{key.ljust(width)}  {value}\n")


def cmd_coeffs(p_max: int, fmt: str, out: TextIO) -> int:
    if not 1 <= p_max <= P_MAX_LIMIT:
        raise UsageError(f"p_max must be in [1, {P_MAX_LIMIT}], got {p_max}")
    sep = "," if fmt == "csv" else "\t"
    if fmt == "csv":
        out.write("p,D_p,R_p\n")
    for p in range(1, p_max + 1):
        out.write(sep.join((str(p), format_rational(d_coefficient(p)), format_rational(r_closed(p)))) + "\n")
    return EXIT_OK


def cmd_eval(family: str, n: int, r: int, bits: int, fmt: str, out: TextIO) -> int:
    _check_n(n)
    _check_r(r)
    result = evaluate(family, n, r, precision_bits=bits)
    residual = result.residual()
    passed = abs(residual) < result.next_term_bound
    places = math.floor(bits * 0.30103) - 4
    _emit_pairs(
        [
            ("family", str(result.family)),
            ("n", str(n)),
            ("r", str(r)),
            ("precision_bits", str(bits)),
            ("approximation", result.value.to_decimal(places)),
            ("H_n", format_decimal(exact_harmonic(n), places)),
            ("residual", residual.to_scientific(20)),
            ("next_term", format_scientific(result.next_term, 20)),
            ("next_term_bound", result.next_term_bound.to_scientific(20)),
            ("verdict", "PASS" if passed else "FAIL"),
        ],
        fmt,
        out,
    )
    return EXIT_OK if passed else EXIT_VIOLATION


def cmd_verify(family: str, n_range: range, r_range: range, bits: int, fmt: str, out: TextIO,
               workers: int = 1, output: str | None = None) -> int:
    if len(n_range) == 0 or len(r_range) == 0:
        raise UsageError("n-range and r-range must be non-empty")
    if n_range.start < 1 or n_range[-1] > HARMONIC_GUARD:
        raise UsageError(f"n-range must lie in [1, {HARMONIC_GUARD}]")
    if r_range.start < 0 or r_range[-1] > R_LIMIT:
        raise UsageError(f"r-range must lie in [0, {R_LIMIT}]")
    summary = sweep(family, n_range, r_range, bits, workers=workers)
    if output:
        with open(output, "w", encoding="ascii", newline="") as fh:
            write_sweep_csv(summary, fh)
    if fmt == "csv":
        write_sweep_csv(summary, out)
    else:
        pairs = [
            ("family", family),
            ("n_range", f"{n_range.start}..{n_range[-1]}"),
            ("r_range", f"{r_range.start}..{r_range[-1]}"),
            ("cells", str(len(summary.reports))),
            ("violations", str(len(summary.violations))),
            ("indeterminate", str(len(summary.indeterminate))),
            ("min_theta", summary.min_theta.to_scientific(12)),
            ("max_theta", summary.max_theta.to_scientific(12)),
            ("min_margin", summary.min_margin.to_scientific(12)),
        ]
        pairs += [(f"violation n={n} r={r}", t.to_scientific(12)) for n, r, t in summary.violations]
        _emit_pairs(pairs, fmt, out)
    if summary.violations:
        return EXIT_VIOLATION
    if summary.indeterminate:
        sys.stderr.write(f"{len(summary.indeterminate)} indeterminate cell(s)\n")
        return EXIT_INDETERMINATE
    return EXIT_OK


def _width_places(width: Fraction) -> int:
    """Decimal places that the interval width still resolves."""
    if width <= 0:
        return 30
    return max(1, -floor_log10(width) - 1)


def cmd_gamma(n: int, r: int, bits: int, fmt: str, out: TextIO) -> int:
    _check_n(n)
    _check_r(r)
    enc = gamma_enclosure(n, r, bits)
    width = enc.width().to_fraction()
    places = _width_places(width)
    _emit_pairs(
        [
            ("n", str(n)),
            ("r", str(r)),
            # endpoints rounded outward so the printed interval still encloses gamma
            ("lo", format_decimal(enc.lo.to_fraction(), places + 4, FLOOR)),
            ("hi", format_decimal(enc.hi.to_fraction(), places + 4, CEILING)),
            ("width", format_scientific(width, 6)),
            ("midpoint", format_decimal(enc.midpoint().to_fraction(), places)),
        ],
        fmt,
        out,
    )
    return EXIT_OK


def cmd_decompose(n: int, r: int, bits: int, fmt: str, out: TextIO) -> int:
    _check_n(n)
    _check_r(r)
    dec = decompose_error(n, r, bits)
    alpha = alternating_tail_fraction(n, r, bits)
    _emit_pairs(
        [
            ("n", str(n)),
            ("r", str(r)),
            ("precision_bits", str(dec.precision_used)),
            ("epsilon_r", dec.epsilon_r.to_scientific(30)),
            ("E_r", dec.e_r.to_scientific(30)),
            ("dtw_tail", dec.dtw_tail.to_scientific(30)),
            ("total", dec.total.to_scientific(30)),
            ("direct_residual", dec.direct_residual.to_scientific(30)),
            ("reconciliation_gap", dec.reconciliation_gap().to_scientific(6)),
            ("theta_implied", dec.theta_implied.to_scientific(30)),
            ("alpha_r", alpha.to_scientific(30)),
        ],
        fmt,
        out,
    )
    return EXIT_OK


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    bits = digits_to_bits(args.precision)
    try:
        if args.command == "coeffs":
            p_max = args.p_max if args.p_max is not None else args.p_max_pos
            if p_max is None:
                raise UsageError("coeffs needs --p-max")
            return cmd_coeffs(p_max, args.format, out)
        if args.command == "eval":
            return cmd_eval(args.family, args.n, args.r, bits, args.format, out)
        if args.command == "verify":
            return cmd_verify(args.family, args.n_range, args.r_range, bits, args.format, out,
                              workers=args.workers, output=args.output)
        if args.command == "gamma":
            return cmd_gamma(args.n, args.r, bits, args.format, out)
        return cmd_decompose(args.n, args.r, bits, args.format, out)
    except UsageError as exc:
        sys.stderr.write(f"harmonic-expansion: {exc}\n")
        return EXIT_USAGE
    except PrecisionError as exc:
        hint = f" (try at least {exc.required_bits} bits)" if exc.required_bits else ""
        sys.stderr.write(f"harmonic-expansion: {exc}{hint}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
