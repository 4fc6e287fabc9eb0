"""Measured error fractions and the error decomposition of the 1/m series.

For a family with first omitted term T, the error fraction is

    theta = (H_n - partial_sum_r) / T

and the expansion is an asymptotic series in the strict sense at (n, r)
exactly when 0 < theta < 1.  H_n is exact; the only rounded inputs are the
log term and gamma, so the residual carries at most 3 ulp and theta at most
3 ulp / |T| + 1/2 ulp.  The working precision is raised until |T| is at
least 2**96 ulp, which keeps that error far below the 2**-32 decision band.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, TextIO

from .coefficients import log_coefficient, r_closed, reexpansion_coefficient
from .expansions import (
    Family,
    _neg_log2,
    algebraic_partial_sum,
    eval_ramanujan,
    exact_harmonic,
    gamma_value,
    hp_ln,
    log_part,
    next_term,
)
from .numerics import DEFAULT_PRECISION, HighPrecisionReal, rational_to_real

DECISION_BAND = Fraction(1, 2**32)
HEADROOM_BITS = 96
MAX_DOUBLINGS = 2

INSIDE = "inside"
VIOLATION = "violation"
INDETERMINATE = "indeterminate"

CSV_HEADER = ("family", "n", "r", "theta", "margin", "classification")
CSV_DIGITS = 30


def working_precision(term: Fraction, precision_bits: int) -> int:
    """Precision at which ``term`` is still >= 2**HEADROOM_BITS ulp."""
    return max(precision_bits, _neg_log2(term) + HEADROOM_BITS)


def classify(theta: Fraction | HighPrecisionReal) -> tuple[str, Fraction]:
    """(classification, signed margin) for a measured fraction.

    margin = min(theta, 1 - theta): positive inside (0, 1), negative
    outside.  |margin| <= 2**-32 is undecided.
    """
    if isinstance(theta, HighPrecisionReal):
        theta = theta.to_fraction()
    margin = min(theta, 1 - theta)
    if abs(margin) <= DECISION_BAND:
        return INDETERMINATE, margin
    return (INSIDE if margin > 0 else VIOLATION), margin


@dataclass(frozen=True)
class ThetaReport:
    family: Family
    n: int
    r: int
    theta: HighPrecisionReal
    in_open_unit_interval: bool | None  # None: undecided even at the highest precision tried
    margin: HighPrecisionReal
    precision_used: int
    classification: str

    @property
    def indeterminate(self) -> bool:
        return self.classification == INDETERMINATE


def _theta_at(family: Family, n: int, r: int, precision_bits: int) -> HighPrecisionReal:
    term = next_term(family, n, r)
    rational = exact_harmonic(n) - algebraic_partial_sum(family, n, r)
    residual = (
        rational_to_real(rational, precision_bits)
        - log_part(family, n, precision_bits)
        - gamma_value(precision_bits)
    )
    return residual.mul(1 / term)


def theta(family: Family | str, n: int, r: int, precision_bits: int = DEFAULT_PRECISION) -> ThetaReport:
    """Error fraction of the r-term partial sum at n.

    Re-runs at doubled precision (twice at most) while theta sits within
    2**-32 of 0 or 1.
    """
    family = Family(family)
    work = working_precision(next_term(family, n, r), precision_bits)
    for attempt in range(MAX_DOUBLINGS + 1):
        value = _theta_at(family, n, r, work)
        label, margin = classify(value)
        if label != INDETERMINATE or attempt == MAX_DOUBLINGS:
            break
        work *= 2
    return ThetaReport(
        family=family,
        n=n,
        r=r,
        theta=value,
        in_open_unit_interval=None if label == INDETERMINATE else label == INSIDE,
        margin=rational_to_real(margin, work),
        precision_used=work,
        classification=label,
    )


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class ErrorDecomposition:
    n: int
    r: int
    epsilon_r: HighPrecisionReal
    e_r: HighPrecisionReal
    dtw_tail: HighPrecisionReal
    total: HighPrecisionReal
    direct_residual: HighPrecisionReal
    theta_implied: HighPrecisionReal
    precision_used: int

    def reconciliation_gap(self) -> HighPrecisionReal:
        return abs(self.total - self.direct_residual)


def _log_tail(m: int, r: int, precision_bits: int) -> HighPrecisionReal:
    """(1/2) ln(1 + 1/(8m)) minus its first r series terms."""
    half_log = hp_ln(rational_to_real(Fraction(8 * m + 1, 8 * m), precision_bits)).mul(Fraction(1, 2))
    partial = sum((log_coefficient(l) / Fraction(m) ** l for l in range(1, r + 1)), Fraction(0))
    return half_log - rational_to_real(partial, precision_bits)


def decompose_error(n: int, r: int, precision_bits: int = DEFAULT_PRECISION) -> ErrorDecomposition:
    """Split H_n - (r-term 1/m series) into log tail, re-expansion tail and half-integer tail.

    e_r is the difference between the half-integer partial sum and its
    re-expansion truncated at 1/m^r, taken exactly in rationals.
    """
    family = Family.RAMANUJAN
    term = next_term(family, n, r)
    work = working_precision(term, precision_bits)
    m = n * (n + 1) // 2
    gamma = gamma_value(work)

    epsilon = _log_tail(m, r, work)
    dtw_partial = algebraic_partial_sum(Family.DTW, n, r)
    reexpanded = sum((reexpansion_coefficient(q) / Fraction(m) ** q for q in range(1, r + 1)), Fraction(0))
    e_r = rational_to_real(dtw_partial - reexpanded, work)
    dtw_tail = rational_to_real(exact_harmonic(n) - dtw_partial, work) - log_part(Family.DTW, n, work) - gamma
    total = epsilon + e_r + dtw_tail

    direct = eval_ramanujan(n, r, gamma, work).residual()
    return ErrorDecomposition(
        n=n,
        r=r,
        epsilon_r=epsilon,
        e_r=e_r,
        dtw_tail=dtw_tail,
        total=total,
        direct_residual=direct,
        theta_implied=total.mul(1 / term),
        precision_used=work,
    )


def alternating_tail_fraction(n: int, r: int, precision_bits: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    """epsilon_r divided by the first omitted log-series term.

    The log series alternates with decreasing terms, so this lies in (0, 1).
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    m = n * (n + 1) // 2
    first = log_coefficient(r + 1) / Fraction(m) ** (r + 1)
    work = working_precision(first, precision_bits)
    return _log_tail(m, r, work).mul(1 / first)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepSummary:
    family: Family
    n_range: range
    r_range: range
    reports: list[ThetaReport] = field(default_factory=list)
    violations: list[tuple[int, int, HighPrecisionReal]] = field(default_factory=list)
    indeterminate: list[tuple[int, int, HighPrecisionReal]] = field(default_factory=list)
    min_margin: HighPrecisionReal | None = None
    max_theta: HighPrecisionReal | None = None
    min_theta: HighPrecisionReal | None = None

    @property
    def ok(self) -> bool:
        return not self.violations and not self.indeterminate

    def add(self, report: ThetaReport) -> None:
        self.reports.append(report)
        cell = (report.n, report.r, report.theta)
        if report.classification == VIOLATION:
            self.violations.append(cell)
        elif report.classification == INDETERMINATE:
            self.indeterminate.append(cell)
        if self.min_margin is None or report.margin < self.min_margin:
            self.min_margin = report.margin
        if self.max_theta is None or report.theta > self.max_theta:
            self.max_theta = report.theta
        if self.min_theta is None or report.theta < self.min_theta:
            self.min_theta = report.theta


def _theta_cell(args: tuple[str, int, int, int]) -> ThetaReport:
    return theta(*args)


def sweep(
    family: Family | str,
    n_range: Iterable[int],
    r_range: Iterable[int],
    precision_bits: int = DEFAULT_PRECISION,
    workers: int = 1,
) -> SweepSummary:
    """theta over the grid n_range x r_range.

    Cells are independent; with ``workers > 1`` they run in a process pool.
    Reports are kept in (n, r) order either way.
    """
    family = Family(family)
    n_range, r_range = range_of(n_range), range_of(r_range)
    cells = [(family.value, n, r, precision_bits) for n in n_range for r in r_range]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_theta_cell, cells, chunksize=16))
    else:
        reports = [_theta_cell(c) for c in cells]
    summary = SweepSummary(family, n_range, r_range)
    for report in reports:
        summary.add(report)
    return summary


def range_of(values: Iterable[int]) -> range:
    if isinstance(values, range):
        return values
    values = list(values)
    if not values:
        return range(0)
    lo, hi = min(values), max(values)
    if values != list(range(lo, hi + 1)):
        raise ValueError("ranges must be contiguous and ascending")
    return range(lo, hi + 1)


def write_sweep_csv(summary: SweepSummary, out: TextIO) -> None:
    """CSV rows ``family,n,r,theta,margin,classification`` (LF endings)."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rep in summary.reports:
        writer.writerow(
            (
                rep.family.value,
                rep.n,
                rep.r,
                rep.theta.to_scientific(CSV_DIGITS),
                rep.margin.to_scientific(CSV_DIGITS),
                rep.classification,
            )
        )


def sweep_csv(summary: SweepSummary) -> str:
    buf = io.StringIO()
    write_sweep_csv(summary, buf)
    return buf.getvalue()


def reclassify_csv(text: str) -> list[tuple[str, int, int, str, str]]:
    """Re-derive classifications from the theta/margin columns of a sweep CSV.

    Returns (family, n, r, printed, recomputed) per row.
    """
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        label, margin = classify(Fraction(row["theta"]))
        printed_margin = Fraction(row["margin"])
        if abs(printed_margin) <= DECISION_BAND:
            from_margin = INDETERMINATE
        else:
            from_margin = INSIDE if printed_margin > 0 else VIOLATION
        recomputed = label if label == from_margin else f"{label}/{from_margin}"
        rows.append((row["family"], int(row["n"]), int(row["r"]), row["classification"], recomputed))
    return rows
