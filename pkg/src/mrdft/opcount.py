"""Closed-form operation counts for the fast transform and its baseline."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import OpCounter, make_plan, mrdft_fast

REPORT_MAX_M = 30


@dataclass(frozen=True)
class IterationRow:
    i: int
    mults: int
    nontrivial: int
    adds: int


@dataclass(frozen=True)
class ComplexityReport:
    m: int
    rows: tuple[IterationRow, ...]
    total_mults: int
    total_nontrivial: int
    total_adds: int
    baseline_mults: int
    ratio: Fraction

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "rows": [vars(r) for r in self.rows],
            "total_mults": self.total_mults,
            "total_nontrivial": self.total_nontrivial,
            "total_adds": self.total_adds,
            "baseline_mults": self.baseline_mults,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "ratio_float": float(self.ratio),
        }


def _check(m: int, i: int) -> None:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 1 <= i <= m:
        raise ValueError(f"iteration {i} out of range [1, {m}]")


def _exact(numerator: int, shift: int) -> int:
    # numerator * 2**shift, where shift may be negative but the result is integral
    if shift >= 0:
        return numerator << shift
    q, r = divmod(numerator, 1 << -shift)
    if r:
        raise ArithmeticError(f"{numerator} * 2**{shift} is not an integer")
    return q


@lru_cache(maxsize=1)
def _instrumented_m1() -> IterationRow:
    # the closed forms carry a 2**(m-2) factor that is fractional at m=1
    counter = OpCounter()
    mrdft_fast(np.zeros(2), make_plan(1), counter)
    (_, mults, nontrivial, adds), = counter.rows(1)
    return IterationRow(1, mults, nontrivial, adds)


def mults_iter(m: int, i: int) -> int:
    """Complex multiplications in iteration ``i``, trivial twiddles included."""
    _check(m, i)
    if m == 1:
        return _instrumented_m1().mults
    return (i + 1) << (m - 2)


def nontrivial_iter(m: int, i: int) -> int:
    """Multiplications in iteration ``i`` by twiddles other than 1 and -j."""
    _check(m, i)
    if m == 1:
        return _instrumented_m1().nontrivial
    return 0 if i == 1 else (i - 2) << (m - 2)


def adds_iter(m: int, i: int) -> int:
    _check(m, i)
    if m == 1:
        return _instrumented_m1().adds
    return 2 * mults_iter(m, i)


def total_mults(m: int) -> int:
    return _exact(m * (m + 3), m - 3)


def total_nontrivial(m: int) -> int:
    return _exact((m - 1) * (m - 2), m - 3)


def baseline_mults(m: int) -> int:
    """Per-level independent FFT: ``i * 2**(m-1)`` per level, summed."""
    return _exact(m * (m + 1), m - 2)


def savings_ratio(m: int) -> Fraction:
    return Fraction(m + 3, 2 * (m + 1))


def report(m: int) -> ComplexityReport:
    if not 1 <= m <= REPORT_MAX_M:
        raise ValueError(f"m must be in the interval [1, {REPORT_MAX_M}], got {m}")
    rows = tuple(
        IterationRow(i, mults_iter(m, i), nontrivial_iter(m, i), adds_iter(m, i))
        for i in range(1, m + 1)
    )
    total = sum(r.mults for r in rows)
    baseline = baseline_mults(m)
    return ComplexityReport(
        m=m,
        rows=rows,
        total_mults=total,
        total_nontrivial=sum(r.nontrivial for r in rows),
        total_adds=sum(r.adds for r in rows),
        baseline_mults=baseline,
        ratio=Fraction(total, baseline),
    )
