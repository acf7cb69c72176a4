"""Clone-amplitude algebra at rational fractions (p/q) of the revival
time, and empirical peak detection in computed overlap series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import TimeSeries
from .errors import DomainError
from .serialize import format_float


@dataclass(frozen=True)
class GaussSumTable:
    """Clone coefficients b_r of the quadratic exponential sum at the
    reduced fraction p/q; the table length is the phase period l."""

    p: int
    q: int
    period_l: int
    b: np.ndarray
    reduced_from: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "b", np.asarray(self.b, dtype=complex))

    def amplitudes_mod_q(self) -> np.ndarray:
        """The same coefficients re-indexed on a length-q grid (zeros
        interleave when the period is q/2)."""
        if self.period_l == self.q:
            return self.b.copy()
        out = np.zeros(self.q, dtype=complex)
        out[::2] = self.b
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("r,re,im,abs2\n")
            for r, val in enumerate(self.b):
                fh.write(
                    f"{r},{format_float(val.real)},{format_float(val.imag)},"
                    f"{format_float(abs(val) ** 2)}\n"
                )


def _period(p: int, q: int) -> int:
    if q % 2 == 1:
        return q
    return q // 2 if q % 4 == 0 else q


def gauss_coefficients(p: int, q: int) -> GaussSumTable:
    """b_r = (1/l) sum_k e^{2 pi i (r k / l - p k^2 / q)} by direct
    summation; non-coprime inputs are reduced first and reported."""
    if p <= 0 or q <= 0:
        raise DomainError("p and q must be positive integers")
    reduced_from = None
    g = math.gcd(p, q)
    if g > 1:
        reduced_from = (p, q)
        p, q = p // g, q // g
    l = _period(p, q)
    k = np.arange(l)
    r = np.arange(l)
    phase = np.exp(2j * np.pi * (np.outer(r, k) / l - p * (k**2 % (2 * q)) / q))
    b = phase.sum(axis=1) / l
    # direct summation leaves ~1e-16 dust on entries that vanish exactly
    b[np.abs(b) < 1e-14] = 0.0
    return GaussSumTable(p=p, q=q, period_l=l, b=b, reduced_from=reduced_from)


def clone_structure(p: int, q: int) -> tuple[int, float, float]:
    """(clone count, spacing as a fraction of the classical period,
    peak |A|^2 per clone) at the reduced fraction p/q."""
    if math.gcd(p, q) != 1:
        raise DomainError("p/q must be in lowest terms")
    if q % 2 == 1:
        return q, 1.0 / q, 1.0 / q
    return q // 2, 2.0 / q, 2.0 / q


def resolvable(q: int, delta_n: float) -> bool:
    """Whether order-q clone peaks stand above the dephased background
    1/(delta_n * 2 sqrt(pi))."""
    if q < 1 or delta_n <= 0:
        raise DomainError("require q >= 1 and delta_n > 0")
    if q == 1:
        return True
    peak = 1.0 / q if q % 2 == 1 else 2.0 / q
    return peak > 1.0 / (delta_n * 2.0 * math.sqrt(math.pi))


def verify_recursion(table: GaussSumTable) -> bool:
    """Check b_{r'} = e^{2 pi i (r/l + p/q)} b_r with r' = (r + 2 p l / q)
    mod l, to 1e-12."""
    l, p, q = table.period_l, table.p, table.q
    shift = (2 * p * l) // q
    if (2 * p * l) % q != 0:
        raise DomainError("inconsistent table: 2 p l / q is not an integer")
    for r in range(l):
        rp = (r + shift) % l
        expected = np.exp(2j * np.pi * (r / l + p / q)) * table.b[r]
        if abs(table.b[rp] - expected) > 1e-12:
            return False
    return True


@dataclass(frozen=True)
class PeakReport:
    """Windowed statistics of |A|^2 around (p/q) t_rev, with the clone
    prediction for comparison."""

    p: int
    q: int
    measured_peak: float
    predicted_peak: float
    window_mean: float


def detect_peaks(
    series: TimeSeries, t_cl: float, t_rev: float, max_q: int
) -> list[PeakReport]:
    """Windowed maxima (and means) of |A|^2 in (p/q) t_rev +- t_cl for
    every reduced fraction with q <= max_q whose window the series
    covers."""
    t = series.times
    if len(t) < 3:
        raise DomainError("series too short")
    dt = np.max(np.diff(t))
    if dt > t_cl / 40.0 * (1 + 1e-9):
        raise DomainError("grid too coarse: need >= 40 samples per classical period")
    a2 = series.abs2()
    fractions = sorted(
        {Fraction(p, q) for q in range(1, max_q + 1) for p in range(1, q + 1)}
    )
    reports = []
    for frac in fractions:
        if frac.denominator > max_q:
            continue
        center = float(frac) * t_rev
        lo, hi = center - t_cl, center + t_cl
        if lo < t[0] - 1e-12 or hi > t[-1] + 1e-12:
            continue
        mask = (t >= lo) & (t <= hi)
        if not np.any(mask):
            continue
        _, _, peak = clone_structure(frac.numerator, frac.denominator)
        reports.append(
            PeakReport(
                p=frac.numerator,
                q=frac.denominator,
                measured_peak=float(np.max(a2[mask])),
                predicted_peak=peak,
                window_mean=float(np.mean(a2[mask])),
            )
        )
    return reports
