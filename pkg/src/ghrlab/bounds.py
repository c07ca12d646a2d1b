"""Concentration-bound calculators with exact binomial oracles.

Every tail calculator returns a value capped into [0, 1].  The one lower
bound (binomial_window_lower) may go negative by design; its additive
constant is calibrated once against the exact window oracle and shipped as
DEFAULT_WINDOW_C.  The exact oracles sum binomial coefficients as integers,
so dominance checks against them carry no float-summation risk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .bitkit import Rng
from .util import map_trials

# Calibrated over even m in [50, 500] and all windows inside m/2 +- sqrt(m):
# the smallest nonnegative c with main - cubic - c/m <= exact everywhere.
# The grid search (calibrate_window_lower_c) maxes out at -4.02/m, i.e. the
# two leading terms already sit below the exact mass, so no correction is
# needed; 0.0 is kept rather than a negative value so the constant can only
# tighten the bound off-grid.
DEFAULT_WINDOW_C = 0.0


def markov_chebyshev_bound(kind: str, moment: float, t: float) -> float:
    """First/second-moment tail bound: moment/t or moment/t**2, capped at 1."""
    if t <= 0:
        raise ValueError("t must be positive")
    if moment < 0:
        raise ValueError("moment must be nonnegative")
    if kind == "markov":
        raw = moment / t
    elif kind == "chebyshev":
        raw = moment / (t * t)
    else:
        raise ValueError(f"kind must be 'markov' or 'chebyshev', got {kind!r}")
    return min(1.0, raw)


def hoeffding_bound(ranges: Iterable[tuple[float, float]], t: float) -> float:
    """Two-sided bounded-differences tail 2*exp(-2 t**2 / sum (b-a)**2)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    denom = 0.0
    for a, b in ranges:
        if b < a:
            raise ValueError(f"invalid range ({a}, {b})")
        denom += (b - a) ** 2
    if denom == 0.0:
        return 0.0 if t > 0 else 1.0
    return min(1.0, 2.0 * math.exp(-2.0 * t * t / denom))


def relaxed_chernoff_bound(
    side: str,
    a: float | None = None,
    t: float | None = None,
    form: str = "exp",
    m: float | None = None,
    mu: float | None = None,
    level: float | None = None,
) -> float:
    """Chernoff-style tail for a sum of [0,1] summands whose running
    conditional means stay below a (exp form) or mu (ratio form).

    exp form: lower tail exp(-t**2 / 2a), upper tail exp(-t**2 / (2a + t)).
    ratio form: (mu/level)**level * ((m-mu)/(m-level))**(m-level), with
    level >= mu on the upper side and level <= mu on the lower side.
    """
    if side not in ("lower_tail", "upper_tail"):
        raise ValueError(f"side must be 'lower_tail' or 'upper_tail', got {side!r}")
    if form == "exp":
        if a is None or t is None:
            raise ValueError("exp form needs a and t")
        if a < 0 or t < 0:
            raise ValueError("a and t must be nonnegative")
        if t == 0:
            return 1.0
        if a == 0:
            # degenerate mean cap: the lower tail is impossible to miss by
            # t > 0, the upper denominator stays positive through t
            return 0.0 if side == "lower_tail" else min(1.0, math.exp(-t))
        if side == "lower_tail":
            return min(1.0, math.exp(-t * t / (2.0 * a)))
        return min(1.0, math.exp(-t * t / (2.0 * a + t)))
    if form == "ratio":
        if m is None or mu is None or level is None:
            raise ValueError("ratio form needs m, mu, level")
        if not 0 <= mu <= m:
            raise ValueError(f"mu={mu} outside [0, {m}]")
        if side == "upper_tail" and not mu <= level <= m:
            raise ValueError(f"upper level {level} outside [{mu}, {m}]")
        if side == "lower_tail" and not 0 <= level <= mu:
            raise ValueError(f"lower level {level} outside [0, {mu}]")
        value = _ratio_power(mu, level, level) * _ratio_power(m - mu, m - level, m - level)
        return min(1.0, value)
    raise ValueError(f"form must be 'exp' or 'ratio', got {form!r}")


def _ratio_power(num: float, den: float, expo: float) -> float:
    """(num/den)**expo with the 0**0 = 1 convention used by the ratio form."""
    if expo == 0:
        return 1.0
    if num == 0:
        return 0.0
    if den == 0:
        raise ValueError("zero denominator with nonzero exponent")
    return math.exp(expo * (math.log(num) - math.log(den)))


@lru_cache(maxsize=1024)
def _fair_cumulative(m: int) -> tuple[int, ...]:
    """cum[k] = sum_{i <= k} C(m, i) as exact integers."""
    acc = 0
    out = []
    for k in range(m + 1):
        acc += math.comb(m, k)
        out.append(acc)
    return tuple(out)


def exact_binomial_window(m: int, a: int, b: int) -> Fraction:
    """P[a <= X <= b] for X ~ Binomial(m, 1/2), exactly."""
    if not 0 <= a <= b <= m:
        raise ValueError(f"window [{a}, {b}] invalid for m={m}")
    cum = _fair_cumulative(m)
    hits = cum[b] - (cum[a - 1] if a > 0 else 0)
    return Fraction(hits, 1 << m)


def exact_binomial_deviation(m: int, t) -> Fraction:
    """P[|X - m/2| >= t] for fair X, exactly; t may be fractional."""
    if m < 1:
        raise ValueError("m must be >= 1")
    th = Fraction(t)
    if th <= 0:
        return Fraction(1)
    lo = math.floor(Fraction(m, 2) - th)
    hi = math.ceil(Fraction(m, 2) + th)
    total = Fraction(0)
    if lo >= 0:
        total += exact_binomial_window(m, 0, lo)
    if hi <= m:
        total += exact_binomial_window(m, hi, m)
    return total


def binomial_window_lower(m: int, a: int, b: int, c_term: float = DEFAULT_WINDOW_C) -> float:
    """Closed-form lower bound on the fair binomial window [a, b].

    sqrt(2/pi m)(b - a) - sqrt(8/(9 pi m**3))((b - m/2)**3 - (a - m/2)**3)
    - c_term/m.  Requires even m and 0 <= a < b <= m; may be negative."""
    if m < 2 or m % 2:
        raise ValueError(f"m must be even and >= 2, got {m}")
    if not 0 <= a < b <= m:
        raise ValueError(f"window [{a}, {b}] invalid for m={m}")
    half = m / 2.0
    main = math.sqrt(2.0 / (math.pi * m)) * (b - a)
    cubic = math.sqrt(8.0 / (9.0 * math.pi * m**3)) * ((b - half) ** 3 - (a - half) ** 3)
    return main - cubic - c_term / m


def calibrate_window_lower_c(m_values: Sequence[int] = tuple(range(50, 501, 2))) -> float:
    """Smallest nonnegative c such that binomial_window_lower(m, a, b, c)
    never exceeds the exact window, over all windows inside m/2 +- sqrt(m)
    of the given m.  Clamped at zero: the correction only ever tightens.
    """
    worst = 0.0
    for m in m_values:
        cum = _fair_cumulative(m)
        denom = 1 << m
        root = math.sqrt(m)
        lo = math.ceil(m / 2 - root)
        hi = math.floor(m / 2 + root)
        lo = max(lo, 0)
        hi = min(hi, m)
        for a in range(lo, hi):
            base_cum = cum[a - 1] if a > 0 else 0
            for b in range(a + 1, hi + 1):
                exact = (cum[b] - base_cum) / denom
                gap = (binomial_window_lower(m, a, b, c_term=0.0) - exact) * m
                if gap > worst:
                    worst = gap
    return worst


@dataclass(frozen=True)
class BoundPoint:
    """One grid point of a bound validation."""

    label: str
    bound_value: float
    observed: float
    satisfied: bool


@dataclass(frozen=True)
class BoundReport:
    """A named batch of bound-vs-reference comparisons."""

    description: str
    points: tuple[BoundPoint, ...]

    @property
    def passed(self) -> bool:
        return all(p.satisfied for p in self.points)

    def violations(self) -> tuple[BoundPoint, ...]:
        return tuple(p for p in self.points if not p.satisfied)


def hoeffding_dominance_report(
    m_values: Iterable[int] = range(10, 401), t_max_divisor: int = 4
) -> BoundReport:
    """Exact fair-binomial two-sided tails never exceed the Hoeffding bound."""
    points = []
    for m in m_values:
        ranges = [(0.0, 1.0)] * m
        for t in range(1, m // t_max_divisor + 1):
            exact = float(exact_binomial_deviation(m, t))
            bound = hoeffding_bound(ranges, t)
            points.append(BoundPoint(f"m={m},t={t}", bound, exact, exact <= bound))
    return BoundReport("two-sided binomial tail vs hoeffding_bound", tuple(points))


def chernoff_dominance_report(
    m_values: Iterable[int] = range(10, 401), t_max_divisor: int = 4
) -> BoundReport:
    """Exact one-sided fair-binomial tails never exceed the relaxed Chernoff
    bounds, in both the exp and the ratio form."""
    points = []
    for m in m_values:
        cum = _fair_cumulative(m)
        denom = 1 << m
        mu = m / 2.0
        for t in range(1, m // t_max_divisor + 1):
            k_lo = (m - 2 * t) // 2          # floor(m/2 - t)
            k_hi = (m + 2 * t + 1) // 2      # ceil(m/2 + t)
            exact_lo = (cum[k_lo] if k_lo >= 0 else 0) / denom
            exact_hi = (cum[m] - cum[k_hi - 1]) / denom if k_hi <= m else 0.0
            checks = (
                ("exp_lo", exact_lo, relaxed_chernoff_bound("lower_tail", a=mu, t=t)),
                ("exp_hi", exact_hi, relaxed_chernoff_bound("upper_tail", a=mu, t=t)),
                (
                    "ratio_lo",
                    exact_lo,
                    relaxed_chernoff_bound(
                        "lower_tail", form="ratio", m=m, mu=mu, level=mu - t
                    ),
                ),
                (
                    "ratio_hi",
                    exact_hi,
                    relaxed_chernoff_bound(
                        "upper_tail", form="ratio", m=m, mu=mu, level=mu + t
                    ),
                ),
            )
            for name, exact, bound in checks:
                points.append(
                    BoundPoint(f"{name},m={m},t={t}", bound, exact, exact <= bound)
                )
    return BoundReport("one-sided binomial tails vs relaxed_chernoff_bound", tuple(points))


def window_lower_dominance_report(
    m_values: Sequence[int] = tuple(range(50, 501, 2)), c_term: float | None = None
) -> BoundReport:
    """binomial_window_lower with the calibrated constant stays below the
    exact window on the calibration grid.  One summary point per m, keyed to
    that m's worst window; 1e-12 float slack."""
    c = DEFAULT_WINDOW_C if c_term is None else c_term
    points = []
    for m in m_values:
        cum = _fair_cumulative(m)
        denom = 1 << m
        root = math.sqrt(m)
        lo = max(math.ceil(m / 2 - root), 0)
        hi = min(math.floor(m / 2 + root), m)
        worst_margin = math.inf
        worst_bound = 0.0
        worst_exact = 0.0
        for a in range(lo, hi):
            base_cum = cum[a - 1] if a > 0 else 0
            for b in range(a + 1, hi + 1):
                exact = (cum[b] - base_cum) / denom
                bound = binomial_window_lower(m, a, b, c_term=c)
                if exact - bound < worst_margin:
                    worst_margin = exact - bound
                    worst_bound = bound
                    worst_exact = exact
        points.append(
            BoundPoint(f"m={m}", worst_bound, worst_exact, worst_margin >= -1e-12)
        )
    return BoundReport("exact window vs binomial_window_lower (calibrated)", tuple(points))


def shift_xor_tail_check(
    n: int,
    t_values: Sequence[float],
    trials: int,
    rng: Rng,
    threads: int | None = None,
) -> BoundReport:
    """Empirical deviation tails of |a xor rot_i(a) xor s| around n/2.

    For every shift i in [1, n-1], one random s is fixed and `trials` uniform
    a are sampled from rng.child(i-1); the frequency of deviation >= t is
    compared against min(1, 4*exp(-t**2/2n)) plus three standard errors.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if any(t < 0 for t in t_values):
        raise ValueError("t values must be nonnegative")

    def one_shift(idx: int) -> list[int]:
        child = rng.child(idx)
        gen = child.generator
        s_bits = gen.integers(0, 2, size=n, dtype=np.uint8)
        a = gen.integers(0, 2, size=(trials, n), dtype=np.uint8)
        mixed = a ^ np.roll(a, idx + 1, axis=1) ^ s_bits[None, :]
        dev2 = np.abs(2 * mixed.sum(axis=1, dtype=np.int64) - n)
        return [int(np.count_nonzero(dev2 >= 2 * t)) for t in t_values]

    counts = map_trials(one_shift, n - 1, threads)
    points = []
    for idx, row in enumerate(counts):
        for t, c in zip(t_values, row):
            p_hat = c / trials
            bound = min(1.0, 4.0 * math.exp(-t * t / (2.0 * n)))
            slack = 3.0 * math.sqrt(p_hat * (1.0 - p_hat) / trials)
            points.append(
                BoundPoint(f"i={idx + 1},t={t}", bound, p_hat, p_hat <= bound + slack)
            )
    return BoundReport(
        f"xor-shift deviation tails at n={n}, trials={trials}", tuple(points)
    )


def anticorrelated_expectation_holds(values: Iterable[tuple[float, float]]) -> bool:
    """E_mu[f] <= uniform average of f when mu weights small f-values at
    least as heavily as large ones.

    values: (f(a), mu(a)) pairs over the whole domain.  mu must sum to 1
    within 1e-9 (it is renormalised exactly before comparing) and no pair may
    have f and mu strictly increasing together; violations raise.
    The comparison itself is exact rational arithmetic.
    """
    pairs = [(Fraction(f), Fraction(w)) for f, w in values]
    if not pairs:
        raise ValueError("values must be nonempty")
    if any(w < 0 for _, w in pairs):
        raise ValueError("mu must be nonnegative")
    total = sum(w for _, w in pairs)
    if abs(total - 1) > Fraction(1, 10**9):
        raise ValueError(f"mu sums to {float(total)}, not 1")
    for i in range(len(pairs)):
        fi, wi = pairs[i]
        for fj, wj in pairs[i + 1:]:
            if (fi - fj) * (wi - wj) > 0:
                raise ValueError(
                    "f and mu must be anti-monotone comparable: "
                    f"offending values f={float(fi)},{float(fj)} mu={float(wi)},{float(wj)}"
                )
    e_mu = sum(f * w for f, w in pairs) / total
    e_uniform = sum(f for f, _ in pairs) / len(pairs)
    return e_mu <= e_uniform
