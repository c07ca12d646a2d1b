"""Distance transforms and checkers for the gap-Hamming relation family.

A transformation of an input pair (x, y) in {0,1}^n x {0,1}^n is indexed by a
cyclic shift j in [1, n] and a (log2 n)-bit Walsh selector s;
delta(x, y, (j, s)) is the Hamming distance between sigma_j(tau_s xor x) and
y.  The relation layer works in exact integer arithmetic throughout: a
distance enters as its scaled deviation 2*delta - n, the center window test
is (2*delta - n)**2 <= n, and the typicality predicate compares
9 * statistic <= 4 * n**3 where statistic sums (2*delta - n)**2 over
in-window cells.  Summed over ALL cells that square deviation always equals
n**3 exactly, which the table type exposes for verification.

n must be a power of 4 so that sqrt(n) and log2(n)/2 are integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .bitkit import BitString, Rng, fourier_pattern, random_bitstring
from .util import map_trials


def require_transform_size(n: int) -> None:
    """Reject n that is not 4**k with k >= 1."""
    if n < 4 or n & (n - 1) or (n.bit_length() - 1) % 2:
        raise ValueError(f"n must be a power of 4 and >= 4, got {n}")


def answer_length(n: int) -> int:
    """log2 n, the required number of entries in a relation answer."""
    require_transform_size(n)
    return n.bit_length() - 1


class TransformIndex(NamedTuple):
    """One (shift, selector) pair."""

    j: int
    s: BitString


@dataclass(frozen=True, eq=False)
class DeltaTable:
    """All n**2 transformed distances of one input pair.

    values[j - 1, s.as_unsigned()] = delta(x, y, (j, s)), as int64.
    """

    n: int
    values: np.ndarray

    def entry(self, j: int, s: BitString) -> int:
        if not 1 <= j <= self.n:
            raise ValueError(f"shift {j} outside [1, {self.n}]")
        if s.n != answer_length(self.n):
            raise ValueError(f"selector must have {answer_length(self.n)} bits")
        return int(self.values[j - 1, s.as_unsigned()])

    def scaled_deviations(self) -> np.ndarray:
        """2*delta - n for every cell."""
        return 2 * self.values.astype(np.int64) - self.n

    def parseval_sum(self) -> int:
        """Sum of (2*delta - n)**2 over all cells; equals n**3 exactly."""
        dev = self.scaled_deviations()
        return int(np.sum(dev * dev, dtype=np.int64))

    def window_mask(self) -> np.ndarray:
        """True where (2*delta - n)**2 <= n, the inclusive center window."""
        dev = self.scaled_deviations()
        return dev * dev <= self.n

    def aleph_statistic(self) -> int:
        """Sum of (2*delta - n)**2 over in-window cells."""
        dev = self.scaled_deviations()
        sq = dev * dev
        return int(np.sum(sq[sq <= self.n], dtype=np.int64))

    def aleph(self) -> bool:
        """Typicality: 9 * statistic <= 4 * n**3, an exact integer test."""
        return 9 * self.aleph_statistic() <= 4 * self.n**3


def delta(x: BitString, y: BitString, t: TransformIndex) -> int:
    """Hamming distance |sigma_j(tau_s xor x) xor y|."""
    _check_pair(x, y)
    tau = fourier_pattern(t.s, x.n)
    return ((tau ^ x).cyclic_shift(t.j) ^ y).weight()


def delta_table(x: BitString, y: BitString, backend: str = "correlation") -> DeltaTable:
    """Full table of transformed distances.

    backend "naive" recomputes every cell from the definition with packed
    word operations; "correlation" evaluates all cells through one exact
    circular cross-correlation (a sign-matrix product whose intermediate
    values stay below 2**53, so the float matmul is exact).  Both backends
    return identical integer tables.
    """
    _check_pair(x, y)
    if backend == "naive":
        return _delta_table_naive(x, y)
    if backend == "correlation":
        return _delta_table_correlation(x, y)
    raise ValueError(f"unknown backend {backend!r}")


def _check_pair(x: BitString, y: BitString) -> None:
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} vs {y.n}")
    require_transform_size(x.n)


def _delta_table_naive(x: BitString, y: BitString) -> DeltaTable:
    n = x.n
    k = answer_length(n)
    values = np.empty((n, n), dtype=np.int64)
    for s_val in range(n):
        w = fourier_pattern(BitString(s_val, k), n) ^ x
        for j in range(1, n + 1):
            values[j - 1, s_val] = (w.cyclic_shift(j) ^ y).weight()
    return DeltaTable(n, values)


@lru_cache(maxsize=8)
def _walsh_signs(n: int) -> np.ndarray:
    """Walsh sign matrix H[s, i] = (-1)**popcount(s & i), float64."""
    h = np.array([[1.0]])
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    h.setflags(write=False)
    return h

@lru_cache(maxsize=8)
def _rot_index(n: int) -> np.ndarray:
    """idx[j0, i0] = (i0 + j0) mod n."""
    idx = (np.arange(n)[None, :] + np.arange(n)[:, None]) % n
    idx.setflags(write=False)
    return idx


def _delta_table_correlation(x: BitString, y: BitString) -> DeltaTable:
    n = x.n
    px = 1.0 - 2.0 * x.to_array().astype(np.float64)
    py = 1.0 - 2.0 * y.to_array().astype(np.float64)
    u = _walsh_signs(n) * px[None, :]          # row s = signs of tau_s xor x
    v = py[_rot_index(n)]                      # row j0 = signs of y pulled back by j0
    corr = v @ u.T                             # corr[j0, s] = sum_i u[s, i] * py[(i + j0) % n]
    dword = (n - np.rint(corr).astype(np.int64)) // 2
    # rows of dword are keyed by j0 = j mod n; re-key to j - 1 for j in [1, n]
    values = np.roll(dword, -1, axis=0)
    return DeltaTable(n, values)


def aleph_statistic(x: BitString, y: BitString) -> int:
    """Scaled in-window deviation sum of the pair's full table."""
    return delta_table(x, y).aleph_statistic()


def aleph(x: BitString, y: BitString) -> bool:
    """Typicality predicate of an input pair."""
    return delta_table(x, y).aleph()


def ghr_is_valid(x: BitString, y: BitString, answer: Sequence[TransformIndex]) -> bool:
    """Gap-Hamming relation check for an answer of log2 n transform indices.

    Atypical pairs accept anything.  Typical pairs need at least half of the
    entries to land outside the center window.
    """
    _check_pair(x, y)
    m = answer_length(x.n)
    if len(answer) != m:
        raise ValueError(f"answer must have {m} entries, got {len(answer)}")
    table = delta_table(x, y)
    if not table.aleph():
        return True
    n = x.n
    outside = 0
    for t in answer:
        dev = 2 * table.entry(t.j, t.s) - n
        if dev * dev > n:
            outside += 1
    return 2 * outside >= m


def tghr_is_valid(x: BitString, y: BitString, tau: BitString) -> bool:
    """Shift-free variant: tau is valid iff |tau xor x xor y| <= n/2 - sqrt(n).

    Exact integer test: d <= n/2 - sqrt(n) iff n - 2d >= 0 and
    (n - 2d)**2 >= 4n.  Any equal lengths are accepted here.
    """
    if not x.n == y.n == tau.n:
        raise ValueError("x, y, tau must have equal lengths")
    d = (tau ^ x ^ y).weight()
    g = x.n - 2 * d
    return g >= 0 and g * g >= 4 * x.n


def ghd_value(x: BitString, y: BitString, d: int):
    """Gap-Hamming decision value: 1 if |x xor y| >= n/2 + d, 0 if
    <= n/2 - d, None inside the promise gap.  Requires 1 <= d <= n/2."""
    if x.n != y.n:
        raise ValueError(f"length mismatch: {x.n} vs {y.n}")
    n = x.n
    if not 1 <= d <= n / 2:
        raise ValueError(f"gap parameter {d} outside [1, {n / 2}]")
    w = (x ^ y).weight()
    if 2 * w >= n + 2 * d:
        return 1
    if 2 * w <= n - 2 * d:
        return 0
    return None


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo proportion with its binomial standard error."""

    mean: float
    trials: int
    stderr: float
    seed: int

    @classmethod
    def from_successes(cls, successes: int, trials: int, seed: int) -> "McEstimate":
        if trials < 1:
            raise ValueError("trials must be >= 1")
        mean = successes / trials
        return cls(mean, trials, math.sqrt(mean * (1.0 - mean) / trials), seed)


def estimate_aleph_probability(
    n: int, trials: int, rng: Rng, threads: int | None = None
) -> McEstimate:
    """Probability that a uniform pair is typical, by Monte Carlo.

    Trial i draws (x, y) from rng.child(i), so the estimate is a pure
    function of (n, trials, seed) regardless of thread count.
    """
    require_transform_size(n)
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(i: int) -> bool:
        child = rng.child(i)
        x = random_bitstring(n, child)
        y = random_bitstring(n, child)
        return delta_table(x, y).aleph()

    hits = sum(map_trials(one, trials, threads))
    return McEstimate.from_successes(hits, trials, rng.seed)


def exact_aleph_probability(n: int) -> Fraction:
    """Exact typical-pair probability by exhausting all 4**n input pairs.

    Only feasible for n = 4 among the allowed sizes; larger n raise."""
    require_transform_size(n)
    if 1 << (2 * n) > 1 << 20:
        raise ValueError(f"exhaustive enumeration infeasible for n={n}")
    count = 0
    for xv, yv in product(range(1 << n), repeat=2):
        if delta_table(BitString(xv, n), BitString(yv, n)).aleph():
            count += 1
    return Fraction(count, 1 << (2 * n))


def enumerate_pairs(n: int):
    """All (x, y) input pairs at size n, in lexicographic order."""
    for xv in range(1 << n):
        x = BitString(xv, n)
        for yv in range(1 << n):
            yield x, BitString(yv, n)
