"""Simultaneous-message protocol simulation via its exact outcome law.

The joint measurement outcome (J, S) for inputs (x, y) has probability
(2*delta - n)**2 / n**3 at cell (j, s), where delta = delta(x, y, (j, s)).
OutcomeDistribution stores the integer numerators over the fixed denominator
n**3, so normalization is the exact table identity and sampling reduces to
one uniform integer draw below n**3 per outcome.  The explicit state vectors
(phi on n coordinates, u on n**2) are provided so the closed form can be
checked against squared inner products.

A full protocol answer is log2 n independent outcomes; the t-repetition
variant samples only t outcomes and tiles them in order (o_1..o_t, o_1..o_t,
..., prefix) up to length log2 n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bitkit import BitString, Rng, fourier_pattern, random_bitstring
from .relation import (
    DeltaTable,
    McEstimate,
    TransformIndex,
    answer_length,
    delta_table,
    enumerate_pairs,
    require_transform_size,
)
from .util import map_trials


@dataclass(frozen=True, eq=False)
class StateVector:
    """A real amplitude vector with unit norm up to float error."""

    dim: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def phi_vector(z: BitString) -> StateVector:
    """Message state of input z: amplitude (-1)**z_i / sqrt(n) at i."""
    signs = 1.0 - 2.0 * z.to_array().astype(np.float64)
    return StateVector(z.n, signs / math.sqrt(z.n))


def u_vector(t: TransformIndex, n: int) -> StateVector:
    """Measurement basis vector for (j, s) on the n**2-dimensional pair space.

    Support sits on coordinates (i, sigma_j(i)) with sign given by the Walsh
    pattern of s, amplitude 1/sqrt(n) each.
    """
    require_transform_size(n)
    j, s = t
    if not 1 <= j <= n:
        raise ValueError(f"shift {j} outside [1, {n}]")
    tau = fourier_pattern(s, n).to_array()
    amps = np.zeros(n * n)
    root = 1.0 / math.sqrt(n)
    for i0 in range(n):
        target = (i0 + j) % n
        amps[i0 * n + target] = root * (1.0 - 2.0 * float(tau[i0]))
    return StateVector(n * n, amps)


class OutcomeDistribution:
    """Exact outcome law of the joint measurement for one input pair.

    numerators[j - 1, s.as_unsigned()] over the denominator n**3.  The mode
    only selects what probability() returns: Fractions ("rational", default
    for n <= 256) or floats ("float", default beyond).  Numerators stay exact
    integers either way.
    """

    def __init__(self, n: int, numerators: np.ndarray, mode: str | None = None):
        require_transform_size(n)
        if mode is None:
            mode = "rational" if n <= 256 else "float"
        if mode not in ("rational", "float"):
            raise ValueError(f"unknown mode {mode!r}")
        self.n = n
        self.numerators = numerators
        self.mode = mode
        self._cumulative = None

    @classmethod
    def from_table(cls, table: DeltaTable, mode: str | None = None) -> "OutcomeDistribution":
        dev = table.scaled_deviations()
        return cls(table.n, dev * dev, mode)

    @property
    def denominator(self) -> int:
        return self.n**3

    def probability(self, j: int, s: BitString):
        if not 1 <= j <= self.n:
            raise ValueError(f"shift {j} outside [1, {self.n}]")
        num = int(self.numerators[j - 1, s.as_unsigned()])
        if self.mode == "rational":
            return Fraction(num, self.denominator)
        return num / self.denominator

    def probabilities(self) -> np.ndarray:
        """Dense float probabilities, rows j - 1, columns s.as_unsigned()."""
        return self.numerators / self.denominator

    def total_mass(self) -> Fraction:
        """Exact total; equals 1 by the table's deviation-square identity."""
        return Fraction(int(np.sum(self.numerators, dtype=np.int64)), self.denominator)

    def max_probability(self) -> Fraction:
        """Largest single outcome probability; never exceeds 1/n."""
        return Fraction(int(self.numerators.max()), self.denominator)

    def in_window_mass(self) -> Fraction:
        """Probability of landing in the center window; this is the success
        parameter p of one repetition."""
        flat = self.numerators
        return Fraction(int(np.sum(flat[flat <= self.n], dtype=np.int64)), self.denominator)

    def sample(self, rng: Rng, count: int) -> tuple[TransformIndex, ...]:
        """count independent outcomes, via exact inversion of the integer
        cumulative row."""
        if count < 1:
            raise ValueError("count must be >= 1")
        if self._cumulative is None:
            self._cumulative = np.cumsum(self.numerators.reshape(-1), dtype=np.int64)
        draws = rng.generator.integers(0, self.denominator, size=count, dtype=np.int64)
        idx = np.searchsorted(self._cumulative, draws, side="right")
        k = answer_length(self.n)
        return tuple(
            TransformIndex(int(i) // self.n + 1, BitString(int(i) % self.n, k)) for i in idx
        )


def outcome_distribution(x: BitString, y: BitString, mode: str | None = None) -> OutcomeDistribution:
    """Exact outcome law for inputs (x, y)."""
    return OutcomeDistribution.from_table(delta_table(x, y), mode)


def run_protocol(x: BitString, y: BitString, rng: Rng) -> tuple[TransformIndex, ...]:
    """One full protocol run: log2 n independent outcome samples."""
    return outcome_distribution(x, y).sample(rng, answer_length(x.n))


def run_protocol_trep(x: BitString, y: BitString, t: int, rng: Rng) -> tuple[TransformIndex, ...]:
    """Repetition-limited run: t samples tiled to log2 n entries.

    The tiling keeps sample order, repeating the block ceil(log2(n)/t) times
    and trimming the last copy."""
    if t < 1:
        raise ValueError("t must be >= 1")
    m = answer_length(x.n)
    base = outcome_distribution(x, y).sample(rng, t)
    reps = -(-m // t)
    return (base * reps)[:m]


def repetition_failure_probability(m: int, p: Fraction) -> Fraction:
    """P[Binomial(m, p) > m/2], exactly.  A repetition fails when strictly
    more than half of the m entries land in the center window."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    q = 1 - p
    total = Fraction(0)
    for k in range(m // 2 + 1, m + 1):
        total += math.comb(m, k) * p**k * q ** (m - k)
    return total


def failure_probability_exact(x: BitString, y: BitString) -> Fraction:
    """Exact probability that a full protocol run yields an invalid answer.

    Atypical pairs never fail.  Typical pairs fail iff more than half of the
    log2 n sampled cells are in-window, each independently with the exact
    rational in-window mass p."""
    table = delta_table(x, y)
    if not table.aleph():
        return Fraction(0)
    dist = OutcomeDistribution.from_table(table)
    return repetition_failure_probability(answer_length(x.n), dist.in_window_mass())


def estimate_success(
    n: int,
    trials: int,
    rng: Rng,
    threads: int | None = None,
    t: int | None = None,
) -> McEstimate:
    """Monte Carlo success rate of full runs on uniform input pairs.

    Trial i draws inputs and outcomes from rng.child(i); the sampled answer
    is checked against the relation with the same exact table.  With t set,
    each run draws only t outcomes and tiles them to log2 n entries."""
    require_transform_size(n)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if t is not None and t < 1:
        raise ValueError("t must be >= 1")
    m = answer_length(n)

    def one(i: int) -> bool:
        child = rng.child(i)
        x = random_bitstring(n, child)
        y = random_bitstring(n, child)
        table = delta_table(x, y)
        dist = OutcomeDistribution.from_table(table)
        if t is None:
            answer = dist.sample(child, m)
        else:
            reps = -(-m // t)
            answer = (dist.sample(child, t) * reps)[:m]
        if not table.aleph():
            return True
        outside = 0
        for cell in answer:
            dev = 2 * table.entry(cell.j, cell.s) - n
            if dev * dev > n:
                outside += 1
        return 2 * outside >= m

    hits = sum(map_trials(one, trials, threads))
    return McEstimate.from_successes(hits, trials, rng.seed)


def exact_success_probability(n: int) -> Fraction:
    """Average success probability over ALL input pairs, exactly.

    Feasible only for n = 4 among allowed sizes (4**n pairs)."""
    require_transform_size(n)
    if 1 << (2 * n) > 1 << 20:
        raise ValueError(f"exhaustive enumeration infeasible for n={n}")
    total = Fraction(0)
    count = 0
    for x, y in enumerate_pairs(n):
        total += 1 - failure_probability_exact(x, y)
        count += 1
    return total / count
