"""Weight-decoupling sampler and its exact verifier.

Given a fixed pattern s, the sampler draws an auxiliary string a_tilde such
that, for uniform a, the weight |a xor a_tilde xor s| is Binomial(n, 1/2)
distributed independently of |a|.  The construction is sequential over a
fixed coordinate order:

  stage 1 visits the first 2d majority coordinates of s (d = | |s| - n/2 |)
  one at a time and flips each with a probability chosen from the running
  weight so the combined bit comes out fair;

  stage 2 pairs each remaining s=1 coordinate with an s=0 coordinate and
  either leaves the pair alone or flips exactly one side (fair split), with
  the pair-flip probability again a function of the running weight.

Every branch probability is an exact rational in the running weights;
sampling compares one 64-bit draw against that rational.  When |s| < n/2
both a and s are complemented first, which swaps majority roles and leaves
a xor a_tilde xor s unchanged.  The DP table builder marginalises the same
transition rules over all a of fixed weight in Fraction arithmetic, so
independence can be verified with zero tolerance.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
import math

from .bitkit import BitString, Rng


@dataclass(frozen=True)
class StageOneStep:
    coord: int
    a_bit: int
    flip_probability: Fraction
    flipped: int


@dataclass(frozen=True)
class StageTwoStep:
    one_coord: int
    zero_coord: int
    a_bits: tuple[int, int]
    z_probability: Fraction
    z: int
    tilde_pair: tuple[int, int]


@dataclass(frozen=True)
class CouplingTranscript:
    """Full record of one sampler run.

    When swapped is set the stage rules were executed on the complement of
    (a, s); coords and weights then refer to that complemented input, while
    a, s, and a_tilde are reported in the caller's frame.  weights lists the
    running remaining weight, one entry per processed coordinate batch
    (initial, after each stage-1 coordinate, after each stage-2 pair).
    """

    a: BitString
    s: BitString
    d: int
    swapped: bool
    stage_one: tuple[StageOneStep, ...]
    stage_two: tuple[StageTwoStep, ...]
    a_tilde: BitString
    weights: tuple[int, ...]

    def mixed_weight(self) -> int:
        """|a xor a_tilde xor s|, the decoupled output weight."""
        return (self.a ^ self.a_tilde ^ self.s).weight()


def _require_even_pair(a: BitString, s: BitString) -> None:
    if a.n != s.n:
        raise ValueError(f"length mismatch: {a.n} vs {s.n}")
    if a.n % 2:
        raise ValueError(f"n must be even, got {a.n}")


def _stage_one_flip_probability(m: int, k: int, a_bit: int) -> Fraction:
    # m remaining coordinates carrying weight k; flip only the majority side,
    # and exactly balance at 2k = m (probability zero).
    if 2 * k > m and a_bit == 1:
        return 1 - Fraction(m, 2 * k)
    if 2 * k < m and a_bit == 0:
        return 1 - Fraction(m, 2 * (m - k))
    return Fraction(0)


def _stage_two_z_probability(m: int, k: int, equal: bool) -> Fraction:
    # m >= 2 remaining coordinates carrying weight k; 4k(m-k) vs m(m-1)
    # decides which pair parity is over-represented.
    prod = 4 * k * (m - k)
    ref = m * (m - 1)
    if not equal and prod > ref:
        return 1 - Fraction(ref, prod)
    if equal and prod < ref:
        return 1 - Fraction(ref, 2 * ref - prod)
    return Fraction(0)


def sample_a_tilde(a: BitString, s: BitString, rng: Rng) -> CouplingTranscript:
    """One sampler run for fixed (a, s); all randomness from rng."""
    _require_even_pair(a, s)
    n = a.n
    swapped = 2 * s.weight() < n
    work_a = ~a if swapped else a
    work_s = ~s if swapped else s

    ones = [i for i in range(1, n + 1) if work_s.bit(i)]
    zeros = [i for i in range(1, n + 1) if not work_s.bit(i)]
    two_d = 2 * len(ones) - n
    k = work_a.weight()
    weights = [k]
    tilde_positions: set[int] = set()
    stage_one = []
    for step in range(two_d):
        coord = ones[step]
        m = n - step
        a_bit = work_a.bit(coord)
        p = _stage_one_flip_probability(m, k, a_bit)
        flipped = 1 if (p > 0 and rng.chance(p)) else 0
        if flipped:
            tilde_positions.add(coord)
        stage_one.append(StageOneStep(coord, a_bit, p, flipped))
        k -= a_bit
        weights.append(k)

    stage_two = []
    for idx, (ca, cb) in enumerate(zip(ones[two_d:], zeros)):
        m = n - two_d - 2 * idx
        a1 = work_a.bit(ca)
        a2 = work_a.bit(cb)
        p = _stage_two_z_probability(m, k, a1 == a2)
        z = 1 if (p > 0 and rng.chance(p)) else 0
        pair = (0, 0)
        if z:
            pair = (0, 1) if rng.chance(Fraction(1, 2)) else (1, 0)
            if pair[0]:
                tilde_positions.add(ca)
            else:
                tilde_positions.add(cb)
        stage_two.append(StageTwoStep(ca, cb, (a1, a2), p, z, pair))
        k -= a1 + a2
        weights.append(k)

    tilde_value = 0
    for pos in tilde_positions:
        tilde_value |= 1 << (n - pos)
    return CouplingTranscript(
        a=a,
        s=s,
        d=two_d // 2,
        swapped=swapped,
        stage_one=tuple(stage_one),
        stage_two=tuple(stage_two),
        a_tilde=BitString(tilde_value, n),
        weights=tuple(weights),
    )


@dataclass(frozen=True)
class CoupledDistTable:
    """Exact conditional law P[|a xor a_tilde xor s| = w given |a| = k].

    rows[k][w] as Fractions; every row sums to 1."""

    n: int
    s: BitString
    rows: tuple[tuple[Fraction, ...], ...]

    def row(self, k: int) -> tuple[Fraction, ...]:
        return self.rows[k]


def fair_binomial_masses(n: int) -> tuple[Fraction, ...]:
    """Binomial(n, 1/2) point masses as Fractions."""
    return tuple(Fraction(math.comb(n, w), 1 << n) for w in range(n + 1))


def exact_coupled_distribution(s: BitString, _force_z_zero: bool = False) -> CoupledDistTable:
    """DP marginalisation of the sampler over all a of each fixed weight.

    The keyword _force_z_zero disables stage-2 flips; it exists so tests can
    show the verification REJECTS a broken sampler.  State space is
    (remaining weight, accumulated output weight) per step; n above 16 is
    refused (the intended use is n <= 12).
    """
    if s.n % 2:
        raise ValueError(f"n must be even, got {s.n}")
    if s.n > 16:
        raise ValueError(f"DP table limited to n <= 16, got {s.n}")
    n = s.n
    if 2 * s.weight() < n:
        inner = exact_coupled_distribution(~s, _force_z_zero)
        # complementing a maps weight k to n - k and leaves the output law
        rows = tuple(inner.rows[n - k] for k in range(n + 1))
        return CoupledDistTable(n, s, rows)

    two_d = 2 * s.weight() - n
    pair_count = (n - two_d) // 2
    rows = []
    for k0 in range(n + 1):
        states: dict[tuple[int, int], Fraction] = {(k0, 0): Fraction(1)}
        for step in range(two_d):
            m = n - step
            nxt: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
            for (k, w), pr in states.items():
                for a_bit in (0, 1):
                    pa = Fraction(k, m) if a_bit else Fraction(m - k, m)
                    if pa == 0:
                        continue
                    pf = _stage_one_flip_probability(m, k, a_bit)
                    for f_bit, pb in ((1, pf), (0, 1 - pf)):
                        if pb == 0:
                            continue
                        out = a_bit ^ f_bit ^ 1
                        nxt[(k - a_bit, w + out)] += pr * pa * pb
            states = dict(nxt)
        for idx in range(pair_count):
            m = n - two_d - 2 * idx
            ref = m * (m - 1)
            nxt = defaultdict(Fraction)
            for (k, w), pr in states.items():
                branches = (
                    (1, 1, k * (k - 1)),
                    (0, 0, (m - k) * (m - k - 1)),
                    (1, 0, k * (m - k)),
                    (0, 1, k * (m - k)),
                )
                for a1, a2, weight_count in branches:
                    if weight_count == 0:
                        continue
                    p_pair = pr * Fraction(weight_count, ref)
                    pz = (
                        Fraction(0)
                        if _force_z_zero
                        else _stage_two_z_probability(m, k, a1 == a2)
                    )
                    key = (k - a1 - a2, 0)
                    base_w = w + (1 - a1) + a2
                    nxt[(key[0], base_w)] += p_pair * (1 - pz)
                    if pz:
                        half = p_pair * pz / 2
                        nxt[(key[0], w + (1 - a1) + (1 - a2))] += half
                        nxt[(key[0], w + a1 + a2)] += half
            states = dict(nxt)
        dist = [Fraction(0)] * (n + 1)
        for (k, w), pr in states.items():
            assert k == 0, "all weight must be consumed"
            dist[w] += pr
        rows.append(tuple(dist))
    return CoupledDistTable(n, s, tuple(rows))


@dataclass(frozen=True)
class IndependenceReport:
    s: BitString
    max_tv: float
    worst_k: int
    passed: bool


def verify_independence(
    s: BitString, tol: float = 1e-9, _force_z_zero: bool = False
) -> IndependenceReport:
    """Compare every conditional row of the DP table against Binomial(n, 1/2).

    Reports the worst total-variation distance over the |a| = k rows; with
    the real sampler the distance is exactly zero."""
    table = exact_coupled_distribution(s, _force_z_zero)
    fair = fair_binomial_masses(s.n)
    worst = Fraction(0)
    worst_k = 0
    for k in range(s.n + 1):
        tv = sum(abs(p - q) for p, q in zip(table.rows[k], fair)) / 2
        if tv > worst:
            worst = tv
            worst_k = k
    return IndependenceReport(s, float(worst), worst_k, float(worst) <= tol)


def tilde_weight_tail_bound(n: int, d: int, t: float) -> float:
    """Closed-form cap on P[|a_tilde| >= 16 d**2 / n + t]; loose by design."""
    if n < 2 or t < 0:
        raise ValueError("need n >= 2 and t >= 0")
    if t == 0:
        return 1.0
    ln = math.log(n)
    first = 4.0 * math.exp(ln - t / (4.0 * ln))
    second = 2.0 * math.exp(-(t * t) * n / (224.0 * t * n * ln + 2048.0 * d * d * ln))
    return min(1.0, first + second)
