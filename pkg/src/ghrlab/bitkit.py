"""Bit-string algebra on packed words.

BitString is an immutable fixed-length vector of bits.  The text form reads
position 1 first, so "0110" has ones at positions 2 and 3.  Rng is a seeded
counter-based random source whose child streams are keyed by trial number,
which keeps parallel experiments replayable.  Everything here is a pure
function of its inputs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np

RNG_ALGORITHM = "philox4x64-10"

_ROOT_STREAM = (1 << 64) - 1
_MASK64 = (1 << 64) - 1


class BitString:
    """Length-n {0,1} vector packed into one Python integer.

    The packed value equals the text form read as a binary numeral, so
    position 1 is the most significant bit.  Instances are immutable in use:
    no method mutates, operators return fresh objects.
    """

    __slots__ = ("n", "value")

    def __init__(self, value: int, n: int) -> None:
        if n < 1:
            raise ValueError(f"bit-string length must be >= 1, got {n}")
        if value < 0 or value >> n:
            raise ValueError(f"value {value} does not fit in {n} bits")
        self.n = n
        self.value = value

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(0, n)

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls((1 << n) - 1, n)

    @classmethod
    def from_text(cls, text: str) -> "BitString":
        """Parse "0110"-style text, position 1 leftmost."""
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"text form must be nonempty over {{0,1}}, got {text!r}")
        return cls(int(text, 2), len(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        """Build from an iterable of 0/1 values in position order."""
        value = 0
        count = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bits must be 0 or 1, got {b!r}")
            value = (value << 1) | b
            count += 1
        if count == 0:
            raise ValueError("at least one bit required")
        return cls(value, count)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BitString":
        """Build from a numpy 0/1 array in position order."""
        arr = np.asarray(arr)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("array must be one-dimensional and nonempty")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("array entries must be 0 or 1")
        n = int(arr.size)
        nbytes = (n + 7) // 8
        padded = np.concatenate([np.zeros(8 * nbytes - n, dtype=np.uint8), arr.astype(np.uint8)])
        return cls(int.from_bytes(np.packbits(padded).tobytes(), "big"), n)

    def weight(self) -> int:
        """Number of 1 bits."""
        return self.value.bit_count()

    def bit(self, i: int) -> int:
        """Bit at position i, 1-indexed from the left of the text form."""
        if not 1 <= i <= self.n:
            raise ValueError(f"position {i} outside [1, {self.n}]")
        return (self.value >> (self.n - i)) & 1

    def as_unsigned(self) -> int:
        """Text form read as a binary numeral (position 1 most significant)."""
        return self.value

    def to_array(self) -> np.ndarray:
        """Bits as a uint8 array in position order."""
        nbytes = (self.n + 7) // 8
        raw = np.frombuffer(self.value.to_bytes(nbytes, "big"), dtype=np.uint8)
        return np.unpackbits(raw)[8 * nbytes - self.n:]

    def cyclic_shift(self, j: int) -> "BitString":
        """Rotate so the bit at position i moves to position i + j, wrapping
        past n back to position 1.  j must lie in [1, n]; j = n is the
        identity."""
        n = self.n
        if not 1 <= j <= n:
            raise ValueError(f"shift {j} outside [1, {n}]")
        if j == n:
            return self
        v = self.value
        rotated = (v >> j) | ((v & ((1 << j) - 1)) << (n - j))
        return BitString(rotated, n)

    def __xor__(self, other: "BitString") -> "BitString":
        if not isinstance(other, BitString):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BitString(self.value ^ other.value, self.n)

    def __invert__(self) -> "BitString":
        return BitString(self.value ^ ((1 << self.n) - 1), self.n)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitString)
            and other.n == self.n
            and other.value == self.value
        )

    def __hash__(self) -> int:
        return hash((self.n, self.value))

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b")

    def __repr__(self) -> str:
        return f"BitString.from_text({str(self)!r})"


def inner_mod2(u, v) -> int:
    """Parity of the bitwise AND of two equal-width bit vectors.

    Accepts BitString or nonnegative int operands; an int is read as a binary
    numeral, which is how index arguments enter Walsh patterns.
    """
    if isinstance(u, BitString) and isinstance(v, BitString) and u.n != v.n:
        raise ValueError(f"length mismatch: {u.n} vs {v.n}")
    a = u.as_unsigned() if isinstance(u, BitString) else int(u)
    b = v.as_unsigned() if isinstance(v, BitString) else int(v)
    if a < 0 or b < 0:
        raise ValueError("integer operands must be nonnegative")
    return (a & b).bit_count() & 1


def fourier_pattern(s: BitString, n: int) -> BitString:
    """0/1 sign pattern of one Walsh character.

    Bit at position i is the AND-parity of s with the (log2 n)-bit numeral
    i - 1.  The all-zero selector gives the all-zero pattern, and distinct
    patterns of the same n differ in exactly n/2 positions.  n must be a
    power of two and s must have exactly log2 n bits.
    """
    if n < 2 or n & (n - 1):
        raise ValueError(f"n must be a power of two >= 2, got {n}")
    k = n.bit_length() - 1
    if s.n != k:
        raise ValueError(f"selector must have {k} bits for n={n}, got {s.n}")
    sv = s.as_unsigned()
    acc = 0
    for i0 in range(n):
        acc = (acc << 1) | ((sv & i0).bit_count() & 1)
    return BitString(acc, n)


class Rng:
    """Seeded random source with replayable child streams.

    Streams are keyed by (seed, stream id): the root uses a reserved id and
    child(i) uses id i, so trial i's randomness depends only on (seed, i) and
    never on the parent's position in its own stream.  One level of splitting
    is supported; children of the same seed are shared across call sites by
    design.
    """

    def __init__(self, seed: int, algorithm: str = RNG_ALGORITHM, stream: int = _ROOT_STREAM) -> None:
        if algorithm != RNG_ALGORITHM:
            raise ValueError(f"unknown rng algorithm {algorithm!r}")
        self.seed = int(seed) & _MASK64
        self.algorithm = algorithm
        self.stream = stream
        key = np.array([self.seed, stream], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "Rng":
        """Independent stream for trial `index`."""
        if not 0 <= index < _ROOT_STREAM:
            raise ValueError(f"child index {index} out of range")
        return Rng(self.seed, self.algorithm, stream=index)

    def bits(self, count: int) -> int:
        """count independent fair bits packed into an int."""
        if count < 1:
            raise ValueError("count must be >= 1")
        nbytes = (count + 7) // 8
        raw = self.generator.bytes(nbytes)
        return int.from_bytes(raw, "big") & ((1 << count) - 1)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        if not 1 <= bound <= (1 << 63):
            raise ValueError(f"bound {bound} outside [1, 2^63]")
        return int(self.generator.integers(0, bound))

    def u64(self) -> int:
        return int(self.generator.integers(0, 1 << 64, dtype=np.uint64))

    def chance(self, p: Fraction) -> bool:
        """Bernoulli draw with exact rational threshold.

        Compares one 64-bit uniform draw against p, so the bias is below
        2**-64 and the comparison itself is exact integer arithmetic.
        """
        if not 0 <= p <= 1:
            raise ValueError(f"probability {p} outside [0, 1]")
        r = self.u64()
        return r * p.denominator < p.numerator << 64

    def permutation(self, count: int) -> np.ndarray:
        return self.generator.permutation(count)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, algorithm={self.algorithm!r}, stream={self.stream})"


def random_bitstring(n: int, rng: Rng) -> BitString:
    """Uniform n-bit string; every bit an independent fair coin."""
    return BitString(rng.bits(n), n)
