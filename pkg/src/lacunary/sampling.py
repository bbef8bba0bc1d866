"""Sample plans over x in (0, 1) and exact fractional parts ``{n x}``.

Random points are infinite binary expansions: the i-th point of a plan with
seed ``s`` has 64-bit digit words drawn from a Philox stream keyed by
``(s, i)``. Asking for more words only refines the same real number, so the
fractional part of ``n x`` can be taken to full float precision even when
``n`` has thousands of bits (e.g. ``n = 2**4096``). Grid points are the exact
rationals ``(2i - 1) / (2M)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Sequence

import numpy as np

from .errors import ValidationError

WORD_BITS = 64
_FLOAT_SCALE = 2.0 ** -53
_SMALL_TERM_BITS = 32
_CHUNK_CELLS = 1 << 21


class SampleMode(str, enum.Enum):
    UNIFORM_RANDOM = "uniform_random"
    GRID = "grid"


def _words(seed: int, index: int, nwords: int) -> np.ndarray:
    bitgen = np.random.Philox(key=np.array([seed, index], dtype=np.uint64))
    return bitgen.random_raw(nwords).astype(np.uint64)


@dataclass(frozen=True)
class SamplePlan:
    mode: SampleMode
    count: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", SampleMode(self.mode))
        if self.count < 1:
            raise ValidationError("sample count must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be nonnegative")

    @classmethod
    def uniform(cls, count: int, seed: int = 0) -> "SamplePlan":
        return cls(SampleMode.UNIFORM_RANDOM, count, seed)

    @classmethod
    def grid(cls, count: int) -> "SamplePlan":
        return cls(SampleMode.GRID, count)

    def to_json(self) -> dict:
        return {"mode": self.mode.value, "count": self.count, "seed": self.seed}

    def x_exact(self, i: int, bits: int = 128) -> Fraction:
        """Point ``i`` (0-based) as a rational; random points are truncated to ``bits``."""
        if self.mode is SampleMode.GRID:
            return Fraction(2 * i + 1, 2 * self.count)
        nwords = -(-bits // WORD_BITS)
        return Fraction(_words_to_int(_words(self.seed, i, nwords)), 1 << (WORD_BITS * nwords))

    def x_values(self) -> np.ndarray:
        """Float approximations of all points."""
        if self.mode is SampleMode.GRID:
            return (2.0 * np.arange(self.count) + 1.0) / (2.0 * self.count)
        return np.array([float(_words(self.seed, i, 1)[0] >> np.uint64(11)) * _FLOAT_SCALE
                         for i in range(self.count)])

    def frac_matrix(self, terms: Sequence[int], rows: range | None = None) -> np.ndarray:
        """``{t x_i}`` for ``i`` in ``rows`` (default all) and every term ``t``."""
        rows = range(self.count) if rows is None else rows
        terms = [int(t) for t in terms]
        if self.mode is SampleMode.GRID:
            return _grid_fracs(terms, rows, self.count)
        return _random_fracs(terms, rows, self.seed)

    def iter_chunks(self, terms: Sequence[int]) -> Iterator[np.ndarray]:
        """Row blocks of ``frac_matrix`` sized to keep memory bounded."""
        step = max(1, _CHUNK_CELLS // max(1, len(terms)))
        for lo in range(0, self.count, step):
            yield self.frac_matrix(terms, range(lo, min(self.count, lo + step)))


def _words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(words.astype(">u8").tobytes(), "big")


def _grid_fracs(terms: list[int], rows: range, count: int) -> np.ndarray:
    q = 2 * count
    if q >= 1 << 31:
        raise ValidationError("grid too fine for exact int64 arithmetic")
    residues = np.array([t % q for t in terms], dtype=np.int64)
    odd = 2 * np.arange(rows.start, rows.stop, dtype=np.int64) + 1
    return ((odd[:, None] * residues[None, :]) % q) / q


def _is_power_of_two(t: int) -> bool:
    return t > 0 and t & (t - 1) == 0


def _random_fracs(terms: list[int], rows: range, seed: int) -> np.ndarray:
    if not terms:
        return np.zeros((len(rows), 0))
    top_bits = max(t.bit_length() for t in terms)
    nwords = -(-(top_bits + WORD_BITS) // WORD_BITS) + 1
    W = np.stack([_words(seed, i, nwords) for i in rows]) if len(rows) else \
        np.zeros((0, nwords), dtype=np.uint64)
    if top_bits <= _SMALL_TERM_BITS:
        return _fracs_small(terms, W)
    if all(_is_power_of_two(t) for t in terms):
        return _fracs_dyadic(terms, W)
    return _fracs_generic(terms, W)


def _fracs_small(terms: list[int], W: np.ndarray) -> np.ndarray:
    # n < 2^32: low word of n*X1 plus the carry from n*X2, mod 2^64 (wrapping uint64)
    n = np.array(terms, dtype=np.uint64)[None, :]
    with np.errstate(over="ignore"):
        lo = W[:, :1] * n
        carry = (n * (W[:, 1:2] >> np.uint64(32))) >> np.uint64(32)
        frac = lo + carry
    return (frac >> np.uint64(11)).astype(np.float64) * _FLOAT_SCALE


def _fracs_dyadic(terms: list[int], W: np.ndarray) -> np.ndarray:
    # {2^e x} is the bit stream of x read from position e
    e = np.array([t.bit_length() - 1 for t in terms], dtype=np.int64)
    q, r = np.divmod(e, WORD_BITS)
    r = r.astype(np.uint64)[None, :]
    head = W[:, q]
    tail = W[:, q + 1]
    with np.errstate(over="ignore"):
        shifted = np.where(r == 0, head,
                           (head << r) | (tail >> (np.uint64(WORD_BITS) - np.maximum(r, np.uint64(1)))))
    return (shifted >> np.uint64(11)).astype(np.float64) * _FLOAT_SCALE


def _fracs_generic(terms: list[int], W: np.ndarray) -> np.ndarray:
    nbits = W.shape[1] * WORD_BITS
    mask = (1 << nbits) - 1
    drop = nbits - 53
    out = np.empty((W.shape[0], len(terms)))
    for i in range(W.shape[0]):
        X = _words_to_int(W[i])
        out[i] = [(((t * X) & mask) >> drop) * _FLOAT_SCALE for t in terms]
    return out


def frac_of_product(n: int, x) -> float:
    """``{n x}`` computed exactly for rational (incl. float) ``x``, then rounded."""
    if isinstance(x, Rational):
        xr = Fraction(x)
    else:
        xr = Fraction(float(x))
    p, q = xr.numerator, xr.denominator
    return float(Fraction((n * p) % q, q))
