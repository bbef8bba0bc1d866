"""Exact Fourier-side computations for trigonometric polynomials.

For a mean-zero trigonometric polynomial ``f`` of degree ``d`` all the
variance functionals of dilated sums reduce to the dilation inner products

    rho(m, n) = int_0^1 f(m x) f(n x) dx,

which depend only on the reduced ratio ``m/g : n/g`` and vanish unless both
reduced parts are at most ``d``. Rational coefficients give exact
``Fraction`` results; float coefficients give floats.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .permutations import IDENTITY, Permutation, apply
from .sequences import GapSequence

HALF = Fraction(1, 2)
PAIR_TABLE_LIMIT = 64


def _coerce(c):
    if isinstance(c, (bool, np.bool_)):
        raise ValidationError("boolean coefficient")
    if isinstance(c, Rational):
        return Fraction(c)
    if isinstance(c, (np.integer,)):
        return Fraction(int(c))
    return float(c)


@dataclass(frozen=True)
class TrigPolynomial:
    """``sum_j a_j cos(2 pi j x) + b_j sin(2 pi j x)``, ``j = 1..d``."""

    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def __post_init__(self):
        a = [_coerce(c) for c in self.cos_coeffs]
        b = [_coerce(c) for c in self.sin_coeffs]
        d = max(len(a), len(b))
        a += [Fraction(0)] * (d - len(a))
        b += [Fraction(0)] * (d - len(b))
        while d and a[d - 1] == 0 and b[d - 1] == 0:
            d -= 1
        if d == 0:
            raise ValidationError("trigonometric polynomial needs a nonzero coefficient")
        object.__setattr__(self, "cos_coeffs", tuple(a[:d]))
        object.__setattr__(self, "sin_coeffs", tuple(b[:d]))

    @property
    def degree(self) -> int:
        return len(self.cos_coeffs)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.cos_coeffs + self.sin_coeffs)

    def __call__(self, x):
        return eval_poly(self, x)

    def on_fractions(self, y: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at points already reduced mod 1."""
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for j, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), 1):
            arg = (2.0 * math.pi * j) * y
            if a:
                out += float(a) * np.cos(arg)
            if b:
                out += float(b) * np.sin(arg)
        return out

    def to_json(self) -> dict:
        return {"cos": [_num_json(c) for c in self.cos_coeffs],
                "sin": [_num_json(c) for c in self.sin_coeffs]}

    @classmethod
    def parse(cls, cos: str | None = None, sin: str | None = None) -> "TrigPolynomial":
        """Build from comma-separated lists such as ``"1,1"`` or ``"0.5,-1/3"``."""
        return cls(tuple(_parse_list(cos)), tuple(_parse_list(sin)))


def _parse_list(text: str | None) -> list:
    if not text:
        return []
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(Fraction(tok))
        except ValueError:
            try:
                out.append(float(tok))
            except ValueError:
                raise ValidationError(f"bad coefficient {tok!r}") from None
    return out


def _num_json(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def eval_poly(f: TrigPolynomial, x) -> float:
    y = float(Fraction(x) % 1) if isinstance(x, Rational) else math.fmod(float(x), 1.0)
    if y < 0:
        y += 1.0
    total = 0.0
    for j, (a, b) in enumerate(zip(f.cos_coeffs, f.sin_coeffs), 1):
        total += float(a) * math.cos(2 * math.pi * j * y) + float(b) * math.sin(2 * math.pi * j * y)
    return total


def l2_norm_sq(f: TrigPolynomial):
    return HALF * sum(a * a + b * b for a, b in zip(f.cos_coeffs, f.sin_coeffs))


def l2_norm(f: TrigPolynomial) -> float:
    return math.sqrt(l2_norm_sq(f))


def _reduced_inner(f: TrigPolynomial, u: int, v: int):
    """rho for the reduced pair (u, v): frequencies j*u == j'*v means j = t*v, j' = t*u."""
    a, b = f.cos_coeffs, f.sin_coeffs
    top = max(u, v)
    total = 0 * HALF * a[0]
    t = 1
    while t * top <= f.degree:
        j, jp = t * v, t * u
        total += a[j - 1] * a[jp - 1] + b[j - 1] * b[jp - 1]
        t += 1
    return HALF * total


def dilation_inner_product(f: TrigPolynomial, m: int, n: int):
    """Exact ``int_0^1 f(m x) f(n x) dx``."""
    if m < 1 or n < 1:
        raise ValidationError("dilations must be positive integers")
    d = f.degree
    if max(m, n) > d * min(m, n):
        return 0 * HALF * f.cos_coeffs[0]
    g = gcd(m, n)
    return _reduced_inner(f, m // g, n // g)


def ratio_table(f: TrigPolynomial) -> dict[tuple[int, int], object]:
    """Nonzero rho over coprime reduced pairs ``(u, v)`` with ``u, v <= d``."""
    d = f.degree
    out = {}
    for u in range(1, d + 1):
        for v in range(1, d + 1):
            if gcd(u, v) == 1:
                r = _reduced_inner(f, u, v)
                if r != 0:
                    out[(u, v)] = r
    return out


@dataclass
class GammaReport:
    value: object
    kind: str
    params: dict = field(default_factory=dict)
    pair_contributions: dict | None = None
    ladder: list = field(default_factory=list)
    raw_sum: object = None
    nonnegative: bool = True

    def to_json(self) -> dict:
        out = {"kind": self.kind, "params": self.params,
               "value": float(self.value), "exact": _exact_str(self.value),
               "nonnegative": self.nonnegative,
               "ladder": [[n, float(v)] for n, v in self.ladder]}
        if self.ladder:
            out["cauchy_gaps"] = cauchy_gaps(self.ladder)
        if self.pair_contributions is not None:
            out["pair_contributions"] = [[k, l, float(v)]
                                         for (k, l), v in sorted(self.pair_contributions.items())]
        return out


def _exact_str(v) -> str | None:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return None


def cauchy_gaps(ladder: Sequence[tuple[int, object]]) -> list[list]:
    """``|gamma(2N) - gamma(N)|`` wherever both N and 2N are on the ladder."""
    vals = dict(ladder)
    return [[n, abs(float(vals[2 * n]) - float(vals[n]))] for n in sorted(vals) if 2 * n in vals]


def gamma_kac(f: TrigPolynomial, base: int = 2, tail_tolerance: float = 0.0) -> GammaReport:
    """``||f||^2 + 2 sum_{k>=1} rho(1, base^k)``; the series stops once base^k > d."""
    if base < 2:
        raise ValidationError("base must be >= 2")
    total = l2_norm_sq(f)
    power = base
    while power <= f.degree:
        total += 2 * dilation_inner_product(f, 1, power)
        power *= base
    return GammaReport(total, "kac", {"base": base, "f": f.to_json()},
                       raw_sum=total, nonnegative=total >= 0)


def _permuted_terms(seq: GapSequence, perm: Permutation, n: int) -> list[int]:
    if n < 1:
        raise ValidationError("N must be >= 1")
    out = []
    for k in range(1, n + 1):
        idx = apply(perm, k)
        if idx > len(seq):
            raise ValidationError(
                f"sigma({k}) = {idx} exceeds the sequence length {len(seq)}")
        out.append(seq.terms[idx - 1])
    return out


def square_integral(f: TrigPolynomial, terms: Iterable[int]):
    """Exact ``int_0^1 (sum_k f(t_k x))^2 dx`` by hashing partners along reduced ratios."""
    counts = Counter(terms)
    table = ratio_table(f)
    total = 0 * HALF * f.cos_coeffs[0]
    for m, cm in counts.items():
        for (u, v), r in table.items():
            if m % u:
                continue
            partner = counts.get(m // u * v)
            if partner:
                total += cm * partner * r
    return total


def pair_contributions(f: TrigPolynomial, terms: Sequence[int]) -> dict[tuple[int, int], object]:
    out = {}
    for k in range(len(terms)):
        for l in range(k + 1, len(terms)):
            r = dilation_inner_product(f, terms[k], terms[l])
            if r != 0:
                out[(k + 1, l + 1)] = r
    return out


def d_squared(f: TrigPolynomial, seq: GapSequence, perm: Permutation = IDENTITY, N: int = 1):
    """``int_0^1 (sum_{k<=N} f(n_{sigma(k)} x))^2 dx``, exactly."""
    return square_integral(f, _permuted_terms(seq, perm, N))


def gamma_empirical(f: TrigPolynomial, seq: GapSequence, perm: Permutation = IDENTITY,
                    N: int = 1) -> GammaReport:
    terms = _permuted_terms(seq, perm, N)
    value = square_integral(f, terms) / N
    pairs = pair_contributions(f, terms) if N <= PAIR_TABLE_LIMIT else None
    return GammaReport(value, "empirical",
                       {"N": N, "permutation": perm.to_json(), "f": f.to_json()},
                       pair_contributions=pairs, raw_sum=value * N,
                       nonnegative=value >= 0)


def gamma_ladder(f: TrigPolynomial, seq: GapSequence, perm: Permutation,
                 ladder: Sequence[int]) -> GammaReport:
    Ns = list(ladder)
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValidationError("N ladder must be nonempty and strictly increasing")
    rungs = [(n, gamma_empirical(f, seq, perm, n).value) for n in Ns]
    last = rungs[-1][1]
    return GammaReport(last, "empirical",
                       {"N": Ns[-1], "permutation": perm.to_json(), "f": f.to_json()},
                       ladder=rungs, raw_sum=last * Ns[-1], nonnegative=last >= 0)


def gamma_star_truncated(f: TrigPolynomial, seq: GapSequence, N: int,
                         normalized: bool = False) -> GammaReport:
    """Sum of rho(n_k, n_l) over ordered pairs ``k, l <= N`` with coprime terms.

    A coprime pair has reduced ratio equal to the pair itself, so only terms
    not exceeding the degree can contribute.
    """
    if N < 1:
        raise ValidationError("N must be >= 1")
    if N > len(seq):
        raise ValidationError(f"N = {N} exceeds the sequence length {len(seq)}")
    counts = Counter(t for t in seq.terms[:N] if t <= f.degree)
    total = 0 * HALF * f.cos_coeffs[0]
    for (u, v), r in ratio_table(f).items():
        total += counts.get(u, 0) * counts.get(v, 0) * r
    value = total / N if normalized else total
    return GammaReport(value, "star_truncated", {"N": N, "normalized": normalized,
                                                 "f": f.to_json()},
                       raw_sum=total, nonnegative=total >= 0)
