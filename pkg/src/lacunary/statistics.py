"""Sampling-side checks: discrepancy, partial sums, Kolmogorov-Smirnov distance
to the Gaussian limit, iterated-logarithm traces and the closed-form limsup
constants for geometric sequences.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .harmonic import TrigPolynomial, d_squared
from .permutations import IDENTITY, Permutation, apply
from .sampling import SamplePlan, frac_of_product
from .sequences import GapSequence

LIL_MIN_N = 16


@dataclass(frozen=True)
class DiscrepancyValue:
    extreme: float
    star: float


def _indexed_terms(seq: GapSequence, perm: Permutation, n: int) -> list[int]:
    if n < 1:
        raise ValidationError("N must be >= 1")
    out = []
    for k in range(1, n + 1):
        idx = apply(perm, k)
        if idx > len(seq):
            raise ValidationError(f"sigma({k}) = {idx} exceeds the sequence length {len(seq)}")
        out.append(seq.terms[idx - 1])
    return out


def fractional_parts(seq: GapSequence, perm: Permutation, x, N: int) -> list[float]:
    """``{n_sigma(k) x}`` for ``k = 1..N``; ``x`` is taken as an exact rational."""
    return [frac_of_product(n, x) for n in _indexed_terms(seq, perm, N)]


def discrepancy(points: Sequence[float]) -> DiscrepancyValue:
    """Exact star and extreme discrepancy of points in [0, 1) from the order statistics."""
    xs = np.sort(np.asarray(points, dtype=float))
    n = xs.size
    if n == 0:
        raise ValidationError("discrepancy of an empty point set")
    if xs[0] < 0 or xs[-1] >= 1:
        raise ValidationError("points must lie in [0, 1)")
    i = np.arange(1, n + 1)
    above = float(np.max(i / n - xs))
    below = float(np.max(xs - (i - 1) / n))
    return DiscrepancyValue(extreme=above + below, star=max(above, below))


def _prefix_extreme(block: np.ndarray, n: int) -> np.ndarray:
    xs = np.sort(block[:, :n], axis=1)
    i = np.arange(1, n + 1)
    return np.max(i / n - xs, axis=1) + np.max(xs - (i - 1) / n, axis=1)


def partial_sum_samples(f: TrigPolynomial, seq: GapSequence, perm: Permutation,
                        N: int, plan: SamplePlan) -> np.ndarray:
    """Unnormalized ``S_N(x) = sum_{k<=N} f(n_sigma(k) x)`` at every plan point."""
    terms = _indexed_terms(seq, perm, N)
    return np.concatenate([f.on_fractions(block).sum(axis=1) for block in plan.iter_chunks(terms)])


@dataclass(frozen=True)
class WeightSchedule:
    """Weights ``a_1..a_N`` with normalizer ``A_N = sqrt(sum a_k^2 / 2)``."""

    weights: tuple[float, ...]

    @property
    def normalizer(self) -> float:
        return math.sqrt(0.5 * sum(float(a) ** 2 for a in self.weights))

    def normalizer_at(self, n: int) -> float:
        return math.sqrt(0.5 * sum(float(a) ** 2 for a in self.weights[:n]))


def weighted_cos_sum(weights: WeightSchedule, seq: GapSequence, x, N: int) -> tuple[float, float]:
    if N < 1 or N > len(weights.weights) or N > len(seq):
        raise ValidationError("N exceeds the weight count or the sequence length")
    a_n = weights.normalizer_at(N)
    if a_n == 0:
        raise ValidationError("all weights are zero; the normalizer vanishes")
    total = math.fsum(float(a) * math.cos(2 * math.pi * frac_of_product(n, x))
                      for a, n in zip(weights.weights[:N], seq.terms[:N]))
    return total, total / a_n


def _normal_cdf(z: np.ndarray) -> np.ndarray:
    return np.array([0.5 * math.erfc(-v / math.sqrt(2.0)) for v in z])


def ks_to_gaussian(samples: Sequence[float], variance: float) -> float:
    """One-sample KS distance from ``samples / sqrt(variance)`` to N(0, 1).

    The supremum is attained at a jump of the empirical CDF, so it is taken
    exactly over both sides of every order statistic.
    """
    if not variance > 0:
        raise ValidationError("variance must be positive")
    z = np.sort(np.asarray(samples, dtype=float)) / math.sqrt(float(variance))
    m = z.size
    if m < 2:
        raise ValidationError("need at least 2 samples")
    cdf = _normal_cdf(z)
    i = np.arange(1, m + 1)
    # ties: only the last copy of a repeated value carries the full jump
    last = np.append(z[1:] != z[:-1], True)
    first = np.insert(z[1:] != z[:-1], 0, True)
    upper = np.max((i / m - cdf)[last])
    lower = np.max((cdf - (i - 1) / m)[first])
    return float(max(upper, lower))


class LilStatistic(str, enum.Enum):
    SUM_LIL = "sum_lil"
    DISCREPANCY_LIL = "discrepancy_lil"


@dataclass
class LilTrace:
    """Values of a normalized statistic on an N ladder, one row per source."""

    statistic: LilStatistic
    n_grid: tuple[int, ...]
    source_ids: list
    values: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def running_max(self) -> float:
        return float(np.max(self.values))

    def source_running_max(self) -> np.ndarray:
        return np.max(self.values, axis=1)

    def cells(self):
        for sid, row in zip(self.source_ids, self.values):
            for n, v in zip(self.n_grid, row):
                yield sid, n, float(v)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source_id", "N", "value"])
        for sid, n, v in self.cells():
            w.writerow([sid, n, repr(v)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"statistic": self.statistic.value, "params": self.params,
                "n_grid": list(self.n_grid), "running_max": self.running_max,
                "source_running_max": dict(zip(map(str, self.source_ids),
                                               map(float, self.source_running_max()))),
                "cells": [[sid, n, v] for sid, n, v in self.cells()]}


def _check_grid(n_grid: Sequence[int]) -> tuple[int, ...]:
    grid = tuple(int(n) for n in n_grid)
    if not grid:
        raise ValidationError("N grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("N grid must be strictly increasing")
    if grid[0] < LIL_MIN_N:
        raise ValidationError(f"every N must be >= {LIL_MIN_N} so that log log N > 0")
    return grid


def _lil_scale(n: int) -> float:
    return math.sqrt(2.0 * n * math.log(math.log(n)))


def _discrepancy_rows(block: np.ndarray, grid: tuple[int, ...]) -> np.ndarray:
    return np.stack([n * _prefix_extreme(block, n) / _lil_scale(n) for n in grid], axis=1)


def lil_trace(statistic: LilStatistic | str, seq: GapSequence, perm: Permutation,
              driver: SamplePlan, n_grid: Sequence[int],
              f: TrigPolynomial | None = None) -> LilTrace:
    """Normalized LIL statistic at each ladder N and each point of ``driver``.

    ``discrepancy_lil``: ``N D_N / sqrt(2 N log log N)``.
    ``sum_lil``: ``S_N / sqrt(2 d_N^2 log log d_N^2)`` with exact ``d_N^2``.
    """
    statistic = LilStatistic(statistic)
    grid = _check_grid(n_grid)
    terms = _indexed_terms(seq, perm, grid[-1])
    rows = []
    if statistic is LilStatistic.DISCREPANCY_LIL:
        for block in driver.iter_chunks(terms):
            rows.append(_discrepancy_rows(block, grid))
    else:
        if f is None:
            raise ValidationError("sum_lil needs a function")
        scales = []
        for n in grid:
            dn2 = float(d_squared(f, seq, perm, n))
            if dn2 <= math.e:
                raise ValidationError(f"d_N^2 = {dn2} at N = {n} is too small for log log")
            scales.append(math.sqrt(2.0 * dn2 * math.log(math.log(dn2))))
        cols = np.array(grid) - 1
        for block in driver.iter_chunks(terms):
            sums = np.cumsum(f.on_fractions(block), axis=1)[:, cols]
            rows.append(sums / np.array(scales))
    values = np.concatenate(rows)
    params = {"sequence": seq.header(), "permutation": perm.to_json(),
              "plan": driver.to_json()}
    if f is not None:
        params["f"] = f.to_json()
    return LilTrace(statistic, grid, list(range(driver.count)), values, params)


def iid_uniforms(seed: int, count: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    return gen.random(count)


def iid_baseline(seed: int, count: int, n_grid: Sequence[int]) -> LilTrace:
    """``discrepancy_lil`` on ``count`` seeded i.i.d. uniforms instead of ``{n_k x}``."""
    grid = _check_grid(n_grid)
    if grid[-1] > count:
        raise ValidationError("N grid exceeds the number of uniforms drawn")
    block = iid_uniforms(seed, count)[None, :]
    return LilTrace(LilStatistic.DISCREPANCY_LIL, grid, [seed], _discrepancy_rows(block, grid),
                    {"baseline": "iid", "seed": seed, "count": count})


def sigma_a(a: int) -> float:
    """Limsup constant of ``N D_N / sqrt(2N log log N)`` for ``n_k = a^k``."""
    if a < 2 or int(a) != a:
        raise ValidationError("a must be an integer >= 2")
    if a == 2:
        return math.sqrt(42) / 9
    if a % 2 == 0:
        return math.sqrt((a + 1) * a * (a - 2)) / (2 * math.sqrt((a - 1) ** 3))
    return math.sqrt(a + 1) / (2 * math.sqrt(a - 1))
