"""Permutations of the positive integers given by finite rules.

Rules are evaluated lazily: ``apply(perm, k)`` never materializes more than
what is needed to locate ``k``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ValidationError


class Rule(str, enum.Enum):
    IDENTITY = "identity"
    TABLE = "table"
    BLOCK_INTERLEAVE = "block_interleave"
    WINDOW_SELECTOR = "window_selector"


@dataclass(frozen=True)
class Permutation:
    rule: Rule
    params: dict = field(default_factory=dict)
    table: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule(self.rule))
        if self.rule is Rule.TABLE:
            tab = tuple(int(v) for v in self.table)
            object.__setattr__(self, "table", tab)
            if sorted(tab) != list(range(1, len(tab) + 1)):
                raise ValidationError("table is not a permutation of 1..len(table)")
        elif self.rule is Rule.BLOCK_INTERLEAVE:
            L = int(self.params.get("block_len", 0))
            if L < 2 or L % 2:
                raise ValidationError("block_len must be an even integer >= 2")
            if self.params.get("split", "odds_first") != "odds_first":
                raise ValidationError("only the odds_first split is defined")
        elif self.rule is Rule.WINDOW_SELECTOR:
            if int(self.params.get("stride", 0)) < 2:
                raise ValidationError("stride must be >= 2")

    @property
    def support_bound(self) -> int | None:
        """Indices above this are fixed points (None when no such bound exists)."""
        if self.rule is Rule.IDENTITY:
            return 0
        if self.rule is Rule.TABLE:
            return len(self.table)
        return None

    def __call__(self, k: int) -> int:
        return apply(self, k)

    def prefix(self, n: int) -> list[int]:
        return [apply(self, k) for k in range(1, n + 1)]

    def to_json(self) -> dict:
        out = {"rule": self.rule.value, "params": dict(self.params)}
        if self.rule is Rule.TABLE:
            out["params"]["table"] = list(self.table)
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "Permutation":
        params = dict(doc.get("params", {}))
        table = params.pop("table", ())
        return cls(Rule(doc["rule"]), params, tuple(table))


IDENTITY = Permutation(Rule.IDENTITY)


def table_permutation(table: Sequence[int]) -> Permutation:
    return Permutation(Rule.TABLE, {}, tuple(table))


def read_table(path: str | Path) -> Permutation:
    values = [int(line) for line in Path(path).read_text().split()
              if not line.startswith("#")]
    return table_permutation(values)


def interleave_family(block_len: int) -> Permutation:
    """Within each block of ``block_len`` indices, odd offsets come first."""
    return Permutation(Rule.BLOCK_INTERLEAVE, {"block_len": block_len, "split": "odds_first"})


def window_selector(stride: int) -> Permutation:
    """Superblocks of lengths ``stride**2, stride**4, stride**6, ...``.

    Inside each superblock the offsets congruent to 1 mod ``stride`` are
    listed first, then the rest in increasing order. Prefixes ending inside
    the first phase of a superblock therefore hold a thinned window with
    few consecutive indices.
    """
    return Permutation(Rule.WINDOW_SELECTOR, {"stride": stride})


def superblock_bounds(stride: int, k: int) -> tuple[int, int]:
    """``(start, length)`` of the window_selector superblock containing ``k``."""
    start, length = 0, stride * stride
    while start + length < k:
        start += length
        length *= stride * stride
    return start, length


def _thin_first(t: int, length: int, stride: int) -> int:
    # t-th position (1-based) -> offset, for the order "1 mod stride first"
    head = length // stride
    if t <= head:
        return 1 + (t - 1) * stride
    r = t - head - 1
    return (r // (stride - 1)) * stride + 2 + r % (stride - 1)


def apply(perm: Permutation, k: int) -> int:
    if k < 1:
        raise ValidationError("permutations act on positive integers")
    rule = perm.rule
    if rule is Rule.IDENTITY:
        return k
    if rule is Rule.TABLE:
        return perm.table[k - 1] if k <= len(perm.table) else k
    if rule is Rule.BLOCK_INTERLEAVE:
        L = int(perm.params["block_len"])
        base, t = divmod(k - 1, L)
        return base * L + _thin_first(t + 1, L, 2)
    stride = int(perm.params["stride"])
    start, length = superblock_bounds(stride, k)
    return start + _thin_first(k - start, length, stride)


def inverse_table(perm: Permutation) -> Permutation:
    if perm.rule is not Rule.TABLE:
        raise ValidationError("inverse is only tabulated for table rules")
    inv = [0] * len(perm.table)
    for i, v in enumerate(perm.table, 1):
        inv[v - 1] = i
    return table_permutation(inv)
