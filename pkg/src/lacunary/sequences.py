"""Integer sequence classes: geometric, Hardy-Littlewood-Polya, Erdos-gap and
random sequences drawn from growing intervals, plus growth diagnostics.

Indices are 1-based throughout (``n_1`` is the first term); ``terms`` is a
plain tuple so ``seq.terms[0] == n_1``.
"""

from __future__ import annotations

import enum
import heapq
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CapacityError, ValidationError

DEFAULT_CAPACITY_BITS = 64


class Provenance(str, enum.Enum):
    GEOMETRIC = "geometric"
    HLP = "hlp"
    ERDOS_GAP = "erdos_gap"
    RANDOM_AOMEGA = "random_aomega"
    USER_FILE = "user_file"


def _check_capacity(value: int, capacity_bits: int | None, what: str) -> None:
    if capacity_bits is not None and value.bit_length() > capacity_bits:
        raise CapacityError(
            f"{what} = {value} exceeds the declared {capacity_bits}-bit capacity"
        )


@dataclass(frozen=True)
class GapSequence:
    """A finite prefix ``n_1, ..., n_K`` of a positive integer sequence."""

    terms: tuple[int, ...]
    provenance: Provenance
    params: dict = field(default_factory=dict, compare=False)
    allow_unordered: bool = False
    duplicates_dropped: int = 0

    def __post_init__(self):
        terms = tuple(int(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if not terms:
            raise ValidationError("a sequence needs at least one term")
        if min(terms) < 1:
            raise ValidationError("all terms must be positive integers")
        if not self.allow_unordered:
            for k in range(len(terms) - 1):
                if terms[k + 1] <= terms[k]:
                    raise ValidationError(
                        f"terms must be strictly increasing: n_{k + 1} = {terms[k]}, "
                        f"n_{k + 2} = {terms[k + 1]}"
                    )

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def term(self, k: int) -> int:
        """Return ``n_k`` (1-based)."""
        if not 1 <= k <= len(self.terms):
            raise ValidationError(f"index {k} outside 1..{len(self.terms)}")
        return self.terms[k - 1]

    def prefix(self, n: int) -> "GapSequence":
        if not 1 <= n <= len(self.terms):
            raise ValidationError(f"prefix length {n} outside 1..{len(self.terms)}")
        return GapSequence(self.terms[:n], self.provenance, dict(self.params),
                           self.allow_unordered, self.duplicates_dropped)

    @property
    def is_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.terms, self.terms[1:]))

    def sorted_view(self) -> "GapSequence":
        """Sorted, deduplicated copy; ``duplicates_dropped`` records the loss."""
        uniq = sorted(set(self.terms))
        return GapSequence(tuple(uniq), self.provenance, dict(self.params),
                           allow_unordered=False,
                           duplicates_dropped=len(self.terms) - len(uniq))

    def header(self) -> dict:
        head = {"provenance": self.provenance.value, "count": len(self.terms)}
        head.update({k: v for k, v in self.params.items()})
        if self.allow_unordered:
            head["allow_unordered"] = True
        return head


@dataclass(frozen=True)
class GrowthReport:
    min_ratio: Fraction
    hadamard_q: Fraction | None
    ratio_divergence: bool
    tijdeman_alpha: float | None

    def __post_init__(self):
        if self.hadamard_q is not None and self.hadamard_q <= 1:
            raise ValidationError("hadamard_q must exceed 1")


class OmegaRule(str, enum.Enum):
    CONSTANT_THEN_LINEAR = "constant_then_linear"
    LOG_POWER = "log_power"
    USER_LIST = "user_list"


@dataclass(frozen=True)
class OmegaSchedule:
    """Nondecreasing positive integer schedule ``omega_1, omega_2, ...``.

    ``constant_then_linear``: ``level`` up to index ``switch`` (``None`` keeps
    it constant forever), then one more per index.
    ``log_power``: ``max(floor, ceil((log k) ** alpha))``.
    ``user_list``: explicit values; indices past the list are an error.
    """

    rule: OmegaRule
    params: dict = field(default_factory=dict)
    values: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rule", OmegaRule(self.rule))
        if self.rule is OmegaRule.USER_LIST:
            vals = tuple(int(v) for v in self.values)
            object.__setattr__(self, "values", vals)
            if not vals:
                raise ValidationError("user_list schedule needs values")
            if vals[0] < 1 or any(b < a for a, b in zip(vals, vals[1:])):
                raise ValidationError("omega values must be >= 1 and nondecreasing")
        elif self.rule is OmegaRule.CONSTANT_THEN_LINEAR:
            if int(self.params.get("level", 0)) < 1:
                raise ValidationError("constant_then_linear needs level >= 1")
        elif self.rule is OmegaRule.LOG_POWER:
            if float(self.params.get("alpha", 0)) <= 0:
                raise ValidationError("log_power needs alpha > 0")

    @classmethod
    def constant(cls, level: int) -> "OmegaSchedule":
        return cls(OmegaRule.CONSTANT_THEN_LINEAR, {"level": level, "switch": None})

    @classmethod
    def from_list(cls, values: Iterable[int]) -> "OmegaSchedule":
        return cls(OmegaRule.USER_LIST, {}, tuple(values))

    def __call__(self, k: int) -> int:
        if k < 1:
            raise ValidationError("omega is indexed from k = 1")
        if self.rule is OmegaRule.USER_LIST:
            if k > len(self.values):
                raise ValidationError(f"omega schedule has no value for k = {k}")
            return self.values[k - 1]
        if self.rule is OmegaRule.CONSTANT_THEN_LINEAR:
            level = int(self.params["level"])
            switch = self.params.get("switch")
            if switch is None or k <= int(switch):
                return level
            return level + k - int(switch)
        alpha = float(self.params["alpha"])
        floor = int(self.params.get("floor", 1))
        return max(floor, math.ceil(math.log(k) ** alpha)) if k > 1 else floor

    def take(self, count: int) -> list[int]:
        return [self(k) for k in range(1, count + 1)]

    def to_json(self) -> dict:
        out = {"rule": self.rule.value, "params": dict(self.params)}
        if self.values:
            out["values"] = list(self.values)
        return out


def gen_geometric(base: int, count: int, *,
                  capacity_bits: int | None = DEFAULT_CAPACITY_BITS) -> GapSequence:
    """``n_k = base**k`` for ``k = 1..count``."""
    if base < 2:
        raise ValidationError("base must be >= 2")
    if count < 1:
        raise ValidationError("count must be >= 1")
    _check_capacity(base ** count, capacity_bits, f"{base}^{count}")
    terms = tuple(base ** k for k in range(1, count + 1))
    return GapSequence(terms, Provenance.GEOMETRIC, {"base": base})


def check_pairwise_coprime(generators: Sequence[int]) -> None:
    for i, p in enumerate(generators):
        if p < 2:
            raise ValidationError(f"generator {p} must be >= 2")
        for q in generators[i + 1:]:
            if gcd(p, q) != 1:
                raise ValidationError(
                    f"generators {p} and {q} are not coprime (gcd {gcd(p, q)})")


def gen_hlp(generators: Sequence[int], count: int, *,
            capacity_bits: int | None = DEFAULT_CAPACITY_BITS) -> GapSequence:
    """The ``count`` smallest products ``q_1^a_1 ... q_t^a_t`` (exponents >= 0).

    Heap enumeration: each popped value ``v`` spawns ``v * q`` only for
    generators at or after the largest one used in ``v``, so every product is
    pushed exactly once.
    """
    gens = sorted(int(g) for g in generators)
    if not gens:
        raise ValidationError("need at least one generator")
    check_pairwise_coprime(gens)
    if count < 1:
        raise ValidationError("count must be >= 1")
    heap = [(1, 0)]
    out: list[int] = []
    while len(out) < count:
        value, start = heapq.heappop(heap)
        _check_capacity(value, capacity_bits, "HLP term")
        out.append(value)
        for j in range(start, len(gens)):
            heapq.heappush(heap, (value * gens[j], j))
    return GapSequence(tuple(out), Provenance.HLP, {"generators": gens})


def gen_random_aomega(omega: OmegaSchedule, count: int, seed: int, *,
                      capacity_bits: int | None = DEFAULT_CAPACITY_BITS) -> GapSequence:
    """Independent draws ``n_k ~ Uniform{1, ..., k**omega_k}`` in draw order.

    The result may repeat or decrease; use ``sorted_view()`` when strict
    increase is needed.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    rng = random.Random(seed)
    terms = []
    for k in range(1, count + 1):
        upper = k ** omega(k)
        if capacity_bits is not None and upper.bit_length() > capacity_bits:
            raise CapacityError(
                f"k^omega_k = {k}^{omega(k)} exceeds {capacity_bits}-bit capacity at k = {k}")
        terms.append(rng.randint(1, upper))
    return GapSequence(tuple(terms), Provenance.RANDOM_AOMEGA,
                       {"seed": seed, "omega": omega.to_json()}, allow_unordered=True)


def gen_erdos_gap(alpha: float, count: int, *,
                  capacity_bits: int | None = DEFAULT_CAPACITY_BITS) -> GapSequence:
    """Greedy minimal sequence with ``n_{k+1} / n_k >= 1 + k**(-alpha)``."""
    if not 0 <= alpha < 0.5:
        raise ValidationError("alpha must lie in [0, 1/2)")
    if count < 1:
        raise ValidationError("count must be >= 1")
    terms = [1]
    for k in range(1, count):
        n = terms[-1]
        # ceiling taken exactly against the float value of k^-alpha
        step = Fraction(float(k) ** -alpha) * n
        nxt = n + max(1, math.ceil(step))
        _check_capacity(nxt, capacity_bits, f"n_{k + 1}")
        terms.append(nxt)
    return GapSequence(tuple(terms), Provenance.ERDOS_GAP, {"alpha": alpha})


def analyze_growth(seq: GapSequence, *, divergence_threshold: float = 10.0) -> GrowthReport:
    """Ratio and gap diagnostics over the whole prefix.

    ``ratio_divergence`` is True when every ratio in the second half of the
    prefix exceeds ``divergence_threshold``. ``tijdeman_alpha`` is the least
    ``alpha >= 0`` with ``n_{k+1} - n_k >= n_k / (log n_k)^alpha`` for every
    ``n_k >= 3`` (None when some gap is nonpositive).
    """
    t = seq.terms
    if len(t) < 2:
        raise ValidationError("growth analysis needs at least 2 terms")
    ratios = [Fraction(b, a) for a, b in zip(t, t[1:])]
    min_ratio = min(ratios)
    tail = ratios[len(ratios) // 2:]
    divergent = all(r > divergence_threshold for r in tail)

    alpha: float | None = 0.0
    for a, b in zip(t, t[1:]):
        gap = b - a
        if gap <= 0:
            alpha = None
            break
        if a < 3 or gap >= a:
            continue
        need = math.log(a / gap) / math.log(math.log(a))
        alpha = max(alpha, need)
    return GrowthReport(min_ratio, min_ratio if min_ratio > 1 else None, divergent, alpha)


def write_sequence(seq: GapSequence, path: str | Path) -> None:
    lines = [f"# {k}={_fmt_header(v)}" for k, v in seq.header().items()]
    lines.extend(str(t) for t in seq.terms)
    Path(path).write_text("\n".join(lines) + "\n")


def _fmt_header(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    if isinstance(v, dict):
        import json
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def read_sequence(path: str | Path, *, allow_unordered: bool | None = None) -> GapSequence:
    """Read the one-integer-per-line format; ``#`` lines carry ``key=value``."""
    header: dict[str, str] = {}
    terms: list[int] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                header[key.strip()] = value.strip()
            continue
        try:
            terms.append(int(line))
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: not an integer: {line!r}") from None
    if allow_unordered is None:
        allow_unordered = header.get("allow_unordered", "").lower() == "true"
    params = {k: v for k, v in header.items()
              if k not in ("provenance", "count", "allow_unordered")}
    params["source"] = str(path)
    if header.get("provenance"):
        params["declared_provenance"] = header["provenance"]
    return GapSequence(tuple(terms), Provenance.USER_FILE, params,
                       allow_unordered=allow_unordered)
