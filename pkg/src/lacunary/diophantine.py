"""Solution counting for ``a n_k + b n_l = c`` and ``sum a_i n_{k_i} = b``, and
finite-scale certificates for the associated Diophantine conditions.

Certificates are evidence from a bounded search, never proofs. A verdict of
``violated`` always carries witnesses.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import FORMAT_VERSION
from .errors import CapabilityError, ValidationError
from .sequences import GapSequence, OmegaSchedule

MAX_P = 8
MAX_COEFF = 1000
DEFAULT_P_CAP = 4
DEFAULT_COEFF_CAP = 10
DEFAULT_C_SCAN_BOUND = 10 ** 6
DEFAULT_BUDGET = 50_000_000
LINEAR_DELTA = 0.1
TABLE_LIMIT = 100
WITNESS_LIMIT = 20
_INT64_SAFE = 1 << 62


class Verdict(str, enum.Enum):
    CONSISTENT = "consistent"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


class B2Variant(str, enum.Enum):
    PLAIN = "plain"
    STRONG = "strong"
    WEAK = "weak"
    ZERO = "zero"


_B2_KIND = {B2Variant.PLAIN: "B2", B2Variant.STRONG: "B2_strong",
            B2Variant.WEAK: "B2_weak", B2Variant.ZERO: "B2_zero"}


@dataclass(frozen=True)
class TwoTermQuery:
    a: int
    b: int
    c: int
    n_limit: int
    exclude_diagonal: bool = False

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise ValidationError("coefficients a and b must be nonzero")
        if self.n_limit < 1:
            raise ValidationError("n_limit must be >= 1")


@dataclass(frozen=True)
class PTermQuery:
    coeffs: tuple[int, ...]
    rhs: int
    n_limit: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(a) for a in self.coeffs))
        if len(self.coeffs) < 2:
            raise ValidationError("need p >= 2 coefficients")
        if any(a == 0 for a in self.coeffs):
            raise ValidationError("every coefficient must be nonzero")
        if self.n_limit < 1:
            raise ValidationError("n_limit must be >= 1")


@dataclass
class ConditionCertificate:
    kind: str
    params: dict
    n_limit: int
    coeff_bound: int
    observed_max_count: int
    observed_counts_by_c: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    verdict: Verdict = Verdict.CONSISTENT
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict is Verdict.VIOLATED and not self.witnesses:
            raise ValidationError("a violated certificate needs witnesses")

    def to_json(self) -> dict:
        return {"version": FORMAT_VERSION, "kind": self.kind,
                "params": {**self.params, "n_limit": self.n_limit,
                           "coeff_bound": self.coeff_bound},
                "observed_max_count": self.observed_max_count,
                "table": self.observed_counts_by_c[:TABLE_LIMIT],
                "witnesses": [list(w) for w in self.witnesses[:WITNESS_LIMIT]],
                "verdict": self.verdict.value, "notes": self.notes}


def _check_limit(seq: GapSequence, n_limit: int) -> tuple[int, ...]:
    if n_limit < 1 or n_limit > len(seq):
        raise ValidationError(f"n_limit = {n_limit} outside 1..{len(seq)}")
    return seq.terms[:n_limit]


def _index_map(terms: Sequence[int]) -> dict[int, list[int]]:
    where = defaultdict(list)
    for k, t in enumerate(terms, 1):
        where[t].append(k)
    return where


def two_term_solutions(seq: GapSequence, q: TwoTermQuery) -> list[tuple[int, int]]:
    """Ordered index pairs ``(k, l)`` with ``a n_k + b n_l = c``, sorted."""
    terms = _check_limit(seq, q.n_limit)
    where = _index_map(terms)
    out = []
    for l, nl in enumerate(terms, 1):
        num = q.c - q.b * nl
        if num % q.a:
            continue
        for k in where.get(num // q.a, ()):
            if q.exclude_diagonal and k == l:
                continue
            out.append((k, l))
    out.sort()
    return out


def count_two_term(seq: GapSequence, q: TwoTermQuery) -> int:
    return len(two_term_solutions(seq, q))


def _nonzero_range(bound: int) -> list[int]:
    return [v for v in range(-bound, bound + 1) if v]


def _value_counts(a: int, b: int, terms: Sequence[int]) -> tuple[Counter, bool]:
    """Counts of ``a t_k + b t_l`` over all ordered pairs."""
    top = max(terms)
    if (abs(a) + abs(b)) * top < _INT64_SAFE:
        t = np.array(terms, dtype=np.int64)
        vals, cnt = np.unique(a * t[:, None] + b * t[None, :], return_counts=True)
        return Counter(dict(zip(vals.tolist(), cnt.tolist()))), True
    return Counter(a * x + b * y for x in terms for y in terms), False


def _b2_counts(a: int, b: int, terms: Sequence[int], variant: B2Variant) -> Counter:
    counts, _ = _value_counts(a, b, terms)
    if variant in (B2Variant.PLAIN, B2Variant.WEAK):
        counts.pop(0, None)
    else:
        if a + b == 0:
            # diagonal pairs all land on c = 0 and are excluded there
            counts[0] -= len(terms)
            if counts[0] <= 0:
                counts.pop(0)
        if variant is B2Variant.ZERO:
            counts = Counter({0: counts[0]}) if counts.get(0) else Counter()
    return counts


def certify_B2(seq: GapSequence, variant: B2Variant | str = B2Variant.PLAIN,
               n_limit: int | None = None, coeff_bound: int = 1,
               c_scan_bound: int = DEFAULT_C_SCAN_BOUND,
               budget: int = DEFAULT_BUDGET) -> ConditionCertificate:
    """Exhaustive count of ``a n_k + b n_l = c`` over ``0 < |a|, |b| <= coeff_bound``.

    Only attainable ``c`` can have solutions, so bucketing the values
    ``a n_k + b n_l`` gives the exact maximum over all ``c``. Pairs
    ``(a, b)`` and ``(-a, -b)`` have mirrored tables; only ``a > 0`` is scanned.

    ``violated`` needs a linear-in-N family: for one ``(a, b)`` the largest
    count is at least ``0.1 * P`` at each prefix ``P`` in ``N, N//2, N//4``.
    For the bounded-count variants the count at ``N`` must also exceed the
    count at ``N//4``.
    """
    variant = B2Variant(variant)
    n_limit = len(seq) if n_limit is None else n_limit
    terms = _check_limit(seq, n_limit)
    if coeff_bound < 1:
        raise ValidationError("coeff_bound must be >= 1")
    prefixes = [p for p in (n_limit, n_limit // 2, n_limit // 4) if p >= 1]
    rule_applies = len(prefixes) == 3

    rows = []
    best = (0, None)
    scan_best = 0
    family = None
    spent = 0
    partial = False
    for a in range(1, coeff_bound + 1):
        for b in _nonzero_range(coeff_bound):
            if spent + n_limit * n_limit > budget:
                partial = True
                break
            spent += n_limit * n_limit
            counts = _b2_counts(a, b, terms, variant)
            if not counts:
                continue
            c_top, n_top = max(counts.items(), key=lambda kv: (kv[1], -abs(kv[0]), kv[0]))
            if n_top > best[0]:
                best = (n_top, (a, b, c_top))
            scan = [n for c, n in counts.items() if abs(c) <= c_scan_bound]
            scan_best = max([scan_best, *scan])
            top = heapq.nsmallest(TABLE_LIMIT, counts.items(), key=lambda kv: (-kv[1], abs(kv[0]), kv[0]))
            rows.extend({"a": a, "b": b, "c": c, "count": n} for c, n in top)
            if family is None and rule_applies and n_top >= LINEAR_DELTA * n_limit:
                sub = [max(_b2_counts(a, b, terms[:p], variant).values(), default=0)
                       for p in prefixes[1:]]
                ok = all(m >= LINEAR_DELTA * p for m, p in zip(sub, prefixes[1:]))
                # bounded-count variants: a constant count is bounded, so demand growth too
                if variant is not B2Variant.WEAK:
                    ok = ok and n_top > sub[-1]
                if ok:
                    family = (a, b, c_top)
        if partial:
            break

    rows.sort(key=lambda r: (-r["count"], r["a"], r["b"], abs(r["c"]), r["c"]))
    del rows[TABLE_LIMIT:]
    witnesses = []
    target = family or best[1]
    if target is not None:
        a, b, c = target
        sols = two_term_solutions(seq, TwoTermQuery(
            a, b, c, n_limit, exclude_diagonal=(c == 0 and variant in (B2Variant.STRONG, B2Variant.ZERO))))
        witnesses = [(a, b, c, k, l) for k, l in sols[:WITNESS_LIMIT]]
    if family is not None:
        verdict = Verdict.VIOLATED
    elif partial:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.CONSISTENT
    notes = {"scan_max_count": scan_best, "c_scan_bound": c_scan_bound,
             "argmax": list(best[1]) if best[1] else None,
             "prefixes_checked": prefixes if rule_applies else [],
             "delta": LINEAR_DELTA, "sign_canonical": "a > 0", "partial_scan": partial}
    if family is not None:
        notes["linear_family"] = list(family)
    return ConditionCertificate(_B2_KIND[variant], {"variant": variant.value, "sequence": seq.header()},
                                n_limit, coeff_bound, best[0], rows, witnesses, verdict, notes)


def _nondegenerate(parts: Sequence[int]) -> bool:
    """No nonempty proper subset of ``parts`` sums to zero."""
    p = len(parts)
    full = (1 << p) - 1
    for mask in range(1, full):
        if sum(parts[i] for i in range(p) if mask >> i & 1) == 0:
            return False
    return True


def _check_p(p: int) -> None:
    if p < 2:
        raise ValidationError("p must be >= 2")
    if p > MAX_P:
        raise CapabilityError(f"p = {p} exceeds the configured cap of {MAX_P}")


def p_term_solutions(seq: GapSequence, q: PTermQuery) -> list[tuple[int, ...]]:
    """Nondegenerate index tuples ``k_1 < ... < k_p`` solving the equation."""
    p = len(q.coeffs)
    _check_p(p)
    terms = _check_limit(seq, q.n_limit)
    where = _index_map(terms)
    *head, last = q.coeffs
    out = []
    for ks in itertools.combinations(range(1, q.n_limit + 1), p - 1):
        partial = sum(a * terms[k - 1] for a, k in zip(head, ks))
        num = q.rhs - partial
        if num % last:
            continue
        for kp in where.get(num // last, ()):
            if kp <= ks[-1]:
                continue
            idx = ks + (kp,)
            if _nondegenerate([a * terms[k - 1] for a, k in zip(q.coeffs, idx)]):
                out.append(idx)
    out.sort()
    return out


def count_p_term_nondegenerate(seq: GapSequence, q: PTermQuery) -> int:
    return len(p_term_solutions(seq, q))


def _coeff_vectors(p: int, bound: int) -> Iterable[tuple[int, ...]]:
    for first in range(1, bound + 1):
        for rest in itertools.product(_nonzero_range(bound), repeat=p - 1):
            yield (first, *rest)


def certify_Ap(seq: GapSequence, p: int, coeff_bound: int = 1, rhs_bound: int = 100,
               n_limit: int | None = None, budget: int = DEFAULT_BUDGET) -> ConditionCertificate:
    """Largest nondegenerate count over coefficient vectors and ``0 < |b| <= rhs_bound``.

    Tuples are strictly increasing in index; ``(a, b)`` and ``(-a, -b)`` have
    equal counts so only vectors with ``a_1 > 0`` are scanned.
    """
    _check_p(p)
    if coeff_bound < 1 or rhs_bound < 1:
        raise ValidationError("coeff_bound and rhs_bound must be >= 1")
    n_limit = len(seq) if n_limit is None else n_limit
    terms = _check_limit(seq, n_limit)
    tuples = list(itertools.combinations(range(n_limit), p))
    per_vector = max(1, len(tuples))
    rows = []
    best = (0, None)
    spent = 0
    partial = False
    for coeffs in _coeff_vectors(p, coeff_bound):
        if spent + per_vector > budget:
            partial = True
            break
        spent += per_vector
        counts = Counter()
        for idx in tuples:
            parts = [a * terms[k] for a, k in zip(coeffs, idx)]
            s = sum(parts)
            if s and abs(s) <= rhs_bound and _nondegenerate(parts):
                counts[s] += 1
        for b, n in counts.items():
            rows.append({"coeffs": list(coeffs), "b": b, "count": n})
            if n > best[0]:
                best = (n, (coeffs, b))
    rows.sort(key=lambda r: (-r["count"], r["coeffs"], abs(r["b"]), r["b"]))
    witnesses = []
    if best[1] is not None:
        coeffs, b = best[1]
        for idx in p_term_solutions(seq, PTermQuery(coeffs, b, n_limit))[:WITNESS_LIMIT]:
            witnesses.append((*coeffs, b, *idx))
    notes = {"ordering": "k_1 < ... < k_p", "sign_canonical": "a_1 > 0",
             "argmax": {"coeffs": list(best[1][0]), "rhs": best[1][1]} if best[1] else None,
             "partial_scan": partial, "vectors_scanned": spent // per_vector}
    verdict = Verdict.INCONCLUSIVE if partial else Verdict.CONSISTENT
    return ConditionCertificate(f"A{p}", {"p": p, "rhs_bound": rhs_bound, "sequence": seq.header()},
                                n_limit, coeff_bound, best[0], rows, witnesses, verdict, notes)


def _omega_bounds(omega: OmegaSchedule, n_check: int, p_cap: int, coeff_cap: int):
    """Per-N search limits ``(N, p_max, coeff_max)``."""
    out = []
    for n in range(1, n_check + 1):
        w = omega(n)
        out.append((n, min(w, p_cap), min(n ** w, coeff_cap)))
    return out


def certify_Aomega(seq: GapSequence, omega: OmegaSchedule, n_check: int | None = None,
                   p_cap: int = DEFAULT_P_CAP, coeff_cap: int = DEFAULT_COEFF_CAP,
                   budget: int = DEFAULT_BUDGET,
                   max_witnesses: int = WITNESS_LIMIT) -> ConditionCertificate:
    """Search ``sum a_i n_{k_i} = 0`` (``k_1 < ... < k_p``, ``k_p > N``) for N <= n_check.

    At stage N the limits are ``p <= min(omega_N, p_cap)`` and
    ``|a_i| <= min(N**omega_N, coeff_cap)``. The search fixes the first
    ``p - 1`` indices and coefficients and solves for the last coefficient,
    which must be a nonzero integer within the cap. A hit is a witness when
    some admissible stage N accepts it.
    """
    if p_cap < 2:
        raise ValidationError("p_cap must be >= 2")
    if p_cap > MAX_P or coeff_cap > MAX_COEFF:
        raise ValidationError(f"caps exceed the configured maxima (p {MAX_P}, coeff {MAX_COEFF})")
    if coeff_cap < 1:
        raise ValidationError("coeff_cap must be >= 1")
    K = len(seq)
    n_check = max(1, K - 1) if n_check is None else n_check
    if n_check < 1:
        raise ValidationError("n_check must be >= 1")
    # stages N >= K cannot have k_p > N inside the prefix
    n_check = min(n_check, K - 1)
    witnesses: list[tuple] = []
    spent = 0
    partial = False
    stopped = False
    if n_check >= 1:
        stages = _omega_bounds(omega, n_check, p_cap, coeff_cap)
        p_top = max(s[1] for s in stages)
        c_top = max(s[2] for s in stages)
        terms = list(seq.terms)
        safe = (p_top * c_top + 1) * max(terms) < _INT64_SAFE
        T = np.array(terms, dtype=np.int64 if safe else object)
        for p in range(2, p_top + 1):
            heads = [v for v in _coeff_vectors(p - 1, c_top)]
            H = np.array(heads, dtype=np.int64 if safe else object)
            hmax = np.max(np.abs(H), axis=1)
            for ks in itertools.combinations(range(K - 1), p - 1):
                later = T[ks[-1] + 1:]
                cost = len(heads) * len(later)
                if spent + cost > budget:
                    partial = True
                    break
                spent += cost
                partials = H @ T[list(ks)]
                num = -partials[:, None]
                hit = (num % later[None, :] == 0) & (num != 0) & \
                      (np.abs(num) <= c_top * later[None, :])
                for hi, li in zip(*np.nonzero(hit)):
                    kp = ks[-1] + 1 + int(li)
                    a_last = int(num[hi, 0] // later[li])
                    coeffs = heads[hi] + (a_last,)
                    if math.gcd(*coeffs) != 1:
                        continue  # scaled copy of a primitive relation
                    amax = max(int(hmax[hi]), abs(a_last))
                    stage = next((n for n, pm, cm in stages
                                  if n < kp + 1 and pm >= p and cm >= amax), None)
                    if stage is None:
                        continue
                    idx = tuple(k + 1 for k in ks) + (kp + 1,)
                    parts = [a * terms[k - 1] for a, k in zip(coeffs, idx)]
                    if not _nondegenerate(parts):
                        continue
                    witnesses.append((stage, *coeffs, *idx))
                    if len(witnesses) >= max_witnesses:
                        stopped = True
                        break
                if stopped:
                    break
            if partial or stopped:
                break
    if witnesses:
        verdict = Verdict.VIOLATED
    elif partial:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.CONSISTENT
    notes = {"ordering": "k_1 < ... < k_p", "witness_layout": "(N, a_1..a_p, k_1..k_p)",
             "within_caps_only": True, "partial_scan": partial,
             "stopped_at_witness_limit": stopped, "work": spent}
    return ConditionCertificate("Aomega", {"omega": omega.to_json(), "n_check": n_check,
                                           "p_cap": p_cap, "coeff_cap": coeff_cap,
                                           "sequence": seq.header()},
                                K, coeff_cap, len(witnesses), [], witnesses, verdict, notes)
