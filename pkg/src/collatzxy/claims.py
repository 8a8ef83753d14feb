"""Registry of testable statements and their range checkers.

Every statement is treated as a hypothesis.  A check either finds no
violation on the range (VERIFIED_ON_RANGE), finds at least one
(FALSIFIED, minimal witness first), or cannot decide some instances because a
trajectory ran out of budget (INDETERMINATE).

Witness order: per-number claims by n ascending; pairwise and closure claims
by (max(a, b), min(a, b)) ascending.
"""

from __future__ import annotations

import heapq
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice

from . import exact
from .errors import BudgetExceeded, UnknownClaim
from .trajectory import DEFAULT_BUDGET, compute_trajectory, trajectory_range, trajectories_for

PER_NUMBER = "per-number predicate"
PAIRWISE = "pairwise predicate"
CLOSURE = "closure predicate"

VERIFIED = "VERIFIED_ON_RANGE"
FALSIFIED = "FALSIFIED"
INDETERMINATE = "INDETERMINATE"

DEFAULT_MAX_WITNESSES = 10
# exhaustive pair enumeration for C8 up to this hi, seeded sampling above it
C8_EXHAUSTIVE_HI = 10**4
C8_SAMPLES = 20_000
C8_SEED = 20_580


@dataclass(frozen=True)
class Claim:
    id: str
    citation: str
    statement: str
    kind: str
    # smallest n the statement is evaluated on
    min_n: int = 1

    def one_line(self) -> str:
        return f"{self.id} ({self.citation}): {self.statement}"


CLAIMS: tuple[Claim, ...] = (
    Claim("C1", "Lemma 3.1", "0 <= eps < 1/3 for every convergent n, eps = 1 - Z", PER_NUMBER),
    Claim("C2", "Theorem 3.1 / Corollary 3.1", "f_{X,Y}(n) = ceil(Z) = 1 for every convergent n", PER_NUMBER),
    Claim("C3", "Lemma 4.1", "0 < (1 - 3^-X)/2 < 1/2 for every convergent n >= 2", PER_NUMBER, min_n=2),
    Claim("C4", "Lemma 4.2 + Theorem 4.1", "{n'} = (1 - 3^-X)/2 and floor(n') = n", PER_NUMBER),
    Claim("C5", "Lemma 4.3", "0 <= eps_n < 3^-(X+1)", PER_NUMBER),
    Claim("C6", "Remark 4.1", "equal (X, Y) implies eps_n = eps_m", PAIRWISE),
    Claim("C7", "Unicity of the couple (X, Y)", "equal (X, Y) implies n = m", PAIRWISE),
    Claim("C8", "Addition property", "a, b convergent implies a + b convergent (within budget)", CLOSURE),
)

_BY_ID = {c.id: c for c in CLAIMS}
PER_NUMBER_IDS = tuple(c.id for c in CLAIMS if c.kind == PER_NUMBER)


def list_claims() -> list[Claim]:
    return list(CLAIMS)


def get_claim(claim_id: str) -> Claim:
    try:
        return _BY_ID[claim_id.upper()]
    except KeyError:
        raise UnknownClaim(claim_id) from None


@dataclass
class ClaimResult:
    claim_id: str
    lo: int
    hi: int
    verdict: str
    checked_count: int
    counterexamples: list[dict] = field(default_factory=list)
    falsified_count: int = 0
    indeterminate: list[dict] = field(default_factory=list)
    indeterminate_count: int = 0
    note: str | None = None
    companion: ClaimResult | None = None

    @property
    def falsified(self) -> bool:
        return self.verdict == FALSIFIED

    def to_json(self) -> dict:
        out = {
            "claim_id": self.claim_id,
            "range": {"lo": str(self.lo), "hi": str(self.hi)},
            "verdict": self.verdict,
            "checked_count": self.checked_count,
            "falsified_count": self.falsified_count,
            "counterexamples": self.counterexamples,
            "indeterminate_count": self.indeterminate_count,
            "indeterminate": self.indeterminate,
        }
        if self.note:
            out["note"] = self.note
        if self.companion is not None:
            out["companion"] = self.companion.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> ClaimResult:
        companion = data.get("companion")
        return cls(
            claim_id=data["claim_id"],
            lo=int(data["range"]["lo"]),
            hi=int(data["range"]["hi"]),
            verdict=data["verdict"],
            checked_count=data["checked_count"],
            counterexamples=data.get("counterexamples", []),
            falsified_count=data.get("falsified_count", len(data.get("counterexamples", []))),
            indeterminate=data.get("indeterminate", []),
            indeterminate_count=data.get("indeterminate_count", 0),
            note=data.get("note"),
            companion=cls.from_json(companion) if companion else None,
        )


def _verdict(falsified: int, indeterminate: int) -> str:
    if falsified:
        return FALSIFIED
    if indeterminate:
        return INDETERMINATE
    return VERIFIED


def budget_witness(exc: BudgetExceeded) -> dict:
    return {"n": str(exc.n), "steps": exc.steps, "last_value": str(exc.last_value)}


# -- per-number predicates --------------------------------------------------

def per_number_violation(claim_id: str, n: int, X: int, Y: int) -> dict | None:
    """Evaluate a per-number claim on (n, X, Y) exactly.

    Returns None when the statement holds, else a witness holding the exact
    quantities that show the violation.
    """
    base = {"n": str(n), "x": X, "y": Y}
    r = exact.render
    if claim_id == "C1":
        z = exact.z_value(n, X, Y)
        eps = 1 - z
        if 0 <= eps < Fraction(1, 3):
            return None
        return {**base, "z": r(z), "epsilon": r(eps)}
    if claim_id == "C2":
        z = exact.z_value(n, X, Y)
        f = exact.ceil_rational(z)
        if f == 1:
            return None
        return {**base, "z": r(z), "f": str(f)}
    if claim_id in ("C3", "C3-relaxed"):
        gap = exact.half_gap(X)
        ok = (0 < gap) if claim_id == "C3" else (0 <= gap)
        if ok and gap < Fraction(1, 2):
            return None
        return {**base, "half_gap": r(gap)}
    if claim_id == "C4":
        n_prime = exact.canonical_decomposition(n, X, Y)
        gap = exact.half_gap(X)
        if n_prime >= 0:
            frac = exact.fractional_part(n_prime)
            floor_n = exact.recover_n(n_prime)
            if frac == gap and floor_n == n:
                return None
        else:
            frac = n_prime - exact.floor_rational(n_prime)
            floor_n = exact.floor_rational(n_prime)
        return {**base, "n_prime": r(n_prime), "frac_n_prime": r(frac), "half_gap": r(gap), "floor_n_prime": str(floor_n)}
    if claim_id == "C5":
        eps_n = exact.epsilon_n(n, X, Y)
        bound = Fraction(1, 3 ** (X + 1))
        if 0 <= eps_n < bound:
            return None
        return {**base, "epsilon_n": r(eps_n), "bound": r(bound)}
    raise UnknownClaim(claim_id)


def _check_per_number(claim: Claim, claim_id: str, lo: int, hi: int, budget: int, max_w: int) -> ClaimResult:
    start = max(lo, claim.min_n)
    note = None
    if start > lo:
        note = f"n < {claim.min_n} excluded: the trajectory of 1 takes no steps"
    if start > hi:
        return ClaimResult(claim_id, lo, hi, VERIFIED, 0, note=note)
    batch = trajectory_range(start, hi, budget)
    witnesses: list[dict] = []
    falsified = 0
    checked = 0
    for i, n in enumerate(range(start, hi + 1)):
        if i in batch.over_budget:
            continue
        checked += 1
        w = per_number_violation(claim_id, n, batch.x[i], batch.y[i])
        if w is not None:
            falsified += 1
            if len(witnesses) < max_w:
                witnesses.append(w)
    over = [budget_witness(batch.over_budget[i]) for i in sorted(batch.over_budget)]
    return ClaimResult(
        claim_id, lo, hi, _verdict(falsified, len(over)), checked, witnesses, falsified,
        over[:max_w], len(over), note,
    )


# -- pairwise predicates ----------------------------------------------------

def _grouping(lo: int, hi: int, budget: int) -> tuple[dict[tuple[int, int], list[int]], list[BudgetExceeded]]:
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    batch = trajectory_range(lo, hi, budget)
    groups: dict[tuple[int, int], list[int]] = {}
    for i, n in enumerate(range(lo, hi + 1)):
        if i in batch.over_budget:
            continue
        groups.setdefault((batch.x[i], batch.y[i]), []).append(n)
    return groups, [batch.over_budget[i] for i in sorted(batch.over_budget)]


def group_by_xy(lo: int, hi: int, budget: int = DEFAULT_BUDGET) -> dict[tuple[int, int], list[int]]:
    """Bucket every n in [lo, hi] by its (X, Y); n that exceed the budget are left out."""
    return _grouping(lo, hi, budget)[0]


def _ordered_pairs(members: list[int]):
    """Pairs (a, b), a < b, in (b, a) ascending order."""
    for j in range(1, len(members)):
        b = members[j]
        for a in members[:j]:
            yield a, b


def _pair_key(w: dict) -> tuple[int, int]:
    return (int(w["b"]), int(w["a"]))


def _check_pairwise(claim_id: str, lo: int, hi: int, budget: int, max_w: int) -> ClaimResult:
    groups, over = _grouping(lo, hi, budget)
    r = exact.render
    candidates: list[dict] = []
    falsified = 0
    checked = 0
    for (X, Y), members in groups.items():
        m = len(members)
        pairs = m * (m - 1) // 2
        checked += pairs
        if pairs == 0:
            continue
        if claim_id == "C7":
            falsified += pairs
            for a, b in islice(_ordered_pairs(members), max_w):
                candidates.append({"a": str(a), "b": str(b), "x": X, "y": Y})
            continue
        eps = {n: exact.epsilon(n, X, Y) for n in members}
        eps_n = {n: e / 3**X for n, e in eps.items()}
        same = sum(c * (c - 1) // 2 for c in Counter(eps_n.values()).values())
        falsified += pairs - same
        found = 0
        for a, b in _ordered_pairs(members):
            if found >= max_w:
                break
            if eps_n[a] != eps_n[b]:
                found += 1
                candidates.append({
                    "a": str(a), "b": str(b), "x": X, "y": Y,
                    "epsilon_a": r(eps[a]), "epsilon_b": r(eps[b]),
                    "epsilon_n_a": r(eps_n[a]), "epsilon_n_b": r(eps_n[b]),
                })
    witnesses = heapq.nsmallest(max_w, candidates, key=_pair_key)
    over_w = [budget_witness(e) for e in over]
    return ClaimResult(
        claim_id, lo, hi, _verdict(falsified, len(over_w)), checked, witnesses, falsified,
        over_w[:max_w], len(over_w),
    )


# -- closure under addition -------------------------------------------------

def _pairs_by_b(s: int, lo: int):
    for a in range(s // 2, lo - 1, -1):
        yield s - a, a


def _check_addition(lo: int, hi: int, budget: int, max_w: int, seed: int) -> ClaimResult:
    """a + b converges whenever a and b do, for lo <= a <= b, a + b <= hi.

    Reaching 1 within the budget is the operational meaning of "converges".  A
    sum that exceeds the budget is not evidence of divergence, so such pairs
    are INDETERMINATE; this claim can never be FALSIFIED by computation.
    """
    if 2 * lo > hi:
        return ClaimResult("C8", lo, hi, VERIFIED, 0, note="no pair a <= b in range has a + b <= hi")
    if hi <= C8_EXHAUSTIVE_HI:
        batch = trajectory_range(lo, hi, budget)
        bad = {lo + i: exc for i, exc in batch.over_budget.items()}
        checked = sum(s // 2 - lo + 1 for s in range(2 * lo, hi + 1))
        bad_sums = [s for s in sorted(bad) if s >= 2 * lo]
        n_undecided = sum(s // 2 - lo + 1 for s in bad_sums)
        # per sum, pairs come out with b ascending; merge across sums
        streams = [_pairs_by_b(s, lo) for s in bad_sums]
        undecided = [(a, b) for b, a in islice(heapq.merge(*streams), max_w)]
        note = None
    else:
        rng = random.Random(seed)
        chosen: set[tuple[int, int]] = set()
        for _ in range(C8_SAMPLES):
            s = rng.randint(2 * lo, hi)
            a = rng.randint(lo, s // 2)
            chosen.add((a, s - a))
        pairs = sorted(chosen, key=lambda p: (p[1], p[0]))
        sums = sorted({a + b for a, b in pairs})
        batch = trajectories_for(sums, budget)
        bad = {sums[i]: exc for i, exc in batch.over_budget.items()}
        undecided = [p for p in pairs if sum(p) in bad]
        n_undecided = len(undecided)
        checked = len(pairs)
        note = f"{checked} distinct pairs sampled with seed {seed}"
    witnesses = [
        {"a": str(a), "b": str(b), "sum": str(a + b), "steps": bad[a + b].steps}
        for a, b in undecided[:max_w]
    ]
    return ClaimResult(
        "C8", lo, hi, _verdict(0, n_undecided), checked - n_undecided, [], 0,
        witnesses, n_undecided, note,
    )


def check_claim(
    claim_id: str,
    lo: int,
    hi: int,
    budget: int = DEFAULT_BUDGET,
    max_witnesses: int = DEFAULT_MAX_WITNESSES,
    seed: int = C8_SEED,
) -> ClaimResult:
    """Check one registry claim over the inclusive range [lo, hi]."""
    claim = get_claim(claim_id)
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if claim.kind == PER_NUMBER:
        result = _check_per_number(claim, claim.id, lo, hi, budget, max_witnesses)
        if claim.id == "C3":
            result.companion = _check_per_number(claim, "C3-relaxed", lo, hi, budget, max_witnesses)
        return result
    if claim.kind == PAIRWISE:
        return _check_pairwise(claim.id, lo, hi, budget, max_witnesses)
    return _check_addition(lo, hi, budget, max_witnesses, seed)


def revalidate(claim_id: str, witness: dict, budget: int = DEFAULT_BUDGET) -> bool:
    """Recompute a counterexample from its start value(s) alone.

    True when the recorded violation reproduces with identical quantities.
    """
    claim = get_claim(claim_id.replace("-relaxed", ""))
    if claim.kind == PER_NUMBER:
        rec = compute_trajectory(int(witness["n"]), budget, fast=False)
        again = per_number_violation(claim_id, rec.n, rec.x_count, rec.y_count)
        return again == witness
    if claim.kind == PAIRWISE:
        a, b = int(witness["a"]), int(witness["b"])
        ra = compute_trajectory(a, budget, fast=False)
        rb = compute_trajectory(b, budget, fast=False)
        if ra.xy != rb.xy or ra.xy != (witness["x"], witness["y"]) or a == b:
            return False
        if claim.id == "C7":
            return True
        return exact.epsilon_n(a, *ra.xy) != exact.epsilon_n(b, *rb.xy) and (
            exact.render(exact.epsilon_n(a, *ra.xy)) == witness["epsilon_n_a"]
            and exact.render(exact.epsilon_n(b, *rb.xy)) == witness["epsilon_n_b"]
        )
    # C8 never yields counterexamples; an INDETERMINATE pair re-validates if the sum
    # again exhausts the budget
    try:
        compute_trajectory(int(witness["a"]) + int(witness["b"]), budget, fast=False)
    except BudgetExceeded:
        return True
    return False
