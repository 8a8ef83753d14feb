"""Partial aggregates for range sweeps.

A ``Partial`` summarizes one chunk and is immutable once built.  ``merge`` is
associative and commutative, so totals do not depend on chunk size, worker
count or completion order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from . import claims as claims_mod
from .claims import FALSIFIED, INDETERMINATE, VERIFIED
from .trajectory import trajectory_range

MAX_WITNESSES = 10
HIST_CAP = 1 << 16


@dataclass(frozen=True)
class Tally:
    verified: int = 0
    falsified: int = 0
    indeterminate: int = 0
    witnesses: tuple[dict, ...] = ()

    @property
    def verdict(self) -> str:
        if self.falsified:
            return FALSIFIED
        if self.indeterminate:
            return INDETERMINATE
        return VERIFIED

    def merge(self, other: Tally) -> Tally:
        ws = heapq.nsmallest(MAX_WITNESSES, self.witnesses + other.witnesses, key=lambda w: int(w["n"]))
        return Tally(
            self.verified + other.verified,
            self.falsified + other.falsified,
            self.indeterminate + other.indeterminate,
            tuple(ws),
        )

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "verified": self.verified,
            "falsified": self.falsified,
            "indeterminate": self.indeterminate,
            "witnesses": list(self.witnesses),
        }

    @classmethod
    def from_json(cls, d: dict) -> Tally:
        return cls(d["verified"], d["falsified"], d["indeterminate"], tuple(d["witnesses"]))


def _better(value_a: int, n_a: int, value_b: int, n_b: int) -> bool:
    """True if (value_a, n_a) wins: larger value, ties to the smaller n."""
    return value_a > value_b or (value_a == value_b and n_a < n_b)


@dataclass(frozen=True)
class Partial:
    count: int = 0
    max_k: int = -1
    argmax_n: int = 0
    max_peak: int = 0
    argmax_peak_n: int = 0
    histogram: dict = field(default_factory=dict)
    histogram_overflow: int = 0
    tallies: dict = field(default_factory=dict)
    over_budget_count: int = 0
    over_budget: tuple[dict, ...] = ()

    def merge(self, other: Partial) -> Partial:
        if _better(other.max_k, other.argmax_n, self.max_k, self.argmax_n):
            max_k, argmax_n = other.max_k, other.argmax_n
        else:
            max_k, argmax_n = self.max_k, self.argmax_n
        if _better(other.max_peak, other.argmax_peak_n, self.max_peak, self.argmax_peak_n):
            max_peak, argmax_peak_n = other.max_peak, other.argmax_peak_n
        else:
            max_peak, argmax_peak_n = self.max_peak, self.argmax_peak_n
        hist = dict(self.histogram)
        for key, c in other.histogram.items():
            hist[key] = hist.get(key, 0) + c
        hist, overflow = _cap_histogram(hist)
        tallies = dict(self.tallies)
        for cid, t in other.tallies.items():
            tallies[cid] = tallies[cid].merge(t) if cid in tallies else t
        over = heapq.nsmallest(MAX_WITNESSES, self.over_budget + other.over_budget, key=lambda w: int(w["n"]))
        return Partial(
            self.count + other.count,
            max_k, argmax_n, max_peak, argmax_peak_n,
            hist, self.histogram_overflow + other.histogram_overflow + overflow,
            tallies,
            self.over_budget_count + other.over_budget_count,
            tuple(over),
        )

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "max_k": self.max_k,
            "argmax_n": str(self.argmax_n),
            "max_peak": str(self.max_peak),
            "argmax_peak_n": str(self.argmax_peak_n),
            "xy_histogram": [[x, y, c] for (x, y), c in sorted(self.histogram.items())],
            "xy_histogram_overflow": self.histogram_overflow,
            "claim_tallies": {cid: self.tallies[cid].to_json() for cid in sorted(self.tallies)},
            "over_budget_count": self.over_budget_count,
            "over_budget": list(self.over_budget),
        }

    @classmethod
    def from_json(cls, d: dict) -> Partial:
        return cls(
            d["count"], d["max_k"], int(d["argmax_n"]), int(d["max_peak"]), int(d["argmax_peak_n"]),
            {(x, y): c for x, y, c in d["xy_histogram"]}, d["xy_histogram_overflow"],
            {cid: Tally.from_json(t) for cid, t in d["claim_tallies"].items()},
            d["over_budget_count"], tuple(d["over_budget"]),
        )


def _cap_histogram(hist: dict) -> tuple[dict, int]:
    # keep the HIST_CAP smallest keys; any key dropped here would be dropped from the total too
    if len(hist) <= HIST_CAP:
        return hist, 0
    keys = sorted(hist)
    kept = {k: hist[k] for k in keys[:HIST_CAP]}
    return kept, sum(hist[k] for k in keys[HIST_CAP:])


def merge_all(partials) -> Partial:
    total = Partial()
    for p in partials:
        total = total.merge(p)
    return total


# -- inline claim predicates ------------------------------------------------
# Integer forms with A = 3^X (2n + 1) - 1 and P = 2^(Y+1), so Z = A / P and
# n' = A / (2 * 3^X).  Witnesses are rebuilt through the exact module.

def _c1(n, X, p3, A, P):
    return A <= P and 3 * A > 2 * P


def _c2(n, X, p3, A, P):
    return 0 < A <= P


def _c3(n, X, p3, A, P):
    return X >= 1


def _c4(n, X, p3, A, P):
    q, rem = divmod(A, 2 * p3)
    return q == n and rem == p3 - 1


def _c5(n, X, p3, A, P):
    return A <= P and 3 * (P - A) < P


INLINE = {"C1": _c1, "C2": _c2, "C3": _c3, "C4": _c4, "C5": _c5}


def process_chunk(lo: int, hi: int, budget: int, claim_ids: tuple[str, ...]) -> Partial:
    """Decompose every n in [lo, hi] and evaluate the inline claims."""
    batch = trajectory_range(lo, hi, budget)
    ks, xs, ys, peaks = batch.k, batch.x, batch.y, batch.peak
    over = batch.over_budget

    max_k, argmax_n, max_peak, argmax_peak_n = -1, 0, 0, 0
    hist: dict = {}
    for i, (x, y) in enumerate(zip(xs, ys)):
        if i in over:
            continue
        k = ks[i]
        if k > max_k:
            max_k, argmax_n = k, lo + i
        if peaks[i] > max_peak:
            max_peak, argmax_peak_n = peaks[i], lo + i
        key = (x, y)
        hist[key] = hist.get(key, 0) + 1
    hist, hist_overflow = _cap_histogram(hist)

    tallies = {}
    pow3: dict[int, int] = {}
    for cid in claim_ids:
        pred = INLINE[cid]
        start = max(lo, claims_mod.get_claim(cid).min_n)
        verified = falsified = indeterminate = 0
        witnesses: list[dict] = []
        for n in range(start, hi + 1):
            i = n - lo
            if i in over:
                indeterminate += 1
                continue
            X = xs[i]
            p3 = pow3.get(X)
            if p3 is None:
                p3 = pow3[X] = 3**X
            A = p3 * (2 * n + 1) - 1
            if pred(n, X, p3, A, 1 << (ys[i] + 1)):
                verified += 1
                continue
            falsified += 1
            if len(witnesses) < MAX_WITNESSES:
                w = claims_mod.per_number_violation(cid, n, X, ys[i])
                if w is None:
                    raise AssertionError(f"inline {cid} and exact route disagree at n={n}")
                witnesses.append(w)
        tallies[cid] = Tally(verified, falsified, indeterminate, tuple(witnesses))

    over_w = [claims_mod.budget_witness(over[i]) for i in sorted(over)[:MAX_WITNESSES]]
    return Partial(
        hi - lo + 1, max_k, argmax_n, max_peak, argmax_peak_n, hist, hist_overflow,
        tallies, len(over), tuple(over_w),
    )
