"""Collatz trajectories, total stopping times and the odd/even decomposition.

The map is g(v) = v/2 for even v and 3v + 1 for odd v.  For a start value n
the trajectory C_0 = n, C_1 = g(n), ... is followed until the first p with
C_p = 1; that p is the total stopping time k.  The k values C_0..C_{k-1} form
the k-tuple, and X / Y count its odd / even members, so k = X + Y.

Convention: 1 is reached after zero steps, so k(1) = 0, the tuple is empty
and X = Y = 0.

Two evaluation routes exist and must agree: a uint64 kernel that promotes to
Python integers when 3v + 1 would overflow, and a pure Python-integer walk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernel
from .errors import BudgetExceeded

DEFAULT_BUDGET = 1 << 20
_UINT64_MAX = 2**64 - 1


def collatz_step(v: int) -> int:
    if v < 1:
        raise ValueError(f"collatz_step needs a positive integer, got {v}")
    if v & 1:
        return 3 * v + 1
    return v >> 1


@dataclass(frozen=True)
class TrajectoryRecord:
    """Outcome of one trajectory.

    ``tuple`` holds (C_0, ..., C_{k-1}) when requested, otherwise None.
    """

    n: int
    k: int
    x_count: int
    y_count: int
    peak: int
    tuple: tuple[int, ...] | None = None

    @property
    def xy(self) -> tuple[int, int]:
        return (self.x_count, self.y_count)

    def to_json(self) -> dict:
        out = {
            "n": str(self.n),
            "k": self.k,
            "x": self.x_count,
            "y": self.y_count,
            "peak": str(self.peak),
        }
        if self.tuple is not None:
            out["tuple"] = [str(v) for v in self.tuple]
        return out


def _walk(n, v, k, x, y, peak, budget, values=None):
    """Finish a trajectory from state (v, k, x, y, peak) with Python ints."""
    while v != 1:
        if k >= budget:
            raise BudgetExceeded(n, v, k)
        if values is not None:
            values.append(v)
        if v & 1:
            v = 3 * v + 1
            x += 1
        else:
            v >>= 1
            y += 1
        k += 1
        if v > peak:
            peak = v
    return k, x, y, peak


def _check_args(n: int, budget: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")


def compute_trajectory(
    n: int,
    budget: int = DEFAULT_BUDGET,
    keep_tuple: bool = False,
    *,
    fast: bool = True,
) -> TrajectoryRecord:
    """Iterate the map from ``n`` until 1.

    Raises BudgetExceeded if 1 is not reached within ``budget`` steps.
    ``fast=False`` forces the pure Python-integer route (used as an oracle).
    """
    n = int(n)
    _check_args(n, budget)
    if keep_tuple:
        values: list[int] = []
        k, x, y, peak = _walk(n, n, 0, 0, 0, n, budget, values)
        return TrajectoryRecord(n, k, x, y, peak, tuple(values))
    if not fast or n > _UINT64_MAX:
        k, x, y, peak = _walk(n, n, 0, 0, 0, n, budget)
        return TrajectoryRecord(n, k, x, y, peak)
    return trajectories_for([n], budget).record(0)


def compute_trajectory_exact(n: int, budget: int = DEFAULT_BUDGET, keep_tuple: bool = False) -> TrajectoryRecord:
    """Pure arbitrary-precision route; never touches fixed-width arithmetic."""
    return compute_trajectory(n, budget, keep_tuple, fast=False)


@dataclass
class Batch:
    """Parity decomposition for a batch of start values.

    ``k``, ``x``, ``y`` and ``peak`` are plain lists aligned with ``starts``;
    entries for start values that exceeded the budget hold -1 (peak 0) and the
    corresponding BudgetExceeded lives in ``over_budget`` keyed by position.
    """

    starts: Sequence[int]
    k: list[int]
    x: list[int]
    y: list[int]
    peak: list[int]
    over_budget: dict[int, BudgetExceeded]

    def record(self, i: int) -> TrajectoryRecord:
        if i in self.over_budget:
            raise self.over_budget[i]
        return TrajectoryRecord(int(self.starts[i]), self.k[i], self.x[i], self.y[i], self.peak[i])


def _batch_from_array(starts: np.ndarray, budget: int, start_list: Sequence[int]) -> Batch:
    ks, xs, ys, peaks, lasts, status = _kernel.run_kernel(starts, budget)
    k, x, y, peak = ks.tolist(), xs.tolist(), ys.tolist(), peaks.tolist()
    over: dict[int, BudgetExceeded] = {}
    for i in np.flatnonzero(status).tolist():
        n = int(start_list[i])
        if status[i] == _kernel.OVER_BUDGET:
            over[i] = BudgetExceeded(n, int(lasts[i]), k[i])
            k[i] = x[i] = y[i] = -1
            peak[i] = 0
            continue
        try:
            k[i], x[i], y[i], peak[i] = _walk(n, int(lasts[i]), k[i], x[i], y[i], peak[i], budget)
        except BudgetExceeded as exc:
            over[i] = exc
            k[i] = x[i] = y[i] = -1
            peak[i] = 0
    return Batch(start_list, k, x, y, peak, over)


def trajectory_range(lo: int, hi: int, budget: int = DEFAULT_BUDGET) -> Batch:
    """Decompose every n in the inclusive range [lo, hi] through the fast path."""
    _check_args(lo, budget)
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if hi > _UINT64_MAX:
        return trajectories_for(range(lo, hi + 1), budget)
    starts = np.arange(lo, hi + 1, dtype=np.uint64)
    return _batch_from_array(starts, budget, range(lo, hi + 1))


def trajectories_for(values: Iterable[int], budget: int = DEFAULT_BUDGET) -> Batch:
    """Decompose arbitrary start values; values beyond uint64 go straight to Python ints."""
    starts = [int(v) for v in values]
    for v in starts:
        _check_args(v, budget)
    small = [i for i, v in enumerate(starts) if v <= _UINT64_MAX]
    if len(small) == len(starts):
        return _batch_from_array(np.array(starts, dtype=np.uint64), budget, starts)
    m = len(starts)
    batch = Batch(starts, [-1] * m, [-1] * m, [-1] * m, [0] * m, {})
    if small:
        sub = _batch_from_array(np.array([starts[i] for i in small], dtype=np.uint64), budget, [starts[i] for i in small])
        for j, i in enumerate(small):
            batch.k[i], batch.x[i], batch.y[i], batch.peak[i] = sub.k[j], sub.x[j], sub.y[j], sub.peak[j]
            if j in sub.over_budget:
                batch.over_budget[i] = sub.over_budget[j]
    for i, v in enumerate(starts):
        if v > _UINT64_MAX:
            try:
                batch.k[i], batch.x[i], batch.y[i], batch.peak[i] = _walk(v, v, 0, 0, 0, v, budget)
            except BudgetExceeded as exc:
                batch.over_budget[i] = exc
    return batch
