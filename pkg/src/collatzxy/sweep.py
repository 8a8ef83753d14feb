"""Chunked, parallel range sweeps with checkpoint/resume.

The range [lo, hi] is cut into fixed chunks of ``chunk_size`` numbers.  Chunks
are handed to worker processes as they free up; each returns an immutable
``Partial``.  The coordinating process alone merges partials and appends them
to the checkpoint, so the summary is the same for any chunk size, worker
count and completion order.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path

from .aggregate import INLINE, Partial, merge_all, process_chunk
from .checkpoint import Checkpoint, acquire, lock_for
from .claims import FALSIFIED, INDETERMINATE, VERIFIED, get_claim
from .errors import CorruptCheckpoint
from .trajectory import DEFAULT_BUDGET

log = logging.getLogger(__name__)

DEFAULT_CHUNK = 1 << 16
DEFAULT_CLAIMS = ("C1", "C2", "C4", "C5")
# exhaustive bound of the largest published computational verification
PUBLISHED_BOUND = 20 * 2**58


@dataclass
class SweepConfig:
    lo: int
    hi: int
    chunk_size: int = DEFAULT_CHUNK
    workers: int | None = None
    budget: int = DEFAULT_BUDGET
    claims: tuple[str, ...] = DEFAULT_CLAIMS
    checkpoint_path: str | os.PathLike | None = None

    def __post_init__(self):
        self.claims = tuple(sorted({get_claim(c).id for c in self.claims}, key=lambda c: int(c[1:])))
        if self.workers is None:
            self.workers = os.cpu_count() or 1

    def validate(self) -> None:
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"need 1 <= lo <= hi, got [{self.lo}, {self.hi}]")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        for c in self.claims:
            if c not in INLINE:
                raise ValueError(f"sweeps evaluate per-number claims only ({', '.join(INLINE)}), got {c}")

    def echo(self) -> dict:
        """Fields that determine the result; recorded in checkpoint headers."""
        return {
            "lo": str(self.lo),
            "hi": str(self.hi),
            "chunk_size": self.chunk_size,
            "budget": self.budget,
            "claims": list(self.claims),
        }

    @classmethod
    def from_echo(cls, echo: dict, **overrides) -> SweepConfig:
        return cls(
            lo=int(echo["lo"]),
            hi=int(echo["hi"]),
            chunk_size=int(echo["chunk_size"]),
            budget=int(echo["budget"]),
            claims=tuple(echo["claims"]),
            **overrides,
        )

    def chunk_bounds(self, index: int) -> tuple[int, int]:
        c_lo = self.lo + index * self.chunk_size
        return c_lo, min(self.hi, c_lo + self.chunk_size - 1)

    @property
    def n_chunks(self) -> int:
        return -(-(self.hi - self.lo + 1) // self.chunk_size)


@dataclass
class SweepSummary:
    lo: int
    hi: int
    budget: int
    claims: tuple[str, ...]
    totals: Partial
    chunks_processed: int = 0
    wall_time: float = 0.0

    @property
    def count(self) -> int:
        return self.totals.count

    @property
    def complete(self) -> bool:
        return self.totals.count == self.hi - self.lo + 1

    @property
    def max_k(self) -> int:
        return self.totals.max_k

    @property
    def argmax_n(self) -> int:
        return self.totals.argmax_n

    @property
    def max_peak(self) -> int:
        return self.totals.max_peak

    @property
    def argmax_peak_n(self) -> int:
        return self.totals.argmax_peak_n

    @property
    def xy_histogram(self) -> dict:
        return self.totals.histogram

    @property
    def claim_tallies(self) -> dict:
        return self.totals.tallies

    @property
    def any_falsified(self) -> bool:
        return any(t.verdict == FALSIFIED for t in self.totals.tallies.values())

    def note(self) -> str:
        t = self.totals
        if t.over_budget_count:
            head = (f"{t.count - t.over_budget_count} of {t.count} start values in [{self.lo}, {self.hi}] "
                    f"reach 1 within {self.budget} steps; {t.over_budget_count} exhausted the budget.")
        else:
            head = f"Every start value in [{self.lo}, {self.hi}] reaches 1 within {self.budget} steps."
        factor = PUBLISHED_BOUND // self.hi
        return (f"{head} This is a finite check, not a proof. The published exhaustive bound "
                f"20*2^58 = {PUBLISHED_BOUND} is about {factor} times this range and is not reproduced here.")

    def to_json(self, timing: bool = False) -> dict:
        body = self.totals.to_json()
        out = {
            "kind": "sweep",
            "range": {"lo": str(self.lo), "hi": str(self.hi)},
            "budget": self.budget,
            "claims": list(self.claims),
            "complete": self.complete,
            **body,
            "note": self.note(),
        }
        if timing:
            ms = round(self.wall_time * 1000)
            out["wall_time_ms"] = ms
            out["chunks_processed"] = self.chunks_processed
            if ms:
                rate = self.count * 1000 // ms
                out["throughput_per_s"] = rate
                if rate:
                    years = PUBLISHED_BOUND // rate // (365 * 24 * 3600)
                    out["extrapolation"] = (f"at {rate} numbers/s the published bound would take "
                                            f"about {years} years on this machine")
        return out


def _chunk_job(args):
    c_lo, c_hi, budget, claims = args
    return process_chunk(c_lo, c_hi, budget, claims)


def _execute(config: SweepConfig, done: dict[int, Partial], checkpoint: Checkpoint | None) -> int:
    """Process every chunk index missing from ``done``; returns how many ran."""
    n_missing = config.n_chunks - len(done)
    if n_missing == 0:
        return 0
    missing = (i for i in range(config.n_chunks) if i not in done)

    def job(i: int):
        return (*config.chunk_bounds(i), config.budget, config.claims)

    def record(i: int, partial: Partial) -> None:
        done[i] = partial
        if checkpoint is not None:
            checkpoint.append(i, *config.chunk_bounds(i), partial)
        log.debug("chunk %d done (%d/%d)", i, len(done), config.n_chunks)

    if config.workers == 1 or n_missing == 1:
        for i in missing:
            record(i, _chunk_job(job(i)))
        return n_missing

    window = 4 * config.workers
    with ProcessPoolExecutor(max_workers=min(config.workers, n_missing)) as pool:
        pending = {}
        try:
            for i in missing:
                pending[pool.submit(_chunk_job, job(i))] = i
                if len(pending) >= window:
                    break
            while pending:
                finished, _ = wait(pending, return_when=FIRST_COMPLETED)
                for fut in finished:
                    i = pending.pop(fut)
                    record(i, fut.result())
                    nxt = next(missing, None)
                    if nxt is not None:
                        pending[pool.submit(_chunk_job, job(nxt))] = nxt
        except BaseException:
            pool.shutdown(wait=True, cancel_futures=True)
            raise
    return n_missing


def _run(config: SweepConfig, checkpoint: Checkpoint | None) -> SweepSummary:
    t0 = time.perf_counter()
    done: dict[int, Partial] = dict(checkpoint.chunks) if checkpoint else {}
    ran = _execute(config, done, checkpoint)
    totals = merge_all(done[i] for i in sorted(done))
    return SweepSummary(config.lo, config.hi, config.budget, config.claims, totals, ran, time.perf_counter() - t0)


def sweep_range(config: SweepConfig) -> SweepSummary:
    """Sweep [config.lo, config.hi].

    With a checkpoint path, completed chunks are appended as they finish.  An
    existing checkpoint for the same configuration is continued; one written
    for a different configuration raises ConfigMismatch.
    """
    config.validate()
    if config.checkpoint_path is None:
        return _run(config, None)
    path = Path(config.checkpoint_path)
    lock = lock_for(path)
    acquire(lock)
    try:
        if path.exists() and path.stat().st_size > 0:
            ckpt = Checkpoint.load(path)
            ckpt.check_config(config.echo())
        else:
            ckpt = Checkpoint.create(path, config.echo())
        return _run(config, ckpt)
    finally:
        lock.release()


def resume(checkpoint_path: str | os.PathLike, config: SweepConfig | None = None, workers: int | None = None) -> SweepSummary:
    """Finish the sweep recorded in ``checkpoint_path``, processing only missing chunks.

    If ``config`` is given it must match the checkpoint's recorded configuration.
    """
    path = Path(checkpoint_path)
    lock = lock_for(path)
    acquire(lock)
    try:
        ckpt = Checkpoint.load(path)
        if config is not None:
            ckpt.check_config(config.echo())
            workers = workers or config.workers
        try:
            resumed = SweepConfig.from_echo(ckpt.config, workers=workers, checkpoint_path=path)
            resumed.validate()
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptCheckpoint(f"checkpoint {path} has an invalid configuration: {exc}") from exc
        if resumed.echo() != ckpt.config:
            raise CorruptCheckpoint(f"checkpoint {path} has a non-canonical configuration")
        return _run(resumed, ckpt)
    finally:
        lock.release()


__all__ = [
    "DEFAULT_CHUNK", "DEFAULT_CLAIMS", "FALSIFIED", "INDETERMINATE", "VERIFIED",
    "SweepConfig", "SweepSummary", "resume", "sweep_range",
]
