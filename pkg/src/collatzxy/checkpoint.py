"""Append-only line-oriented JSON checkpoints.

Line 1 is a header echoing the result-affecting sweep configuration; every
following line records one completed chunk::

    {"version": 1, "kind": "header", "config": {...}}
    {"version": 1, "chunk_lo": "1", "chunk_hi": "65536", "partial_aggregate": {...}}

Each chunk line is written with a single write followed by fsync, so after a
crash the file holds complete lines plus at most one torn final line, which
``load`` discards.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from filelock import FileLock, Timeout

from .aggregate import Partial
from .errors import CheckpointLocked, CheckpointWriteError, ConfigMismatch, CorruptCheckpoint

FORMAT_VERSION = 1


def lock_for(path: str | os.PathLike) -> FileLock:
    return FileLock(str(path) + ".lock")


def acquire(lock: FileLock) -> None:
    """Take the lock without waiting; a held lock means another sweep owns the file."""
    try:
        lock.acquire(timeout=0)
    except Timeout:
        raise CheckpointLocked(f"checkpoint is in use by another sweep ({lock.lock_file})") from None


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class Checkpoint:
    path: Path
    config: dict
    # chunk index -> partial aggregate
    chunks: dict[int, Partial] = field(default_factory=dict)

    @classmethod
    def create(cls, path: str | os.PathLike, config: dict) -> Checkpoint:
        path = Path(path)
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(_dumps({"version": FORMAT_VERSION, "kind": "header", "config": config}) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise CheckpointWriteError(f"cannot write checkpoint {path}: {exc}") from exc
        return cls(path, dict(config))

    @classmethod
    def load(cls, path: str | os.PathLike) -> Checkpoint:
        path = Path(path)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            raise CorruptCheckpoint(f"checkpoint {path} does not exist") from None
        except OSError as exc:
            raise CorruptCheckpoint(f"cannot read checkpoint {path}: {exc}") from exc
        if raw and not raw.endswith(b"\n"):
            # torn final write; drop it so appends start on a clean line
            raw = raw[: raw.rfind(b"\n") + 1]
            try:
                with open(path, "r+b") as fh:
                    fh.truncate(len(raw))
            except OSError as exc:
                raise CorruptCheckpoint(f"cannot repair torn checkpoint {path}: {exc}") from exc
        lines = raw.decode("utf-8", errors="strict").splitlines()
        if not lines:
            raise CorruptCheckpoint(f"checkpoint {path} has no header")
        try:
            records = [json.loads(line) for line in lines]
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CorruptCheckpoint(f"checkpoint {path} does not parse: {exc}") from exc
        header = records[0]
        if not isinstance(header, dict) or header.get("kind") != "header" or "config" not in header:
            raise CorruptCheckpoint(f"checkpoint {path} is missing its header")
        if header.get("version") != FORMAT_VERSION:
            raise CorruptCheckpoint(f"checkpoint version {header.get('version')!r} != {FORMAT_VERSION}")
        config = header["config"]
        try:
            lo, hi, size = int(config["lo"]), int(config["hi"]), int(config["chunk_size"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptCheckpoint(f"checkpoint header config is incomplete: {exc}") from exc
        ckpt = cls(path, config)
        for rec in records[1:]:
            try:
                if rec["version"] != FORMAT_VERSION:
                    raise CorruptCheckpoint(f"chunk record version {rec['version']!r} != {FORMAT_VERSION}")
                c_lo, c_hi = int(rec["chunk_lo"]), int(rec["chunk_hi"])
                partial = Partial.from_json(rec["partial_aggregate"])
            except CorruptCheckpoint:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise CorruptCheckpoint(f"malformed chunk record: {exc}") from exc
            idx, rem = divmod(c_lo - lo, size)
            if rem or c_lo < lo or c_lo > hi or c_hi != min(hi, c_lo + size - 1):
                raise CorruptCheckpoint(f"chunk [{c_lo}, {c_hi}] is not on the configured grid")
            if idx in ckpt.chunks:
                raise CorruptCheckpoint(f"chunk [{c_lo}, {c_hi}] recorded twice")
            if partial.count != c_hi - c_lo + 1:
                raise CorruptCheckpoint(f"chunk [{c_lo}, {c_hi}] has count {partial.count}")
            ckpt.chunks[idx] = partial
        return ckpt

    def check_config(self, config: dict) -> None:
        if self.config != config:
            diff = sorted(k for k in set(self.config) | set(config) if self.config.get(k) != config.get(k))
            raise ConfigMismatch(f"checkpoint {self.path} was written for a different configuration ({', '.join(diff)})")

    def append(self, index: int, chunk_lo: int, chunk_hi: int, partial: Partial) -> None:
        line = _dumps({
            "version": FORMAT_VERSION,
            "chunk_lo": str(chunk_lo),
            "chunk_hi": str(chunk_hi),
            "partial_aggregate": partial.to_json(),
        }) + "\n"
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise CheckpointWriteError(f"cannot append to checkpoint {self.path}: {exc}") from exc
        self.chunks[index] = partial
