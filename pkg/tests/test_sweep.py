import json
import os

import pytest

from collatzxy import sweep as sweep_mod
from collatzxy.checkpoint import Checkpoint, lock_for
from collatzxy.claims import check_claim
from collatzxy.errors import CheckpointLocked, CheckpointWriteError, ConfigMismatch, CorruptCheckpoint
from collatzxy.sweep import SweepConfig, resume, sweep_range
from oracle import memo_stopping_times


def _dump(summary):
    return json.dumps(summary.to_json(), sort_keys=True)


@pytest.mark.parametrize("hi, max_k, argmax", [(10, 19, 9), (100, 118, 97)])
def test_small_maxima(hi, max_k, argmax):
    s = sweep_range(SweepConfig(1, hi))
    assert (s.max_k, s.argmax_n) == (max_k, argmax)
    assert s.count == hi and s.complete


def test_maxima_against_oracle_offset_range():
    k = memo_stopping_times(50000)
    s = sweep_range(SweepConfig(20000, 50000, chunk_size=4096, workers=1))
    best = max(range(20000, 50001), key=lambda n: (k[n], -n))
    assert (s.max_k, s.argmax_n) == (k[best], best)
    assert 20000 <= s.argmax_peak_n <= 50000


@pytest.mark.parametrize("chunk, workers", [(1, 1), (7, 2), (333, 3), (5000, 1), (1 << 16, 4)])
def test_determinism(chunk, workers):
    base = sweep_range(SweepConfig(1, 5000, chunk_size=5000, workers=1, claims=("C1", "C3", "C4")))
    s = sweep_range(SweepConfig(1, 5000, chunk_size=chunk, workers=workers, claims=("C1", "C3", "C4")))
    assert _dump(s) == _dump(base)


def test_sweep_witnesses_match_claim_checker():
    s = sweep_range(SweepConfig(1, 5000, chunk_size=97, workers=2, claims=("C3",)))
    r = check_claim("C3", 1, 5000)
    assert list(s.claim_tallies["C3"].witnesses) == r.counterexamples
    assert s.claim_tallies["C3"].falsified == r.falsified_count
    assert s.any_falsified


def test_invalid_configs():
    with pytest.raises(ValueError):
        SweepConfig(1, 100, claims=("C6",)).validate()
    with pytest.raises(ValueError):
        SweepConfig(10, 1).validate()
    with pytest.raises(ValueError):
        SweepConfig(1, 10, chunk_size=0).validate()


def test_no_timing_unless_requested():
    s = sweep_range(SweepConfig(1, 1000))
    assert "wall_time_ms" not in s.to_json()
    timed = s.to_json(timing=True)
    assert isinstance(timed["wall_time_ms"], int)
    assert "20*2^58" in s.to_json()["note"]


def test_checkpoint_file_format(tmp_path):
    path = tmp_path / "ck.jsonl"
    sweep_range(SweepConfig(1, 1000, chunk_size=300, workers=1, checkpoint_path=path))
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert lines[0]["kind"] == "header" and lines[0]["version"] == 1
    assert lines[0]["config"] == {"lo": "1", "hi": "1000", "chunk_size": 300, "budget": 1 << 20,
                                  "claims": ["C1", "C2", "C4", "C5"]}
    chunks = sorted((int(r["chunk_lo"]), int(r["chunk_hi"])) for r in lines[1:])
    assert chunks == [(1, 300), (301, 600), (601, 900), (901, 1000)]
    assert all(set(r) == {"version", "chunk_lo", "chunk_hi", "partial_aggregate"} for r in lines[1:])


class Boom(RuntimeError):
    pass


def _interrupt_after(monkeypatch, calls):
    real = sweep_mod.process_chunk
    count = {"n": 0}

    def flaky(*args):
        if count["n"] >= calls:
            raise Boom("simulated crash")
        count["n"] += 1
        return real(*args)

    monkeypatch.setattr(sweep_mod, "process_chunk", flaky)


def test_resume_after_interruption(tmp_path, monkeypatch):
    cfg = dict(lo=1, hi=200000, chunk_size=20000, workers=1)
    reference = sweep_range(SweepConfig(**cfg))
    path = tmp_path / "ck.jsonl"
    _interrupt_after(monkeypatch, 5)
    with pytest.raises(Boom):
        sweep_range(SweepConfig(**cfg, checkpoint_path=path))
    monkeypatch.undo()
    assert len(Checkpoint.load(path).chunks) == 5
    resumed = resume(path)
    assert resumed.chunks_processed == 5
    assert _dump(resumed) == _dump(reference)
    again = resume(path)
    assert again.chunks_processed == 0
    assert _dump(again) == _dump(reference)


def test_rerunning_sweep_continues_checkpoint(tmp_path, monkeypatch):
    path = tmp_path / "ck.jsonl"
    _interrupt_after(monkeypatch, 2)
    with pytest.raises(Boom):
        sweep_range(SweepConfig(1, 5000, chunk_size=1000, workers=1, checkpoint_path=path))
    monkeypatch.undo()
    s = sweep_range(SweepConfig(1, 5000, chunk_size=1000, workers=2, checkpoint_path=path))
    assert s.chunks_processed == 3
    assert _dump(s) == _dump(sweep_range(SweepConfig(1, 5000)))


def test_config_mismatch(tmp_path):
    path = tmp_path / "ck.jsonl"
    sweep_range(SweepConfig(1, 1000, chunk_size=100, checkpoint_path=path))
    with pytest.raises(ConfigMismatch):
        resume(path, SweepConfig(1, 2000, chunk_size=100))
    with pytest.raises(ConfigMismatch):
        sweep_range(SweepConfig(1, 1000, chunk_size=100, budget=99, checkpoint_path=path))
    assert resume(path, SweepConfig(1, 1000, chunk_size=100)).chunks_processed == 0


def _write_lines(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records))


@pytest.fixture
def good_checkpoint(tmp_path):
    path = tmp_path / "ck.jsonl"
    sweep_range(SweepConfig(1, 1000, chunk_size=250, workers=1, checkpoint_path=path))
    records = [json.loads(line) for line in path.read_text().splitlines()]
    return path, records


def test_corrupt_not_json(good_checkpoint):
    path, _ = good_checkpoint
    path.write_text("this is not json\n")
    with pytest.raises(CorruptCheckpoint):
        resume(path)


def test_corrupt_version(good_checkpoint):
    path, records = good_checkpoint
    records[0]["version"] = 99
    _write_lines(path, records)
    with pytest.raises(CorruptCheckpoint):
        resume(path)


def test_corrupt_overlap(good_checkpoint):
    path, records = good_checkpoint
    _write_lines(path, records + [records[1]])
    with pytest.raises(CorruptCheckpoint):
        resume(path)


def test_corrupt_off_grid(good_checkpoint):
    path, records = good_checkpoint
    records[1]["chunk_lo"] = "2"
    _write_lines(path, records)
    with pytest.raises(CorruptCheckpoint):
        resume(path)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(CorruptCheckpoint):
        resume(tmp_path / "nope.jsonl")


def test_torn_tail_is_discarded(good_checkpoint):
    path, records = good_checkpoint
    full = sweep_range(SweepConfig(1, 1000, chunk_size=250))
    _write_lines(path, records[:3])
    with open(path, "a") as fh:
        fh.write(json.dumps(records[3])[:40])
    s = resume(path)
    assert s.chunks_processed == 2
    assert _dump(s) == _dump(full)
    assert path.read_text().endswith("\n")
    assert len(Checkpoint.load(path).chunks) == 4


def test_concurrent_use_is_detected(tmp_path):
    path = tmp_path / "ck.jsonl"
    held = lock_for(path)
    held.acquire()
    try:
        with pytest.raises(CheckpointLocked):
            sweep_range(SweepConfig(1, 100, checkpoint_path=path))
    finally:
        held.release()
    sweep_range(SweepConfig(1, 100, checkpoint_path=path))


def test_write_failure_leaves_consistent_checkpoint(tmp_path, monkeypatch):
    path = tmp_path / "ck.jsonl"
    real_fsync = os.fsync
    calls = {"n": 0}

    def failing_fsync(fd):
        calls["n"] += 1
        if calls["n"] > 3:  # header plus two chunks succeed
            raise OSError(28, "No space left on device")
        real_fsync(fd)

    monkeypatch.setattr(os, "fsync", failing_fsync)
    with pytest.raises(CheckpointWriteError):
        sweep_range(SweepConfig(1, 1000, chunk_size=100, workers=1, checkpoint_path=path))
    monkeypatch.undo()
    # the failed line may or may not have reached the file; either way the file loads
    loaded = Checkpoint.load(path)
    assert len(loaded.chunks) >= 2
    assert _dump(resume(path)) == _dump(sweep_range(SweepConfig(1, 1000)))
