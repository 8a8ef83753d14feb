import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collatzxy.errors import BudgetExceeded
from collatzxy.trajectory import (
    collatz_step,
    compute_trajectory,
    compute_trajectory_exact,
    trajectories_for,
    trajectory_range,
)
from oracle import brute_peak, brute_tuple, brute_xy

TUPLE_19 = (19, 58, 29, 88, 44, 22, 11, 34, 17, 52, 26, 13, 40, 20, 10, 5, 16, 8, 4, 2)


@pytest.mark.parametrize("v, expected", [(6, 3), (1, 4), (13, 40), (2**70, 2**69), (2**64 - 1, 3 * (2**64 - 1) + 1)])
def test_step(v, expected):
    assert collatz_step(v) == expected


def test_step_rejects_nonpositive():
    with pytest.raises(ValueError):
        collatz_step(0)


def test_six():
    rec = compute_trajectory(6, keep_tuple=True)
    assert (rec.k, rec.x_count, rec.y_count) == (8, 2, 6)
    assert rec.tuple == (6, 3, 10, 5, 16, 8, 4, 2)
    assert rec.peak == 16


def test_nineteen():
    rec = compute_trajectory(19, keep_tuple=True)
    assert rec.k == 20
    assert rec.tuple == TUPLE_19
    assert (rec.x_count, rec.y_count) == (6, 14)


def test_power_of_two_and_one():
    assert compute_trajectory(16).xy == (0, 4) and compute_trajectory(16).k == 4
    one = compute_trajectory(1, keep_tuple=True)
    assert (one.k, one.x_count, one.y_count, one.tuple, one.peak) == (0, 0, 0, (), 1)


def test_budget_exceeded_carries_state():
    with pytest.raises(BudgetExceeded) as err:
        compute_trajectory(27, budget=10)
    assert err.value.n == 27 and err.value.steps == 10
    assert err.value.last_value == brute_tuple(27)[10]


def test_budget_exactly_enough():
    assert compute_trajectory(6, budget=8).k == 8
    with pytest.raises(BudgetExceeded):
        compute_trajectory(6, budget=7)


def test_bad_arguments():
    with pytest.raises(ValueError):
        compute_trajectory(0)
    with pytest.raises(ValueError):
        compute_trajectory(5, budget=0)


def test_range_matches_brute_force():
    batch = trajectory_range(1, 3000)
    for i, n in enumerate(range(1, 3001)):
        x, y = brute_xy(n)
        assert (batch.k[i], batch.x[i], batch.y[i], batch.peak[i]) == (x + y, x, y, brute_peak(n))


def test_fast_path_equals_exact_up_to_1e5():
    batch = trajectory_range(1, 10**5)
    for n in range(1, 10**5 + 1, 7):
        ref = compute_trajectory_exact(n)
        i = n - 1
        assert (batch.k[i], batch.x[i], batch.y[i], batch.peak[i]) == (ref.k, ref.x_count, ref.y_count, ref.peak)


def test_overflow_promotion():
    # odd values above the 3v+1 limit force the kernel to hand over mid-trajectory
    starts = [2**64 - 1, 2**63 + 1, 6148914691236517205, 2**80 + 1]
    batch = trajectories_for(starts)
    for i, n in enumerate(starts):
        ref = compute_trajectory_exact(n)
        assert batch.record(i) == ref
        assert ref.peak > 2**64 - 1


def test_batch_records_budget_per_value():
    batch = trajectories_for([6, 27, 2**70 + 3], budget=20)
    assert batch.record(0).k == 8
    assert set(batch.over_budget) == {1, 2}
    with pytest.raises(BudgetExceeded):
        batch.record(1)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**12))
def test_tuple_invariants(n):
    rec = compute_trajectory(n, keep_tuple=True)
    t = rec.tuple
    assert rec.k == rec.x_count + rec.y_count == len(t)
    assert len(set(t)) == len(t)
    assert 1 not in t
    for a, b in zip(t, t[1:] + (1,)):
        assert collatz_step(a) == b
    assert sum(v & 1 for v in t) == rec.x_count
    assert rec.peak >= n and all(rec.peak >= v for v in t)
    assert compute_trajectory(n) == compute_trajectory_exact(n)


def test_random_large_values_agree():
    rng = random.Random(7)
    values = [rng.randrange(1, 2**64) for _ in range(300)]
    batch = trajectories_for(values)
    for i, v in enumerate(values):
        assert batch.record(i) == compute_trajectory_exact(v)
