import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridsched import (
    CapacityExhaustedError,
    FitnessWeights,
    InvalidScheduleError,
    Resource,
    Schedule,
    Task,
    Workload,
    evaluate,
    fcfs_schedule,
    format_schedule,
    generate_workload,
)


def make_workload(costs, speeds, arrivals=None, deadlines=None, capacities=None):
    arrivals = arrivals or [0.0] * len(costs)
    deadlines = deadlines or [None] * len(costs)
    capacities = capacities or [None] * len(speeds)
    tasks = tuple(
        Task(i, float(c), float(a), d) for i, (c, a, d) in enumerate(zip(costs, arrivals, deadlines))
    )
    resources = tuple(
        Resource(j, float(s), capacity=k) for j, (s, k) in enumerate(zip(speeds, capacities))
    )
    return Workload(tasks=tasks, resources=resources)


# -- evaluate -----------------------------------------------------------------


def test_evaluate_hand_case():
    # r0 runs task 0 (2/1 = 2); r1 runs tasks 1, 2 (2/2 + 2/2 = 2)
    w = make_workload([2, 2, 2], [1, 2])
    m = evaluate(Schedule((0, 1, 1)), w)
    assert m.loads == (2.0, 2.0)
    assert m.makespan == 2.0
    assert m.imbalance == 0.0
    assert m.deadline_misses == 0
    assert m.tardiness == 0.0


def test_evaluate_all_on_one_resource():
    costs = [3.0, 1.0, 5.0]
    w = make_workload(costs, [1, 1, 1])
    m = evaluate(Schedule((0, 0, 0)), w)
    total = sum(costs)
    assert m.makespan == total
    assert m.loads == (total, 0.0, 0.0)
    assert m.imbalance == pytest.approx(total - total / 3)


def test_evaluate_empty_tasks():
    w = Workload(tasks=(), resources=(Resource(0, 1.0), Resource(1, 2.0)))
    m = evaluate(Schedule(()), w)
    assert m.makespan == 0.0
    assert m.loads == (0.0, 0.0)
    assert m.fitness == 0.0


def test_evaluate_respects_arrivals():
    w = make_workload([3.0], [1.0], arrivals=[5.0])
    m = evaluate(Schedule((0,)), w)
    assert m.makespan == 8.0
    assert m.loads == (3.0,)  # busy time excludes the idle gap


def test_evaluate_deadline_fields():
    w = make_workload([4.0], [1.0], deadlines=[3.0])
    m = evaluate(Schedule((0,)), w)
    assert m.deadline_misses == 1
    assert m.tardiness == 1.0


def test_evaluate_fitness_formula():
    w = make_workload([4.0, 2.0], [1.0, 1.0], deadlines=[3.0, None])
    weights = FitnessWeights(2.0, 0.25, 7.0)
    m = evaluate(Schedule((0, 1)), w, weights)
    assert m.fitness == 2.0 * m.makespan + 0.25 * m.imbalance + 7.0 * m.tardiness


def test_fitness_weights_make_only_equals_makespan():
    w = generate_workload(17, 4, (1, 30), 1.0, None, 5)
    s = fcfs_schedule(w)
    m = evaluate(s, w, FitnessWeights(1.0, 0.0, 0.0))
    assert m.fitness == m.makespan


def test_evaluate_rejects_out_of_range():
    w = make_workload([1.0, 1.0], [1.0])
    with pytest.raises(InvalidScheduleError):
        evaluate(Schedule((0, 1)), w)
    with pytest.raises(InvalidScheduleError):
        evaluate(Schedule((0, -1)), w)


def test_evaluate_rejects_length_mismatch():
    w = make_workload([1.0, 1.0], [1.0])
    with pytest.raises(InvalidScheduleError):
        evaluate(Schedule((0,)), w)


def test_weights_validation():
    with pytest.raises(ValueError):
        FitnessWeights(0.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        FitnessWeights(1.0, -0.1, 1.0)


# -- FCFS ---------------------------------------------------------------------


def test_fcfs_hand_case():
    # free times step through 0/0 -> 4/0 -> 4/3 -> 4/5 -> 5/5
    w = make_workload([4, 3, 2, 1], [1, 1])
    s = fcfs_schedule(w)
    assert s.assignment == (0, 1, 1, 0)
    assert evaluate(s, w).makespan == 5.0


def test_fcfs_single_resource():
    w = make_workload([3, 1, 2], [2])
    s = fcfs_schedule(w)
    assert s.assignment == (0, 0, 0)


def test_fcfs_paper_scale_uses_every_resource():
    w = generate_workload(100, 11, (10, 100), 0.5, None, 42)
    s = fcfs_schedule(w)
    assert len(s) == 100
    assert set(s.assignment) == set(range(11))


def test_fcfs_arrival_order_breaks_id_ties():
    # Task 1 arrives first and grabs the (only) fast start slot.
    w = make_workload([5, 5], [1, 1], arrivals=[1.0, 0.0])
    s = fcfs_schedule(w)
    assert s.assignment == (1, 0)


def test_fcfs_skips_full_resources():
    w = make_workload([1, 1, 1], [1, 1], capacities=[1, None])
    s = fcfs_schedule(w)
    assert s.assignment == (0, 1, 1)


def test_fcfs_capacity_exhausted():
    w = make_workload([1, 1, 1], [1, 1], capacities=[1, 1])
    with pytest.raises(CapacityExhaustedError):
        fcfs_schedule(w)


def test_fcfs_capacity_frees_over_time():
    # Same shape as the exhausted case, but the late arrival finds a slot.
    w = make_workload([1, 1, 1], [1, 1], arrivals=[0.0, 0.0, 2.0], capacities=[1, 1])
    s = fcfs_schedule(w)
    assert s.assignment[2] in (0, 1)


# -- properties ---------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(
    data=st.data(),
    n=st.integers(1, 12),
    m=st.integers(1, 4),
)
def test_makespan_monotone_in_cost(data, n, m):
    costs = data.draw(st.lists(st.floats(0.5, 20), min_size=n, max_size=n))
    w = make_workload(costs, [1.0] * m)
    assignment = tuple(data.draw(st.integers(0, m - 1)) for _ in range(n))
    before = evaluate(Schedule(assignment), w).makespan
    bump = data.draw(st.integers(0, n - 1))
    bumped = list(costs)
    bumped[bump] += data.draw(st.floats(0.1, 10))
    after = evaluate(Schedule(assignment), make_workload(bumped, [1.0] * m)).makespan
    assert after >= before


@settings(max_examples=50, deadline=None)
@given(
    data=st.data(),
    n=st.integers(1, 10),
    m=st.integers(2, 4),
)
def test_relabeling_symmetry(data, n, m):
    # Integer costs and power-of-two speeds keep all arithmetic exact, so
    # the symmetry holds with zero tolerance.
    costs = data.draw(st.lists(st.integers(1, 64), min_size=n, max_size=n))
    speeds = data.draw(st.lists(st.sampled_from([0.5, 1.0, 2.0, 4.0]), min_size=m, max_size=m))
    assignment = tuple(data.draw(st.integers(0, m - 1)) for _ in range(n))
    perm = data.draw(st.permutations(range(m)))

    w = make_workload(costs, speeds)
    base = evaluate(Schedule(assignment), w)

    w_perm = make_workload(costs, [speeds[perm.index(j)] for j in range(m)])
    remapped = tuple(perm[g] for g in assignment)
    relabeled = evaluate(Schedule(remapped), w_perm)

    assert relabeled.makespan == base.makespan
    assert relabeled.imbalance == base.imbalance


def brute_force_makespan(costs, m):
    best = float("inf")
    for assign in itertools.product(range(m), repeat=len(costs)):
        loads = [0.0] * m
        for t, r in enumerate(assign):
            loads[r] += costs[t]
        best = min(best, max(loads))
    return best


@settings(max_examples=30, deadline=None)
@given(
    data=st.data(),
    n=st.integers(1, 8),
    m=st.integers(1, 3),
)
def test_fcfs_within_list_scheduling_bound(data, n, m):
    costs = data.draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    w = make_workload(costs, [1.0] * m)
    fcfs_mks = evaluate(fcfs_schedule(w), w).makespan
    optimal = brute_force_makespan([float(c) for c in costs], m)
    assert fcfs_mks <= 2.0 * optimal + 1e-9


# -- schedule dump ------------------------------------------------------------


def test_format_schedule():
    w = make_workload([2, 2], [1, 1])
    s = Schedule((0, 1))
    text = format_schedule(s, evaluate(s, w))
    lines = text.splitlines()
    assert lines[0] == "task 0 -> resource 0"
    assert lines[1] == "task 1 -> resource 1"
    assert lines[2] == "# metrics"
    assert lines[3] == "makespan 2.0"
    assert lines[4] == "imbalance 0.0"
    assert text.endswith("\n")
