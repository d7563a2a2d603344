import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridsched import (
    Resource,
    Task,
    Workload,
    WorkloadFormatError,
    dumps_workload,
    generate_workload,
    load_workload,
    parse_workload,
    save_workload,
)


def test_generate_paper_scale_shape():
    w = generate_workload(100, 11, (10, 100), 0.5, None, 42)
    assert w.n_tasks == 100
    assert w.n_resources == 11
    assert all(10 <= t.cost <= 100 for t in w.tasks)
    assert all(1.0 <= r.speed <= 1.5 for r in w.resources)
    assert all(t.arrival == 0.0 for t in w.tasks)
    assert all(t.deadline is None for t in w.tasks)


def test_generate_degenerate_single():
    w = generate_workload(1, 1, (5, 5), 0, None, 0)
    assert w.tasks[0].cost == 5.0
    assert w.resources[0].speed == 1.0


def test_generate_deterministic():
    a = generate_workload(20, 4, (1, 9), 1.5, 2.0, seed=7)
    b = generate_workload(20, 4, (1, 9), 1.5, 2.0, seed=7)
    assert a == b
    assert dumps_workload(a) == dumps_workload(b)


def test_generate_deadline_formula():
    w = generate_workload(10, 3, (2, 8), 1.0, deadline_slack=3.0, seed=9)
    mean_speed = sum(r.speed for r in w.resources) / 3
    for t in w.tasks:
        assert t.deadline == pytest.approx(t.arrival + 3.0 * t.cost / mean_speed)


def test_generate_rejects_empty():
    with pytest.raises(ValueError):
        generate_workload(0, 3, (1, 2), 0.0, None, 1)
    with pytest.raises(ValueError):
        generate_workload(3, 0, (1, 2), 0.0, None, 1)


def test_generate_rejects_bad_ranges():
    with pytest.raises(ValueError):
        generate_workload(1, 1, (5, 4), 0.0, None, 1)
    with pytest.raises(ValueError):
        generate_workload(1, 1, (0, 4), 0.0, None, 1)
    with pytest.raises(ValueError):
        generate_workload(1, 1, (1, 4), -0.5, None, 1)
    with pytest.raises(ValueError):
        generate_workload(1, 1, (1, 4), 0.0, -1.0, 1)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 40),
    m=st.integers(1, 8),
    lo=st.floats(0.1, 50, allow_nan=False),
    width=st.floats(0, 50, allow_nan=False),
    het=st.floats(0, 4, allow_nan=False),
    slack=st.one_of(st.none(), st.floats(0.5, 5, allow_nan=False)),
    seed=st.integers(0, 2**32),
)
def test_generated_workloads_respect_invariants(n, m, lo, width, het, slack, seed):
    w = generate_workload(n, m, (lo, lo + width), het, slack, seed)
    assert [t.id for t in w.tasks] == list(range(n))
    assert [r.id for r in w.resources] == list(range(m))
    for t in w.tasks:
        assert t.cost > 0
        assert t.arrival >= 0
        assert t.deadline is None or t.deadline > t.arrival
    for r in w.resources:
        assert r.speed > 0


def test_task_invariants():
    with pytest.raises(ValueError):
        Task(0, cost=0.0)
    with pytest.raises(ValueError):
        Task(0, cost=1.0, arrival=-1.0)
    with pytest.raises(ValueError):
        Task(0, cost=1.0, arrival=2.0, deadline=2.0)


def test_resource_invariants():
    with pytest.raises(ValueError):
        Resource(0, speed=0.0)
    with pytest.raises(ValueError):
        Resource(0, speed=1.0, capacity=0)


def test_workload_requires_contiguous_ids():
    with pytest.raises(ValueError):
        Workload(tasks=(Task(1, 1.0),), resources=(Resource(0, 1.0),))
    with pytest.raises(ValueError):
        Workload(tasks=(), resources=())


# -- file format -------------------------------------------------------------


def test_round_trip(tmp_path):
    w = generate_workload(30, 5, (1, 100), 0.7, 2.5, seed=42)
    path = tmp_path / "w.txt"
    save_workload(w, path)
    assert load_workload(path) == w


def test_file_uses_lf_and_round_trip_precision(tmp_path):
    w = generate_workload(5, 2, (1, 10), 0.3, None, seed=3)
    path = tmp_path / "w.txt"
    save_workload(w, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    again = tmp_path / "again.txt"
    save_workload(load_workload(path), again)
    assert again.read_bytes() == raw


def test_hand_written_fixture():
    text = (
        "workload v1 seed=9\n"
        "resource 0 1.0\n"
        "resource 1 2.0 capacity=2\n"
        "task 0 4.0 0.0\n"
        "task 1 6.5 1.5 deadline=10.0\n"
        "task 2 2.5 0.0\n"
    )
    w = parse_workload(text)
    assert w.seed == 9
    assert w.resources == (Resource(0, 1.0), Resource(1, 2.0, capacity=2))
    assert w.tasks == (
        Task(0, 4.0, 0.0),
        Task(1, 6.5, 1.5, deadline=10.0),
        Task(2, 2.5, 0.0),
    )


def test_duplicate_task_id_rejected():
    text = (
        "workload v1 seed=0\n"
        "resource 0 1.0\n"
        "task 0 4.0 0.0\n"
        "task 0 2.0 0.0\n"
    )
    with pytest.raises(WorkloadFormatError) as exc:
        parse_workload(text)
    assert "id 0" in str(exc.value)
    assert "line 4" in str(exc.value)


def test_id_gap_rejected():
    text = "workload v1 seed=0\nresource 0 1.0\ntask 1 4.0 0.0\n"
    with pytest.raises(WorkloadFormatError):
        parse_workload(text)


def test_parse_error_reports_line_and_field():
    text = "workload v1 seed=0\nresource 0 fast\n"
    with pytest.raises(WorkloadFormatError) as exc:
        parse_workload(text)
    assert exc.value.line == 2
    assert "speed" in str(exc.value)


def test_missing_header_rejected():
    with pytest.raises(WorkloadFormatError):
        parse_workload("resource 0 1.0\n")


def test_resource_after_task_rejected():
    text = "workload v1 seed=0\nresource 0 1.0\ntask 0 1.0 0.0\nresource 1 1.0\n"
    with pytest.raises(WorkloadFormatError):
        parse_workload(text)
