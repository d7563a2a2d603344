"""Tasks, resources, and workload batches.

A workload is an immutable batch of independent tasks plus the resources
available to run them. Synthetic workloads are generated from a seed;
workloads round-trip through a line-oriented text format (see
``dumps_workload``) so fixtures stay diffable and hand-writable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WorkloadFormatError
from .rng import check_seed, make_rng


@dataclass(frozen=True)
class Task:
    """One unit of work: abstract cost, arrival time, optional deadline."""

    id: int
    cost: float
    arrival: float = 0.0
    deadline: float | None = None

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"task id must be non-negative, got {self.id}")
        if not self.cost > 0:
            raise ValueError(f"task {self.id}: cost must be > 0, got {self.cost}")
        if self.arrival < 0:
            raise ValueError(f"task {self.id}: arrival must be >= 0, got {self.arrival}")
        if self.deadline is not None and not self.deadline > self.arrival:
            raise ValueError(
                f"task {self.id}: deadline {self.deadline} must exceed arrival {self.arrival}"
            )


@dataclass(frozen=True)
class Resource:
    """An execution slot with a speed factor and optional queue capacity."""

    id: int
    speed: float
    capacity: int | None = None

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"resource id must be non-negative, got {self.id}")
        if not self.speed > 0:
            raise ValueError(f"resource {self.id}: speed must be > 0, got {self.speed}")
        if self.capacity is not None and self.capacity < 1:
            raise ValueError(
                f"resource {self.id}: capacity must be >= 1, got {self.capacity}"
            )


@dataclass(frozen=True)
class Workload:
    """An ordered batch of tasks plus the resource set, with seed provenance."""

    tasks: tuple[Task, ...]
    resources: tuple[Resource, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "resources", tuple(self.resources))
        if not self.resources:
            raise ValueError("workload needs at least one resource")
        for i, t in enumerate(self.tasks):
            if t.id != i:
                raise ValueError(f"task ids must be 0..n-1 in order; position {i} has id {t.id}")
        for i, r in enumerate(self.resources):
            if r.id != i:
                raise ValueError(
                    f"resource ids must be 0..m-1 in order; position {i} has id {r.id}"
                )
        check_seed(self.seed)

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_resources(self) -> int:
        return len(self.resources)


def generate_workload(
    n_tasks: int,
    n_resources: int,
    cost_range: tuple[float, float],
    heterogeneity: float = 0.0,
    deadline_slack: float | None = None,
    seed: int = 0,
) -> Workload:
    """Generate a synthetic workload, deterministically for a fixed seed.

    Costs are uniform in ``cost_range``; speeds uniform in
    ``[1, 1 + heterogeneity]``. All arrivals are 0 (the batch is
    simultaneous). With ``deadline_slack`` set, every task gets
    ``deadline = arrival + slack * cost / mean_speed``.
    """
    if n_tasks < 1:
        raise ValueError(f"n_tasks must be >= 1, got {n_tasks}")
    if n_resources < 1:
        raise ValueError(f"n_resources must be >= 1, got {n_resources}")
    lo, hi = float(cost_range[0]), float(cost_range[1])
    if not lo > 0:
        raise ValueError(f"cost range must be positive, got lower bound {lo}")
    if lo > hi:
        raise ValueError(f"cost range is empty: ({lo}, {hi})")
    if heterogeneity < 0:
        raise ValueError(f"heterogeneity must be >= 0, got {heterogeneity}")
    if deadline_slack is not None and not deadline_slack > 0:
        raise ValueError(f"deadline_slack must be > 0, got {deadline_slack}")
    seed = check_seed(seed)

    rng = make_rng(seed)
    costs = rng.uniform(lo, hi, size=n_tasks)
    speeds = rng.uniform(1.0, 1.0 + heterogeneity, size=n_resources)
    mean_speed = float(speeds.mean())

    tasks = []
    for i in range(n_tasks):
        arrival = 0.0
        deadline = None
        if deadline_slack is not None:
            deadline = arrival + deadline_slack * float(costs[i]) / mean_speed
        tasks.append(Task(id=i, cost=float(costs[i]), arrival=arrival, deadline=deadline))
    resources = [Resource(id=j, speed=float(speeds[j])) for j in range(n_resources)]
    return Workload(tasks=tuple(tasks), resources=tuple(resources), seed=seed)


# ---------------------------------------------------------------------------
# Text format: header line, resource lines, then task lines. Reals are
# printed with repr() so parsing returns the exact same doubles.
# ---------------------------------------------------------------------------

_HEADER_PREFIX = "workload v1 seed="


def dumps_workload(workload: Workload) -> str:
    lines = [f"{_HEADER_PREFIX}{workload.seed}"]
    for r in workload.resources:
        line = f"resource {r.id} {r.speed!r}"
        if r.capacity is not None:
            line += f" capacity={r.capacity}"
        lines.append(line)
    for t in workload.tasks:
        line = f"task {t.id} {t.cost!r} {t.arrival!r}"
        if t.deadline is not None:
            line += f" deadline={t.deadline!r}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def save_workload(workload: Workload, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps_workload(workload))


def _parse_float(text: str, field: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise WorkloadFormatError(f"bad {field} value {text!r}", line=lineno) from None


def _parse_int(text: str, field: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise WorkloadFormatError(f"bad {field} value {text!r}", line=lineno) from None


def parse_workload(text: str) -> Workload:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_HEADER_PREFIX):
        raise WorkloadFormatError(f"missing header {_HEADER_PREFIX!r}...", line=1)
    seed = _parse_int(lines[0][len(_HEADER_PREFIX):], "seed", 1)

    resources: list[Resource] = []
    tasks: list[Task] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "resource":
            if tasks:
                raise WorkloadFormatError("resource line after task lines", line=lineno)
            if len(parts) < 3:
                raise WorkloadFormatError("resource line needs id and speed", line=lineno)
            rid = _parse_int(parts[1], "resource id", lineno)
            speed = _parse_float(parts[2], "speed", lineno)
            capacity = None
            for extra in parts[3:]:
                if extra.startswith("capacity="):
                    capacity = _parse_int(extra[len("capacity="):], "capacity", lineno)
                else:
                    raise WorkloadFormatError(f"unknown resource field {extra!r}", line=lineno)
            if rid != len(resources):
                raise WorkloadFormatError(
                    f"duplicate or out-of-order resource id {rid} (expected {len(resources)})",
                    line=lineno,
                )
            try:
                resources.append(Resource(id=rid, speed=speed, capacity=capacity))
            except ValueError as exc:
                raise WorkloadFormatError(str(exc), line=lineno) from None
        elif kind == "task":
            if len(parts) < 4:
                raise WorkloadFormatError("task line needs id, cost and arrival", line=lineno)
            tid = _parse_int(parts[1], "task id", lineno)
            cost = _parse_float(parts[2], "cost", lineno)
            arrival = _parse_float(parts[3], "arrival", lineno)
            deadline = None
            for extra in parts[4:]:
                if extra.startswith("deadline="):
                    deadline = _parse_float(extra[len("deadline="):], "deadline", lineno)
                else:
                    raise WorkloadFormatError(f"unknown task field {extra!r}", line=lineno)
            if tid != len(tasks):
                raise WorkloadFormatError(
                    f"duplicate or out-of-order task id {tid} (expected {len(tasks)})",
                    line=lineno,
                )
            try:
                tasks.append(Task(id=tid, cost=cost, arrival=arrival, deadline=deadline))
            except ValueError as exc:
                raise WorkloadFormatError(str(exc), line=lineno) from None
        else:
            raise WorkloadFormatError(f"unknown line kind {kind!r}", line=lineno)

    try:
        return Workload(tasks=tuple(tasks), resources=tuple(resources), seed=seed)
    except ValueError as exc:
        raise WorkloadFormatError(str(exc)) from None


def load_workload(path) -> Workload:
    with open(path, "r") as fh:
        return parse_workload(fh.read())
