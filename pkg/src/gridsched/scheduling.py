"""Schedule representation, fitness evaluation, and the FCFS baseline.

A schedule is a plain assignment vector: entry ``t`` names the resource
that runs task ``t``. Each resource dispatches its tasks in ascending task
id. The same vector doubles as the GA chromosome, so every crossover or
mutation product is automatically a valid schedule.

Fitness scalarizes two criteria (plus a deadline penalty): makespan and
load imbalance. Per-resource busy time is accumulated in dispatch order;
the execution simulator uses the identical summation order, which makes
analytic and simulated makespans equal exactly (not approximately) on
zero-arrival workloads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import CapacityExhaustedError, InvalidScheduleError
from .workload import Workload


@dataclass(frozen=True)
class FitnessWeights:
    """Scalarization weights: makespan, load imbalance, tardiness penalty."""

    w_make: float = 1.0
    w_bal: float = 0.5
    w_dl: float = 10.0

    def __post_init__(self):
        if not self.w_make > 0:
            raise ValueError(f"w_make must be > 0, got {self.w_make}")
        if self.w_bal < 0 or self.w_dl < 0:
            raise ValueError("fitness weights must be non-negative")


@dataclass(frozen=True)
class Schedule:
    """Task-to-resource assignment; ``assignment[t]`` runs task ``t``."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(g) for g in self.assignment))

    def __len__(self) -> int:
        return len(self.assignment)

    @classmethod
    def of(cls, genes: Iterable[int]) -> "Schedule":
        return cls(tuple(genes))


@dataclass(frozen=True)
class ScheduleMetrics:
    """Evaluation of one schedule against one workload."""

    makespan: float
    loads: tuple[float, ...]
    imbalance: float
    deadline_misses: int
    tardiness: float
    fitness: float


class MetricsArrays(NamedTuple):
    """Batch evaluation result, one entry per population row."""

    fitness: np.ndarray
    makespan: np.ndarray
    imbalance: np.ndarray
    loads: np.ndarray
    deadline_misses: np.ndarray
    tardiness: np.ndarray


def validate_schedule(schedule: Schedule, workload: Workload) -> None:
    n, m = workload.n_tasks, workload.n_resources
    if len(schedule.assignment) != n:
        raise InvalidScheduleError(
            f"assignment length {len(schedule.assignment)} != task count {n}"
        )
    for t, g in enumerate(schedule.assignment):
        if not 0 <= g < m:
            raise InvalidScheduleError(
                f"task {t} assigned to resource {g}, valid range is [0, {m})"
            )


def batch_metrics(genes, workload: Workload, weights: FitnessWeights) -> MetricsArrays:
    """Evaluate a whole population of assignment rows at once.

    ``genes`` is an integer array of shape (rows, n_tasks). Busy time per
    resource accumulates in ascending task id (the dispatch order); this
    summation order is part of the contract and must not be reordered.
    """
    genes = np.asarray(genes, dtype=np.int64)
    if genes.ndim != 2:
        raise InvalidScheduleError(f"expected a 2-d gene array, got shape {genes.shape}")
    rows, n = genes.shape
    m = workload.n_resources
    if n != workload.n_tasks:
        raise InvalidScheduleError(f"assignment length {n} != task count {workload.n_tasks}")
    if n and (genes.min() < 0 or genes.max() >= m):
        raise InvalidScheduleError(f"assignment entries must lie in [0, {m})")

    costs = np.array([t.cost for t in workload.tasks])
    speeds = np.array([r.speed for r in workload.resources])
    arrivals = np.array([t.arrival for t in workload.tasks])
    deadlines = [t.deadline for t in workload.tasks]
    has_deadlines = any(d is not None for d in deadlines)
    zero_arrivals = bool(n == 0 or not arrivals.any())

    misses = np.zeros(rows, dtype=np.int64)
    tardiness = np.zeros(rows)

    if zero_arrivals and not has_deadlines:
        if n:
            service = costs / speeds[genes]
            flat = (genes + m * np.arange(rows)[:, None]).ravel()
            loads = np.bincount(flat, weights=service.ravel(), minlength=rows * m)
            loads = loads.reshape(rows, m)
        else:
            loads = np.zeros((rows, m))
        makespan = loads.max(axis=1)
    else:
        # Arrivals or deadlines need per-task finish times: replay each
        # resource queue in task-id order, start = max(free, arrival).
        loads = np.zeros((rows, m))
        makespan = np.zeros(rows)
        for i in range(rows):
            free = [0.0] * m
            busy = [0.0] * m
            finish = [0.0] * n
            for t in range(n):
                r = int(genes[i, t])
                service = costs[t] / speeds[r]
                start = max(free[r], arrivals[t])
                f = start + service
                free[r] = f
                busy[r] += service
                finish[t] = f
            loads[i] = busy
            makespan[i] = max(finish) if n else 0.0
            if has_deadlines:
                miss = 0
                tard = 0.0
                for t in range(n):
                    d = deadlines[t]
                    if d is not None and finish[t] > d:
                        miss += 1
                        tard += finish[t] - d
                misses[i] = miss
                tardiness[i] = tard

    mean = loads.mean(axis=1)
    imbalance = np.maximum(0.0, loads.max(axis=1) - mean)
    # Equal loads must give exactly zero even when mean() rounds.
    if m > 1:
        all_equal = np.all(loads == loads[:, :1], axis=1)
        imbalance = np.where(all_equal, 0.0, imbalance)
    else:
        imbalance = np.zeros(rows)
    fitness = weights.w_make * makespan + weights.w_bal * imbalance + weights.w_dl * tardiness
    return MetricsArrays(fitness, makespan, imbalance, loads, misses, tardiness)


def evaluate(
    schedule: Schedule, workload: Workload, weights: FitnessWeights = FitnessWeights()
) -> ScheduleMetrics:
    """Compute loads, makespan, imbalance, deadline misses, and fitness."""
    validate_schedule(schedule, workload)
    genes = np.array([schedule.assignment], dtype=np.int64).reshape(1, workload.n_tasks)
    arr = batch_metrics(genes, workload, weights)
    return ScheduleMetrics(
        makespan=float(arr.makespan[0]),
        loads=tuple(float(x) for x in arr.loads[0]),
        imbalance=float(arr.imbalance[0]),
        deadline_misses=int(arr.deadline_misses[0]),
        tardiness=float(arr.tardiness[0]),
        fitness=float(arr.fitness[0]),
    )


def fcfs_schedule(workload: Workload) -> Schedule:
    """First Come First Served baseline.

    Tasks are dispatched in ascending arrival order (ties by task id), each
    to the resource with the earliest current free time (ties by lowest
    resource id). A resource whose queue is full (``capacity`` tasks
    dispatched and unfinished at dispatch time) is skipped; if every
    resource is full the batch cannot be placed.
    """
    n, m = workload.n_tasks, workload.n_resources
    free = [0.0] * m
    finish_times: list[list[float]] = [[] for _ in range(m)]
    assignment = [0] * n

    order = sorted(range(n), key=lambda t: (workload.tasks[t].arrival, t))
    for t in order:
        task = workload.tasks[t]
        chosen = -1
        for r in range(m):
            cap = workload.resources[r].capacity
            if cap is not None:
                queued = sum(1 for f in finish_times[r] if f > task.arrival)
                if queued >= cap:
                    continue
            if chosen < 0 or free[r] < free[chosen]:
                chosen = r
        if chosen < 0:
            raise CapacityExhaustedError(
                f"all resources at capacity when dispatching task {t}"
            )
        start = max(free[chosen], task.arrival)
        fin = start + task.cost / workload.resources[chosen].speed
        free[chosen] = fin
        finish_times[chosen].append(fin)
        assignment[t] = chosen
    return Schedule(tuple(assignment))


def format_schedule(schedule: Schedule, metrics: ScheduleMetrics | None = None) -> str:
    """Render the schedule dump: one line per task, then a metrics block."""
    lines = [
        f"task {t} -> resource {r}" for t, r in enumerate(schedule.assignment)
    ]
    if metrics is not None:
        lines.append("# metrics")
        lines.append(f"makespan {metrics.makespan!r}")
        lines.append(f"imbalance {metrics.imbalance!r}")
        lines.append(f"fitness {metrics.fitness!r}")
    return "\n".join(lines) + "\n"
