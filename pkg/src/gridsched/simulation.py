"""Discrete-event replay of a schedule on the resources.

The simulator plays the role of the execution layer: tasks arrive, are
dispatched to their assigned resource, queue FIFO, execute, and finish.
Capacity-limited resources hold at most ``capacity`` dispatched-but-
unfinished tasks; a task whose resource is full waits in a global pending
set and dispatches when a slot frees (ties broken by task id).

Finish times accumulate per resource in dispatch order with the same
floating-point operations as the analytic evaluation, so on zero-arrival
workloads without capacities the simulated makespan equals the analytic
makespan exactly.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .scheduling import Schedule, validate_schedule
from .workload import Workload

_KIND_ORDER = {"dispatch": 0, "start": 1, "finish": 2}


@dataclass(frozen=True)
class TraceEvent:
    time: float
    kind: str
    task_id: int
    resource_id: int


@dataclass(frozen=True)
class TaskRun:
    task_id: int
    resource_id: int
    start: float
    finish: float
    met_deadline: bool


@dataclass(frozen=True)
class ExecutionTrace:
    """Per-task execution records plus the ordered event log."""

    records: tuple[TaskRun, ...]
    simulated_makespan: float
    events: tuple[TraceEvent, ...]


def simulate(schedule: Schedule, workload: Workload) -> ExecutionTrace:
    """Replay the schedule and return the execution trace."""
    validate_schedule(schedule, workload)
    tasks = workload.tasks
    resources = workload.resources
    n, m = workload.n_tasks, workload.n_resources
    assign = schedule.assignment
    service = [tasks[t].cost / resources[assign[t]].speed for t in range(n)]
    caps = [r.capacity for r in resources]

    events: list[TraceEvent] = []
    start_t = [0.0] * n
    finish_t = [0.0] * n
    ready = [0.0] * n

    arrivals = sorted(range(n), key=lambda t: (tasks[t].arrival, t))
    ai = 0
    pending: list[int] = []  # arrived, resource queue full
    waiting: list[deque[int]] = [deque() for _ in range(m)]
    running: list[int | None] = [None] * m
    in_queue = [0] * m
    last_finish = [0.0] * m
    finish_heap: list[tuple[float, int]] = []

    def start_task(u: int, r: int) -> None:
        s = max(last_finish[r], ready[u])
        start_t[u] = s
        finish_t[u] = s + service[u]
        running[r] = u
        events.append(TraceEvent(s, "start", u, r))
        heapq.heappush(finish_heap, (finish_t[u], u))

    def dispatch(u: int, now: float) -> None:
        r = assign[u]
        events.append(TraceEvent(now, "dispatch", u, r))
        in_queue[r] += 1
        ready[u] = now
        if running[r] is None:
            start_task(u, r)
        else:
            waiting[r].append(u)

    while ai < n or finish_heap:
        t_arr = tasks[arrivals[ai]].arrival if ai < n else float("inf")
        t_fin = finish_heap[0][0] if finish_heap else float("inf")
        now = min(t_arr, t_fin)

        # Finishes first: a slot freed at time T accepts dispatches at T.
        while finish_heap and finish_heap[0][0] == now:
            f, u = heapq.heappop(finish_heap)
            r = assign[u]
            events.append(TraceEvent(f, "finish", u, r))
            running[r] = None
            in_queue[r] -= 1
            last_finish[r] = f
            if waiting[r]:
                start_task(waiting[r].popleft(), r)

        while ai < n and tasks[arrivals[ai]].arrival == now:
            heapq.heappush(pending, arrivals[ai])
            ai += 1

        # One dispatch pass in ascending task id; dispatching never frees
        # a slot, so a single pass reaches a fixed point.
        blocked: list[int] = []
        while pending:
            u = heapq.heappop(pending)
            r = assign[u]
            if caps[r] is None or in_queue[r] < caps[r]:
                dispatch(u, now)
            else:
                blocked.append(u)
        for u in blocked:
            heapq.heappush(pending, u)

    records = []
    for t in range(n):
        deadline = tasks[t].deadline
        met = deadline is None or finish_t[t] <= deadline
        records.append(TaskRun(t, assign[t], start_t[t], finish_t[t], met))
    events.sort(key=lambda e: (e.time, e.task_id, _KIND_ORDER[e.kind]))
    makespan = max(finish_t) if n else 0.0
    return ExecutionTrace(
        records=tuple(records),
        simulated_makespan=makespan,
        events=tuple(events),
    )


def check_deadlines(trace: ExecutionTrace, workload: Workload) -> tuple[int, float]:
    """Count deadline misses and total tardiness over a trace."""
    misses = 0
    tardiness = 0.0
    for rec in trace.records:
        deadline = workload.tasks[rec.task_id].deadline
        if deadline is not None and rec.finish > deadline:
            misses += 1
            tardiness += rec.finish - deadline
    return misses, tardiness


def trace_csv(trace: ExecutionTrace) -> str:
    """CSV of per-task records: task,resource,start,finish,met_deadline."""
    lines = ["task,resource,start,finish,met_deadline"]
    for rec in trace.records:
        met = "true" if rec.met_deadline else "false"
        lines.append(f"{rec.task_id},{rec.resource_id},{rec.start!r},{rec.finish!r},{met}")
    return "\n".join(lines) + "\n"


def event_log(trace: ExecutionTrace) -> str:
    """Event log, one line per event: ``t=<time> <kind> task=<id> res=<id>``."""
    lines = [
        f"t={e.time!r} {e.kind} task={e.task_id} res={e.resource_id}" for e in trace.events
    ]
    return "\n".join(lines) + ("\n" if lines else "")
