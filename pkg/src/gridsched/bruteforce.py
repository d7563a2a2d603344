"""Exhaustive assignment enumeration, the optimality oracle.

Only feasible for tiny instances (m**n assignments); callers guard the
size. Enumeration order is lexicographic, so ties resolve to the
lexicographically smallest assignment and results are deterministic.
"""

from __future__ import annotations

import itertools

import numpy as np

from .scheduling import FitnessWeights, Schedule, batch_metrics
from .workload import Workload

ENUMERATION_LIMIT = 10**6


def total_assignments(n_tasks: int, n_resources: int) -> int:
    return n_resources**n_tasks


def optimal_makespan(
    workload: Workload, limit: int = ENUMERATION_LIMIT, chunk: int = 65536
) -> tuple[float, Schedule]:
    """Enumerate every assignment and return the minimum makespan."""
    n, m = workload.n_tasks, workload.n_resources
    total = total_assignments(n, m)
    if total > limit:
        raise ValueError(
            f"{m}**{n} = {total} assignments exceeds the enumeration limit {limit}"
        )
    weights = FitnessWeights(1.0, 0.0, 0.0)
    best_mks = float("inf")
    best_row: tuple[int, ...] = tuple([0] * n)
    it = itertools.product(range(m), repeat=n)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        genes = np.array(block, dtype=np.int64).reshape(len(block), n)
        arr = batch_metrics(genes, workload, weights)
        i = int(arr.makespan.argmin())
        if arr.makespan[i] < best_mks:
            best_mks = float(arr.makespan[i])
            best_row = block[i]
    return best_mks, Schedule(tuple(best_row))
