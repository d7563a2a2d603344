"""Broker and scheduling agents.

A broker fans a batch request out to a pool of scheduling agents. Each
agent runs the GA on the shared read-only workload with its own
initialization distribution and seed, and returns its best schedule. The
broker aggregates the candidates and picks the minimum-fitness winner
(ties by lowest agent id). Agents that raise or exceed their wall-clock
budget are recorded as failed/timed out and excluded; if no agent
responds, the broker falls back to the FCFS schedule.

Coordination is in-process: agents are worker threads exchanging immutable
request/response values, which keeps aggregation and fault-tolerance
semantics deterministic and testable. Results are independent of whether
agents run sequentially or concurrently.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass

from .errors import PoolClosedError
from .ga import GaConfig, GaResult, InitDistribution, evolve, merge_config
from .rng import derive_seed
from .scheduling import Schedule, ScheduleMetrics, evaluate, fcfs_schedule
from .workload import Workload

THREE_AGENT_KINDS = ("poisson", "normal", "uniform")
FIVE_AGENT_KINDS = ("poisson", "normal", "geometric", "uniform", "laplace")

STATUS_OK = "ok"
STATUS_FAILED = "failed"
STATUS_TIMEOUT = "timeout"


@dataclass(frozen=True)
class AgentDescriptor:
    """Identity of one scheduling agent: id, init distribution, seed."""

    agent_id: int
    init: InitDistribution
    seed: int


@dataclass(frozen=True)
class ScheduleRequest:
    """A batch to schedule, with optional GA overrides and per-agent budget."""

    request_id: int
    workload: Workload
    ga_overrides: dict | None = None
    agent_deadline: float = 300.0

    def __post_init__(self):
        if not self.agent_deadline > 0:
            raise ValueError(f"agent_deadline must be > 0, got {self.agent_deadline}")


@dataclass(frozen=True)
class AgentReport:
    """One agent's contribution to a broker outcome."""

    agent_id: int
    status: str
    metrics: ScheduleMetrics | None = None
    result: GaResult | None = None
    wall_ms: float | None = None


@dataclass(frozen=True)
class BrokerOutcome:
    """Aggregated result of one scheduling request."""

    request_id: int
    winner: Schedule
    winner_metrics: ScheduleMetrics
    winner_agent_id: int | None
    per_agent: tuple[AgentReport, ...]
    fallback_used: bool


def default_agents(preset: str, base_seed: int = 0) -> tuple[AgentDescriptor, ...]:
    """Build the standard agent sets: ``three`` or ``five`` distribution kinds."""
    kinds = {"three": THREE_AGENT_KINDS, "five": FIVE_AGENT_KINDS}.get(preset)
    if kinds is None:
        raise ValueError(f"unknown agent preset {preset!r}; expected 'three' or 'five'")
    return tuple(
        AgentDescriptor(agent_id=i, init=InitDistribution(kind), seed=derive_seed(base_seed, i))
        for i, kind in enumerate(kinds)
    )


class AgentPool:
    """A pool of independent scheduling workers owned by one broker."""

    def __init__(self, descriptors, max_workers: int | None = None):
        descriptors = tuple(descriptors)
        if not descriptors:
            raise ValueError("agent pool needs at least one descriptor")
        ids = [d.agent_id for d in descriptors]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate agent ids: {sorted(ids)}")
        self.descriptors = descriptors
        self._executor = ThreadPoolExecutor(max_workers=max_workers or len(descriptors))
        self._closed = False
        self._lock = threading.Lock()
        self._seen_requests: set[int] = set()
        self._faults: dict[int, Exception] = {}
        self._delays: dict[int, float] = {}

    def __len__(self) -> int:
        return len(self.descriptors)

    def __enter__(self) -> "AgentPool":
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()

    # -- fault injection hooks (testing / chaos) ---------------------------

    def inject_fault(self, agent_id: int, error: Exception | None = None) -> None:
        """Make the named agent raise on its next runs."""
        self._check_agent(agent_id)
        self._faults[agent_id] = error or RuntimeError(f"agent {agent_id}: injected fault")

    def inject_delay(self, agent_id: int, seconds: float) -> None:
        """Make the named agent sleep before working (drives timeouts)."""
        self._check_agent(agent_id)
        self._delays[agent_id] = float(seconds)

    def _check_agent(self, agent_id: int) -> None:
        if agent_id not in {d.agent_id for d in self.descriptors}:
            raise ValueError(f"no agent with id {agent_id}")

    # -- lifecycle ----------------------------------------------------------

    def shutdown(self) -> None:
        """Idempotent; pending work is abandoned."""
        with self._lock:
            if self._closed:
                return
            self._closed = True
        self._executor.shutdown(wait=False, cancel_futures=True)

    # -- scheduling ----------------------------------------------------------

    def _run_agent(self, desc: AgentDescriptor, request: ScheduleRequest) -> GaResult:
        delay = self._delays.get(desc.agent_id)
        if delay:
            time.sleep(delay)
        fault = self._faults.get(desc.agent_id)
        if fault is not None:
            raise fault
        config = agent_config(desc, request.ga_overrides)
        return evolve(request.workload, config)

    def schedule_batch(self, request: ScheduleRequest) -> BrokerOutcome:
        with self._lock:
            if self._closed:
                raise PoolClosedError("agent pool has been shut down")
            if request.request_id in self._seen_requests:
                raise ValueError(f"request_id {request.request_id} already used on this pool")
            self._seen_requests.add(request.request_id)

        futures = [
            (desc, self._executor.submit(self._run_agent, desc, request))
            for desc in self.descriptors
        ]
        reports: list[AgentReport] = []
        results: dict[int, GaResult] = {}
        for desc, fut in futures:
            t0 = time.perf_counter()
            try:
                res = fut.result(timeout=request.agent_deadline)
            except FutureTimeout:
                reports.append(AgentReport(desc.agent_id, STATUS_TIMEOUT))
                continue
            except Exception:
                reports.append(AgentReport(desc.agent_id, STATUS_FAILED))
                continue
            wall_ms = (time.perf_counter() - t0) * 1000.0
            results[desc.agent_id] = res
            reports.append(
                AgentReport(desc.agent_id, STATUS_OK, res.best_metrics, res, wall_ms)
            )

        ok = [r for r in reports if r.status == STATUS_OK]
        if ok:
            best = min(ok, key=lambda r: (r.metrics.fitness, r.agent_id))
            winner = results[best.agent_id].best
            winner_metrics = best.metrics
            winner_agent = best.agent_id
            fallback = False
        else:
            weights = agent_config(self.descriptors[0], request.ga_overrides).weights
            winner = fcfs_schedule(request.workload)
            winner_metrics = evaluate(winner, request.workload, weights)
            winner_agent = None
            fallback = True
        return BrokerOutcome(
            request_id=request.request_id,
            winner=winner,
            winner_metrics=winner_metrics,
            winner_agent_id=winner_agent,
            per_agent=tuple(reports),
            fallback_used=fallback,
        )


def agent_config(desc: AgentDescriptor, overrides: dict | None = None) -> GaConfig:
    """Effective GA config for one agent.

    The agent always keeps its own init distribution. A ``seed`` override
    reseeds the whole request but is combined with the agent id so distinct
    agents still search independently.
    """
    overrides = dict(overrides or {})
    if "init" in overrides:
        raise ValueError("the init distribution belongs to the agent and cannot be overridden")
    if "seed" in overrides:
        overrides["seed"] = derive_seed(overrides["seed"], desc.agent_id)
    else:
        overrides["seed"] = desc.seed
    return merge_config(GaConfig(init=desc.init), overrides)


def spawn_agents(descriptors, max_workers: int | None = None) -> AgentPool:
    """Create a pool of independent scheduling workers."""
    return AgentPool(descriptors, max_workers=max_workers)


def schedule_batch(pool: AgentPool, request: ScheduleRequest) -> BrokerOutcome:
    """Fan the request out to every agent and aggregate the winner."""
    return pool.schedule_batch(request)


def shutdown(pool: AgentPool) -> None:
    """Shut the pool down; idempotent."""
    pool.shutdown()


def outcome_csv(outcome: BrokerOutcome) -> str:
    """CSV export of a broker outcome, one row per agent plus a winner row.

    ``elapsed_ms`` reports the simulated execution time of the row's
    schedule (makespan in milliseconds, one time unit = one second) so the
    export is byte-deterministic for fixed seeds; wall-clock timings stay
    in memory on the AgentReport.
    """
    lines = ["request_id,agent_id,status,fitness,makespan,imbalance,elapsed_ms"]
    for rep in outcome.per_agent:
        if rep.status == STATUS_OK:
            ms = round(1000.0 * rep.metrics.makespan)
            lines.append(
                f"{outcome.request_id},{rep.agent_id},{rep.status},"
                f"{rep.metrics.fitness!r},{rep.metrics.makespan!r},"
                f"{rep.metrics.imbalance!r},{ms}"
            )
        else:
            lines.append(f"{outcome.request_id},{rep.agent_id},{rep.status},,,,")
    wm = outcome.winner_metrics
    status = "fallback" if outcome.fallback_used else STATUS_OK
    lines.append(
        f"{outcome.request_id},winner,{status},{wm.fitness!r},{wm.makespan!r},"
        f"{wm.imbalance!r},{round(1000.0 * wm.makespan)}"
    )
    return "\n".join(lines) + "\n"
