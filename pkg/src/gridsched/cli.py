"""Command-line experiment runner.

Reproduces the FCFS-vs-GA comparison: generate (or load) a workload,
schedule it with FCFS and/or the broker-coordinated GA agents, replay the
winning schedules in the execution simulator, and write CSV summaries.

Output files are byte-deterministic for a fixed configuration. The
``elapsed_ms`` column therefore reports the simulated execution time of
the row's schedule (makespan in milliseconds, one time unit = one second),
never wall-clock time.

Exit codes: 0 success, 1 usage/configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import bruteforce
from .broker import (
    AgentDescriptor,
    ScheduleRequest,
    default_agents,
    outcome_csv,
    spawn_agents,
)
from .errors import GridSchedError
from .ga import history_csv
from .rng import MAX_SEED
from .scheduling import evaluate, fcfs_schedule, format_schedule
from .simulation import check_deadlines, simulate, trace_csv
from .workload import Workload, dumps_workload, generate_workload, load_workload

SUMMARY_COLUMNS = (
    "run",
    "n_tasks",
    "n_resources",
    "scheduler",
    "makespan",
    "imbalance",
    "deadline_misses",
    "elapsed_ms",
)
SWEEP_COLUMNS = ("n_tasks", "scheduler", "mean_makespan", "mean_imbalance", "win_rate")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs; see the CLI flags for semantics."""

    n_tasks: int | None = None
    n_resources: int | None = None
    workload_path: Path | None = None
    cost_range: tuple[float, float] = (10.0, 100.0)
    heterogeneity: float = 0.5
    deadline_slack: float | None = None
    scheduler: str = "both"
    agents: str | tuple[AgentDescriptor, ...] = "three"
    generations: int = 200
    population: int = 50
    repetitions: int = 1
    base_seed: int = 0
    out_dir: Path = Path("results")
    brute_force: bool = False
    agent_timeout: float = 300.0

    def __post_init__(self):
        if self.scheduler not in ("fcfs", "ga", "both"):
            raise ValueError(f"scheduler must be fcfs, ga or both, got {self.scheduler!r}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        generate = self.n_tasks is not None or self.n_resources is not None
        if generate == (self.workload_path is not None):
            raise ValueError("exactly one workload source required: generate or file")
        if generate and (self.n_tasks is None or self.n_resources is None):
            raise ValueError("generation needs both n_tasks and n_resources")
        if not (0 <= self.base_seed and self.base_seed + self.repetitions <= MAX_SEED):
            raise ValueError("base_seed out of range for the requested repetitions")
        if isinstance(self.agents, str) and self.agents not in ("three", "five"):
            raise ValueError(f"agent preset must be 'three' or 'five', got {self.agents!r}")
        if not self.agent_timeout > 0:
            raise ValueError(f"agent_timeout must be > 0, got {self.agent_timeout}")

    @property
    def wants_fcfs(self) -> bool:
        return self.scheduler in ("fcfs", "both")

    @property
    def wants_ga(self) -> bool:
        return self.scheduler in ("ga", "both")


def _write(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _workload_for_run(config: ExperimentConfig, run_seed: int) -> Workload:
    if config.workload_path is not None:
        return load_workload(config.workload_path)
    return generate_workload(
        config.n_tasks,
        config.n_resources,
        config.cost_range,
        heterogeneity=config.heterogeneity,
        deadline_slack=config.deadline_slack,
        seed=run_seed,
    )


def _check_brute_force(config: ExperimentConfig, workload: Workload) -> None:
    total = bruteforce.total_assignments(workload.n_tasks, workload.n_resources)
    if total > bruteforce.ENUMERATION_LIMIT:
        raise ValueError(
            f"--brute-force needs n_resources**n_tasks <= {bruteforce.ENUMERATION_LIMIT}, "
            f"got {workload.n_resources}**{workload.n_tasks} = {total}"
        )


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Run the configured experiment; returns the summary rows it wrote."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    pool = None
    if config.wants_ga:
        descriptors = (
            default_agents(config.agents, config.base_seed)
            if isinstance(config.agents, str)
            else tuple(config.agents)
        )
        pool = spawn_agents(descriptors)

    columns = list(SUMMARY_COLUMNS)
    if config.brute_force:
        columns.append("optimal_makespan")

    rows: list[dict] = []
    try:
        for r in range(config.repetitions):
            run_seed = config.base_seed + r
            workload = _workload_for_run(config, run_seed)
            run_dir = out / f"run_{r:03d}"
            run_dir.mkdir(parents=True, exist_ok=True)
            _write(run_dir / "workload.txt", dumps_workload(workload))

            optimal = None
            if config.brute_force:
                _check_brute_force(config, workload)
                optimal, _ = bruteforce.optimal_makespan(workload)

            def summarize(scheduler: str, schedule) -> dict:
                metrics = evaluate(schedule, workload)
                trace = simulate(schedule, workload)
                misses, _ = check_deadlines(trace, workload)
                row = {
                    "run": r,
                    "n_tasks": workload.n_tasks,
                    "n_resources": workload.n_resources,
                    "scheduler": scheduler,
                    "makespan": trace.simulated_makespan,
                    "imbalance": metrics.imbalance,
                    "deadline_misses": misses,
                    "elapsed_ms": round(1000.0 * trace.simulated_makespan),
                }
                if optimal is not None:
                    row["optimal_makespan"] = optimal
                _write(run_dir / f"{scheduler}_schedule.txt", format_schedule(schedule, metrics))
                _write(run_dir / f"{scheduler}_trace.csv", trace_csv(trace))
                return row

            if config.wants_fcfs:
                rows.append(summarize("fcfs", fcfs_schedule(workload)))

            if config.wants_ga:
                request = ScheduleRequest(
                    request_id=r,
                    workload=workload,
                    ga_overrides={
                        "generations": config.generations,
                        "population_size": config.population,
                        "seed": run_seed,
                    },
                    agent_deadline=config.agent_timeout,
                )
                outcome = pool.schedule_batch(request)
                rows.append(summarize("ga", outcome.winner))
                _write(run_dir / "broker.csv", outcome_csv(outcome))
                if outcome.winner_agent_id is not None:
                    winner_report = next(
                        rep for rep in outcome.per_agent
                        if rep.agent_id == outcome.winner_agent_id
                    )
                    _write(run_dir / "ga_history.csv", history_csv(winner_report.result))
    finally:
        if pool is not None:
            pool.shutdown()

    _write(out / "summary.csv", _csv(columns, rows))
    return rows


def sweep_group_sizes(config: ExperimentConfig, sizes: list[int]) -> list[dict]:
    """Run the experiment once per task-group size and aggregate per scheduler."""
    if not sizes:
        raise ValueError("sweep needs at least one size")
    if any(s < 1 for s in sizes):
        raise ValueError(f"sweep sizes must be >= 1, got {sizes}")
    if config.workload_path is not None:
        raise ValueError("sweeping sizes requires a generated workload source")

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    columns = list(SWEEP_COLUMNS)
    if config.brute_force:
        columns.append("mean_optimal_makespan")

    sweep_rows: list[dict] = []
    for size in sizes:
        sub = replace(config, n_tasks=size, out_dir=out / f"n{size}")
        rows = run_experiment(sub)
        by_sched: dict[str, list[dict]] = {}
        for row in rows:
            by_sched.setdefault(row["scheduler"], []).append(row)

        win_rate = ""
        if config.scheduler == "both":
            ga = {row["run"]: row["makespan"] for row in by_sched.get("ga", [])}
            fcfs = {row["run"]: row["makespan"] for row in by_sched.get("fcfs", [])}
            wins = sum(1 for run in ga if ga[run] < fcfs[run])
            win_rate = wins / len(ga) if ga else ""

        for scheduler in sorted(by_sched):
            group = by_sched[scheduler]
            row = {
                "n_tasks": size,
                "scheduler": scheduler,
                "mean_makespan": float(np.mean([g["makespan"] for g in group])),
                "mean_imbalance": float(np.mean([g["imbalance"] for g in group])),
                "win_rate": win_rate,
            }
            if config.brute_force:
                row["mean_optimal_makespan"] = float(
                    np.mean([g["optimal_makespan"] for g in group])
                )
            sweep_rows.append(row)

    _write(out / "sweep.csv", _csv(columns, sweep_rows))
    return sweep_rows


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_generate(text: str) -> tuple[int, int]:
    try:
        n, m = text.lower().split("x")
        n, m = int(n), int(m)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM (e.g. 100x11), got {text!r}") from None
    if n < 1 or m < 1:
        raise argparse.ArgumentTypeError(f"NxM values must be >= 1, got {text!r}")
    return n, m


def _parse_cost_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI (e.g. 10:100), got {text!r}") from None


def _parse_sizes(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated sizes, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gridsched",
        description="FCFS-vs-GA grid scheduling experiments.",
    )
    parser.add_argument("--generate", type=_parse_generate, metavar="NxM",
                        help="generate N tasks on M resources")
    parser.add_argument("--workload", type=Path, metavar="PATH",
                        help="load a workload file instead of generating")
    parser.add_argument("--scheduler", choices=("fcfs", "ga", "both"), default="both")
    parser.add_argument("--agents", choices=("three", "five"), default="three",
                        help="agent preset: 3 kinds or all 5 distribution kinds")
    parser.add_argument("--generations", type=int, default=200, metavar="K")
    parser.add_argument("--population", type=int, default=50, metavar="P")
    parser.add_argument("--reps", type=int, default=1, metavar="R")
    parser.add_argument("--seed", type=int, default=0, metavar="S")
    parser.add_argument("--out", type=Path, default=Path("results"), metavar="DIR")
    parser.add_argument("--brute-force", action="store_true",
                        help="add the exhaustive-optimum column (small instances only)")
    parser.add_argument("--sweep", type=_parse_sizes, metavar="SIZES",
                        help="comma-separated task-group sizes, e.g. 50,60,70,80,90,100")
    parser.add_argument("--cost-range", type=_parse_cost_range, default=(10.0, 100.0),
                        metavar="LO:HI")
    parser.add_argument("--heterogeneity", type=float, default=0.5, metavar="H")
    parser.add_argument("--deadline-slack", type=float, default=None, metavar="X")
    parser.add_argument("--agent-timeout", type=float, default=300.0, metavar="T",
                        help="per-agent wall-clock budget in seconds")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if (args.generate is None) == (args.workload is None):
        parser.error("exactly one of --generate and --workload is required")
    if args.sweep is not None and args.generate is None:
        parser.error("--sweep requires --generate")

    n_tasks, n_resources = args.generate if args.generate else (None, None)
    try:
        config = ExperimentConfig(
            n_tasks=n_tasks,
            n_resources=n_resources,
            workload_path=args.workload,
            cost_range=args.cost_range,
            heterogeneity=args.heterogeneity,
            deadline_slack=args.deadline_slack,
            scheduler=args.scheduler,
            agents=args.agents,
            generations=args.generations,
            population=args.population,
            repetitions=args.reps,
            base_seed=args.seed,
            out_dir=args.out,
            brute_force=args.brute_force,
            agent_timeout=args.agent_timeout,
        )
        if args.sweep is not None:
            rows = sweep_group_sizes(config, args.sweep)
            target = Path(config.out_dir) / "sweep.csv"
        else:
            rows = run_experiment(config)
            target = Path(config.out_dir) / "summary.csv"
    except OSError as exc:
        print(f"gridsched: I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, GridSchedError) as exc:
        print(f"gridsched: error: {exc}", file=sys.stderr)
        return 1

    print(f"wrote {target} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
