"""Decentralized GA scheduling for batches of independent tasks.

Agents evolve task-to-resource assignments with a genetic algorithm, each
starting from a different initialization distribution; a broker aggregates
their candidates, tolerates agent failures, and picks the winner. An FCFS
baseline and a discrete-event execution simulator complete the toolkit.
"""

from .broker import (
    AgentDescriptor,
    AgentPool,
    AgentReport,
    BrokerOutcome,
    ScheduleRequest,
    default_agents,
    outcome_csv,
    schedule_batch,
    shutdown,
    spawn_agents,
)
from .bruteforce import optimal_makespan
from .errors import (
    CapacityExhaustedError,
    GridSchedError,
    InvalidScheduleError,
    PoolClosedError,
    WorkloadFormatError,
)
from .ga import (
    GaConfig,
    GaResult,
    InitDistribution,
    crossover,
    evolve,
    history_csv,
    init_population,
    mutate,
    tournament_select,
)
from .rng import derive_seed, make_rng
from .scheduling import (
    FitnessWeights,
    Schedule,
    ScheduleMetrics,
    evaluate,
    fcfs_schedule,
    format_schedule,
)
from .simulation import ExecutionTrace, TaskRun, TraceEvent, check_deadlines, event_log, simulate, trace_csv
from .workload import (
    Resource,
    Task,
    Workload,
    dumps_workload,
    generate_workload,
    load_workload,
    parse_workload,
    save_workload,
)

__version__ = "0.1.0"
