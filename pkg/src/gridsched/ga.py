"""The genetic algorithm one scheduling agent runs.

Each agent evolves assignment vectors with tournament selection,
single-point crossover, per-gene uniform mutation, and elitism. What
distinguishes agents is how their initial population is drawn: each uses a
named probability distribution (Poisson, Normal, Geometric, Uniform, or
Laplace) whose samples are floored and folded modulo the resource count
into gene values, so every agent starts the search from a different region
of the assignment space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .rng import check_seed, make_rng
from .scheduling import FitnessWeights, Schedule, ScheduleMetrics, batch_metrics, evaluate
from .workload import Workload

DISTRIBUTION_KINDS = ("poisson", "normal", "geometric", "uniform", "laplace")

_PARAM_NAMES = {
    "poisson": ("rate",),
    "normal": ("mean", "sigma"),
    "geometric": ("p",),
    "uniform": ("low", "high"),
    "laplace": ("loc", "scale"),
}


@dataclass(frozen=True)
class InitDistribution:
    """A named sampling distribution for population initialization.

    Parameters may be omitted; defaults are derived from the resource
    count m when sampling (rate m/2; mean m/2, sigma m/4; p min(0.9, 2/m);
    uniform on [0, m); loc m/2, scale m/4).
    """

    kind: str
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValueError(
                f"unknown distribution kind {self.kind!r}; expected one of {DISTRIBUTION_KINDS}"
            )
        allowed = _PARAM_NAMES[self.kind]
        for name, value in self.params.items():
            if name not in allowed:
                raise ValueError(f"{self.kind} takes parameters {allowed}, not {name!r}")
            float(value)
        self._check_values(self.params)

    def _check_values(self, params: dict[str, float]) -> None:
        if self.kind == "poisson" and "rate" in params and not params["rate"] > 0:
            raise ValueError(f"poisson rate must be > 0, got {params['rate']}")
        if self.kind == "normal" and "sigma" in params and not params["sigma"] > 0:
            raise ValueError(f"normal sigma must be > 0, got {params['sigma']}")
        if self.kind == "geometric" and "p" in params and not 0 < params["p"] < 1:
            raise ValueError(f"geometric p must be in (0, 1), got {params['p']}")
        if self.kind == "laplace" and "scale" in params and not params["scale"] > 0:
            raise ValueError(f"laplace scale must be > 0, got {params['scale']}")
        if self.kind == "uniform" and {"low", "high"} <= params.keys():
            if not params["low"] < params["high"]:
                raise ValueError("uniform needs low < high")

    def resolved_params(self, n_resources: int) -> dict[str, float]:
        m = float(n_resources)
        defaults = {
            "poisson": {"rate": m / 2},
            "normal": {"mean": m / 2, "sigma": m / 4},
            "geometric": {"p": min(0.9, 2.0 / m)},
            "uniform": {"low": 0.0, "high": m},
            "laplace": {"loc": m / 2, "scale": m / 4},
        }[self.kind]
        defaults.update(self.params)
        self._check_values(defaults)
        if self.kind == "uniform" and not defaults["low"] < defaults["high"]:
            raise ValueError("uniform needs low < high")
        return defaults


def _sample_genes(
    dist: InitDistribution, rng: np.random.Generator, shape, n_resources: int
) -> np.ndarray:
    """Draw raw samples, floor them, and fold modulo the resource count."""
    p = dist.resolved_params(n_resources)
    if dist.kind == "poisson":
        raw = rng.poisson(p["rate"], size=shape)
    elif dist.kind == "normal":
        raw = rng.normal(p["mean"], p["sigma"], size=shape)
    elif dist.kind == "geometric":
        raw = rng.geometric(p["p"], size=shape)
    elif dist.kind == "uniform":
        raw = rng.uniform(p["low"], p["high"], size=shape)
    else:
        raw = rng.laplace(p["loc"], p["scale"], size=shape)
    # Euclidean modulo: numpy's % on a positive divisor is never negative.
    return np.floor(raw).astype(np.int64) % n_resources


@dataclass(frozen=True)
class GaConfig:
    """GA parameters for one agent run.

    ``mutation_rate=None`` resolves to 1/n_tasks when the run starts.
    """

    population_size: int = 50
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float | None = None
    tournament_size: int = 3
    elite_count: int = 2
    init: InitDistribution = field(default_factory=lambda: InitDistribution("uniform"))
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError(f"crossover_rate must be in [0, 1], got {self.crossover_rate}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if self.tournament_size < 2:
            raise ValueError(f"tournament_size must be >= 2, got {self.tournament_size}")
        if not 1 <= self.elite_count < self.population_size:
            raise ValueError(
                f"elite_count must be in [1, population_size), got {self.elite_count}"
            )
        check_seed(self.seed)


@dataclass(frozen=True)
class GaResult:
    """Outcome of one evolve() run."""

    best: Schedule
    best_metrics: ScheduleMetrics
    history: tuple[float, ...]
    history_makespan: tuple[float, ...]
    history_imbalance: tuple[float, ...]
    generations_run: int


def init_population(
    dist: InitDistribution,
    pop_size: int,
    n_tasks: int,
    n_resources: int,
    rng_seed: int,
) -> list[Schedule]:
    """Draw an initial population; deterministic for a fixed seed."""
    if pop_size < 1:
        raise ValueError(f"pop_size must be >= 1, got {pop_size}")
    if n_resources < 1:
        raise ValueError(f"n_resources must be >= 1, got {n_resources}")
    if n_tasks < 0:
        raise ValueError(f"n_tasks must be >= 0, got {n_tasks}")
    rng = make_rng(rng_seed)
    genes = _sample_genes(dist, rng, (pop_size, n_tasks), n_resources)
    return [Schedule(tuple(row)) for row in genes]


def tournament_select(
    population: Sequence[Schedule],
    metrics: Sequence[ScheduleMetrics],
    k: int,
    rng: np.random.Generator,
) -> Schedule:
    """Pick the lowest-fitness member of k distinct uniformly drawn members.

    Ties break toward the earliest population index. When the population
    has fewer than k members the whole population competes.
    """
    if not population:
        raise ValueError("population must be non-empty")
    if len(metrics) != len(population):
        raise ValueError("metrics must match population length")
    if k < 2:
        raise ValueError(f"tournament size must be >= 2, got {k}")
    size = min(k, len(population))
    drawn = rng.choice(len(population), size=size, replace=False)
    best = min(drawn, key=lambda i: (metrics[i].fitness, i))
    return population[int(best)]


def crossover(
    a: Schedule, b: Schedule, rate: float, rng: np.random.Generator
) -> tuple[Schedule, Schedule]:
    """Single-point crossover with probability ``rate``, else copies."""
    if len(a) != len(b):
        raise ValueError(f"parent lengths differ: {len(a)} vs {len(b)}")
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"crossover rate must be in [0, 1], got {rate}")
    n = len(a)
    if n < 2 or rng.random() >= rate:
        return a, b
    cut = int(rng.integers(1, n))
    c1 = a.assignment[:cut] + b.assignment[cut:]
    c2 = b.assignment[:cut] + a.assignment[cut:]
    return Schedule(c1), Schedule(c2)


def mutate(
    s: Schedule, rate: float, n_resources: int, rng: np.random.Generator
) -> Schedule:
    """Resample each gene uniformly over [0, n_resources) with probability ``rate``."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate must be in [0, 1], got {rate}")
    n = len(s)
    if n == 0:
        return s
    genes = np.array(s.assignment, dtype=np.int64)
    mask = rng.random(n) < rate
    repl = rng.integers(0, n_resources, size=n)
    return Schedule(tuple(np.where(mask, repl, genes)))


def _batch_tournament(
    fitness: np.ndarray, rows: int, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized tournament: one winner index per row, same rule as
    tournament_select (k distinct members, min fitness, ties by index)."""
    pop = len(fitness)
    size = min(k, pop)
    keys = rng.random((rows, pop))
    cand = np.argpartition(keys, size - 1, axis=1)[:, :size]
    cand_fit = fitness[cand]
    min_fit = cand_fit.min(axis=1, keepdims=True)
    return np.where(cand_fit == min_fit, cand, pop).min(axis=1)


def evolve(
    workload: Workload,
    config: GaConfig,
    on_generation: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> GaResult:
    """Run the generational loop and return the best schedule found.

    Every generation evaluates the whole population, carries the
    ``elite_count`` best unchanged, and fills the rest through tournament
    selection, crossover, and mutation. The per-generation best fitness is
    recorded in ``history``; elitism makes it non-increasing. The run is a
    pure function of (workload, config).

    ``on_generation(gen, genes, fitness)`` is called after each generation
    with copies of the population array and its fitness; intended for
    instrumentation and property tests.
    """
    n, m = workload.n_tasks, workload.n_resources
    rng = make_rng(config.seed)
    pop = config.population_size
    elite = config.elite_count
    mut_rate = config.mutation_rate if config.mutation_rate is not None else (
        1.0 / n if n else 0.0
    )

    genes = _sample_genes(config.init, rng, (pop, n), m)
    arr = batch_metrics(genes, workload, config.weights)

    best_idx = int(np.lexsort((np.arange(pop), arr.fitness))[0])
    best_genes = genes[best_idx].copy()
    best_fitness = float(arr.fitness[best_idx])

    history: list[float] = []
    history_mks: list[float] = []
    history_imb: list[float] = []
    n_children = pop - elite
    pairs = math.ceil(n_children / 2)

    for gen in range(config.generations):
        order = np.argsort(arr.fitness, kind="stable")
        elites = genes[order[:elite]]

        winners = _batch_tournament(arr.fitness, 2 * pairs, config.tournament_size, rng)
        pa = genes[winners[:pairs]]
        pb = genes[winners[pairs:]]

        if n >= 2:
            do_cx = rng.random(pairs) < config.crossover_rate
            cuts = rng.integers(1, n, size=pairs)
            swap = (np.arange(n)[None, :] >= cuts[:, None]) & do_cx[:, None]
            c1 = np.where(swap, pb, pa)
            c2 = np.where(swap, pa, pb)
        else:
            c1, c2 = pa, pb
        children = np.empty((2 * pairs, n), dtype=np.int64)
        children[0::2] = c1
        children[1::2] = c2
        children = children[:n_children]

        if n:
            mask = rng.random(children.shape) < mut_rate
            repl = rng.integers(0, m, size=children.shape)
            children = np.where(mask, repl, children)

        genes = np.concatenate([elites, children])
        arr = batch_metrics(genes, workload, config.weights)

        gen_best = int(np.lexsort((np.arange(pop), arr.fitness))[0])
        if float(arr.fitness[gen_best]) < best_fitness:
            best_fitness = float(arr.fitness[gen_best])
            best_genes = genes[gen_best].copy()
        history.append(float(arr.fitness[gen_best]))
        history_mks.append(float(arr.makespan[gen_best]))
        history_imb.append(float(arr.imbalance[gen_best]))
        if on_generation is not None:
            on_generation(gen, genes.copy(), arr.fitness.copy())

    best = Schedule(tuple(best_genes))
    best_metrics = evaluate(best, workload, config.weights)
    return GaResult(
        best=best,
        best_metrics=best_metrics,
        history=tuple(history),
        history_makespan=tuple(history_mks),
        history_imbalance=tuple(history_imb),
        generations_run=config.generations,
    )


def history_csv(result: GaResult) -> str:
    """CSV of the per-generation best: generation,best_fitness,best_makespan,best_imbalance."""
    lines = ["generation,best_fitness,best_makespan,best_imbalance"]
    for g in range(result.generations_run):
        lines.append(
            f"{g},{result.history[g]!r},{result.history_makespan[g]!r},"
            f"{result.history_imbalance[g]!r}"
        )
    return "\n".join(lines) + "\n"


def merge_config(base: GaConfig, overrides: dict | None) -> GaConfig:
    """Apply a partial-config dict onto ``base``; unknown keys are rejected."""
    if not overrides:
        return base
    allowed = {
        "population_size",
        "generations",
        "crossover_rate",
        "mutation_rate",
        "tournament_size",
        "elite_count",
        "weights",
        "seed",
    }
    unknown = set(overrides) - allowed
    if unknown:
        raise ValueError(f"unknown GA override keys: {sorted(unknown)}")
    return replace(base, **overrides)
