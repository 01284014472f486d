"""Elitist multi-objective GA over feature masks.

Each generation breeds ``round(offspring_rate * pop_size)`` uniform-crossover
children, each also spawning one mutant, then keeps the ``pop_size`` best of
parents plus newcomers under non-dominated rank and crowding distance.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .classify import SvmSpec, holdout_accuracy
from .core import BitChromosome, Individual, ObjectiveVector, repair
from .dataset import Dataset, SplitIndices, round_half_up
from .errors import ConfigError, ContractViolation, EvaluationError
from .metrics import hypervolume_2d
from .neurocost import Evaluator, TrainSpec
from .ranking import assign_rank_and_crowding, crowded_compare, crowded_order, non_dominated_sort

log = logging.getLogger(__name__)

CROSSOVER_KINDS = ("uniform",)


@dataclass(frozen=True)
class EvolutionConfig:
    pop_size: int = 800
    offspring_rate: float = 0.7
    generations: int = 100
    crossover: str = "uniform"
    mutation_start: float = 0.05
    mutation_end: float = 0.005
    master_seed: int = 0
    hidden_neurons: int = 15
    stagnation_window: int = 25

    def validate(self) -> "EvolutionConfig":
        if self.pop_size < 4:
            raise ConfigError(f"pop_size must be >= 4, got {self.pop_size}")
        if not 0.0 < self.offspring_rate <= 1.0:
            raise ConfigError(f"offspring_rate must be in (0, 1], got {self.offspring_rate}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if not 0.0 < self.mutation_end <= self.mutation_start < 1.0:
            raise ConfigError("need 0 < mutation_end <= mutation_start < 1")
        if self.crossover not in CROSSOVER_KINDS:
            raise ConfigError(f"unknown crossover {self.crossover!r}")
        if self.hidden_neurons < 1:
            raise ConfigError("hidden_neurons must be >= 1")
        if self.stagnation_window < 1:
            raise ConfigError("stagnation_window must be >= 1")
        return self

    @property
    def n_offspring(self) -> int:
        return max(1, round_half_up(self.offspring_rate * self.pop_size))


@dataclass
class Population:
    members: list[Individual]
    generation: int = 0
    # evaluated offspring and mutants of the step that produced this population
    newcomers: list[Individual] = field(default_factory=list, repr=False)


@dataclass
class GenerationRecord:
    generation: int
    front1: list[Individual]
    archive: list[tuple[int, float]]  # (k, f1) of the running archive
    new_evaluations: int
    hypervolume: float | None = None


@dataclass
class RunReport:
    config: dict
    master_seed: int
    history: list[GenerationRecord]
    archive: list[Individual]
    generations_run: int
    stopped_early: bool
    distinct_evaluations: int
    reference_point: tuple[float, float]
    wall_time: float = 0.0
    knee: Individual | None = None
    accuracies: dict[str, float] = field(default_factory=dict)


def initial_density(d: int) -> float:
    return min(0.5, 64.0 / d)


def mutation_rate(g: int, cfg: EvolutionConfig) -> float:
    """Per-bit flip probability at generation ``g``, decaying linearly."""
    frac = min(max(g / cfg.generations, 0.0), 1.0)
    return cfg.mutation_end + (cfg.mutation_start - cfg.mutation_end) * (1.0 - frac)


def _evaluate(members: Sequence[Individual], evaluator) -> None:
    fresh = [m for m in members if m.obj is None]
    if not fresh:
        return
    try:
        objs = evaluator.evaluate_many([m.chrom for m in fresh])
    except EvaluationError:
        raise
    except Exception as exc:
        raise EvaluationError(f"evaluator failed: {exc}") from exc
    for m, obj in zip(fresh, objs):
        m.obj = obj


def initialize(cfg: EvolutionConfig, d: int, rng: np.random.Generator, evaluator) -> Population:
    if d < 1:
        raise ContractViolation("dimension must be >= 1")
    p = initial_density(d)
    members = [
        Individual(repair(BitChromosome(rng.random(d) < p), rng)) for _ in range(cfg.pop_size)
    ]
    _evaluate(members, evaluator)
    assign_rank_and_crowding(members)
    return Population(members, 0)


def tournament(pop: Population, rng: np.random.Generator) -> Individual:
    i, j = rng.integers(len(pop.members), size=2)
    a, b = pop.members[i], pop.members[j]
    c = crowded_compare(a, b)
    if c < 0 or (c == 0 and i <= j):
        return a
    return b


def select_parents(pop: Population, rng: np.random.Generator) -> tuple[Individual, Individual]:
    """Two independent binary tournaments; the winners may be the same individual."""
    return tournament(pop, rng), tournament(pop, rng)


def _bits(x) -> np.ndarray:
    return x.chrom.bits if isinstance(x, Individual) else x.bits


def crossover(p1, p2, rng: np.random.Generator) -> BitChromosome:
    a, b = _bits(p1), _bits(p2)
    if a.shape != b.shape:
        raise ContractViolation(f"parent lengths differ: {a.size} vs {b.size}")
    take_first = rng.random(a.size) < 0.5
    return repair(BitChromosome(np.where(take_first, a, b)), rng)


def mutate(c: BitChromosome, g: int, cfg: EvolutionConfig, rng: np.random.Generator) -> BitChromosome:
    flips = rng.random(c.d) < mutation_rate(g, cfg)
    return repair(BitChromosome(c.bits ^ flips), rng)


def survive(pool: Sequence[Individual], size: int) -> list[Individual]:
    """Keep ``size`` individuals of ``pool`` by rank, then crowding distance.

    Duplicate bit patterns compete once; copies only return when there are
    fewer distinct patterns than ``size``.
    """
    seen: set[bytes] = set()
    unique, dupes = [], []
    for ind in pool:
        (dupes if ind.chrom.key in seen else unique).append(ind)
        seen.add(ind.chrom.key)
    assign_rank_and_crowding(unique)
    chosen = [unique[i] for i in crowded_order(unique)[:size]]
    if len(chosen) < size:
        chosen += dupes[: size - len(chosen)]
    survivors = [Individual(m.chrom, m.obj) for m in chosen]
    assign_rank_and_crowding(survivors)
    return survivors


def step(pop: Population, cfg: EvolutionConfig, evaluator, rng: np.random.Generator) -> Population:
    newcomers: list[Individual] = []
    for _ in range(cfg.n_offspring):
        p1, p2 = select_parents(pop, rng)
        child = crossover(p1, p2, rng)
        mutant = mutate(child, pop.generation, cfg, rng)
        newcomers += [Individual(child), Individual(mutant)]
    _evaluate(newcomers, evaluator)
    nxt = Population(survive(pop.members + newcomers, cfg.pop_size), pop.generation + 1)
    nxt.newcomers = newcomers
    return nxt


def _front1(pop: Population) -> list[Individual]:
    seen, out = set(), []
    for m in pop.members:
        if m.rank == 1 and m.chrom.key not in seen:
            seen.add(m.chrom.key)
            out.append(m)
    return sorted(out, key=lambda m: (m.obj.f2, m.obj.f1, m.chrom.to_hex()))


class _Archive:
    """Non-dominated set of every distinct pattern evaluated so far."""

    def __init__(self):
        self.members: dict[bytes, Individual] = {}
        self.seen: dict[bytes, ObjectiveVector] = {}

    def update(self, individuals: Sequence[Individual]) -> int:
        added = 0
        for ind in individuals:
            if ind.chrom.key not in self.seen:
                self.seen[ind.chrom.key] = ind.obj
                self.members[ind.chrom.key] = Individual(ind.chrom, ind.obj)
                added += 1
        if added:
            cand = list(self.members.values())
            front = non_dominated_sort([tuple(c.obj) for c in cand])[0]
            self.members = {cand[i].chrom.key: cand[i] for i in front}
        return added

    def sorted(self) -> list[Individual]:
        return sorted(self.members.values(), key=lambda m: (m.obj.f2, m.obj.f1, m.chrom.to_hex()))

    def points(self) -> list[tuple[int, float]]:
        return [(int(m.obj.f2), m.obj.f1) for m in self.sorted()]


def run(cfg: EvolutionConfig, ds: Dataset, split_idx: SplitIndices, spec: TrainSpec | None = None,
        jobs: int = 1, evaluator: Evaluator | None = None,
        on_generation: Callable[[GenerationRecord], None] | None = None) -> RunReport:
    """Evolve for ``cfg.generations`` generations or until front 1 stalls.

    The returned archive is the non-dominated set of every pattern
    evaluated during the run.
    """
    cfg.validate()
    t0 = time.perf_counter()
    spec = replace(spec or TrainSpec(), hidden=cfg.hidden_neurons, seed=cfg.master_seed)
    if evaluator is None:
        evaluator = Evaluator(ds, split_idx, spec, jobs=jobs)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, 0xE7]))

    archive = _Archive()
    pop = initialize(cfg, ds.d, rng, evaluator)
    history = [GenerationRecord(0, _front1(pop), [], archive.update(pop.members))]
    history[-1].archive = archive.points()

    stale, stopped_early = 0, False
    last_front = {m.chrom.key for m in history[-1].front1}
    for _ in range(cfg.generations):
        pop = step(pop, cfg, evaluator, rng)
        added = archive.update(pop.newcomers)
        rec = GenerationRecord(pop.generation, _front1(pop), archive.points(), added)
        history.append(rec)
        if on_generation is not None:
            on_generation(rec)
        front = {m.chrom.key for m in rec.front1}
        stale = stale + 1 if front == last_front else 0
        last_front = front
        if stale >= cfg.stagnation_window:
            stopped_early = pop.generation < cfg.generations
            log.info("front 1 unchanged for %d generations; stopping at %d", stale, pop.generation)
            break

    everything = np.array([tuple(o) for o in archive.seen.values()])
    ref = (float(everything[:, 0].max()) + 1.0, float(everything[:, 1].max()) + 1.0)
    for rec in history:
        rec.hypervolume = hypervolume_2d([(f1, k) for k, f1 in rec.archive], ref)

    final = archive.sorted()
    assign_rank_and_crowding(final)
    return RunReport(
        config=asdict(cfg),
        master_seed=cfg.master_seed,
        history=history,
        archive=final,
        generations_run=pop.generation,
        stopped_early=stopped_early,
        distinct_evaluations=len(archive.seen),
        reference_point=ref,
        wall_time=time.perf_counter() - t0,
    )


def knee_select(archive: Sequence[Individual], ds: Dataset, split_idx: SplitIndices,
                svm: SvmSpec = SvmSpec()) -> tuple[Individual, dict[str, float]]:
    """Archive member with the best SVM test accuracy.

    Ties go to fewer features, then lower cost. Also returns the accuracy of
    every member keyed by its hex bit pattern.
    """
    if not archive:
        raise ContractViolation("knee selection from an empty archive")
    accs = {m.chrom.to_hex(): holdout_accuracy(ds, split_idx, m.chrom, svm) for m in archive}
    best = min(archive, key=lambda m: (-accs[m.chrom.to_hex()], m.obj.f2, m.obj.f1))
    return best, accs
