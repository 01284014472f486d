"""Weighted-sum decomposition GA: one scalarized run per trade-off weight."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import BitChromosome, Individual, ObjectiveVector, dominates, repair
from .dataset import Dataset, SplitIndices
from .engine import initial_density
from .errors import ConfigError
from .neurocost import Evaluator, TrainSpec

DEFAULT_WEIGHTS = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class DecompositionConfig:
    weight: float = 0.5
    crossover_rate: float = 0.8
    mutation_rate: float = 0.3
    pop_size: int = 700
    generations: int = 100
    seed: int = 0

    def validate(self) -> "DecompositionConfig":
        if not 0.0 <= self.weight <= 1.0:
            raise ConfigError(f"weight must be in [0, 1], got {self.weight}")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must be in (0, 1)")
        if self.pop_size < 4:
            raise ConfigError("pop_size must be >= 4")
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        return self


@dataclass
class DecompositionResult:
    best: Individual
    weight: float
    scalar_cost: float
    evaluated: dict[bytes, ObjectiveVector] = field(repr=False, default_factory=dict)
    # dominance annotations against a reference archive; None when absent
    covered_by_reference: bool | None = None
    dominated_by_reference: bool | None = None


def scalarize(obj: ObjectiveVector, weight: float, d: int) -> float:
    """``weight * f1 + (1 - weight) * f2 / d``."""
    return weight * obj.f1 + (1.0 - weight) * obj.f2 / d


def run_decomposition(cfg: DecompositionConfig, ds: Dataset, split_idx: SplitIndices,
                      spec: TrainSpec | None = None, evaluator: Evaluator | None = None,
                      jobs: int = 1) -> DecompositionResult:
    """Single-objective GA on the scalarized cost.

    Binary tournaments on the scalar, single-point crossover with
    probability ``crossover_rate``, per-bit mutation at
    ``mutation_rate / d`` and one elite carried over each generation. The
    result is the best pattern evaluated at any point in the run.
    """
    cfg.validate()
    d = ds.d
    if evaluator is None:
        evaluator = Evaluator(ds, split_idx, spec or TrainSpec(), jobs=jobs)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0xDEC]))
    seen: dict[bytes, ObjectiveVector] = {}
    best: tuple | None = None

    def score(chroms: Sequence[BitChromosome]) -> np.ndarray:
        nonlocal best
        objs = evaluator.evaluate_many(chroms)
        costs = np.empty(len(chroms))
        for i, (c, o) in enumerate(zip(chroms, objs)):
            seen.setdefault(c.key, o)
            costs[i] = scalarize(o, cfg.weight, d)
            key = (costs[i], o.f2, o.f1, c.to_hex())
            if best is None or key < best[0]:
                best = (key, c, o)
        return costs

    p = initial_density(d)
    pop = [repair(BitChromosome(rng.random(d) < p), rng) for _ in range(cfg.pop_size)]
    costs = score(pop)
    p_bit = cfg.mutation_rate / d

    def pick() -> BitChromosome:
        i, j = rng.integers(len(pop), size=2)
        return pop[i] if (costs[i], i) <= (costs[j], j) else pop[j]

    for _ in range(cfg.generations):
        elite = pop[int(np.argmin(costs))]
        children: list[BitChromosome] = []
        while len(children) < cfg.pop_size - 1:
            a, b = pick().bits, pick().bits
            if d > 1 and rng.random() < cfg.crossover_rate:
                cut = int(rng.integers(1, d))
                a, b = np.concatenate([a[:cut], b[cut:]]), np.concatenate([b[:cut], a[cut:]])
            for bits in (a, b):
                flips = rng.random(d) < p_bit
                children.append(repair(BitChromosome(bits ^ flips), rng))
        pop = [elite] + children[: cfg.pop_size - 1]
        costs = score(pop)

    (cost, _, _, _), chrom, obj = best
    return DecompositionResult(Individual(chrom, obj), cfg.weight, float(cost), seen)


def annotate(result: DecompositionResult, reference: Sequence[ObjectiveVector]) -> DecompositionResult:
    """Compare one decomposition point against a reference archive."""
    p = result.best.obj
    result.covered_by_reference = any(r.f1 <= p.f1 and r.f2 <= p.f2 for r in reference)
    result.dominated_by_reference = any(dominates(r, p) for r in reference)
    return result


def sweep_weights(weights: Sequence[float], cfg: DecompositionConfig, ds: Dataset,
                  split_idx: SplitIndices, spec: TrainSpec | None = None,
                  reference: Sequence[ObjectiveVector] | None = None,
                  evaluator: Evaluator | None = None, jobs: int = 1) -> list[DecompositionResult]:
    """One independent run per weight; the i-th run's GA seed is derived from ``(cfg.seed, i)``.

    All runs share one evaluator, so a pattern has the same cost in every run.
    """
    if not weights:
        raise ConfigError("weight list is empty")
    for w in weights:
        if not 0.0 <= w <= 1.0:
            raise ConfigError(f"weight must be in [0, 1], got {w}")
    if evaluator is None:
        evaluator = Evaluator(ds, split_idx, spec or TrainSpec(seed=cfg.seed), jobs=jobs)
    results = []
    for i, w in enumerate(weights):
        seed = int(np.random.SeedSequence([cfg.seed, i]).generate_state(1, np.uint64)[0])
        res = run_decomposition(replace(cfg, weight=w, seed=seed), ds, split_idx, evaluator=evaluator)
        if reference is not None:
            annotate(res, reference)
        results.append(res)
    return results
