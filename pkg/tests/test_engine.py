import numpy as np
import pytest

from moefs.classify import SvmSpec
from moefs.core import BitChromosome, Individual, ObjectiveVector
from moefs.dataset import split
from moefs.engine import (EvolutionConfig, Population, crossover, initial_density, initialize,
                          knee_select, mutate, mutation_rate, run, select_parents, step, survive,
                          tournament)
from moefs.errors import ConfigError, ContractViolation, EvaluationError
from moefs.neurocost import Evaluator, evaluate_subset
from moefs.ranking import assign_rank_and_crowding, non_dominated_sort
from moefs.synthetic import make_benchmark
from conftest import TRAINED
from stubs import HashEvaluator


def cfg(**kw):
    base = dict(pop_size=8, offspring_rate=0.5, generations=5)
    base.update(kw)
    return EvolutionConfig(**base)


def test_initialize_small():
    pop = initialize(cfg(), 10, np.random.default_rng(0), HashEvaluator())
    assert len(pop.members) == 8
    assert all(m.obj is not None and m.k >= 1 and m.rank >= 1 for m in pop.members)


def test_initial_density_mean():
    d, p = 590, initial_density(590)
    assert p == 64 / 590
    ks = [m.k for seed in range(100)
          for m in initialize(cfg(pop_size=4), d, np.random.default_rng(seed), HashEvaluator()).members]
    sigma = np.sqrt(d * p * (1 - p) / len(ks))
    assert abs(np.mean(ks) - 64) < 3 * sigma


def test_initialize_deterministic():
    a = initialize(cfg(), 12, np.random.default_rng(3), HashEvaluator())
    b = initialize(cfg(), 12, np.random.default_rng(3), HashEvaluator())
    assert [m.chrom for m in a.members] == [m.chrom for m in b.members]


class FixedPicks:
    def __init__(self, i, j):
        self.pair = np.array([i, j])

    def integers(self, n, size):
        return self.pair


def ranked(rank, crowd=1.0, k=2):
    m = Individual(BitChromosome.from_indices(range(k), 5), ObjectiveVector(0.1, float(k)))
    m.rank, m.crowd = rank, crowd
    return m


def test_tournament_prefers_better_rank():
    pop = Population([ranked(3), ranked(1)])
    assert tournament(pop, FixedPicks(0, 1)).rank == 1
    assert tournament(pop, FixedPicks(1, 0)).rank == 1


def test_tournament_identical_members():
    pop = Population([ranked(1) for _ in range(4)])
    a, b = select_parents(pop, np.random.default_rng(0))
    assert a in pop.members and b in pop.members


def test_select_parents_reproducible():
    pop = initialize(cfg(), 10, np.random.default_rng(0), HashEvaluator())
    r1, r2 = np.random.default_rng(5), np.random.default_rng(5)
    seq1 = [tuple(id(x) for x in select_parents(pop, r1)) for _ in range(20)]
    seq2 = [tuple(id(x) for x in select_parents(pop, r2)) for _ in range(20)]
    assert seq1 == seq2


def test_crossover_identity_and_errors():
    p = BitChromosome.from_indices([1, 3], 6)
    assert crossover(p, p, np.random.default_rng(0)) == p
    with pytest.raises(ContractViolation):
        crossover(p, BitChromosome.from_indices([1], 5), np.random.default_rng(0))
    q = BitChromosome.from_indices([0, 2], 6)
    assert crossover(p, q, np.random.default_rng(4)) == crossover(p, q, np.random.default_rng(4))


def test_crossover_mean_popcount():
    ones, zeros = BitChromosome(np.ones(4, bool)), BitChromosome(np.zeros(4, bool))
    rng = np.random.default_rng(0)
    ks = [crossover(ones, zeros, rng).k for _ in range(10000)]
    # binomial(4, 1/2) plus repair lifting the all-zero child (p = 1/16) to k = 1
    mean = 2 + 1 / 16
    var = (5 + 1 / 16) - mean**2
    assert abs(np.mean(ks) - mean) < 3 * np.sqrt(var / len(ks))


def test_mutation_schedule():
    c = cfg(generations=40, mutation_start=0.05, mutation_end=0.005)
    assert mutation_rate(0, c) == 0.05
    assert mutation_rate(40, c) == 0.005
    assert mutation_rate(20, c) == pytest.approx(0.0275)


def test_mutation_flip_count():
    c = cfg(mutation_start=0.01, mutation_end=0.01)
    base = BitChromosome(np.ones(1000, bool))
    rng = np.random.default_rng(0)
    flips = [int(np.sum(mutate(base, 0, c, rng).bits != base.bits)) for _ in range(400)]
    assert abs(np.mean(flips) - 10) < 3 * np.sqrt(1000 * 0.01 * 0.99 / 400)


def test_step_arithmetic_and_invariants():
    c = cfg(pop_size=4, offspring_rate=0.5)
    ev = HashEvaluator()
    rng = np.random.default_rng(1)
    pop = initialize(c, 8, rng, ev)
    for _ in range(10):
        pool = pop.members
        nxt = step(pop, c, ev, rng)
        assert len(nxt.newcomers) == 2 * 2
        assert len(nxt.members) == 4
        assert all(m.obj is not None for m in nxt.members)
        full = pool + nxt.newcomers
        uniq = {m.chrom.key: m for m in full}
        front = non_dominated_sort([tuple(m.obj) for m in uniq.values()])[0]
        keys = list(uniq)
        if len(front) <= 4:
            assert {keys[i] for i in front} <= {m.chrom.key for m in nxt.members}
        pop = nxt


def test_survive_pads_with_duplicates():
    a = Individual(BitChromosome.from_indices([0], 3), ObjectiveVector(0.1, 1.0))
    out = survive([a, Individual(a.chrom, a.obj), Individual(a.chrom, a.obj)], 3)
    assert len(out) == 3 and all(m.chrom == a.chrom for m in out)


def test_step_wraps_evaluator_failure():
    class Broken(HashEvaluator):
        def evaluate_many(self, chroms):
            if len(self.cache) > 5:
                raise RuntimeError("boom")
            return super().evaluate_many(chroms)

    c = cfg()
    ev = Broken()
    pop = initialize(c, 10, np.random.default_rng(0), HashEvaluator())
    ev.cache = {i: None for i in range(6)}
    with pytest.raises(EvaluationError, match="boom"):
        step(pop, c, ev, np.random.default_rng(0))


@pytest.mark.parametrize("bad", [dict(pop_size=3), dict(offspring_rate=0), dict(generations=0),
                                 dict(mutation_end=0.1, mutation_start=0.05),
                                 dict(crossover="two-point")])
def test_config_rejected_before_compute(bad, toy2):
    ds, idx = toy2
    with pytest.raises(ConfigError):
        run(cfg(**bad), ds, idx)


def test_toy_front_and_knee(toy2):
    ds, idx = toy2
    oracle = {c: evaluate_subset(ds, idx, BitChromosome.from_indices(c, 2), TRAINED)
              for c in ((0,), (1,), (0, 1))}
    rep = run(cfg(pop_size=4, generations=3), ds, idx, TRAINED)
    front = {tuple(m.chrom.selected().tolist()): m.obj for m in rep.archive}
    assert (0,) in front and front[(0,)].f2 == 1
    assert front[(0,)].f1 == oracle[(0,)] < 0.05
    assert oracle[(0,)] < oracle[(1,)]
    knee, accs = knee_select(rep.archive, ds, idx)
    assert knee.chrom.selected().tolist() == [0]


def test_knee_rules(toy2):
    ds, idx = toy2
    one = Individual(BitChromosome.from_indices([1], 2), ObjectiveVector(0.3, 1.0))
    assert knee_select([one], ds, idx)[0] is one
    with pytest.raises(ContractViolation):
        knee_select([], ds, idx)


def test_knee_tie_prefers_fewer_features(monkeypatch, toy2):
    import moefs.engine as engine

    ds, idx = toy2
    small = Individual(BitChromosome.from_indices(range(36), 50), ObjectiveVector(0.3, 36.0))
    big = Individual(BitChromosome.from_indices(range(44), 50), ObjectiveVector(0.2, 44.0))
    monkeypatch.setattr(engine, "holdout_accuracy", lambda *a, **k: 0.9)
    assert knee_select([big, small], ds, idx)[0] is small


@pytest.fixture(scope="module")
def synthetic_run():
    ds, cols = make_benchmark(seed=0)
    idx = split(ds, 0.7, 0)
    c = EvolutionConfig(pop_size=30, generations=10, master_seed=0)
    return ds, idx, c, run(c, ds, idx, TRAINED)


def test_synthetic_front_breadth(synthetic_run):
    *_, rep = synthetic_run
    assert len({m.obj.f2 for m in rep.archive}) >= 3


def test_archive_non_dominated_and_complete(synthetic_run):
    *_, rep = synthetic_run
    pts = [tuple(m.obj) for m in rep.archive]
    assert non_dominated_sort(pts) == [list(range(len(pts)))]
    assert len({m.chrom.key for m in rep.archive}) == len(pts)


def test_hypervolume_non_decreasing(synthetic_run):
    *_, rep = synthetic_run
    hv = [r.hypervolume for r in rep.history]
    assert all(b >= a for a, b in zip(hv, hv[1:]))
    assert hv[-1] > 0


def test_memoization_trains_once(synthetic_run):
    ds, idx, c, rep = synthetic_run
    ev = Evaluator(ds, idx, TRAINED)
    again = run(c, ds, idx, TRAINED, evaluator=ev)
    assert ev.trainings == len(ev.cache) == again.distinct_evaluations


def test_determinism_across_threads(synthetic_run):
    ds, idx, c, rep = synthetic_run
    threaded = run(c, ds, idx, TRAINED, jobs=8)
    assert [(m.chrom, m.obj) for m in threaded.archive] == [(m.chrom, m.obj) for m in rep.archive]
    assert [r.hypervolume for r in threaded.history] == [r.hypervolume for r in rep.history]


def test_single_generation(toy2):
    ds, idx = toy2
    rep = run(cfg(generations=1), ds, idx, TRAINED)
    assert rep.generations_run == 1
    assert [r.generation for r in rep.history] == [0, 1]


def test_stagnation_stops_early():
    ds, _ = make_benchmark(n=60, d=3, informative=1, seed=2)
    idx = split(ds, 0.7, 0)
    rep = run(EvolutionConfig(pop_size=10, generations=100, stagnation_window=5), ds, idx, TRAINED)
    assert rep.stopped_early and rep.generations_run < 100
