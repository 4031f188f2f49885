import numpy as np
import pytest

from dualga import Coding, ContractViolation, GaParams, Population, StrategyConfig, get_problem, run_strategy
from dualga.encoding import integers_to_bits
from dualga.engine import Individual, RunState, evaluate_genotypes, generate_initial_population
from dualga.objectives import Problem
from dualga.strategies import (
    compute_steady_state,
    is_local_optimum,
    merge,
    parse_variant,
    run_aperiodic,
    run_homogpop,
    run_localopt,
    run_periodic,
    run_smga,
    run_static,
    run_steadygen,
    select_best_coding,
    split,
)


def setup(pid, variant="static", **overrides):
    problem = get_problem(pid)
    ga_keys = {"max_gen", "pop_size", "p_cross", "p_mut_per_bit", "t_size"}
    params = GaParams.for_problem(problem, **{k: v for k, v in overrides.items() if k in ga_keys})
    cfg = StrategyConfig.for_problem(problem, variant, **{k: v for k, v in overrides.items() if k not in ga_keys})
    return problem, params, cfg


def flat_problem(n=2, bits=3):
    constant = lambda x: np.zeros(np.shape(x)[:-1])  # noqa: E731
    return Problem("flat", n, 0.0, 1.0, bits, (0.0,) * n, constant)


def events(record, kind):
    return [e for e in record.trace if e.kind == kind]


class TestConfig:
    def test_table_defaults(self):
        cfg = StrategyConfig.for_problem(get_problem("f2"), "periodic")
        assert (cfg.period, cfg.min_p, cfg.max_p, cfg.epsilon, cfg.steady_gen, cfg.start_gen) == (
            50, 25, 75, 5.0, 35, 250)
        cfg = StrategyConfig.for_problem(get_problem("f9"), "smga")
        assert (cfg.period, cfg.min_p, cfg.max_p, cfg.epsilon, cfg.steady_gen, cfg.start_gen) == (
            10, 10, 20, 1.0, 5, 250)

    def test_bounds_order(self):
        with pytest.raises(ContractViolation):
            StrategyConfig(variant="aperiodic", min_p=10, max_p=5)

    def test_unknown_variant(self):
        with pytest.raises(ContractViolation):
            StrategyConfig(variant="island")

    @pytest.mark.parametrize("name, label", [
        ("static", "sga_sc"), ("static-gc", "sga_gc"), ("sga_gc", "sga_gc"), ("periodic-gs", "periodic_gs"),
        ("steadygen", "steadygen_sg"), ("smga", "smga"), ("smga-gc", "smga_gc"),
    ])
    def test_parse_variant_labels(self, name, label):
        assert StrategyConfig(**parse_variant(name)).label == label

    @pytest.mark.parametrize("name", ["hill", "static-xx"])
    def test_parse_variant_rejects(self, name):
        with pytest.raises(ContractViolation):
            parse_variant(name)


class TestRunStatic:
    def test_zero_generations(self):
        problem, params, _ = setup("f2", max_gen=0)
        rec = run_static(problem, params, "sc", 1)
        assert rec.max_gen == 0 and rec.evaluations == 100

    def test_deterministic(self):
        problem, params, _ = setup("f6", max_gen=100)
        a, b = run_static(problem, params, "gc", 5), run_static(problem, params, "gc", 5)
        np.testing.assert_array_equal(a.best_fitness, b.best_fitness)
        np.testing.assert_array_equal(a.best_x, b.best_x)

    def test_best_x_matches_fitness(self):
        problem, params, _ = setup("f9", max_gen=60)
        rec = run_static(problem, params, "gc", 2)
        assert problem.evaluate(rec.best_x) == rec.final_best_fitness

    def test_first_success_is_first_hit(self):
        problem, params, _ = setup("f2", max_gen=400)
        problem = problem.with_threshold(1e-3)
        rec = run_static(problem, params, "gc", 3)
        hits = np.flatnonzero(rec.best_fitness <= 1e-3)
        assert rec.first_success == (int(hits[0]) if hits.size else None)


class TestPeriodic:
    def test_alternation_count(self):
        problem, params, cfg = setup("f2", "periodic", max_gen=3500, period=50)
        rec = run_periodic(problem, params, cfg, 0)
        assert rec.alternations == 69
        assert [e.generation for e in events(rec, "alternation")] == list(range(50, 3500, 50))

    def test_long_period_is_static(self):
        problem, params, cfg = setup("f2", "periodic", max_gen=80, period=80, starter="gc")
        periodic = run_periodic(problem, params, cfg, 4)
        static = run_static(problem, params, "gc", 4)
        assert periodic.alternations == 0
        np.testing.assert_array_equal(periodic.best_fitness, static.best_fitness)

    def test_codings_alternate(self):
        problem, params, cfg = setup("f9", "periodic", max_gen=100, period=10, starter="gc")
        rec = run_periodic(problem, params, cfg, 1)
        for k, e in enumerate(events(rec, "alternation"), start=1):
            assert (e.coding_after is cfg.starter) == (k % 2 == 0)


class TestAperiodic:
    def test_degenerate_interval_equals_periodic(self):
        problem, params, cfg = setup("f6", "aperiodic", max_gen=300, min_p=30, max_p=30)
        a = run_aperiodic(problem, params, cfg, 8)
        p = run_periodic(problem, params, cfg.replace(period=30), 8)
        np.testing.assert_array_equal(a.best_fitness, p.best_fitness)
        assert [e.generation for e in a.trace] == [e.generation for e in p.trace]

    def test_leg_lengths(self):
        legs = []
        for seed in range(10):
            problem, params, cfg = setup("f2", "aperiodic")
            rec = run_aperiodic(problem, params, cfg, seed)
            gens = [0] + [e.generation for e in events(rec, "alternation")]
            legs += list(np.diff(gens))
        assert all(25 <= leg <= 75 for leg in legs)
        assert 40 <= np.mean(legs) <= 60


class TestLocalOptimum:
    def test_grid_minimum_is_optimum_in_both_codings(self):
        problem = get_problem("f2").with_bits(8)
        k = np.stack(np.meshgrid(np.arange(256), np.arange(256), indexing="ij"), -1).reshape(-1, 2)
        grid = problem.func(-2.048 + 4.096 * k / 255)
        best = k[np.argmin(grid)]
        for coding in Coding:
            g = integers_to_bits(best[None], problem.layout, coding)[0]
            ind = Individual(0, g, float(grid.min()))
            assert is_local_optimum(ind, coding, problem)

    def test_improving_flip_found(self):
        problem = get_problem("f2")
        g = np.zeros(problem.vec_size, np.uint8)
        f0 = evaluate_genotypes(g[None], problem, "sc")[0]
        neighbours = np.tile(g, (problem.vec_size, 1)) ^ np.eye(problem.vec_size, dtype=np.uint8)
        assert evaluate_genotypes(neighbours, problem, "sc").min() < f0
        assert not is_local_optimum(Individual(0, g, f0), "sc", problem)

    def test_plateau_is_optimum(self):
        problem = flat_problem(n=1, bits=1)
        assert is_local_optimum(Individual(0, np.array([1], np.uint8), 0.0), "sc", problem)


class TestLocalOpt:
    def test_evaluation_identity(self):
        problem, params, cfg = setup("f2", "localopt", max_gen=150)
        rec = run_localopt(problem, params, cfg, 2)
        assert rec.predicate_tests == 149
        assert rec.evaluations == params.pop_size * (150 + 1) + params.vec_size * rec.predicate_tests

    def test_alternations_follow_detections(self):
        problem, params, cfg = setup("f6", "localopt", max_gen=300)
        rec = run_localopt(problem, params, cfg, 3)
        detected = [e.generation for e in events(rec, "local_optimum_detected")]
        assert [e.generation for e in events(rec, "alternation")] == detected

    def test_fires_every_generation_on_a_plateau(self):
        problem = flat_problem()
        params = GaParams(vec_size=problem.vec_size, pop_size=10, max_gen=20)
        rec = run_localopt(problem, params, StrategyConfig(variant="localopt"), 0)
        assert rec.alternations == 19


class TestHomogPop:
    def test_zero_epsilon_with_spread(self):
        problem, params, cfg = setup("f9", "homogpop", max_gen=40, epsilon=0.0)
        assert run_homogpop(problem, params, cfg, 1).alternations == 0

    def test_uniform_population_alternates(self):
        problem = flat_problem()
        params = GaParams(vec_size=problem.vec_size, pop_size=10, max_gen=12)
        rec = run_homogpop(problem, params, StrategyConfig(variant="homogpop", epsilon=0.0), 0)
        assert [e.generation for e in events(rec, "alternation")] == list(range(1, 12))

    def test_reproducible(self):
        problem, params, cfg = setup("f6", "homogpop", max_gen=400)
        a, b = run_homogpop(problem, params, cfg, 9), run_homogpop(problem, params, cfg, 9)
        assert a.trace == b.trace


class TestSteadyGen:
    def test_no_variation_alternates_every_generation(self):
        problem, params, cfg = setup("f2", "steadygen", max_gen=30, steady_gen=1, p_cross=0.0, p_mut_per_bit=0.0)
        rec = run_steadygen(problem, params, cfg, 0)
        assert [e.generation for e in events(rec, "alternation")] == list(range(1, 30))

    def test_no_alternation_soon_after_improvement(self):
        problem, params, cfg = setup("f9", "steadygen", max_gen=600)
        rec = run_steadygen(problem, params, cfg, 4)
        hist = rec.best_fitness
        previous = 0
        for e in events(rec, "alternation"):
            a = e.generation
            assert a - previous >= cfg.steady_gen
            window = hist[a - cfg.steady_gen:a + 1]
            assert np.all(window == window[0])
            previous = a

    def test_reproducible(self):
        problem, params, cfg = setup("f9", "steadygen", max_gen=300)
        assert run_steadygen(problem, params, cfg, 5).trace == run_steadygen(problem, params, cfg, 5).trace


class TestSplitMerge:
    def setup_method(self):
        self.problem = get_problem("f6")
        params = GaParams.for_problem(self.problem)
        self.pop = generate_initial_population(params, self.problem, "sc", np.random.default_rng(0))

    @staticmethod
    def multiset(*pops):
        rows = [(g.tobytes(), f) for p in pops for g, f in zip(p.genotypes, p.fitness)]
        return sorted(rows)

    def test_halves(self):
        a, b = split(self.pop, np.random.default_rng(1))
        assert a.size == b.size == 50
        assert self.multiset(a, b) == self.multiset(self.pop)

    def test_deterministic(self):
        a1, _ = split(self.pop, np.random.default_rng(3))
        a2, _ = split(self.pop, np.random.default_rng(3))
        np.testing.assert_array_equal(a1.genotypes, a2.genotypes)

    def test_odd_size(self):
        pop = Population(self.pop.genotypes[:5], self.pop.fitness[:5], Coding.SC)
        with pytest.raises(ContractViolation):
            split(pop, np.random.default_rng(0))

    def test_merge_inverts_split(self):
        merged = merge(*split(self.pop, np.random.default_rng(2)))
        assert merged.size == 100
        assert self.multiset(merged) == self.multiset(self.pop)
        assert merged.fitness.min() == self.pop.fitness.min()

    def test_merge_coding_mismatch(self):
        a, b = split(self.pop, np.random.default_rng(2))
        with pytest.raises(ContractViolation):
            merge(a, Population(b.genotypes, b.fitness, Coding.GC))


class TestSteadyState:
    def test_every_generation(self):
        assert compute_steady_state([1, 2, 3], 100).estimate == 1

    def test_no_improvement(self):
        assert compute_steady_state([], 100).estimate == 100

    def test_two_episodes(self):
        est = compute_steady_state([10, 30], 100, "gc")
        assert est.episode_lengths == (10, 20) and est.estimate == 15 and est.coding is Coding.GC

    def test_rounds_half_up(self):
        assert compute_steady_state([1, 3], 50).estimate == 2  # mean 1.5
        assert compute_steady_state([2, 7], 50).estimate == 4  # mean 3.5

    def test_from_run_state(self):
        state = RunState(improvements=[4, 8, 12])
        assert compute_steady_state(state, 20).estimate == 4


class TestSelectBestCoding:
    @staticmethod
    def pop(values):
        return Population(np.zeros((len(values), 2), np.uint8), np.asarray(values, float), Coding.SC)

    def test_lower_mean_wins(self):
        assert select_best_coding(self.pop([5, 5]), "sc", self.pop([7, 7]), "gc") is Coding.SC
        assert select_best_coding(self.pop([9, 9]), "sc", self.pop([7, 7]), "gc") is Coding.GC

    def test_tie(self):
        assert select_best_coding(self.pop([1, 3]), "gc", self.pop([2, 2]), "sc") is Coding.GC

    def test_mean_not_best(self):
        holds_optimum = self.pop([0.0, 100.0])
        assert select_best_coding(holds_optimum, "sc", self.pop([10, 10]), "gc") is Coding.GC


class TestSmga:
    def test_short_run_has_no_merge(self):
        problem, params, cfg = setup("f2", "smga", max_gen=200)
        rec = run_smga(problem, params, cfg, 1)
        assert not events(rec, "merge") and len(events(rec, "split")) == 1

    def test_evaluations_per_tick(self):
        problem, params, cfg = setup("f9", "smga", max_gen=900)
        rec = run_smga(problem, params, cfg, 2)
        assert rec.max_gen == 900
        assert rec.evaluations == params.pop_size * (900 + 1)
        assert events(rec, "merge")

    def test_single_coding_variant(self):
        problem, params, cfg = setup("f9", "smga", max_gen=700, coding1="sc", coding2="sc")
        rec = run_smga(problem, params, cfg, 3)
        selected = events(rec, "coding_selected")
        assert selected and all(e.coding_after is Coding.SC for e in selected)
        assert rec.strategy == "smga_sc"

    def test_merged_phase_exits_on_stagnation(self):
        problem, params, cfg = setup("f9", "smga", max_gen=1500)
        rec = run_smga(problem, params, cfg, 4)
        trace = rec.trace
        for i, e in enumerate(trace):
            if e.kind != "merge":
                continue
            estimate = int(e.detail.split("=")[1])
            following = trace[i + 1:]
            if not any(x.kind == "split" for x in following):
                continue  # run ended while merged
            steady = following[0]
            assert steady.kind == "steady_detected"
            assert int(steady.detail.split("=")[1]) >= estimate

    def test_trace_replay(self):
        problem, params, cfg = setup("f6", "smga", max_gen=1200)
        assert run_smga(problem, params, cfg, 6).trace == run_smga(problem, params, cfg, 6).trace

    def test_odd_population(self):
        problem, params, cfg = setup("f2", "smga", pop_size=9, max_gen=10)
        with pytest.raises(ContractViolation):
            run_smga(problem, params, cfg, 0)


ALL_VARIANTS = ["static", "periodic", "aperiodic", "localopt", "homogpop", "steadygen", "smga"]


@pytest.mark.parametrize("variant", ALL_VARIANTS)
@pytest.mark.parametrize("pid", ["f2", "f9"])
def test_common_invariants(variant, pid):
    problem, params, cfg = setup(pid, variant, max_gen=400, start_gen=60)
    rec = run_strategy(problem, params, cfg, 11)
    assert len(rec.best_fitness) == 401
    assert np.all(np.diff(rec.best_fitness) <= 0)
    gens = [e.generation for e in rec.trace]
    assert gens == sorted(gens)
    if variant not in ("smga",):
        codings = [cfg.starter] + [e.coding_after for e in events(rec, "alternation")]
        assert all(a is not b for a, b in zip(codings, codings[1:]))


def test_vec_size_mismatch():
    problem = get_problem("f2")
    with pytest.raises(ContractViolation):
        run_static(problem, GaParams(vec_size=41, max_gen=1), "sc", 0)
