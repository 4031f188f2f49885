"""Encoding-change strategies built on the simple GA.

Serial strategies keep one population and flip it between two codings when a
trigger fires after a generation:

========== ==============================================================
periodic   a fixed number of generations has elapsed under the coding
aperiodic  like periodic, leg length redrawn uniformly from [min_p, max_p]
localopt   the best individual has no strictly better one-bit neighbour
homogpop   population fitness standard deviation <= epsilon
steadygen  best fitness has not strictly improved for steady_gen generations
========== ==============================================================

``smga`` (split-and-merge) runs two half populations side by side, one per
coding, merges them under the coding whose half has the lower mean fitness
and re-splits whenever the merged population stagnates.

Every strategy runs exactly ``params.max_gen`` generations and returns a
:class:`RunRecord` with the best-so-far fitness after every generation.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import ContractViolation, check_positive_int, check_random_state
from .encoding import Coding, decode_genotype
from .engine import (
    Population,
    RunState,
    best_element,
    convert_population,
    evaluate_genotypes,
    fitness_stats,
    generate_initial_population,
    step_generation,
)

VARIANTS = ("static", "periodic", "aperiodic", "localopt", "homogpop", "steadygen", "smga")

# period, (min_p, max_p), epsilon, steady_gen, start_gen
_TABLE_DEFAULTS = {
    "f2": (50, (25, 75), 5.0, 35, 250),
    "f6": (40, (25, 70), 0.1, 25, 500),
    "f7": (25, (20, 50), 5.0, 5, 100),
    "f8": (30, (20, 70), 2.5, 25, 250),
    "f9": (10, (10, 20), 1.0, 5, 250),
}


@dataclass
class StrategyConfig:
    """Strategy variant plus its own tuning knobs.

    ``starter`` is the first coding of the serial strategies and of the static
    baseline. ``coding1``/``coding2`` are the half-population codings of SM-GA;
    setting both equal gives a single-coding split-and-merge GA.
    """

    variant: str = "static"
    starter: Coding = Coding.SC
    coding1: Coding = Coding.SC
    coding2: Coding = Coding.GC
    period: int = 50
    min_p: int = 25
    max_p: int = 75
    epsilon: float = 5.0
    steady_gen: int = 35
    start_gen: int = 250

    def __post_init__(self):
        self.variant = str(self.variant).strip().lower()
        if self.variant not in VARIANTS:
            raise ContractViolation(f"unknown strategy {self.variant!r}; expected one of {', '.join(VARIANTS)}")
        self.starter = Coding.parse(self.starter)
        self.coding1 = Coding.parse(self.coding1)
        self.coding2 = Coding.parse(self.coding2)
        self.period = check_positive_int(self.period, "period")
        self.min_p = check_positive_int(self.min_p, "min_p")
        self.max_p = check_positive_int(self.max_p, "max_p")
        if self.min_p > self.max_p:
            raise ContractViolation(f"min_p={self.min_p} exceeds max_p={self.max_p}")
        self.epsilon = float(self.epsilon)
        if self.epsilon < 0:
            raise ContractViolation(f"epsilon must be >= 0, got {self.epsilon}")
        self.steady_gen = check_positive_int(self.steady_gen, "steady_gen")
        self.start_gen = check_positive_int(self.start_gen, "start_gen")

    @classmethod
    def for_problem(cls, problem, variant="static", **overrides):
        values = dict(variant=variant)
        if problem.id in _TABLE_DEFAULTS:
            period, (min_p, max_p), eps, steady, start = _TABLE_DEFAULTS[problem.id]
            values.update(period=period, min_p=min_p, max_p=max_p, epsilon=eps,
                          steady_gen=steady, start_gen=start)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def label(self):
        """Short identifier in the style ``sga_gc``, ``periodic_sg`` or ``smga``."""
        if self.variant == "static":
            return f"sga_{self.starter}"
        if self.variant == "smga":
            return "smga" if self.coding1 is not self.coding2 else f"smga_{self.coding1}"
        return f"{self.variant}_{'sg' if self.starter is Coding.SC else 'gs'}"

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class TraceEvent:
    generation: int
    kind: str
    coding_after: Coding
    detail: str = ""


@dataclass(frozen=True)
class SteadyStateEstimate:
    coding: Coding
    episode_lengths: tuple
    estimate: int


@dataclass
class RunRecord:
    """Outcome of one run.

    ``best_fitness`` has ``max_gen + 1`` entries: index 0 is the initial
    population, index ``g`` the best-so-far after generation ``g``.
    """

    problem: str
    strategy: str
    best_fitness: np.ndarray
    first_success: int
    final_best_fitness: float
    best_x: np.ndarray
    evaluations: int
    success_threshold: float
    trace: list = field(default_factory=list)
    seed: int = None
    predicate_tests: int = 0
    steady_states: tuple = ()

    @property
    def max_gen(self):
        return len(self.best_fitness) - 1

    @property
    def succeeded(self):
        return self.first_success is not None

    @property
    def alternations(self):
        return sum(1 for e in self.trace if e.kind == "alternation")


class _Progress:
    """Run-level best-so-far, success and evaluation bookkeeping."""

    def __init__(self, problem, max_gen):
        self.problem = problem
        self.max_gen = max_gen
        self.threshold = problem.success_threshold
        self.generation = 0
        self.history = []
        self.first_success = None
        self.best = math.inf
        self.best_x = None
        self.evaluations = 0
        self.trace = []

    @property
    def done(self):
        return self.generation >= self.max_gen

    def _offer(self, pop):
        i = int(np.argmin(pop.fitness))
        f = float(pop.fitness[i])
        if f < self.best:
            self.best = f
            self.best_x = decode_genotype(pop.genotypes[i], self.problem.layout, pop.coding)

    def record(self, *pops, advance=True):
        if advance:
            self.generation += 1
        for pop in pops:
            self._offer(pop)
        self.history.append(self.best)
        if self.first_success is None and self.best <= self.threshold:
            self.first_success = self.generation

    def event(self, kind, coding, detail=""):
        self.trace.append(TraceEvent(self.generation, kind, Coding.parse(coding), detail))

    def finish(self, label, seed, predicate_tests=0, steady_states=()):
        return RunRecord(
            problem=self.problem.id,
            strategy=label,
            best_fitness=np.asarray(self.history, dtype=np.float64),
            first_success=self.first_success,
            final_best_fitness=self.best,
            best_x=self.best_x,
            evaluations=self.evaluations,
            success_threshold=self.threshold,
            trace=self.trace,
            seed=seed,
            predicate_tests=predicate_tests,
            steady_states=tuple(steady_states),
        )


def _check_inputs(problem, params):
    if params.vec_size != problem.vec_size:
        raise ContractViolation(f"vec_size={params.vec_size} does not match {problem.id} layout ({problem.vec_size} bits)")


def _seed_of(rng):
    return int(rng) if isinstance(rng, (int, np.integer)) else None


# ---------------------------------------------------------------------------
# predicates


def is_local_optimum(individual, coding, problem):
    """True when no single-bit flip of the genotype strictly lowers fitness under ``coding``.

    The individual is re-evaluated in the same batch as its ``vec_size``
    neighbours so the comparison is free of batch-shape rounding effects.
    Callers charge ``vec_size`` evaluations.
    """
    g = np.asarray(individual.genotype, dtype=np.uint8)
    length = g.shape[0]
    batch = np.empty((length + 1, length), dtype=np.uint8)
    batch[:] = g
    batch[1:] ^= np.eye(length, dtype=np.uint8)
    fitness = evaluate_genotypes(batch, problem, coding)
    return not bool(np.any(fitness[1:] < fitness[0]))


# ---------------------------------------------------------------------------
# serial strategies


def _run_serial(problem, params, cfg, rng):
    _check_inputs(problem, params)
    seed = _seed_of(rng)
    rng = check_random_state(rng)
    variant = cfg.variant
    coding = cfg.starter
    progress = _Progress(problem, params.max_gen)
    pop = generate_initial_population(params, problem, coding, rng)
    progress.evaluations += pop.size
    progress.record(pop, advance=False)
    state = RunState.start(pop)

    def draw_leg():
        if variant == "periodic":
            return cfg.period
        if cfg.min_p == cfg.max_p:
            return cfg.min_p
        return int(rng.integers(cfg.min_p, cfg.max_p + 1))

    leg_length = draw_leg() if variant in ("periodic", "aperiodic") else None
    leg = 0
    tests = 0
    while not progress.done:
        pop = step_generation(pop, problem, params, rng, state)
        progress.evaluations += pop.size
        progress.record(pop)
        leg += 1
        if progress.done or variant == "static":
            continue

        if variant in ("periodic", "aperiodic"):
            fire = leg >= leg_length
            detail = f"leg={leg}"
        elif variant == "localopt":
            tests += 1
            progress.evaluations += params.vec_size
            fire = is_local_optimum(best_element(pop), coding, problem)
            detail = f"best={progress.best!r}"
            if fire:
                progress.event("local_optimum_detected", coding, detail)
        elif variant == "homogpop":
            std = fitness_stats(pop)[1]
            fire = std <= cfg.epsilon
            detail = f"std={std!r}"
        else:
            fire = state.stagnation >= cfg.steady_gen
            detail = f"stagnation={state.stagnation}"
            if fire:
                progress.event("steady_detected", coding, detail)

        if fire:
            coding = coding.other()
            pop = convert_population(pop, problem.layout, coding)
            progress.event("alternation", coding, detail)
            state.reset_stagnation()
            leg = 0
            if leg_length is not None:
                leg_length = draw_leg()
    return progress.finish(cfg.label, seed, predicate_tests=tests)


def run_static(problem, params, coding, rng):
    """Plain SGA under one fixed coding."""
    return _run_serial(problem, params, StrategyConfig(variant="static", starter=coding), rng)


def run_periodic(problem, params, cfg, rng):
    return _run_serial(problem, params, cfg.replace(variant="periodic"), rng)


def run_aperiodic(problem, params, cfg, rng):
    return _run_serial(problem, params, cfg.replace(variant="aperiodic"), rng)


def run_localopt(problem, params, cfg, rng):
    return _run_serial(problem, params, cfg.replace(variant="localopt"), rng)


def run_homogpop(problem, params, cfg, rng):
    return _run_serial(problem, params, cfg.replace(variant="homogpop"), rng)


def run_steadygen(problem, params, cfg, rng):
    return _run_serial(problem, params, cfg.replace(variant="steadygen"), rng)


# ---------------------------------------------------------------------------
# split-and-merge helpers


def split(pop, rng):
    """Uniformly random partition into two equal halves."""
    if pop.size % 2:
        raise ContractViolation(f"cannot split a population of odd size {pop.size}")
    perm = rng.permutation(pop.size)
    half = pop.size // 2
    a, b = perm[:half], perm[half:]
    return (Population(pop.genotypes[a], pop.fitness[a], pop.coding),
            Population(pop.genotypes[b], pop.fitness[b], pop.coding))


def merge(pop1, pop2):
    if pop1.coding is not pop2.coding:
        raise ContractViolation(f"cannot merge populations coded {pop1.coding} and {pop2.coding}; convert first")
    return Population(np.concatenate([pop1.genotypes, pop2.genotypes]),
                      np.concatenate([pop1.fitness, pop2.fitness]), pop1.coding)


def compute_steady_state(history, start_gen, coding=Coding.SC):
    """Average stagnation episode over an observation window.

    An episode is the gap between consecutive strict improvements (the first
    one measured from generation 0); the unfinished tail after the last
    improvement is ignored. With no finished episode the estimate falls back
    to ``start_gen``. The mean is rounded half up and floored at 1.
    """
    improvements = history.improvements if isinstance(history, RunState) else list(history)
    episodes = tuple(int(d) for d in np.diff([0] + sorted(improvements)))
    if not episodes:
        estimate = int(start_gen)
    else:
        estimate = max(1, math.floor(sum(episodes) / len(episodes) + 0.5))
    return SteadyStateEstimate(Coding.parse(coding), episodes, estimate)


def _best_half(pop1, pop2):
    return 0 if np.mean(pop1.fitness) <= np.mean(pop2.fitness) else 1


def select_best_coding(pop1, coding1, pop2, coding2):
    """Coding of the population with strictly lower mean fitness; ties go to ``coding1``."""
    return Coding.parse(coding1) if _best_half(pop1, pop2) == 0 else Coding.parse(coding2)


def run_smga(problem, params, cfg, rng):
    """Split-and-merge GA.

    One generation tick advances both halves during split phases, so every
    tick costs ``pop_size`` evaluations whatever the phase. Each half and the
    merged population start a fresh stagnation counter when formed.
    """
    _check_inputs(problem, params)
    if params.pop_size % 2:
        raise ContractViolation(f"smga needs an even pop_size, got {params.pop_size}")
    seed = _seed_of(rng)
    rng = check_random_state(rng)
    layout = problem.layout
    codings = (cfg.coding1, cfg.coding2)
    progress = _Progress(problem, params.max_gen)

    pop = generate_initial_population(params, problem, codings[0], rng)
    progress.evaluations += pop.size
    progress.record(pop, advance=False)

    def split_phase(pop):
        halves = list(split(pop, rng))
        halves = [convert_population(h, layout, c) for h, c in zip(halves, codings)]
        progress.event("split", codings[0], f"coding2={codings[1]}")
        return halves, [RunState.start(h) for h in halves]

    def tick(halves, states):
        for i in (0, 1):
            halves[i] = step_generation(halves[i], problem, params, rng, states[i])
            progress.evaluations += halves[i].size
        progress.record(*halves)

    def merge_phase(halves):
        idx = _best_half(*halves)
        best = codings[idx]
        progress.event("coding_selected", best, f"half={idx + 1}")
        merged = merge(*(convert_population(h, layout, best) for h in halves))
        progress.event("merge", best, f"estimate={estimates[idx].estimate}")
        return merged, estimates[idx].estimate

    def run_merged(pop, threshold):
        state = RunState.start(pop)
        while not progress.done:
            pop = step_generation(pop, problem, params, rng, state)
            progress.evaluations += pop.size
            progress.record(pop)
            if state.stagnation >= threshold:
                progress.event("steady_detected", pop.coding, f"stagnation={state.stagnation}")
                break
        return pop

    halves, states = split_phase(pop)
    for _ in range(cfg.start_gen):
        if progress.done:
            break
        tick(halves, states)
    if progress.done:
        return progress.finish(cfg.label, seed)

    estimates = [compute_steady_state(s, cfg.start_gen, c) for s, c in zip(states, codings)]
    pop, threshold = merge_phase(halves)
    pop = run_merged(pop, threshold)
    while not progress.done:
        halves, states = split_phase(pop)
        while not progress.done:
            tick(halves, states)
            hit = [s.stagnation >= e.estimate for s, e in zip(states, estimates)]
            if any(hit):
                progress.event("steady_detected", codings[hit.index(True)],
                               f"stagnation={states[0].stagnation},{states[1].stagnation}")
                break
        if progress.done:
            break
        pop, threshold = merge_phase(halves)
        pop = run_merged(pop, threshold)
    return progress.finish(cfg.label, seed, steady_states=estimates)


def parse_variant(name):
    """StrategyConfig keyword arguments for names like ``static-gc``, ``periodic-gs``, ``smga-sc``.

    A serial strategy suffix sets the starter coding (``sg``/``sc`` = SC first);
    an ``smga`` suffix sets both half codings.
    """
    name = str(name).strip().lower().replace("_", "-")
    base, _, suffix = name.partition("-")
    if base == "sga":
        base = "static"
    if base not in VARIANTS:
        raise ContractViolation(f"unknown strategy {name!r}; allowed: {', '.join(VARIANTS)} "
                                "(optionally suffixed -sc/-gc, or -sg/-gs for serial strategies)")
    kwargs = {"variant": base}
    if suffix:
        codes = {"sc": Coding.SC, "gc": Coding.GC, "sg": Coding.SC, "gs": Coding.GC}
        if suffix not in codes:
            raise ContractViolation(f"unknown suffix {suffix!r} in strategy {name!r}; allowed: sc, gc, sg, gs")
        if base == "smga":
            kwargs["coding1"] = kwargs["coding2"] = codes[suffix]
        else:
            kwargs["starter"] = codes[suffix]
    return kwargs


_RUNNERS = {
    "periodic": run_periodic,
    "aperiodic": run_aperiodic,
    "localopt": run_localopt,
    "homogpop": run_homogpop,
    "steadygen": run_steadygen,
    "smga": run_smga,
}


def run_strategy(problem, params, cfg, rng):
    """Dispatch on ``cfg.variant``."""
    if cfg.variant == "static":
        return run_static(problem, params, cfg.starter, rng)
    return _RUNNERS[cfg.variant](problem, params, cfg, rng)
