"""Simple generational GA over bit strings.

One call to :func:`step_generation` is one full generation: tournament
selection, one-point crossover, bit-flip mutation, wholesale replacement and
(optionally) single-individual elitism. A population always carries exactly
one coding; genotypes are interpreted under it when offspring are evaluated.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import ContractViolation, check_positive_int, check_probability
from .encoding import Coding, convert_matrix, decode_matrix

RNG_ALGORITHM = "numpy.random.PCG64"

# Table of per-problem GA defaults: t_size, p_cross, p_mut_per_bit.
_TABLE_DEFAULTS = {
    "f2": (2, 0.6, 0.025),
    "f6": (2, 0.6, 0.0125),
    "f7": (4, 1.0, 0.0077),
    "f8": (2, 0.75, 0.0035),
    "f9": (2, 0.6, 0.006),
}


@dataclass
class GaParams:
    """Engine parameters.

    ``p_mut`` gates whether the bit-flip operator touches an offspring at all;
    each bit of a touched offspring then flips with ``p_mut_per_bit``, which
    defaults to ``1 / vec_size``. A pair is recombined with probability
    ``p_cross * one_point_rate``.
    """

    vec_size: int
    pop_size: int = 100
    t_size: int = 2
    p_cross: float = 0.6
    one_point_rate: float = 1.0
    p_mut: float = 1.0
    p_mut_per_bit: float = None
    max_gen: int = 3500
    elitism: bool = True
    seed: int = None

    def __post_init__(self):
        self.vec_size = check_positive_int(self.vec_size, "vec_size")
        self.pop_size = check_positive_int(self.pop_size, "pop_size")
        self.t_size = check_positive_int(self.t_size, "t_size")
        self.max_gen = check_positive_int(self.max_gen, "max_gen", minimum=0)
        self.p_cross = check_probability(self.p_cross, "p_cross")
        self.one_point_rate = check_probability(self.one_point_rate, "one_point_rate")
        self.p_mut = check_probability(self.p_mut, "p_mut")
        if self.p_mut_per_bit is None:
            self.p_mut_per_bit = 1.0 / self.vec_size
        self.p_mut_per_bit = check_probability(self.p_mut_per_bit, "p_mut_per_bit")
        self.elitism = bool(self.elitism)

    @classmethod
    def for_problem(cls, problem, **overrides):
        """Per-problem default settings (maxGen 3500, popSize 100), with overrides."""
        t_size, p_cross, p_bit = _TABLE_DEFAULTS.get(problem.id, (2, 0.6, None))
        values = dict(vec_size=problem.vec_size, pop_size=100, t_size=t_size, p_cross=p_cross,
                      one_point_rate=1.0, p_mut=1.0, p_mut_per_bit=p_bit, max_gen=3500)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass
class Population:
    genotypes: np.ndarray
    fitness: np.ndarray
    coding: Coding

    def __post_init__(self):
        self.coding = Coding.parse(self.coding)
        if self.genotypes.ndim != 2 or self.genotypes.shape[0] != self.fitness.shape[0]:
            raise ContractViolation("genotypes must be (size, vec_size) and match the fitness vector")

    @property
    def size(self):
        return self.genotypes.shape[0]

    def __len__(self):
        return self.size

    def copy(self):
        return Population(self.genotypes.copy(), self.fitness.copy(), self.coding)


@dataclass(frozen=True)
class Individual:
    index: int
    genotype: np.ndarray
    fitness: float


@dataclass
class RunState:
    """Per-population progress bookkeeping used by the stagnation predicates."""

    generation: int = 0
    best_fitness_history: list = field(default_factory=list)
    stagnation: int = 0
    improvements: list = field(default_factory=list)
    evaluations: int = 0

    @classmethod
    def start(cls, pop, generation=0, evaluations=0):
        return cls(generation=generation, best_fitness_history=[float(pop.fitness.min())],
                   evaluations=evaluations)

    @property
    def best_fitness(self):
        return self.best_fitness_history[-1]

    def observe(self, pop, evaluations):
        """Record one finished generation for ``pop``."""
        best = float(pop.fitness.min())
        self.generation += 1
        self.evaluations += evaluations
        if best < self.best_fitness_history[-1]:
            self.stagnation = 0
            self.improvements.append(self.generation)
        else:
            self.stagnation += 1
        self.best_fitness_history.append(best)

    def reset_stagnation(self):
        self.stagnation = 0


def evaluate_genotypes(genotypes, problem, coding):
    return problem.func(decode_matrix(genotypes, problem.layout, coding))


def generate_initial_population(params, problem, coding, rng):
    """``pop_size`` uniformly random genotypes, evaluated under ``coding``."""
    genotypes = rng.integers(0, 2, size=(params.pop_size, params.vec_size), dtype=np.uint8)
    return Population(genotypes, evaluate_genotypes(genotypes, problem, coding), coding)


def best_element(pop):
    """Fittest (lowest fitness) member; ties go to the lowest index."""
    if pop.size == 0:
        raise ContractViolation("best_element of an empty population")
    i = int(np.argmin(pop.fitness))
    return Individual(i, pop.genotypes[i], float(pop.fitness[i]))


def fitness_stats(pop):
    """Mean and population (divide-by-size) standard deviation of the fitness values."""
    if pop.size == 0:
        raise ContractViolation("fitness_stats of an empty population")
    return float(np.mean(pop.fitness)), float(np.std(pop.fitness))


def convert_population(pop, layout, coding):
    """Re-encode every member under ``coding``; fitness values carry over unchanged."""
    coding = Coding.parse(coding)
    if coding is pop.coding:
        return pop
    return Population(convert_matrix(pop.genotypes, layout, pop.coding, coding).copy(),
                      pop.fitness.copy(), coding)


def tournament(fitness, n_winners, t_size, rng):
    """Indices of ``n_winners`` tournament winners (picks with replacement, lowest rank wins)."""
    order = np.argsort(fitness, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    picks = rng.integers(0, fitness.size, size=(n_winners, t_size))
    return picks[np.arange(n_winners), np.argmin(rank[picks], axis=1)]


def _bernoulli_positions(rng, n, p):
    # Positions of successes in n Bernoulli(p) trials, via geometric gaps.
    if n == 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(n)
    chunk = int(n * p + 4.0 * np.sqrt(n * p) + 16)
    pos = np.cumsum(rng.geometric(p, size=chunk)) - 1
    parts = [pos]
    while pos[-1] < n:
        pos = pos[-1] + np.cumsum(rng.geometric(p, size=chunk))
        parts.append(pos)
    pos = np.concatenate(parts) if len(parts) > 1 else pos
    return pos[pos < n]


def make_offspring(pop, params, rng):
    """Selection, crossover and mutation; returns unevaluated offspring genotypes."""
    size, length = pop.genotypes.shape
    n_pairs = size // 2
    parents = tournament(pop.fitness, size, params.t_size, rng)
    children = pop.genotypes[parents]

    p_apply = params.p_cross * params.one_point_rate
    if length > 1 and p_apply > 0.0 and n_pairs:
        cross = rng.random(n_pairs) < p_apply
        cuts = rng.integers(1, length, size=n_pairs)
        pairs = children[:2 * n_pairs].reshape(n_pairs, 2, length)
        swap = (np.arange(length) >= cuts[:, np.newaxis]) & cross[:, np.newaxis]
        diff = (pairs[:, 0] ^ pairs[:, 1]) & swap
        pairs[:, 0] ^= diff
        pairs[:, 1] ^= diff

    n_mut = 2 * n_pairs
    if params.p_mut > 0.0 and params.p_mut_per_bit > 0.0:
        flat = children[:n_mut].reshape(-1)
        pos = _bernoulli_positions(rng, n_mut * length, params.p_mut_per_bit)
        if params.p_mut < 1.0:
            gate = rng.random(n_mut) < params.p_mut
            pos = pos[gate[pos // length]]
        flat[pos] ^= 1
    # with an odd size the last selected parent is cloned through untouched
    return children


def step_generation(pop, problem, params, rng, state=None):
    """Run one generation and return the replacement population.

    When ``state`` is given it is updated in place (generation counter,
    best-fitness history, stagnation, evaluations).
    """
    children = make_offspring(pop, params, rng)
    fitness = evaluate_genotypes(children, problem, pop.coding)
    if params.elitism:
        best_parent = int(np.argmin(pop.fitness))
        if fitness.min() > pop.fitness[best_parent]:
            worst = int(np.argmax(fitness))
            children[worst] = pop.genotypes[best_parent]
            fitness[worst] = pop.fitness[best_parent]
    new = Population(children, fitness, pop.coding)
    if state is not None:
        state.observe(new, children.shape[0])
    return new
