"""Minimisation benchmarks: Rosenbrock (F2), Schaffer (F6), Rastrigin (F7),
Griewangk (F8) and Schwefel (F9).

Every function accepts either one point of shape ``(n,)`` or a batch of shape
``(m, n)`` and evaluates along the last axis.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._validation import ContractViolation
from .encoding import GenotypeLayout, ParamSpec, integers_to_values, nearest_integers

SCHWEFEL_V = 418.9829101
MIN_SUCCESS_THRESHOLD = 1e-6


def rosenbrock(x):
    x = np.asarray(x, dtype=np.float64)
    x1, x2 = x[..., 0], x[..., 1]
    return 100.0 * (x1 * x1 - x2) ** 2 + (1.0 - x1) ** 2


def schaffer_f6(x):
    x = np.asarray(x, dtype=np.float64)
    r2 = x[..., 0] ** 2 + x[..., 1] ** 2
    return 0.5 + (np.sin(np.sqrt(r2)) ** 2 - 0.5) / (1.0 + 0.001 * r2) ** 2


def rastrigin(x):
    x = np.asarray(x, dtype=np.float64)
    return 200.0 + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)


def griewangk(x):
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, x.shape[-1] + 1)
    return 1.0 + np.sum(x * x / 4000.0, axis=-1) - np.prod(np.cos(x / np.sqrt(i)), axis=-1)


def schwefel(x):
    x = np.asarray(x, dtype=np.float64)
    return 10.0 * SCHWEFEL_V + np.sum(-x * np.sin(np.sqrt(np.abs(x))), axis=-1)


@dataclass(frozen=True)
class Problem:
    """A benchmark together with its search interval and bit budget.

    ``success_threshold`` defaults to ``max(1e-6, 2 * discretization_floor)``
    so that success stays attainable when the bit grid cannot hit the
    continuous optimum exactly.
    """

    id: str
    n: int
    lower: float
    upper: float
    bits_per_param: int
    optimum_point: tuple
    func: object = field(repr=False, compare=False)
    optimum_value: float = 0.0
    threshold: float = None

    @property
    def spec(self):
        return ParamSpec(self.lower, self.upper, self.bits_per_param)

    @property
    def layout(self):
        return GenotypeLayout(self.n, self.spec)

    @property
    def vec_size(self):
        return self.n * self.bits_per_param

    @cached_property
    def discretization_floor(self):
        return discretization_floor(self)

    @property
    def success_threshold(self):
        if self.threshold is not None:
            return float(self.threshold)
        return max(MIN_SUCCESS_THRESHOLD, 2.0 * self.discretization_floor)

    def evaluate(self, x):
        return evaluate(self, x)

    def with_bits(self, bits_per_param):
        """Same benchmark on a different grid resolution (threshold recomputed)."""
        return Problem(self.id, self.n, self.lower, self.upper, int(bits_per_param),
                       self.optimum_point, self.func, self.optimum_value, self.threshold)

    def with_threshold(self, threshold):
        return Problem(self.id, self.n, self.lower, self.upper, self.bits_per_param,
                       self.optimum_point, self.func, self.optimum_value, threshold)


def evaluate(problem, x):
    """Objective (= fitness) value of one point or of a batch of points."""
    problem = get_problem(problem)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] != problem.n:
        raise ContractViolation(f"{problem.id} expects points of dimension {problem.n}, got shape {x.shape}")
    out = problem.func(x)
    if x.ndim == 1:
        return float(out)
    return out


def discretization_floor(problem):
    """Objective value at the grid point nearest the known optimum.

    Nearest is taken per coordinate in integer index space; the grid point is
    the same under SC and GC since both share the integer-to-real map.
    """
    spec = problem.spec
    k = nearest_integers(np.asarray(problem.optimum_point, dtype=np.float64), spec)
    return evaluate(problem, integers_to_values(k, spec))


def _make(pid, n, lower, upper, vec_size, optimum, func):
    return Problem(pid, n, lower, upper, vec_size // n, tuple([optimum] * n), func)


PROBLEMS = {
    p.id: p
    for p in (
        Problem("f2", 2, -2.048, 2.048, 20, (1.0, 1.0), rosenbrock),
        _make("f6", 2, -100.0, 100.0, 80, 0.0, schaffer_f6),
        _make("f7", 20, -5.12, 5.12, 200, 0.0, rastrigin),
        _make("f8", 10, -600.0, 600.0, 200, 0.0, griewangk),
        _make("f9", 10, -500.0, 500.0, 150, 420.9687, schwefel),
    )
}


def get_problem(problem):
    """Look a benchmark up by id (``'f2'``, ``'F9'``...) or pass a Problem through."""
    if isinstance(problem, Problem):
        return problem
    key = str(problem).strip().lower()
    try:
        return PROBLEMS[key]
    except KeyError:
        raise ContractViolation(
            f"unknown problem {problem!r}; expected one of {', '.join(sorted(PROBLEMS))}"
        ) from None


__all__ = [
    "PROBLEMS",
    "Problem",
    "SCHWEFEL_V",
    "discretization_floor",
    "evaluate",
    "get_problem",
    "griewangk",
    "rastrigin",
    "rosenbrock",
    "schaffer_f6",
    "schwefel",
]
