"""scikit-learn style wrappers around the strategy runners and the landscape census.

``fit`` takes the problem to optimise (a :class:`~dualga.objectives.Problem`
or its id) instead of a data matrix. Unset hyper-parameters fall back to the
per-problem default settings at fit time, so ``get_params`` reports
exactly what the user chose and ``clone`` works as usual.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engine import GaParams
from .landscape import DEFAULT_MAX_BITS, double_local_optima, enumerate_local_optima
from .objectives import get_problem
from .strategies import StrategyConfig, run_strategy, parse_variant


class DualCodingGA(BaseEstimator):
    """Bit-string GA with an encoding-change strategy.

    Parameters
    ----------
    strategy : str, default='smga'
        One of ``static``, ``periodic``, ``aperiodic``, ``localopt``,
        ``homogpop``, ``steadygen``, ``smga``; suffixed forms such as
        ``static-gc`` or ``periodic-gs`` set the starter coding too.
    starter : {'sc', 'gc'}, optional
        First coding of the serial strategies and of ``static``.
    coding1, coding2 : {'sc', 'gc'}, optional
        Half-population codings for ``smga``.
    max_gen, pop_size, t_size, p_cross, one_point_rate, p_mut, p_mut_per_bit, elitism
        Engine settings; ``None`` means the per-problem default.
    period, min_p, max_p, epsilon, steady_gen, start_gen
        Strategy settings; ``None`` means the per-problem default.
    random_state : int, Generator or None
        Seed for the run.

    Attributes
    ----------
    record_ : RunRecord
    best_x_ : ndarray of shape (n,)
    best_fitness_ : float
    n_evaluations_ : int
    history_ : ndarray of shape (max_gen + 1,)
        Best-so-far fitness per generation.
    """

    def __init__(self, strategy="smga", starter=None, coding1=None, coding2=None, max_gen=None,
                 pop_size=None, t_size=None, p_cross=None, one_point_rate=None, p_mut=None,
                 p_mut_per_bit=None, elitism=True, period=None, min_p=None, max_p=None,
                 epsilon=None, steady_gen=None, start_gen=None, random_state=None):
        self.strategy = strategy
        self.starter = starter
        self.coding1 = coding1
        self.coding2 = coding2
        self.max_gen = max_gen
        self.pop_size = pop_size
        self.t_size = t_size
        self.p_cross = p_cross
        self.one_point_rate = one_point_rate
        self.p_mut = p_mut
        self.p_mut_per_bit = p_mut_per_bit
        self.elitism = elitism
        self.period = period
        self.min_p = min_p
        self.max_p = max_p
        self.epsilon = epsilon
        self.steady_gen = steady_gen
        self.start_gen = start_gen
        self.random_state = random_state

    def _configs(self, problem):
        params = GaParams.for_problem(
            problem, max_gen=self.max_gen, pop_size=self.pop_size, t_size=self.t_size,
            p_cross=self.p_cross, one_point_rate=self.one_point_rate, p_mut=self.p_mut,
            p_mut_per_bit=self.p_mut_per_bit, elitism=self.elitism)
        kwargs = parse_variant(self.strategy)
        for key in ("starter", "coding1", "coding2", "period", "min_p", "max_p", "epsilon",
                    "steady_gen", "start_gen"):
            value = getattr(self, key)
            if value is not None:
                kwargs[key] = value
        return params, StrategyConfig.for_problem(problem, **kwargs)

    def fit(self, problem, y=None):
        problem = get_problem(problem)
        params, cfg = self._configs(problem)
        record = run_strategy(problem, params, cfg, self.random_state)
        self.problem_ = problem
        self.params_ = params
        self.strategy_config_ = cfg
        self.record_ = record
        self.best_x_ = record.best_x
        self.best_fitness_ = record.final_best_fitness
        self.n_evaluations_ = record.evaluations
        self.history_ = record.best_fitness
        return self

    def score(self, problem=None, y=None):
        """Negated best fitness, so that larger is better."""
        check_is_fitted(self, "record_")
        return -float(self.best_fitness_)

    @property
    def succeeded_(self):
        check_is_fitted(self, "record_")
        return self.record_.succeeded


class LocalOptimaCensus(BaseEstimator):
    """Exhaustive Hamming-1 local-optimum census of a problem on a small grid.

    Parameters
    ----------
    bits_per_param : int, default=8
    coding : {'sc', 'gc', 'both'}, default='both'
    max_bits : int, default=30
        Refuse genotypes longer than this.

    Attributes
    ----------
    reports_ : dict mapping Coding to LandscapeReport
    counts_ : dict mapping 'sc' / 'gc' / 'double' to counts
    double_optima_ : ndarray of phenotype indices (only with ``coding='both'``)
    """

    def __init__(self, bits_per_param=8, coding="both", max_bits=DEFAULT_MAX_BITS):
        self.bits_per_param = bits_per_param
        self.coding = coding
        self.max_bits = max_bits

    def fit(self, problem, y=None):
        codings = ("sc", "gc") if str(self.coding).lower() == "both" else (self.coding,)
        reports = {}
        for c in codings:
            rep = enumerate_local_optima(problem, self.bits_per_param, c, max_bits=self.max_bits)
            reports[rep.coding] = rep
        self.reports_ = reports
        self.counts_ = {str(c): r.count for c, r in reports.items()}
        if len(reports) == 2:
            count, both = double_local_optima(*reports.values())
            self.counts_["double"] = count
            self.double_optima_ = both
        else:
            self.double_optima_ = np.empty(0, dtype=np.int64)
        return self
