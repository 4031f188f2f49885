"""Dual-coding genetic algorithms: standard binary / Gray genotypes with
serial alternation strategies and the split-and-merge GA."""

__version__ = "0.1.0"

from ._validation import ConfigError, ContractViolation, EnumerationBudgetError  # noqa: E402
from .encoding import (  # noqa: E402
    Coding,
    GenotypeDecoder,
    GenotypeLayout,
    GrayCodeTransformer,
    ParamSpec,
    convert_genotype,
    decode_genotype,
    decode_param,
    gc_to_sc,
    sc_to_gc,
)
from .engine import GaParams, Population  # noqa: E402
from .estimators import DualCodingGA, LocalOptimaCensus  # noqa: E402
from .objectives import PROBLEMS, Problem, evaluate, get_problem  # noqa: E402
from .strategies import RunRecord, StrategyConfig, run_strategy  # noqa: E402

__all__ = [
    "Coding",
    "ConfigError",
    "ContractViolation",
    "DualCodingGA",
    "EnumerationBudgetError",
    "GaParams",
    "GenotypeDecoder",
    "GenotypeLayout",
    "GrayCodeTransformer",
    "LocalOptimaCensus",
    "PROBLEMS",
    "ParamSpec",
    "Population",
    "Problem",
    "RunRecord",
    "StrategyConfig",
    "convert_genotype",
    "decode_genotype",
    "decode_param",
    "evaluate",
    "gc_to_sc",
    "get_problem",
    "run_strategy",
    "sc_to_gc",
]
