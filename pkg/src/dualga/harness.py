"""Batch experiments: seeded multi-run cells, success metrics, t-tests and CSV output.

Config files are INI-style ``key = value`` text with ``#`` comments. The
``[experiment]`` section holds batch settings and defaults; every other
section is one cell (a problem/strategy pair)::

    [experiment]
    runs = 30
    root_seed = 1

    [f9_gc]
    problem = f9
    strategy = static
    starter = gc

Each cell writes ``results.csv`` (one row per run), ``summary.csv`` and
``sr_curve.csv`` under ``<out>/<cell>/``; the batch also writes a combined
``summary.csv`` and ``ttest.csv`` comparing each SM-GA cell with every other
cell of the same problem.
"""

import configparser
import csv
import math
import zlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import ConfigError, ContractViolation
from .encoding import Coding
from .engine import RNG_ALGORITHM, GaParams
from .objectives import PROBLEMS, MIN_SUCCESS_THRESHOLD, get_problem
from .strategies import StrategyConfig, parse_variant, run_strategy

T_CRITICAL = (1.96, 2.58, 3.29)
DEFAULT_RUNS = 30

_GA_KEYS = {
    "max_gen": int, "pop_size": int, "t_size": int, "p_cross": float, "one_point_rate": float,
    "p_mut": float, "p_mut_per_bit": float, "elitism": "bool",
}
_STRATEGY_KEYS = {
    "starter": "coding", "coding1": "coding", "coding2": "coding", "period": int, "min_p": int,
    "max_p": int, "epsilon": float, "steady_gen": int, "start_gen": int,
}
CELL_KEYS = {"problem": "problem", "strategy": "strategy", "success_threshold": float,
             **_GA_KEYS, **_STRATEGY_KEYS}
EXPERIMENT_KEYS = {"runs": int, "root_seed": int, "reference_generation": "reference", "n_jobs": int}

DECISIONS = {
    "rng": RNG_ALGORITHM,
    "seed_derivation": "SeedSequence([root_seed, crc32(problem), crc32(strategy), run]) -> 64-bit PCG64 seed",
    "success_rule": f"best fitness <= max({MIN_SUCCESS_THRESHOLD:g}, 2 * discretization floor) unless success_threshold set",
    "selection": "tournament with replacement; lowest fitness wins; ties to lowest index",
    "replacement": "generational; elitism puts best parent over worst child when no child beats it",
    "crossover": "one-point, applied to a pair with probability p_cross * one_point_rate",
    "mutation": "offspring gated by p_mut; each bit flips with p_mut_per_bit",
    "smga_split": "uniform random halves; one tick advances both halves",
    "smga_steady_state": "mean gap between strict improvements over start_gen, rounded half up; start_gen if none",
    "gnto": "max first-success generation when SR = 100, else '<max_gen>+'",
    "sr2_reference": "minimum finite GNTO among cells of the same problem unless reference_generation set",
    "mbf": "mean of final-generation best fitness",
    "ttest": "pooled-variance two-sample Student t; df = n1 + n2 - 2",
}


# ---------------------------------------------------------------------------
# metrics


@dataclass
class ExperimentResult:
    problem: str
    strategy: str
    runs: list
    max_gen: int
    gnto: int
    sr: float
    sr2: float
    mbf: float
    reference_generation: int = None
    metadata: dict = field(default_factory=dict)

    @property
    def n_runs(self):
        return len(self.runs)

    @property
    def successes(self):
        return sum(r.succeeded for r in self.runs)

    @property
    def gnto_label(self):
        return f"{self.max_gen}+" if self.gnto is None else str(self.gnto)


def _check_runs(runs):
    runs = list(runs)
    if not runs:
        raise ContractViolation("metrics need at least one run")
    max_gen = runs[0].max_gen
    if any(r.max_gen != max_gen for r in runs):
        raise ContractViolation("all runs must share max_gen")
    return runs, max_gen


def compute_metrics(runs, reference_generation=None):
    """GNTO, SR, SR2 and MBF over a set of runs of one cell.

    SR2 counts only successes reached by ``reference_generation``; without a
    reference it equals SR.
    """
    runs, max_gen = _check_runs(runs)
    firsts = [r.first_success for r in runs]
    hits = [f for f in firsts if f is not None]
    sr = 100.0 * len(hits) / len(runs)
    ref = max_gen if reference_generation is None else int(reference_generation)
    sr2 = 100.0 * sum(f <= ref for f in hits) / len(runs)
    gnto = max(hits) if len(hits) == len(runs) else None
    mbf = float(np.mean([r.final_best_fitness for r in runs]))
    return ExperimentResult(runs[0].problem, runs[0].strategy, runs, max_gen, gnto, sr, sr2, mbf,
                            reference_generation)


def sr_curve(runs):
    """``(generation, cumulative SR %)`` for every generation 0..max_gen."""
    runs, max_gen = _check_runs(runs)
    counts = np.zeros(max_gen + 1, dtype=np.int64)
    for r in runs:
        if r.first_success is not None:
            counts[r.first_success] += 1
    sr = 100.0 * np.cumsum(counts) / len(runs)
    return [(g, float(v)) for g, v in enumerate(sr)]


@dataclass(frozen=True)
class TTestReport:
    t: float
    n1: int
    n2: int
    metric: str = ""

    @property
    def df(self):
        return self.n1 + self.n2 - 2

    @property
    def significant(self):
        """Whether ``t`` exceeds the 1.96 / 2.58 / 3.29 critical values."""
        return tuple(self.t > c for c in T_CRITICAL)


def t_test(sample1, sample2, metric=""):
    """Pooled-variance two-sample Student t statistic, returned as ``|t|``.

    Both samples constant: ``t = 0`` when the means agree and ``inf`` otherwise.
    """
    a = np.asarray(sample1, dtype=np.float64)
    b = np.asarray(sample2, dtype=np.float64)
    n1, n2 = a.size, b.size
    if n1 < 2 or n2 < 2:
        raise ContractViolation(f"t-test needs at least 2 values per sample, got {n1} and {n2}")
    m1, m2 = a.mean(), b.mean()
    pooled = ((n1 - 1) * a.var(ddof=1) + (n2 - 1) * b.var(ddof=1)) / (n1 + n2 - 2)
    diff = abs(m1 - m2)
    if pooled == 0.0:
        t = 0.0 if diff == 0.0 else math.inf
    else:
        t = float(diff / math.sqrt(pooled * (1.0 / n1 + 1.0 / n2)))
    return TTestReport(t, n1, n2, metric)


def sr2_indicators(firsts, reference_generation):
    return [1.0 if f is not None and f <= reference_generation else 0.0 for f in firsts]


def compare(result_a, result_b, reference_generation):
    """SR2 and MBF t-tests between two cells."""
    ia = sr2_indicators([r.first_success for r in result_a.runs], reference_generation)
    ib = sr2_indicators([r.first_success for r in result_b.runs], reference_generation)
    fa = [r.final_best_fitness for r in result_a.runs]
    fb = [r.final_best_fitness for r in result_b.runs]
    return t_test(ia, ib, "sr2"), t_test(fa, fb, "mbf")


# ---------------------------------------------------------------------------
# configuration


def parse_strategy(name):
    try:
        return parse_variant(name)
    except ContractViolation as exc:
        raise ConfigError(f"strategy: {exc}") from None


def _convert(key, raw, kind):
    raw = raw.strip()
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if kind == "coding":
            return Coding.parse(raw)
        if kind == "problem":
            return get_problem(raw).id
        if kind == "reference":
            return None if raw.lower() in ("auto", "") else int(raw)
        return raw
    except (ValueError, ContractViolation):
        allowed = {
            int: "an integer", float: "a number", "bool": "true/false", "coding": "sc, gc",
            "problem": ", ".join(sorted(PROBLEMS)), "reference": "auto or an integer generation",
        }.get(kind, "a string")
        raise ConfigError(f"{key}: invalid value {raw!r}; allowed: {allowed}") from None


@dataclass
class Cell:
    name: str
    problem: object
    params: GaParams
    strategy: StrategyConfig

    @property
    def label(self):
        return self.strategy.label


@dataclass
class ExperimentConfig:
    cells: list
    runs: int = DEFAULT_RUNS
    root_seed: int = 0
    reference_generation: int = None
    n_jobs: int = 1
    source: str = ""


def build_cell(name, values):
    """Turn a flat mapping of (already typed) cell values into a :class:`Cell`."""
    if "problem" not in values:
        raise ConfigError(f"[{name}] problem: missing; allowed: {', '.join(sorted(PROBLEMS))}")
    problem = get_problem(values["problem"])
    if values.get("success_threshold") is not None:
        problem = problem.with_threshold(values["success_threshold"])
    skw = parse_strategy(values.get("strategy", "static"))
    for key in _STRATEGY_KEYS:
        if key in values:
            skw[key] = values[key]
    gkw = {k: values[k] for k in _GA_KEYS if k in values}
    try:
        params = GaParams.for_problem(problem, **gkw)
        strategy = StrategyConfig.for_problem(problem, **skw)
    except ContractViolation as exc:
        raise ConfigError(f"[{name}] {exc}") from None
    return Cell(name, problem, params, strategy)


def parse_config(text, source="<string>"):
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",),
                                       inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    batch, defaults = {}, {}
    if parser.has_section("experiment"):
        for key, raw in parser.items("experiment"):
            if key in EXPERIMENT_KEYS:
                batch[key] = _convert(key, raw, EXPERIMENT_KEYS[key])
            elif key in CELL_KEYS:
                defaults[key] = _convert(key, raw, CELL_KEYS[key])
            else:
                allowed = ", ".join(sorted({*EXPERIMENT_KEYS, *CELL_KEYS}))
                raise ConfigError(f"[experiment] {key}: unknown key; allowed: {allowed}")

    cells = []
    for section in parser.sections():
        if section == "experiment":
            continue
        values = dict(defaults)
        for key, raw in parser.items(section):
            if key not in CELL_KEYS:
                raise ConfigError(f"[{section}] {key}: unknown key; allowed: {', '.join(sorted(CELL_KEYS))}")
            values[key] = _convert(f"[{section}] {key}", raw, CELL_KEYS[key])
        cells.append(build_cell(section, values))
    if not cells:
        raise ConfigError(f"{source}: no experiment cells defined")

    runs = batch.get("runs", DEFAULT_RUNS)
    if runs < 1:
        raise ConfigError(f"runs: invalid value {runs}; allowed: an integer >= 1")
    root_seed = batch.get("root_seed", 0)
    if root_seed < 0:
        raise ConfigError(f"root_seed: invalid value {root_seed}; allowed: an integer >= 0")
    return ExperimentConfig(cells, runs, root_seed, batch.get("reference_generation"),
                            batch.get("n_jobs", 1), source)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, source=str(path))


# ---------------------------------------------------------------------------
# running


def derive_seed(root_seed, problem_id, strategy_label, run_index):
    """64-bit seed for one run; independent of which other cells exist."""
    ss = np.random.SeedSequence([int(root_seed), zlib.crc32(problem_id.encode()),
                                 zlib.crc32(strategy_label.encode()), int(run_index)])
    lo, hi = ss.generate_state(2, np.uint32)
    return int(lo) | (int(hi) << 32)


def _run_one(problem, params, strategy, seed):
    return run_strategy(problem, params, strategy, seed)


def run_cell(cell, runs, root_seed, n_jobs=1):
    seeds = [derive_seed(root_seed, cell.problem.id, cell.label, i) for i in range(runs)]
    if n_jobs == 1 or runs == 1:
        return [_run_one(cell.problem, cell.params, cell.strategy, s) for s in seeds]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=n_jobs)(delayed(_run_one)(cell.problem, cell.params, cell.strategy, s) for s in seeds)


def _cell_metadata(cell):
    p, s = cell.params, cell.strategy
    meta = {
        "cell": cell.name,
        "problem": cell.problem.id,
        "strategy": cell.label,
        "success_threshold": repr(cell.problem.success_threshold),
        "discretization_floor": repr(cell.problem.discretization_floor),
        "bits_per_param": cell.problem.bits_per_param,
    }
    for key in ("max_gen", "pop_size", "vec_size", "t_size", "p_cross", "one_point_rate", "p_mut",
                "p_mut_per_bit", "elitism"):
        meta[key] = getattr(p, key)
    meta["variant"] = s.variant
    if s.variant == "smga":
        meta.update(coding1=s.coding1, coding2=s.coding2, start_gen=s.start_gen)
    else:
        meta["starter"] = s.starter
        extra = {"periodic": ("period",), "aperiodic": ("min_p", "max_p"), "homogpop": ("epsilon",),
                 "steadygen": ("steady_gen",)}.get(s.variant, ())
        for key in extra:
            meta[key] = getattr(s, key)
    return meta


def run_experiment(config, out_dir=None, runs=None, timestamp=True, n_jobs=None):
    """Run every cell of ``config``; write CSVs under ``out_dir`` when given.

    Returns ``{cell name: ExperimentResult}`` with SR2 already computed
    against the batch reference generation.
    """
    runs = config.runs if runs is None else int(runs)
    if runs < 1:
        raise ConfigError(f"runs: invalid value {runs}; allowed: an integer >= 1")
    n_jobs = config.n_jobs if n_jobs is None else n_jobs
    records = {c.name: run_cell(c, runs, config.root_seed, n_jobs) for c in config.cells}

    raw = {c.name: compute_metrics(records[c.name]) for c in config.cells}
    references = {}
    for cell in config.cells:
        if config.reference_generation is not None:
            references[cell.problem.id] = config.reference_generation
            continue
        finite = [raw[c.name].gnto for c in config.cells
                  if c.problem.id == cell.problem.id and raw[c.name].gnto is not None]
        references[cell.problem.id] = min(finite) if finite else None

    results = {}
    for cell in config.cells:
        res = compute_metrics(records[cell.name], references[cell.problem.id])
        res.metadata = _cell_metadata(cell)
        results[cell.name] = res

    comparisons = []
    if runs >= 2:
        for a in config.cells:
            if a.strategy.variant != "smga":
                continue
            for b in config.cells:
                if b is a or b.problem.id != a.problem.id:
                    continue
                ref = references[a.problem.id]
                ref = results[a.name].max_gen if ref is None else ref
                t_sr2, t_mbf = compare(results[a.name], results[b.name], ref)
                comparisons.append((a, b, ref, t_sr2, t_mbf))

    if out_dir is not None:
        write_outputs(Path(out_dir), config, results, comparisons, runs, timestamp)
    return results


# ---------------------------------------------------------------------------
# CSV output


def _header(meta, timestamp):
    lines = [f"# dualga {__version__}"]
    if timestamp:
        lines.append(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    lines += [f"# {k}: {v}" for k, v in meta.items()]
    return "".join(line + "\n" for line in lines)


def _write_csv(path, header, columns, rows):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(header)
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


SUMMARY_COLUMNS = ["cell", "problem", "strategy", "runs", "successes", "gnto", "sr", "sr2",
                   "reference_generation", "mbf"]
RESULT_COLUMNS = ["run", "seed", "first_success_generation", "success", "final_best_fitness",
                  "evaluations", "alternations", "best_x"]


def _summary_row(name, res):
    return [name, res.problem, res.strategy, res.n_runs, res.successes, res.gnto_label, _fmt(res.sr),
            _fmt(res.sr2), _fmt(res.reference_generation), _fmt(res.mbf)]


def write_outputs(out, config, results, comparisons, runs, timestamp=True):
    batch_meta = {**DECISIONS, "config": Path(config.source).name, "runs": runs, "root_seed": config.root_seed}
    for name, res in results.items():
        meta = {**batch_meta, **res.metadata}
        head = _header(meta, timestamp)
        rows = []
        for i, r in enumerate(res.runs):
            rows.append([i, r.seed, _fmt(r.first_success), int(r.succeeded), _fmt(r.final_best_fitness),
                         r.evaluations, r.alternations, " ".join(repr(float(v)) for v in r.best_x)])
        _write_csv(out / name / "results.csv", head, RESULT_COLUMNS, rows)
        _write_csv(out / name / "summary.csv", head, SUMMARY_COLUMNS, [_summary_row(name, res)])
        _write_csv(out / name / "sr_curve.csv", head, ["generation", "sr"],
                   [[g, _fmt(v)] for g, v in sr_curve(res.runs)])

    head = _header(batch_meta, timestamp)
    _write_csv(out / "summary.csv", head, SUMMARY_COLUMNS, [_summary_row(n, r) for n, r in results.items()])
    rows = []
    for a, b, ref, t_sr2, t_mbf in comparisons:
        rows.append([a.problem.id, a.name, b.name, ref, _fmt(t_sr2.t), _fmt(t_mbf.t), t_sr2.df,
                     *(int(x) for x in t_sr2.significant), *(int(x) for x in t_mbf.significant)])
    _write_csv(out / "ttest.csv", head,
               ["problem", "smga_cell", "other_cell", "reference_generation", "t_sr2", "t_mbf", "df",
                "sr2_p05", "sr2_p01", "sr2_p001", "mbf_p05", "mbf_p01", "mbf_p001"], rows)


def read_results_csv(path):
    """Load ``(first_success_generations, final_best_fitnesses)`` from a results.csv."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            lines = [line for line in fh if not line.startswith("#")]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    reader = csv.DictReader(lines)
    firsts, finals = [], []
    try:
        for row in reader:
            f = row["first_success_generation"]
            firsts.append(int(f) if f != "" else None)
            finals.append(float(row["final_best_fitness"]))
    except (KeyError, ValueError) as exc:
        raise ContractViolation(f"{path} is not a results.csv file ({exc})") from None
    return firsts, finals
