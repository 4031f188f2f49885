"""Exhaustive census of Hamming-1 local optima under SC and GC.

A genotype is a local optimum when none of its one-bit neighbours has
strictly lower fitness, so plateaus count as optima. That definition is
shared with the LocalOpt strategy's trigger.

Optima are reported both by genotype index (the bit pattern read as an
integer, bit 0 first) and by phenotype index (the same read-out of the
equivalent SC genotype), and intersections are taken in phenotype space.
"""

import csv
from dataclasses import dataclass

import numpy as np

from ._validation import ContractViolation, EnumerationBudgetError
from .encoding import Coding, gray_to_binary_int, integers_to_values
from .objectives import get_problem

DEFAULT_MAX_BITS = 30
DEFAULT_CHUNK = 1 << 16

# counts published for Schaffer F6 at an unstated grid resolution; kept as
# reference metadata only
REFERENCE_F6_CENSUS = {"sc": 6652, "gc": 7512, "double": 2048}


@dataclass
class LandscapeReport:
    problem: str
    bits_per_param: int
    coding: Coding
    genotype_indices: np.ndarray
    phenotype_indices: np.ndarray
    positions: np.ndarray
    fitness: np.ndarray
    double_count: int = None

    @property
    def count(self):
        return int(self.genotype_indices.size)

    @property
    def local_optima(self):
        return set(self.genotype_indices.tolist())


def _split_blocks(g, n_params, n_bits):
    mask = (1 << n_bits) - 1
    shifts = np.arange(n_params, dtype=np.int64) * n_bits
    return (g[:, np.newaxis] >> shifts) & mask


def _join_blocks(k, n_bits):
    shifts = np.arange(k.shape[1], dtype=np.int64) * n_bits
    return np.bitwise_or.reduce(k << shifts, axis=1)


def _fitness_of(g, problem, coding):
    k = _split_blocks(g, problem.n, problem.bits_per_param)
    if coding is Coding.GC:
        k = gray_to_binary_int(k, problem.bits_per_param)
    return problem.func(integers_to_values(k, problem.spec)), k


def enumerate_local_optima(problem, bits_per_param=None, coding="sc", max_bits=DEFAULT_MAX_BITS,
                           chunk_size=DEFAULT_CHUNK):
    """Visit every genotype of ``problem`` at ``bits_per_param`` bits and keep the local optima.

    Raises :class:`EnumerationBudgetError` when the genotype length exceeds
    ``max_bits``. ``chunk_size`` only bounds memory; results do not depend on it.
    """
    problem = get_problem(problem)
    if bits_per_param is not None:
        problem = problem.with_bits(bits_per_param)
    coding = Coding.parse(coding)
    length = problem.vec_size
    if length > max_bits:
        raise EnumerationBudgetError(
            f"{problem.id} at {problem.bits_per_param} bits/param needs 2^{length} genotypes "
            f"x {length + 1} evaluations; budget is {max_bits} bits (raise max_bits to allow it)")
    total = 1 << length
    flips = np.left_shift(np.int64(1), np.arange(length, dtype=np.int64))

    found = []
    for start in range(0, total, chunk_size):
        g = np.arange(start, min(start + chunk_size, total), dtype=np.int64)
        f, k = _fitness_of(g, problem, coding)
        keep = np.ones(g.size, dtype=bool)
        for bit in flips:
            fn, _ = _fitness_of(g ^ bit, problem, coding)
            keep &= fn >= f
        if keep.any():
            found.append((g[keep], k[keep], f[keep]))

    if found:
        g_opt = np.concatenate([x[0] for x in found])
        k_opt = np.concatenate([x[1] for x in found])
        f_opt = np.concatenate([x[2] for x in found])
    else:
        g_opt = np.empty(0, dtype=np.int64)
        k_opt = np.empty((0, problem.n), dtype=np.int64)
        f_opt = np.empty(0)
    phen = _join_blocks(k_opt, problem.bits_per_param) if g_opt.size else g_opt.copy()
    order = np.argsort(phen, kind="stable")
    return LandscapeReport(
        problem=problem.id,
        bits_per_param=problem.bits_per_param,
        coding=coding,
        genotype_indices=g_opt[order],
        phenotype_indices=phen[order],
        positions=integers_to_values(k_opt[order], problem.spec),
        fitness=f_opt[order],
    )


def double_local_optima(rep_a, rep_b):
    """Phenotype points that are local optima in both reports.

    Returns ``(count, indices)`` with ``indices`` sorted phenotype indices and
    stores the count on both reports.
    """
    if rep_a.problem != rep_b.problem or rep_a.bits_per_param != rep_b.bits_per_param:
        raise ContractViolation(
            f"reports differ: {rep_a.problem}@{rep_a.bits_per_param} vs {rep_b.problem}@{rep_b.bits_per_param}")
    both = np.intersect1d(rep_a.phenotype_indices, rep_b.phenotype_indices)
    rep_a.double_count = rep_b.double_count = int(both.size)
    return int(both.size), both


def _position_columns(n):
    if n == 1:
        return ["x"]
    if n == 2:
        return ["x", "y"]
    return [f"x{i + 1}" for i in range(n)]


def write_landscape_csv(path, reports):
    """One row per phenotype that is an optimum in at least one report, sorted by index."""
    by_coding = {r.coding: r for r in reports}
    first = reports[0]
    n = first.positions.shape[1] if first.positions.ndim == 2 else 1
    rows = {}
    for rep in reports:
        for idx, pos, fit in zip(rep.phenotype_indices.tolist(), rep.positions, rep.fitness):
            rows.setdefault(idx, (pos, fit))
    flags = {c: set(r.phenotype_indices.tolist()) for c, r in by_coding.items()}

    def flag(coding, idx):
        if coding not in flags:
            return ""
        return int(idx in flags[coding])

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", *_position_columns(n), "fitness", "is_sc_opt", "is_gc_opt"])
        for idx in sorted(rows):
            pos, fit = rows[idx]
            w.writerow([idx, *(repr(float(v)) for v in pos), repr(float(fit)),
                        flag(Coding.SC, idx), flag(Coding.GC, idx)])
