import csv

import numpy as np
import pytest

from dualga import LocalOptimaCensus, get_problem
from dualga._validation import ContractViolation, EnumerationBudgetError
from dualga.encoding import nearest_integers
from dualga.landscape import REFERENCE_F6_CENSUS, double_local_optima, enumerate_local_optima, write_landscape_csv
from dualga.objectives import Problem

from landscape_oracle import census, schaffer


@pytest.fixture(scope="module")
def f6_reports():
    f6 = get_problem("f6")
    return enumerate_local_optima(f6, 8, "sc"), enumerate_local_optima(f6, 8, "gc")


@pytest.fixture(scope="module")
def f6_oracle():
    return census(8, gray=False), census(8, gray=True)


def test_counts_match_oracle(f6_reports, f6_oracle):
    sc, gc = f6_reports
    assert set(sc.phenotype_indices.tolist()) == f6_oracle[0]
    assert set(gc.phenotype_indices.tolist()) == f6_oracle[1]


def test_double_count_matches_oracle(f6_reports, f6_oracle):
    count, both = double_local_optima(*f6_reports)
    assert count == len(f6_oracle[0] & f6_oracle[1])
    assert set(both.tolist()) == f6_oracle[0] & f6_oracle[1]
    assert count <= min(r.count for r in f6_reports)


def test_double_is_symmetric(f6_reports):
    a, b = f6_reports
    np.testing.assert_array_equal(double_local_optima(a, b)[1], double_local_optima(b, a)[1])


def test_grid_minimum_in_both(f6_reports):
    # the best grid point, which at 8 bits is not the point nearest the origin
    values = [100.0 * ((2.0 * k - 255) / 255) for k in range(256)]
    grid = {k1 | (k2 << 8): schaffer(values[k1], values[k2]) for k1 in range(256) for k2 in range(256)}
    best = min(grid, key=grid.get)
    assert best != int(nearest_integers(np.zeros(1), get_problem("f6").with_bits(8).spec)[0]) * 257
    for rep in f6_reports:
        assert best in set(rep.phenotype_indices.tolist())


def test_small_oracle_other_resolutions():
    f6 = get_problem("f6")
    for n in (3, 5):
        for gray in (False, True):
            rep = enumerate_local_optima(f6, n, "gc" if gray else "sc")
            assert set(rep.phenotype_indices.tolist()) == census(n, gray)


def test_chunking_does_not_matter(f6_reports):
    rep = enumerate_local_optima(get_problem("f6"), 8, "gc", chunk_size=777)
    np.testing.assert_array_equal(rep.phenotype_indices, f6_reports[1].phenotype_indices)


def test_positions_and_fitness(f6_reports):
    rep = f6_reports[0]
    f6 = get_problem("f6")
    np.testing.assert_array_equal(rep.fitness, f6.func(rep.positions))
    assert np.all(np.diff(rep.phenotype_indices) > 0)


def test_monotone_one_dimensional():
    identity = Problem("line", 1, 0.0, 255.0, 8, (0.0,), lambda x: x[..., 0])
    rep = enumerate_local_optima(identity, coding="sc")
    assert rep.count == 1 and rep.genotype_indices.tolist() == [0]


def test_monotone_each_coordinate():
    bowl = Problem("ramp", 2, 0.0, 1.0, 5, (0.0, 0.0), lambda x: x.sum(axis=-1))
    assert enumerate_local_optima(bowl, coding="sc").count == 1


def test_constant_objective():
    flat = Problem("flat", 2, 0.0, 1.0, 4, (0.0, 0.0), lambda x: np.zeros(x.shape[:-1]))
    assert enumerate_local_optima(flat, coding="gc").count == 2**8


def test_budget_guard():
    with pytest.raises(EnumerationBudgetError, match="2\\^32"):
        enumerate_local_optima(get_problem("f6"), 16, "sc")


def test_mismatched_reports(f6_reports):
    other = enumerate_local_optima(get_problem("f6"), 5, "sc")
    with pytest.raises(ContractViolation):
        double_local_optima(f6_reports[0], other)


def test_reference_census_is_metadata_only():
    assert REFERENCE_F6_CENSUS == {"sc": 6652, "gc": 7512, "double": 2048}


def test_csv(tmp_path, f6_reports):
    path = tmp_path / "f6.csv"
    write_landscape_csv(path, list(f6_reports))
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["index", "x", "y", "fitness", "is_sc_opt", "is_gc_opt"]
    union = set(f6_reports[0].phenotype_indices.tolist()) | set(f6_reports[1].phenotype_indices.tolist())
    assert [int(r["index"]) for r in rows] == sorted(union)
    both = sum(r["is_sc_opt"] == "1" and r["is_gc_opt"] == "1" for r in rows)
    assert both == double_local_optima(*f6_reports)[0]


def test_census_estimator():
    est = LocalOptimaCensus(bits_per_param=5).fit("f6")
    assert set(est.counts_) == {"sc", "gc", "double"}
    assert est.counts_["double"] == est.double_optima_.size
    assert est.get_params()["bits_per_param"] == 5
