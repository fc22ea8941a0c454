import numpy as np
import pytest
from hypothesis import given

from conftest import positive_tables, sparse_tables
from sica import CountTable, detect_blocks, load_fixture, scale, to_correspondence, unit_singular_count
from sica.sinkhorn import c2dist, mass_ratio, trace_to_csv
from sica.verify import block_diagonal

# frozen from a 500-iteration run on the bundled tables
RODENT_C2 = (302.9641382, 257.1369092)
RODENT_RATIO = 1.380883411


def test_c2dist_and_ratio_of_bistochastic():
    d = np.array([[1.5, 0.5], [0.5, 1.5]])
    assert c2dist(d) == 0
    assert mass_ratio(d) == 1


def test_example3_trace():
    s = scale(load_fixture("example3"), iters=500)
    assert s.n_iter == 500
    assert s.c2dist[-1] == pytest.approx(4.128788e-3, rel=1e-3)
    assert s.ratio[-1] == pytest.approx(0.9999990, abs=1e-6)
    np.testing.assert_allclose(s.d, [[0, 1.9980668], [1.997934, 0.0039956]], atol=1e-5)
    assert s.d[0, 0] == 0


def test_example3_epsilon_cell_removed_by_block_detection():
    part = detect_blocks(scale(load_fixture("example3")))
    assert part.k == 2
    assert [(b.rows, b.cols) for b in part.blocks] == [((0,), (1,)), ((1,), (0,))]


def test_uniform_table_converges_immediately():
    s = scale(CountTable(np.full((3, 4), 2.0)))
    assert s.status == "converged" and s.n_iter == 1
    assert s.c2dist[-1] == pytest.approx(0, abs=1e-14)
    assert s.ratio[-1] == pytest.approx(1, abs=1e-14)


def test_rodent_table1(rodent):
    s = scale(rodent, iters=500)
    assert s.status == "oscillating_period_2"
    tail = sorted(np.round(s.c2dist[-2:], 7), reverse=True)
    np.testing.assert_allclose(tail, RODENT_C2, atol=1e-6)
    assert s.c2dist[-1] == pytest.approx(257.13691, abs=1e-2)
    assert s.ratio[-1] == pytest.approx(RODENT_RATIO, abs=1e-8)
    assert s.ratio[-2] == pytest.approx(RODENT_RATIO, abs=1e-8)


def test_rodent_blocks_table2(rodent):
    part = detect_blocks(scale(rodent, iters=500))
    assert part.k == 4 and part.kind == "reducible"
    got = {tuple(j + 1 for j in b.cols): (tuple(i + 1 for i in b.rows), 100 * b.row_marginal, 100 * b.col_marginal)
           for b in part.blocks}
    assert got[(1,)][0] == (9, 10, 14, 17, 21, 24)
    assert got[(2,)][0] == (7, 8, 11, 15, 16, 22, 25)
    assert got[(7, 9)][0] == (2, 4, 6)
    assert got[(3, 4, 5, 6, 8)][0] == (1, 3, 5, 12, 13, 18, 19, 20, 23, 26, 27, 28)
    for cols, c in (((1,), 36.23), ((2,), 29.96), ((3, 4, 5, 6, 8), 5.25), ((7, 9), 3.76)):
        assert got[cols][2] == pytest.approx(c, abs=0.01)
    # frozen row marginals
    assert got[(3, 4, 5, 6, 8)][1] == pytest.approx(2.19, abs=0.01)
    assert got[(7, 9)][1] == pytest.approx(2.51, abs=0.01)
    assert part.uncovered_rows == () and part.uncovered_cols == ()


def test_rodent_blocks_same_at_previous_iteration(rodent):
    s = scale(rodent)
    a, b = detect_blocks(s, which=-1), detect_blocks(s, which=-2)
    assert [(x.rows, x.cols) for x in a.blocks] == [(x.rows, x.cols) for x in b.blocks]


def test_rodent_implied_scalings(rodent):
    a, b, resid = scale(rodent).implied_scalings()
    assert resid <= 1e-6
    assert np.all(np.isfinite(a)) and np.all(np.isfinite(b))


def test_scale_argument_validation():
    with pytest.raises(ValueError):
        scale(CountTable(np.ones((2, 2))), iters=0)
    with pytest.raises(ValueError):
        scale(CountTable(np.ones((2, 2))), epsilon=0)


def test_epsilon_regularization_makes_positive():
    s = scale(load_fixture("example3"), epsilon=1e-3)
    assert np.all(s.d > 0)
    assert s.status == "converged"


@given(sparse_tables())
def test_zeros_absorbing(a):
    s = scale(CountTable(a), iters=50)
    for d in s.snapshots:
        np.testing.assert_array_equal(d[a == 0], 0)
    np.testing.assert_allclose(s.q, s.d / a.size, rtol=1e-14, atol=0)
    assert abs(mass_ratio(s.d) - s.ratio[-1]) <= 1e-12


@given(positive_tables(7, 7, lo=1.0, hi=10.0))
def test_positive_tables_converge(a):
    # the rate depends on how close the table is to a reducible pattern, so
    # the dynamic range is bounded; two-level 1/10 patterns need under 100 steps
    s = scale(CountTable(a), iters=500, tol=1e-8)
    assert s.status == "converged"
    assert s.ratio[-1] == pytest.approx(1, abs=1e-9)
    q = s.correspondence()
    np.testing.assert_allclose(q.row_masses, 1 / a.shape[0], atol=1e-8)
    assert detect_blocks(s).k == 1


def test_random_10x7_converge(rng):
    for _ in range(10):
        s = scale(CountTable(rng.uniform(0.01, 100, size=(10, 7))))
        assert s.status == "converged"
        assert s.ratio[-1] == pytest.approx(1, abs=1e-9)


@given(sparse_tables())
def test_scaling_factorizes_within_blocks(a):
    s = scale(CountTable(a), iters=300)
    _, _, resid = s.implied_scalings()
    assert resid <= 1e-6


def test_example2_blocks():
    part = detect_blocks(scale(load_fixture("example2")))
    assert part.k == 2
    assert [(b.rows, b.cols) for b in part.blocks] == [((0,), (0, 1, 2)), ((1, 2), (3,))]


def test_detect_blocks_permutation_invariant(rodent, rng):
    pr, pc = rng.permutation(28), rng.permutation(9)
    base = detect_blocks(scale(rodent))
    perm = detect_blocks(scale(CountTable(rodent.values[np.ix_(pr, pc)])))
    key = {frozenset(b.cols): frozenset(b.rows) for b in base.blocks}
    key2 = {frozenset(int(pc[j]) for j in b.cols): frozenset(int(pr[i]) for i in b.rows) for b in perm.blocks}
    assert key == key2


def test_unit_singular_count_blocks(rng):
    p = to_correspondence(CountTable(block_diagonal([(2, 3), (3, 2), (2, 2)], rng)))
    rep = unit_singular_count(p)
    assert rep.m == 2 and rep.blocks == 3


def test_unit_singular_count_rodent(rodent):
    raw = unit_singular_count(to_correspondence(rodent))
    assert raw.m == 0 and raw.advisory
    assert raw.rho1 == pytest.approx(0.8639, abs=5e-4)
    s = scale(rodent)
    assert unit_singular_count(s.correspondence(-1)).m == 3
    assert unit_singular_count(s.correspondence(-2)).m == 3


def test_trace_csv_format():
    s = scale(load_fixture("example3"))
    text = trace_to_csv(s, last=2, header_lines=["x"])
    lines = text.splitlines()
    assert lines[0] == "# x" and lines[1] == "iteration,c2dist,ratio"
    assert lines[-1] == "500,4.128788e-03,9.999990e-01"
    assert len(lines) == 4


def test_partition_json_labels():
    t = load_fixture("example2")
    js = detect_blocks(scale(t)).to_json(t.row_labels, t.col_labels)
    assert js["k"] == 2 and js["blocks"][1]["rows"] == ["r2", "r3"]
