import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import positive_tables, sparse_tables
from sica import (
    CountTable,
    ca_decompose,
    ca_decompose_sparse,
    ca_index,
    load_fixture,
    lra_decompose,
    lra_index,
    merge_equivalent,
    mfca,
    principal_map,
    row_closure,
    sign_transform,
    sparse_sign,
    to_correspondence,
)
from sica.ca import first_non_unit_dims
from sica.verify import RODENT_MFCA_SV, RODENT_SV, block_diagonal


def P(a):
    return to_correspondence(CountTable(np.asarray(a, dtype=float)))


def check_constraints(d, atol=1e-8):
    r, c = d.weights.row_weights, d.weights.col_weights
    np.testing.assert_allclose(r @ d.row_scores, 0, atol=atol)
    np.testing.assert_allclose(c @ d.col_scores, 0, atol=atol)
    np.testing.assert_allclose(d.row_scores.T @ (r[:, None] * d.row_scores), np.eye(d.n_dims), atol=atol)
    np.testing.assert_allclose(d.col_scores.T @ (c[:, None] * d.col_scores), np.eye(d.n_dims), atol=atol)


def test_independence_has_no_dimensions():
    d = ca_decompose(P(np.outer([1, 2, 3], [4, 5, 6])))
    assert d.n_dims == 0


def test_single_row_is_empty():
    d = ca_decompose(P([[1, 2, 3]]))
    assert d.n_dims == 0 and d.row_scores.shape == (1, 0)


@pytest.mark.parametrize("variant", ["raw", "rs", "sign", "rs_sign"])
def test_rodent_spectra(rodent, variant):
    t = {"raw": rodent, "rs": row_closure(rodent), "sign": sign_transform(rodent),
         "rs_sign": row_closure(sign_transform(rodent))}[variant]
    sv = ca_decompose(to_correspondence(t)).sigmas
    np.testing.assert_allclose(sv[:6], RODENT_SV[variant], atol=5e-4)


def test_rodent_reconstruction_and_constraints(rodent):
    p = to_correspondence(rodent)
    d = ca_decompose(p)
    np.testing.assert_allclose(d.reconstruct(), ca_index(p).values, atol=1e-10)
    check_constraints(d)
    assert d.shares.sum() == pytest.approx(1)


def test_orientation_largest_row_entry_positive(rodent):
    d = ca_decompose(to_correspondence(rodent))
    idx = np.argmax(np.abs(d.row_scores), axis=0)
    assert np.all(d.row_scores[idx, np.arange(d.n_dims)] > 0)


@given(sparse_tables(7, 7))
def test_ca_properties(a):
    p = P(a)
    d = ca_decompose(p)
    assert np.all(d.sigmas <= 1 + 1e-10)
    assert np.all(np.diff(d.sigmas) <= 1e-12)
    check_constraints(d)
    np.testing.assert_allclose(d.reconstruct(), ca_index(p).values, atol=1e-8)


@given(sparse_tables(5, 5), st.integers(2, 4))
def test_distributional_equivalence(a, times):
    # append a proportional copy of the first row
    t = CountTable(np.vstack([a, times * a[:1]]))
    merged = merge_equivalent(t).merged
    s1 = ca_decompose(to_correspondence(t)).sigmas
    s2 = ca_decompose(to_correspondence(merged)).sigmas
    n = min(len(s1), len(s2))
    np.testing.assert_allclose(s1[:n], s2[:n], atol=1e-10)
    assert np.all(s1[n:] <= 1e-10) and np.all(s2[n:] <= 1e-10)


@pytest.mark.parametrize("sizes", [[(2, 3), (3, 2)], [(2, 2), (3, 2), (2, 3)], [(2, 2)] * 4])
def test_benzecri_blocks(sizes, rng):
    sv = ca_decompose(P(block_diagonal(sizes, rng))).sigmas
    assert int(np.sum(np.abs(sv - 1) <= 1e-10)) == len(sizes) - 1


def test_example2_one_unit_value():
    sv = ca_decompose(to_correspondence(load_fixture("example2"))).sigmas
    assert int(np.sum(np.abs(sv - 1) <= 1e-10)) == 1


# sparse path

def test_sparse_matches_dense(rodent):
    dense = ca_decompose(to_correspondence(sign_transform(rodent)))
    sp = ca_decompose_sparse(sparse_sign(rodent.values), k=3)
    np.testing.assert_allclose(sp.sigmas, dense.sigmas[:3], atol=1e-10)
    np.testing.assert_allclose(np.abs(sp.row_scores), np.abs(dense.row_scores[:, :3]), atol=1e-8)


def test_sparse_large_table():
    rng = np.random.default_rng(0)
    x = (rng.random((300, 2000)) < 0.01).astype(float)
    x[np.arange(300), rng.integers(0, 2000, 300)] = 1
    x[rng.integers(0, 300, 2000), np.arange(2000)] = 1
    d = ca_decompose_sparse(sparse_sign(x), k=2)
    dense = ca_decompose(P(x)).sigmas[:2]
    np.testing.assert_allclose(d.sigmas, dense, atol=1e-8)


def test_sparse_bad_k():
    with pytest.raises(ValueError):
        ca_decompose_sparse(np.ones((3, 3)), k=3)


# mfca

def test_mfca_positive_table_is_bistochastic(rng):
    res = mfca(CountTable(rng.uniform(1, 10, size=(5, 4))))
    q = res.scaling.correspondence()
    np.testing.assert_allclose(q.row_masses, 1 / 5, atol=1e-6)
    np.testing.assert_allclose(q.col_masses, 1 / 4, atol=1e-6)
    assert res.partition.k == 1 and len(res.block_decompositions) == 1


def test_mfca_rodent(rodent):
    for which in (-1, -2):
        res = mfca(rodent, iters=500, which=which)
        sv = res.decomposition.sigmas
        np.testing.assert_allclose(sv[:3], 1, atol=1e-5)
        np.testing.assert_allclose(sv[3:8], RODENT_MFCA_SV, atol=5e-4)
        assert res.partition.k == 4
    a = mfca(rodent, which=-1).decomposition.sigmas
    b = mfca(rodent, which=-2).decomposition.sigmas
    np.testing.assert_allclose(a, b, atol=1e-6)


def test_mfca_block_spectra_combine(rodent):
    # the global non-unit spectrum is the union of the block spectra
    res = mfca(rodent)
    blocks = np.sort(np.concatenate([d.sigmas for d in res.block_decompositions]))[::-1]
    glob = res.decomposition.sigmas[3:]
    np.testing.assert_allclose(glob[:len(blocks)], blocks[:len(glob)], atol=1e-6)


def test_mfca_example2():
    res = mfca(load_fixture("example2"))
    assert int(np.sum(np.abs(res.decomposition.sigmas - 1) <= 1e-6)) == 1
    assert res.partition.k == 2


@given(positive_tables(5, 5, lo=1.0, hi=10.0), st.data())
def test_mfca_scale_invariant(a, data):
    I, J = a.shape
    r = np.array(data.draw(st.lists(st.floats(0.1, 10), min_size=I, max_size=I)))
    c = np.array(data.draw(st.lists(st.floats(0.1, 10), min_size=J, max_size=J)))
    s1 = mfca(CountTable(a), iters=2000, tol=1e-13).decomposition.sigmas
    s2 = mfca(CountTable(r[:, None] * a * c), iters=2000, tol=1e-13).decomposition.sigmas
    n = min(len(s1), len(s2))
    np.testing.assert_allclose(s1[:n], s2[:n], atol=1e-8)


# lra

def test_lra_2x2():
    d = lra_decompose(P([[1, 2], [3, 4]]))
    assert d.n_dims == 1
    assert d.sigmas[0] == pytest.approx(0.25 * np.log(6 / 4), abs=1e-14)
    assert d.sigmas[0] == pytest.approx(0.10137, abs=1e-5)
    np.testing.assert_allclose(d.row_scores[:, 0], [1, -1], atol=1e-14)
    np.testing.assert_allclose(d.col_scores[:, 0], [-1, 1], atol=1e-14)


def test_lra_constant_is_empty():
    assert lra_decompose(P(np.full((3, 3), 2.0))).n_dims == 0


@given(positive_tables())
def test_lra_identities(a):
    p = P(a)
    d = lra_decompose(p)
    I, J = a.shape
    np.testing.assert_allclose(d.reconstruct(), lra_index(p).values, atol=1e-8)
    np.testing.assert_allclose(d.row_scores.sum(axis=0) / I, 0, atol=1e-8)
    np.testing.assert_allclose((d.row_scores**2).sum(axis=0) / I, 1, atol=1e-8)
    np.testing.assert_allclose((d.col_scores**2).sum(axis=0) / J, 1, atol=1e-8)


def test_lra_zero_cell_error():
    with pytest.raises(ValueError):
        lra_decompose(P([[0, 1], [1, 1]]))


# maps

def test_rodent_map_points(rodent):
    m = principal_map(ca_decompose(to_correspondence(rodent)), (1, 2))
    assert m.row_coords.shape == (28, 2) and m.col_coords.shape == (9, 2)
    assert m.axis_label(0).startswith("Dim 1 (")
    assert len(m.to_csv().splitlines()) == 1 + 37


def test_map_errors():
    with pytest.raises(ValueError):
        principal_map(ca_decompose(P([[1, 2, 3]])))
    with pytest.raises(ValueError, match="out of range"):
        principal_map(ca_decompose(P([[1, 2], [3, 5]])), (1, 2))


def test_mfca_first_non_unit_dims(rodent):
    assert first_non_unit_dims(mfca(rodent).decomposition) == (4, 5)


def test_decomposition_json(rodent):
    js = ca_decompose(to_correspondence(rodent)).to_json()
    assert js["method"] == "ca" and len(js["row_labels"]) == 28
    assert len(js["sigmas"]) == len(js["row_scores"][0])
