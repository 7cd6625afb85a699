import numpy as np
import pytest

from blindeep import (Partition, eig_sym, laplacian, structural_eigenpairs, structural_residual,
                      top_r)
from blindeep.spectral import EigenDecomposition, jacobi_eigh

from conftest import planted


def check_decomposition(a, dec):
    assert np.all(np.diff(dec.values) >= 0)
    v = dec.vectors
    np.testing.assert_allclose(v.T @ v, np.eye(len(a)), atol=1e-10)
    recon = (v * dec.values) @ v.T
    assert np.linalg.norm(a - recon) <= 1e-9 * max(np.linalg.norm(a), 1.0)
    lead = v[np.argmax(np.abs(v), axis=0), np.arange(v.shape[1])]
    assert np.all(lead > 0)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_diagonal(method):
    dec = eig_sym(np.diag([3.0, 1.0, 2.0]), method)
    np.testing.assert_allclose(dec.values, [1, 2, 3])
    np.testing.assert_allclose(np.abs(dec.vectors), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_random_symmetric(method, rng):
    for n in (1, 2, 5, 17):
        x = rng.standard_normal((n, n))
        a = x + x.T
        check_decomposition(a, eig_sym(a, method))


def test_jacobi_agrees_with_lapack(rng):
    for _ in range(10):
        x = rng.standard_normal((12, 12))
        a = x @ x.T
        np.testing.assert_allclose(eig_sym(a, "jacobi").values, np.linalg.eigvalsh(a),
                                   atol=1e-10)


def test_jacobi_raw_output_is_eigenpairs(rng):
    x = rng.standard_normal((6, 6))
    a = x + x.T
    w, v = jacobi_eigh(a)
    np.testing.assert_allclose(a @ v, v * w, atol=1e-10)


def test_rejects_nonsymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eig_sym(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eig_sym(np.eye(2), method="qr")


def test_connected_laplacian_kernel(eleven):
    g, _ = eleven
    dec = eig_sym(laplacian(g))
    assert abs(dec.values[0]) < 1e-12
    np.testing.assert_allclose(dec.vectors[:, 0], 1 / np.sqrt(11), atol=1e-12)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_worked_example_structural_vectors(eleven, method):
    g, p = eleven
    lap = laplacian(g).astype(float)
    dec = eig_sym(lap, method)
    check_decomposition(lap, dec)
    # vectors constant on cells among the full decomposition: exactly three
    const = [k for k in range(11) if structural_residual(dec.vectors[:, k], p) < 1e-18]
    assert len(const) == 3
    np.testing.assert_allclose(sorted(dec.values[const]), sorted(structural_eigenpairs(g, p)[0]),
                               atol=1e-12)


def test_top_r_rank_one_update():
    e1 = np.eye(5)[:, :1]
    sp = top_r(eig_sym(np.eye(5) + e1 @ e1.T), 1)
    np.testing.assert_allclose(np.abs(sp.vectors[:, 0]), e1[:, 0], atol=1e-12)
    assert sp.values[0] == pytest.approx(2.0)
    assert sp.next_value == pytest.approx(1.0)
    assert sp.gap == pytest.approx(1.0)
    assert not sp.tie


def test_top_r_bounds_and_tie():
    dec = eig_sym(np.diag([1.0, 2.0, 2.0, 3.0]))
    sp = top_r(dec, 3)
    assert sp.values.tolist() == [3.0, 2.0, 2.0] and sp.next_value == 1.0
    assert top_r(dec, 2).tie
    for r in (0, 4):
        with pytest.raises(ValueError):
            top_r(dec, r)


def test_top_r_scale_invariance(rng):
    x = rng.standard_normal((8, 8))
    a = x @ x.T
    s1, s2 = top_r(eig_sym(a), 3), top_r(eig_sym(7.5 * a), 3)
    np.testing.assert_allclose(s1.vectors, s2.vectors, atol=1e-10)
    np.testing.assert_allclose(7.5 * s1.values, s2.values)


def test_structural_residual_examples():
    p = Partition(((0, 1),))
    assert structural_residual(np.array([[0.0], [2.0]]), p) == pytest.approx(2.0)
    assert structural_residual(np.ones((5, 2)), Partition(((0, 3), (1, 2, 4)))) == 0.0
    with pytest.raises(ValueError):
        structural_residual(np.ones((4, 1)), p)


def test_structural_residual_oracle(rng):
    # loop over vertices against the vectorized cell sums
    for _ in range(50):
        n = int(rng.integers(2, 15))
        v = rng.standard_normal((n, 3))
        p = Partition.from_labels(rng.integers(0, 4, n))
        expect = 0.0
        for cell in p.cells:
            mean = sum(v[i] for i in cell) / len(cell)
            expect += sum(float((v[i] - mean) @ (v[i] - mean)) for i in cell)
        assert structural_residual(v, p) == pytest.approx(expect, abs=1e-12)


def test_planted_laplacian_has_structural_eigenvectors(rng):
    for _ in range(30):
        inst = planted(rng)
        lap = laplacian(inst.graph).astype(float)
        vals, vecs = structural_eigenpairs(inst.graph, inst.truth)
        assert structural_residual(vecs, inst.truth) <= 1e-18
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(inst.truth.r), atol=1e-12)
        np.testing.assert_allclose(lap @ vecs, vecs * vals, atol=1e-9)
        # the structural values are eigenvalues of the quotient Laplacian
        np.testing.assert_allclose(sorted(np.linalg.eigvals(inst.quotient.laplacian).real),
                                   vals, atol=1e-9)
