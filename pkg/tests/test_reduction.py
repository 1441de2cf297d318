"""Tests for PCA/POD basis fitting and projection."""

import numpy as np
import pytest

from chaosrom.errors import ConfigurationError, DegenerateDataError
from chaosrom.reduction import (ReducedBasis, explained_variance, fit_pca,
                                identity_basis, project, projection_error,
                                reconstruct, truncate_basis)


def _random_snapshots(rng, n=30, k=80):
    # Correlated rows so the spectrum decays.
    mix = rng.standard_normal((n, 6))
    latent = rng.standard_normal((6, k))
    return mix @ latent + 0.01 * rng.standard_normal((n, k))


def test_identity_basis_roundtrip():
    b = identity_basis(5)
    assert b.n == 5 and b.r == 5
    Q = np.arange(15.0).reshape(5, 3)
    assert np.array_equal(project(b, Q), Q)
    assert np.array_equal(reconstruct(b, Q), Q)


def test_basis_orthonormal_svd_path():
    rng = np.random.default_rng(0)
    Q = _random_snapshots(rng)
    basis = fit_pca(Q, r=6, method="svd")
    G = basis.basis.T @ basis.basis
    assert np.allclose(G, np.eye(6), atol=1e-12)


def test_gram_path_matches_svd_path():
    rng = np.random.default_rng(1)
    for n, k in ((20, 60), (60, 20)):
        Q = rng.standard_normal((n, k))
        a = fit_pca(Q, r=5, method="svd")
        b = fit_pca(Q, r=5, method="gram")
        # Same spectrum, same subspace (columns may differ by sign only,
        # and the sign convention fixes even that).
        assert np.allclose(a.singular_values[:10], b.singular_values[:10],
                           rtol=1e-8, atol=1e-8)
        assert np.allclose(np.abs(a.basis.T @ b.basis), np.eye(5), atol=1e-6)
        G = b.basis.T @ b.basis
        assert np.allclose(G, np.eye(5), atol=1e-10)


def test_mean_centering():
    rng = np.random.default_rng(2)
    Q = rng.standard_normal((10, 40)) + 7.0
    basis = fit_pca(Q, r=3)
    assert np.allclose(basis.mean, Q.mean(axis=1))
    uncentered = fit_pca(Q, r=3, center=False)
    assert np.array_equal(uncentered.mean, np.zeros(10))


def test_project_reconstruct_inverse_on_range():
    rng = np.random.default_rng(3)
    Q = _random_snapshots(rng)
    basis = fit_pca(Q, r=6)
    latent = project(basis, Q)
    assert latent.shape == (6, Q.shape[1])
    back = reconstruct(basis, latent)
    # Rank-6 signal plus small noise: reconstruction captures nearly all.
    assert np.linalg.norm(back - Q) / np.linalg.norm(Q) < 0.05


def test_eckart_young_tail_energy():
    # The squared relative projection error of the centered data equals
    # the tail singular energy ratio.
    rng = np.random.default_rng(4)
    Q = rng.standard_normal((40, 100))
    mean = Q.mean(axis=1)
    Qc = Q - mean[:, np.newaxis]
    for r in (1, 5, 20):
        basis = fit_pca(Q, r=r)
        err = projection_error(Qc, ReducedBasis(
            basis.basis, np.zeros(40), basis.singular_values))
        s2 = basis.singular_values ** 2
        tail = s2[r:].sum() / s2.sum()
        assert err ** 2 == pytest.approx(tail, abs=1e-10)


def test_energy_threshold_rank_two():
    rng = np.random.default_rng(5)
    U = np.linalg.qr(rng.standard_normal((20, 2)))[0]
    W = rng.standard_normal((2, 50))
    basis = fit_pca(U @ W, energy=0.999, center=False)
    assert basis.r == 2


def test_energy_one_keeps_full_rank():
    rng = np.random.default_rng(6)
    Q = rng.standard_normal((8, 30))
    basis = fit_pca(Q, energy=1.0, center=False)
    assert basis.r == 8
    assert projection_error(Q, basis) < 1e-10


def test_sign_convention_deterministic():
    rng = np.random.default_rng(7)
    Q = _random_snapshots(rng)
    a = fit_pca(Q, r=4)
    b = fit_pca(Q.copy(), r=4)
    assert np.array_equal(a.basis, b.basis)
    idx = np.argmax(np.abs(a.basis), axis=0)
    assert np.all(a.basis[idx, np.arange(4)] > 0)


def test_truncate_basis_nests():
    rng = np.random.default_rng(8)
    Q = _random_snapshots(rng)
    big = fit_pca(Q, r=6)
    small = truncate_basis(big, 3)
    assert small.r == 3
    assert np.array_equal(small.basis, big.basis[:, :3])
    assert np.array_equal(small.singular_values, big.singular_values)
    with pytest.raises(ConfigurationError):
        truncate_basis(big, 7)
    with pytest.raises(ConfigurationError):
        truncate_basis(big, 0)


def test_explained_variance_monotone():
    rng = np.random.default_rng(9)
    basis = fit_pca(rng.standard_normal((15, 40)), r=5)
    ev = explained_variance(basis)
    assert np.all(np.diff(ev) >= -1e-15)
    assert ev[-1] == pytest.approx(1.0)


def test_argument_validation():
    rng = np.random.default_rng(10)
    Q = rng.standard_normal((10, 20))
    with pytest.raises(ConfigurationError):
        fit_pca(Q)
    with pytest.raises(ConfigurationError):
        fit_pca(Q, r=3, energy=0.9)
    with pytest.raises(ConfigurationError):
        fit_pca(Q, r=11)
    with pytest.raises(ConfigurationError):
        fit_pca(Q, energy=1.5)
    with pytest.raises(ConfigurationError):
        fit_pca(Q, r=3, method="qr")


def test_degenerate_data_rejected():
    with pytest.raises(DegenerateDataError):
        fit_pca(np.zeros((5, 10)), r=2, center=False)
    # Constant columns: centering removes everything.
    with pytest.raises(DegenerateDataError):
        fit_pca(np.ones((5, 10)) * 3.0, r=2)


def test_projection_error_zero_data():
    basis = identity_basis(4)
    with pytest.raises(DegenerateDataError):
        projection_error(np.zeros((4, 5)), basis)


def test_shape_mismatches():
    basis = identity_basis(4)
    with pytest.raises(ConfigurationError):
        project(basis, np.zeros((3, 5)))
    with pytest.raises(ConfigurationError):
        reconstruct(basis, np.zeros((3, 5)))
