import numpy as np
import pytest

from paneval import linalg
from paneval.errors import (
    DegenerateInputError,
    DimensionMismatchError,
    InvalidInputError,
    NotPsdError,
)


def random_spd(rng, d, rank=None):
    r = rank if rank is not None else d
    b = rng.standard_normal((d, r))
    return b @ b.T


def test_as_vector_rejects_bad_shapes():
    with pytest.raises(InvalidInputError):
        linalg.as_vector([[1.0, 2.0]])
    with pytest.raises(InvalidInputError):
        linalg.as_vector([])
    with pytest.raises(InvalidInputError):
        linalg.as_vector([1.0, np.nan])
    with pytest.raises(InvalidInputError):
        linalg.as_vector([1.0, np.inf])


def test_as_matrix_rejects_bad_shapes():
    with pytest.raises(InvalidInputError):
        linalg.as_matrix([1.0, 2.0])
    with pytest.raises(InvalidInputError):
        linalg.as_matrix(np.empty((0, 3)))
    with pytest.raises(InvalidInputError):
        linalg.as_matrix([[1.0], [np.nan]])


def test_mean_vector_matches_numpy():
    rng = np.random.default_rng(11)
    for _ in range(50):
        rows = rng.standard_normal((rng.integers(1, 20), rng.integers(1, 8)))
        np.testing.assert_allclose(linalg.mean_vector(rows), rows.mean(axis=0), rtol=0, atol=0)


def test_covariance_matches_numpy_cov():
    # Sample covariance with the N-1 divisor, cross-checked against np.cov.
    rng = np.random.default_rng(12)
    for _ in range(50):
        n = int(rng.integers(2, 30))
        d = int(rng.integers(1, 8))
        rows = rng.standard_normal((n, d))
        got = linalg.covariance(rows)
        want = np.cov(rows, rowvar=False).reshape(d, d)
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)
        np.testing.assert_array_equal(got, got.T)


def test_covariance_needs_two_samples():
    with pytest.raises(InvalidInputError):
        linalg.covariance(np.ones((1, 3)))


def test_cosine_similarity_hand_computed():
    a = np.array([1.0, 2.0, 3.0])
    b = np.array([-2.0, 0.5, 1.0])
    want = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
    assert abs(linalg.cosine_similarity(a, b) - want) < 1e-12


def test_cosine_similarity_bounds_and_scaling():
    rng = np.random.default_rng(13)
    for _ in range(200):
        d = int(rng.integers(1, 16))
        a = rng.standard_normal(d)
        b = rng.standard_normal(d)
        if np.linalg.norm(a) == 0 or np.linalg.norm(b) == 0:
            continue
        s = linalg.cosine_similarity(a, b)
        assert -1.0 <= s <= 1.0
        # invariant under positive rescaling of either argument
        assert abs(linalg.cosine_similarity(3.7 * a, b) - s) < 1e-12
        assert abs(linalg.cosine_similarity(a, 0.02 * b) - s) < 1e-12
    assert linalg.cosine_similarity([1.0, 0.0], [1.0, 0.0]) == 1.0
    assert linalg.cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0


def test_cosine_similarity_errors():
    with pytest.raises(DimensionMismatchError):
        linalg.cosine_similarity([1.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(DegenerateInputError):
        linalg.cosine_similarity([0.0, 0.0], [1.0, 0.0])


def test_sqrtm_psd_squares_back():
    rng = np.random.default_rng(14)
    for _ in range(50):
        d = int(rng.integers(1, 24))
        a = random_spd(rng, d)
        root = linalg.sqrtm_psd(a)
        np.testing.assert_array_equal(root, root.T)
        err = np.linalg.norm(root @ root - a) / max(np.linalg.norm(a), 1e-300)
        assert err < 1e-10


def test_sqrtm_psd_rank_deficient():
    rng = np.random.default_rng(15)
    a = random_spd(rng, 16, rank=3)
    root = linalg.sqrtm_psd(a)
    assert np.linalg.norm(root @ root - a) <= 1e-8 * np.linalg.norm(a)


def test_sqrtm_psd_rejects_indefinite():
    a = np.diag([1.0, -1.0])
    with pytest.raises(NotPsdError):
        linalg.sqrtm_psd(a)


def test_sqrtm_psd_clamps_tiny_negative_eigenvalues():
    # Eigenvalues a hair below zero (within tolerance) are treated as zero.
    a = np.diag([1.0, -1e-14])
    root = linalg.sqrtm_psd(a)
    assert root[1, 1] == 0.0


def test_sqrtm_psd_rejects_asymmetric():
    a = np.array([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(InvalidInputError):
        linalg.sqrtm_psd(a)


def test_trace_sqrt_psd_matches_full_root():
    rng = np.random.default_rng(16)
    for _ in range(50):
        d = int(rng.integers(1, 24))
        a = random_spd(rng, d)
        want = float(np.trace(linalg.sqrtm_psd(a)))
        assert abs(linalg.trace_sqrt_psd(a) - want) < 1e-9 * max(1.0, abs(want))


def test_trace_matches_numpy():
    rng = np.random.default_rng(17)
    a = rng.standard_normal((6, 6))
    assert linalg.trace(a) == pytest.approx(float(np.trace(a)), abs=0)
