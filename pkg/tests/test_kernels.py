"""Kernel closed forms, symmetry, and Gram-matrix health."""

import math

import numpy as np
import pytest

from spectralbias import KernelSpec, cross_gram, diagonal_values, eval_kernel, gram_matrix
from spectralbias.kernels import trace_estimate, unit_cosine_profile

NNGP = KernelSpec("arccos-nngp-1layer", 3)
NTK = KernelSpec("arccos-ntk-1layer", 3)
LINEAR = KernelSpec("linear-scaled", 4)


def test_profile_closed_form_endpoints():
    # aligned, orthogonal, and antipodal unit vectors
    assert unit_cosine_profile(NNGP, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert unit_cosine_profile(NNGP, 0.0) == pytest.approx(1.0 / math.pi, abs=1e-15)
    assert unit_cosine_profile(NNGP, -1.0) == pytest.approx(0.0, abs=1e-15)
    assert unit_cosine_profile(NTK, 1.0) == pytest.approx(2.0, abs=1e-15)
    assert unit_cosine_profile(NTK, 0.0) == pytest.approx(1.0 / math.pi, abs=1e-15)
    assert unit_cosine_profile(NTK, -1.0) == pytest.approx(0.0, abs=1e-15)


def test_linear_profile_is_scaled_cosine():
    t = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(unit_cosine_profile(LINEAR, t), t / 4)


def test_profile_rejects_cosine_far_outside_range():
    with pytest.raises(ValueError, match="cosine"):
        unit_cosine_profile(NNGP, 1.001)


def test_profile_clamps_roundoff_cosine():
    val = unit_cosine_profile(NNGP, 1.0 + 5e-13)
    assert val == pytest.approx(1.0, abs=1e-12)
    assert np.isfinite(val)


def test_eval_kernel_degree_one_homogeneity():
    rng = np.random.default_rng(3)
    x, y = rng.standard_normal((2, 3))
    base = eval_kernel(NNGP, x, y)
    assert eval_kernel(NNGP, 2.5 * x, 0.5 * y) == pytest.approx(1.25 * base, rel=1e-12)


def test_eval_kernel_rotation_invariance():
    rng = np.random.default_rng(4)
    x, y = rng.standard_normal((2, 3))
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    for spec in (NNGP, NTK):
        assert eval_kernel(spec, q @ x, q @ y) == pytest.approx(
            eval_kernel(spec, x, y), rel=1e-12
        )


def test_eval_kernel_rejects_zero_norm_input():
    with pytest.raises(ValueError, match="zero-norm"):
        eval_kernel(NNGP, np.zeros(3), np.ones(3))


def test_eval_kernel_rejects_wrong_dimension():
    with pytest.raises(ValueError, match="expected"):
        eval_kernel(NNGP, np.ones(5), np.ones(5))


def test_kernel_spec_rejects_unknown_family_and_tag():
    with pytest.raises(ValueError, match="family"):
        KernelSpec("rbf", 3)
    with pytest.raises(ValueError, match="symmetry_tag"):
        KernelSpec("linear-scaled", 3, symmetry_tag="mirror")
    with pytest.raises(ValueError, match="input_dim"):
        KernelSpec("linear-scaled", 0)


def test_cross_gram_matches_pairwise_eval():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((4, 3))
    B = rng.standard_normal((6, 3))
    for spec in (NNGP, NTK):
        G = cross_gram(spec, A, B)
        assert G.shape == (4, 6)
        for i in range(4):
            for j in range(6):
                assert G[i, j] == pytest.approx(eval_kernel(spec, A[i], B[j]), rel=1e-12)


def test_gram_matrix_exactly_symmetric_and_psd():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((40, 3))
    for spec in (NNGP, NTK):
        K = gram_matrix(spec, X)
        assert np.array_equal(K, K.T)
        eigs = np.linalg.eigvalsh(K)
        assert eigs.min() >= -1e-10 * np.trace(K)


def test_diagonal_values_closed_form():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((10, 3))
    sq = np.sum(X**2, axis=1)
    np.testing.assert_allclose(diagonal_values(NNGP, X), sq, rtol=1e-12)
    np.testing.assert_allclose(diagonal_values(NTK, X), 2 * sq, rtol=1e-12)
    X4 = rng.standard_normal((10, 4))
    np.testing.assert_allclose(
        diagonal_values(LINEAR, X4), np.sum(X4**2, axis=1) / 4, rtol=1e-12
    )


def test_trace_estimate_constant_on_unit_sphere():
    def sphere(n, rng):
        x = rng.standard_normal((n, 3))
        return x / np.linalg.norm(x, axis=1, keepdims=True)

    est = trace_estimate(NNGP, sphere, n_mc=200, seed=0)
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.stderr == pytest.approx(0.0, abs=1e-12)
    assert est.n_mc == 200


def test_trace_estimate_rejects_empty_sample():
    with pytest.raises(ValueError, match="n_mc"):
        trace_estimate(NNGP, lambda n, rng: np.ones((n, 3)), n_mc=0, seed=0)
