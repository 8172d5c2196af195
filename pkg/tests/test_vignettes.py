"""Worked examples: manifold closed forms, parity normalization with an
independent quadrature oracle, and the copying-head geometry."""

import math

import numpy as np
import pytest
from scipy import integrate

from spectralbias import (
    CopyingHeadSpec,
    copying_head_bound,
    copying_head_feature,
    copying_head_feature_norm,
    copying_head_feature_norm_sup,
    copying_head_overlap_terms,
    copying_head_target_norm,
    copying_head_z_report,
    irrep_eigenvalue_bound,
    manifold_vignette,
    manifold_vignette_mc,
    parity_normalization,
    parity_normalization_mc,
    parity_sample_complexity,
    sequence_view,
    synth_onehot_sequences,
)
from spectralbias.vignettes import _STIRLING_BASE


# ------------------------------------------------------------- manifold


def test_manifold_closed_forms():
    table = manifold_vignette(d=8, sigma2=200.0, P=200)
    assert table["eta"] == 1.0
    assert table["L_ek"] == pytest.approx(0.5)
    assert table["L_xq_ek"] == pytest.approx(table["L_ek"])
    assert table["Pstar_exact"] == pytest.approx(200.0)
    assert table["Pstar_bound"] == pytest.approx(100.0)


def test_manifold_closed_forms_scale_with_ridge():
    table = manifold_vignette(d=5, sigma2=0.1, P=1)
    assert table["Pstar_exact"] == pytest.approx(0.1)
    assert table["Pstar_bound"] == pytest.approx(0.05)


def test_manifold_mc_agrees_with_ek_curve():
    mean, stderr = manifold_vignette_mc(
        d=4, sigma2=25.0, P=25, n_seeds=8, n_heldout=4000, seed=0
    )
    assert stderr < 0.05
    assert mean == pytest.approx(0.5, abs=0.1)


# --------------------------------------------------------------- parity


def quadrature_parity_normalization(d: int) -> float:
    """Independent oracle: build E[prod_i x_i^2] on the sphere by splitting
    off one coordinate at a time with 1-D quadrature, then scale by d^d.

    On S^(k-1) the first coordinate t = cos(u) has density proportional to
    sin(u)^(k-2) on [0, pi], and conditioned on t the remaining coordinates
    are a radius-sqrt(1-t^2) copy of S^(k-2); each of the k-1 squared
    coordinates in the product picks up a factor sin(u)^2.
    """
    moment = 1.0  # over S^0 the single squared coordinate is 1
    for k in range(2, d + 1):
        weight_mass, _ = integrate.quad(
            lambda u: math.sin(u) ** (k - 2), 0.0, math.pi
        )
        raw, _ = integrate.quad(
            lambda u: math.cos(u) ** 2 * math.sin(u) ** (3 * k - 4), 0.0, math.pi
        )
        moment *= raw / weight_mass
    return d**d * moment


def test_parity_normalization_small_values_exact():
    assert parity_normalization(2) == 0.5
    assert parity_normalization(4) == pytest.approx(2.0 / 15.0, rel=1e-15)
    assert parity_normalization(6) == pytest.approx(0.03616071428571429, rel=1e-12)
    assert parity_normalization(8) == pytest.approx(0.009850889850889851, rel=1e-12)


@pytest.mark.parametrize("d", [2, 4, 6, 8])
def test_parity_normalization_matches_quadrature_oracle(d):
    assert parity_normalization(d) == pytest.approx(
        quadrature_parity_normalization(d), rel=1e-8
    )


def test_parity_normalization_survives_large_dimension():
    val = parity_normalization(200)
    assert val == pytest.approx(9.147909629933688e-57, rel=1e-10)
    assert 0 < val < 1e-50


def test_parity_normalization_rejects_odd_dimension():
    with pytest.raises(ValueError):
        parity_normalization(3)


def test_parity_mc_agrees_with_exact():
    mean, stderr = parity_normalization_mc(4, n_mc=200000, seed=0)
    exact = parity_normalization(4)
    assert mean == pytest.approx(exact, abs=4 * stderr)
    assert abs(mean - exact) / exact < 0.05


def test_parity_sample_complexity_wiring():
    comp = parity_sample_complexity(20, sigma2=1.0, eps=0.0, trace=1.0)
    # exact = n_hat * degeneracy / trace; ratio to Stirling near 1 by d=20
    from spectralbias import degeneracy

    expected = parity_normalization(20) * degeneracy(20, 20)
    assert comp.exact == pytest.approx(expected, rel=1e-12)
    assert comp.exact / comp.stirling == pytest.approx(1.0, abs=0.1)
    # eps and trace enter as exact scale factors
    half = parity_sample_complexity(20, sigma2=1.0, eps=0.5, trace=2.0)
    assert half.exact == pytest.approx(expected / 4.0, rel=1e-12)


def test_parity_growth_rate_is_exponential():
    # the log of the Stirling-free exact complexity grows linearly in d with
    # slope log(4e/3^1.5)
    dims = np.arange(100, 201, 2)
    logs = np.array(
        [math.log(parity_sample_complexity(int(d), 1.0, 0.0, 1.0).exact) for d in dims]
    )
    slope = np.polyfit(dims, logs, 1)[0]
    assert slope == pytest.approx(math.log(_STIRLING_BASE), rel=0.01)


# --------------------------------------------------------- copying head


def test_copying_head_spec_invariants():
    head = CopyingHeadSpec(L=4, V=8)
    assert head.z**2 == pytest.approx(4 - 1 + 1 / 8, rel=1e-15)
    assert head.dim_irrep == 3 * 7
    assert head.trace == 1.0
    with pytest.raises(ValueError):
        CopyingHeadSpec(L=1, V=8)
    with pytest.raises(ValueError):
        CopyingHeadSpec(L=4, V=1)


def _tokens(head: CopyingHeadSpec, n: int, seed: int) -> np.ndarray:
    ss = synth_onehot_sequences(n, L_ctx=head.L, V_vocab=head.V, seed=seed)
    return sequence_view(ss)


def test_copying_head_feature_shape_and_component_sums():
    head = CopyingHeadSpec(L=4, V=8)
    X = _tokens(head, 30, seed=0)
    phi = copying_head_feature(X, head)
    assert phi.shape == (30, 4, 9)
    # vocabulary components of every position sum to the same constant
    expected = -(head.V + 1) / (head.V * head.z)
    np.testing.assert_allclose(phi.sum(axis=2), expected, atol=1e-12)


def test_copying_head_feature_rejects_non_onehot():
    head = CopyingHeadSpec(L=4, V=8)
    X = _tokens(head, 5, seed=1).copy()
    X[0, 0, :] = 0.5
    with pytest.raises(ValueError, match="one-hot"):
        copying_head_feature(X, head)


def test_copying_head_vocabulary_permutation_equivariance():
    head = CopyingHeadSpec(L=3, V=5)
    X = _tokens(head, 20, seed=2)
    rng = np.random.default_rng(3)
    perm = rng.permutation(head.V + 1)
    phi = copying_head_feature(X, head)
    phi_perm = copying_head_feature(X[:, :, perm], head)
    np.testing.assert_allclose(phi_perm, phi[:, :, perm], atol=1e-14)


def test_copying_head_target_norm_is_context_length():
    for seed in range(20):
        head = CopyingHeadSpec(L=5, V=6)
        X = _tokens(head, 17, seed=seed)
        assert copying_head_target_norm(X, head) == pytest.approx(5.0, abs=1e-12)


def test_copying_head_sup_dominates_measured_norm():
    rng = np.random.default_rng(4)
    for _ in range(50):
        L = int(rng.integers(2, 7))
        V = int(rng.integers(2, 9))
        head = CopyingHeadSpec(L=L, V=V)
        X = _tokens(head, 25, seed=int(rng.integers(2**31)))
        sup = copying_head_feature_norm_sup(head)
        assert copying_head_feature_norm(X, head) <= sup + 1e-12


def test_copying_head_sup_is_attained_by_distinct_tokens():
    head = CopyingHeadSpec(L=3, V=6)
    # one sample whose context tokens are pairwise distinct
    X = np.zeros((1, 4, 7))
    for pos, tok in enumerate((0, 2, 4, 1)):
        X[0, pos, tok] = 1.0
    measured = copying_head_feature_norm(X, head)
    assert measured == pytest.approx(copying_head_feature_norm_sup(head), rel=1e-12)


def test_copying_head_overlap_matches_closed_form():
    head = CopyingHeadSpec(L=4, V=8)
    report = copying_head_z_report(head, n_mc=20000, seed=0)
    assert report["measured_overlap"] == pytest.approx(
        report["closed_form_vocab_Vp1"], abs=4 * report["stderr"]
    )
    assert report["claim_minus_form_Vp1"] == pytest.approx(
        report["z_claim"] - report["closed_form_vocab_Vp1"], rel=1e-12
    )


def test_copying_head_overlap_terms_are_bounded():
    head = CopyingHeadSpec(L=4, V=8)
    X = _tokens(head, 100, seed=5)
    terms = copying_head_overlap_terms(X, head)
    assert terms.shape == (100,)
    assert np.all(np.abs(terms) <= head.L * (1.0 + 1.0 / head.V) / head.z + 1e-9)


def test_copying_head_bound_consistency_at_scale():
    for L, V in ((64, 64), (128, 256)):
        head = CopyingHeadSpec(L=L, V=V)
        sup = copying_head_feature_norm_sup(head)
        bounds = copying_head_bound(head, sigma2=1.0, eps=0.0, feature_norm_D=sup,
                                    target_norm_D=float(L))
        assert bounds.asymptotic == pytest.approx(float(L) * V)
        floor = bounds.asymptotic * (1.0 - 10.0 / min(L, V))
        assert bounds.worst_case >= floor
        assert bounds.exact == pytest.approx(bounds.worst_case)


def test_copying_head_production_scale_numbers():
    head = CopyingHeadSpec(L=8192, V=2**16)
    bounds = copying_head_bound(
        head, sigma2=1.0, eps=0.0,
        feature_norm_D=copying_head_feature_norm_sup(head), target_norm_D=8192.0,
    )
    assert bounds.asymptotic == 8192.0 * 2**16
    assert abs(bounds.asymptotic / 5.4e8 - 1.0) < 0.1


def test_irrep_eigenvalue_bound_examples():
    assert irrep_eigenvalue_bound(1.0, (2 - 1) * (2 - 1)) == pytest.approx(1.0)
    assert irrep_eigenvalue_bound(7.0, 1) == pytest.approx(7.0)
    from spectralbias import degeneracy

    assert irrep_eigenvalue_bound(1.0, degeneracy(2, 2)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        irrep_eigenvalue_bound(0.0, 3)
