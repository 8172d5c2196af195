"""Closed-form calculators for three worked sample-complexity settings.

Each setting pairs analytic formulas with a Monte Carlo oracle:

  * a one-coordinate manifold where linear kernel regression has a single
    active feature and the learnability curve is known exactly;
  * the full parity function on the radius-sqrt(d) sphere, whose feature
    normalization and sample-complexity lower bound grow exponentially;
  * a copying head on one-hot token sequences, whose learnability bound
    scales as context length times vocabulary size.

Factorial ratios are evaluated with exact big-integer arithmetic and
divided once at the end: quantities like d^d / Gamma(3d/2) overflow double
precision long before d reaches 200, while Python integers do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec
from .learnability import ek_learnability, learnability
from .regression import fit, predict
from .spectrum import degeneracy
from .data import synth_manifold, synth_onehot_sequences, sequence_view

__all__ = [
    "manifold_vignette",
    "manifold_vignette_mc",
    "parity_normalization",
    "parity_normalization_mc",
    "parity_sample_complexity",
    "ParityComplexity",
    "CopyingHeadSpec",
    "CopyingHeadBound",
    "copying_head_feature",
    "copying_head_feature_norm",
    "copying_head_feature_norm_sup",
    "copying_head_target_norm",
    "copying_head_overlap_terms",
    "copying_head_z_report",
    "copying_head_bound",
    "irrep_eigenvalue_bound",
]

_STIRLING_BASE = 4.0 * math.e / 3.0**1.5
_ONE_HOT_TOL = 1e-12


def manifold_vignette(d: int, sigma2: float, P: int) -> dict:
    """Closed forms for linear regression on the one-coordinate manifold.

    The data law puts x_1 ~ N(0, d) with all other coordinates zero and
    y = x_1, so the linear-scaled kernel has a single active feature with
    unit scale eta = 1.  Because the predictor is always a multiple of
    x_1, the learnability measured on the data and the cross-dataset
    learnability under the standard Gaussian auxiliary measure coincide.

    Args:
        d: ambient dimension.
        sigma2: ridge (noise) parameter.
        P: training-set size.

    Returns:
        Dict with eta, the equivalent-kernel learnability L_ek, the
        matching cross-dataset value L_xq_ek, the exact threshold
        Pstar_exact = sigma2 (at eps = 1/2), and the bound-derived
        threshold Pstar_bound = sigma2 / 2.
    """
    if d < 1 or P < 1 or sigma2 <= 0.0:
        raise ValueError("need d >= 1, P >= 1, sigma2 > 0")
    eta = 1.0
    l_ek = ek_learnability(eta, P, sigma2)
    return {
        "eta": eta,
        "L_ek": l_ek,
        "L_xq_ek": l_ek,
        "Pstar_exact": sigma2,
        "Pstar_bound": sigma2 / 2.0,
    }


def manifold_vignette_mc(
    d: int,
    sigma2: float,
    P: int,
    n_seeds: int = 16,
    n_heldout: int = 20000,
    seed: int = 0,
) -> tuple[float, float]:
    """Simulate kernel ridge regression on the manifold distribution.

    Fits the linear-scaled kernel on fresh manifold draws and measures the
    learnability of y = x_1 on a held-out draw from the same law.

    Args:
        d: ambient dimension.
        sigma2: ridge parameter.
        P: training-set size.
        n_seeds: independent repetitions averaged.
        n_heldout: held-out evaluation points per repetition.
        seed: master seed.

    Returns:
        (mean learnability, standard error over repetitions).
    """
    spec = KernelSpec("linear-scaled", d, symmetry_tag="none")
    children = np.random.SeedSequence(seed).spawn(n_seeds)
    values = []
    for child in children:
        train_seed, test_seed = child.spawn(2)
        train = synth_manifold(P, d, seed=train_seed)
        test = synth_manifold(n_heldout, d, seed=test_seed)
        model = fit(spec, train.inputs, train.targets, ridge=sigma2)
        preds = predict(model, test.inputs)
        values.append(learnability(test.targets, preds))
    arr = np.asarray(values)
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(n_seeds))


def parity_normalization(d: int) -> float:
    """Squared norm of the full parity feature on the radius-sqrt(d) sphere.

    Evaluates 2^{-d} d^d Gamma(d/2) / Gamma(3d/2).  Even d makes both
    gamma factors integer factorials, so the ratio is computed with exact
    big-integer arithmetic and rounded once at the end; this is immune to
    the double-precision overflow that direct evaluation of d^d or
    Gamma(3d/2) hits, and keeps small cases like d = 2 exactly 1/2.

    Args:
        d: even dimension, at least 2.

    Returns:
        The normalization n_hat, a positive scalar (1/2 at d = 2).

    Raises:
        ValueError: odd or too-small d.
    """
    if d < 2 or d % 2 != 0:
        raise ValueError("parity normalization needs even d >= 2")
    numerator = d**d * math.factorial(d // 2 - 1)
    denominator = 2**d * math.factorial(3 * d // 2 - 1)
    return numerator / denominator


def parity_normalization_mc(
    d: int, n_mc: int = 1_000_000, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo oracle for the parity normalization.

    Averages prod_i (sqrt(d) u_i)^2 over uniform unit-sphere samples u.

    Args:
        d: even dimension.
        n_mc: sample count.
        seed: RNG seed.

    Returns:
        (mean, standard error).
    """
    if d < 2 or d % 2 != 0:
        raise ValueError("parity normalization needs even d >= 2")
    rng = np.random.default_rng(seed)
    vals = np.empty(n_mc)
    done = 0
    # Chunked accumulation keeps memory flat at large n_mc.
    while done < n_mc:
        m = min(200_000, n_mc - done)
        g = rng.standard_normal((m, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        vals[done : done + m] = np.prod(d * g**2, axis=1)
        done += m
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_mc))


@dataclass(frozen=True)
class ParityComplexity:
    """Exact and Stirling-asymptotic parity sample-size thresholds."""

    exact: float
    stirling: float


def parity_sample_complexity(
    d: int, sigma2: float, eps: float, trace: float
) -> ParityComplexity:
    """Lower bound on the sample size needed to learn the full parity.

    The exact form is sigma2 (1 - eps) n_hat N(d, d) / trace, using the
    degree-d harmonic degeneracy; the companion asymptotic replaces the
    exact combinatorics with Stirling's approximation,
    sigma2 (1 - eps) / trace * sqrt(27 / (64 pi d)) * (4e / 3^{3/2})^d.

    Args:
        d: even dimension.
        sigma2: ridge parameter.
        eps: target learnability shortfall, in [0, 1).
        trace: kernel trace under the sphere measure.

    Returns:
        ParityComplexity(exact, stirling).
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    if trace <= 0.0:
        raise ValueError("trace must be positive")
    n_hat = parity_normalization(d)
    exact = sigma2 * (1.0 - eps) * n_hat * degeneracy(d, d) / trace
    stirling = (
        sigma2
        * (1.0 - eps)
        / trace
        * math.sqrt(27.0 / (64.0 * math.pi * d))
        * _STIRLING_BASE**d
    )
    return ParityComplexity(exact=exact, stirling=stirling)


@dataclass(frozen=True)
class CopyingHeadSpec:
    """Parameters of the copying-head setting.

    Attributes:
        L: context length, at least 2.
        V: vocabulary parameter, at least 2 (tokens range over V + 1
            symbols).
        trace: kernel trace under the token-sequence measure (default 1).
    """

    L: int
    V: int
    trace: float = 1.0

    def __post_init__(self) -> None:
        if self.L < 2 or self.V < 2:
            raise ValueError("need L >= 2 and V >= 2")
        if self.trace <= 0.0:
            raise ValueError("trace must be positive")

    @property
    def z(self) -> float:
        """Feature normalization; z^2 = L - 1 + 1/V exactly."""
        return math.sqrt(self.L - 1.0 + 1.0 / self.V)

    @property
    def dim_irrep(self) -> int:
        """Dimension (L-1)(V-1) of the symmetry subspace housing the head."""
        return (self.L - 1) * (self.V - 1)


def _token_matrices(X: np.ndarray, spec: CopyingHeadSpec) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    want = (spec.L + 1, spec.V + 1)
    if X.shape[-2:] != want:
        raise ValueError(f"token matrices must have shape (..., {want[0]}, {want[1]})")
    if X.ndim == 2:
        X = X[None]
    is_binary = np.all((np.abs(X) < _ONE_HOT_TOL) | (np.abs(X - 1.0) < _ONE_HOT_TOL))
    rows_sum_one = np.allclose(X.sum(axis=-1), 1.0, atol=_ONE_HOT_TOL)
    if not (is_binary and rows_sum_one):
        raise ValueError("rows must be one-hot over the vocabulary")
    return X


def copying_head_feature(X: np.ndarray, spec: CopyingHeadSpec) -> np.ndarray:
    """Per-position copying-head features of one-hot sequences.

    Position a = 2..L+1 gets the vector
    (x^{a-1} - (1/L) sum_{b=1..L} x^b - 1/V) / z, the constant 1/V
    subtracted from every vocabulary component.

    Args:
        X: token matrix (L+1, V+1) or batch (P, L+1, V+1) of one-hot rows.
        spec: copying-head parameters.

    Returns:
        Feature array (P, L, V+1); the batch axis is kept even for a
        single input.

    Raises:
        ValueError: rows are not one-hot.
    """
    X = _token_matrices(X, spec)
    context = X[:, : spec.L, :]
    position_mean = context.mean(axis=1, keepdims=True)
    return (context - position_mean - 1.0 / spec.V) / spec.z


def copying_head_feature_norm(X: np.ndarray, spec: CopyingHeadSpec) -> float:
    """Dataset mean of the per-sample squared feature norm Tr(Phi Phi^T)."""
    phi = copying_head_feature(X, spec)
    return float(np.mean(np.sum(phi**2, axis=(1, 2))))


def copying_head_feature_norm_sup(spec: CopyingHeadSpec) -> float:
    """Supremum of Tr(Phi Phi^T) over one-hot datasets.

    The per-sample value is (L/z^2)(1 - |m|^2 + (V+1)/V^2) with m the
    position-mean vector, and |m|^2 is minimized at 1/L by sequences of
    all-distinct context tokens, giving the attained supremum
    (L/z^2)(1 - 1/L + 1/V + 1/V^2).
    """
    L, V = spec.L, spec.V
    return L / spec.z**2 * (1.0 - 1.0 / L + 1.0 / V + 1.0 / V**2)


def copying_head_target_norm(X: np.ndarray, spec: CopyingHeadSpec) -> float:
    """Dataset mean of Tr(Y Y^T); equals L exactly for one-hot datasets."""
    X = _token_matrices(X, spec)
    targets = X[:, : spec.L, :]
    return float(np.mean(np.sum(targets**2, axis=(1, 2))))


def copying_head_overlap_terms(X: np.ndarray, spec: CopyingHeadSpec) -> np.ndarray:
    """Per-sample overlap Tr(Phi Y^T) between features and copy targets."""
    X = _token_matrices(X, spec)
    phi = copying_head_feature(X, spec)
    targets = X[:, : spec.L, :]
    return np.sum(phi * targets, axis=(1, 2))


def _overlap_closed_form(spec: CopyingHeadSpec, vocab_size: int) -> float:
    # E[Tr(Phi Y^T)] = (1/z)(L - 1 - (L-1) rho - L/V) for i.i.d. uniform
    # tokens with collision probability rho = 1/vocab_size.
    L, V = spec.L, spec.V
    rho = 1.0 / vocab_size
    return (L - 1.0 - (L - 1.0) * rho - L / V) / spec.z


def copying_head_z_report(
    spec: CopyingHeadSpec, n_mc: int = 100_000, seed: int = 0
) -> dict:
    """Measure the feature/target overlap and compare it to z.

    The normalization z is claimed to equal the expected overlap; the
    expectation depends on whether the uniform vocabulary has V or V + 1
    symbols, so the report carries the measured value, the claim, and the
    closed form under both conventions without reconciling them.

    Args:
        spec: copying-head parameters.
        n_mc: Monte Carlo sample count.
        seed: RNG seed.

    Returns:
        Dict with measured_overlap, stderr, z_claim, closed_form_vocab_V,
        closed_form_vocab_Vp1, and the absolute deviations of the claim
        from each closed form.
    """
    sequences = synth_onehot_sequences(n_mc, spec.L, spec.V, seed=seed)
    terms = copying_head_overlap_terms(sequence_view(sequences), spec)
    measured = float(terms.mean())
    stderr = float(terms.std(ddof=1) / math.sqrt(n_mc))
    form_v = _overlap_closed_form(spec, spec.V)
    form_vp1 = _overlap_closed_form(spec, spec.V + 1)
    return {
        "measured_overlap": measured,
        "stderr": stderr,
        "z_claim": spec.z,
        "closed_form_vocab_V": form_v,
        "closed_form_vocab_Vp1": form_vp1,
        "claim_minus_form_V": spec.z - form_v,
        "claim_minus_form_Vp1": spec.z - form_vp1,
    }


@dataclass(frozen=True)
class CopyingHeadBound:
    """Copying-head sample-size lower bounds.

    Attributes:
        exact: bound from measured dataset norms.
        worst_case: bound from the supremal feature norm and the exact
            target norm L.
        asymptotic: leading-order form sigma2 (1 - eps) L V / trace.
    """

    exact: float
    worst_case: float
    asymptotic: float


def copying_head_bound(
    spec: CopyingHeadSpec,
    sigma2: float,
    eps: float,
    feature_norm_D: float,
    target_norm_D: float,
) -> CopyingHeadBound:
    """Sample-size lower bounds for learning the copying head.

    Uses the irrep ceiling lambda <= trace / ((L-1)(V-1)) on the feature
    eigenvalue, so each returned value lower-bounds the size needed to
    reach learnability 1 - eps.

    Args:
        spec: copying-head parameters.
        sigma2: ridge parameter.
        eps: target shortfall, in [0, 1).
        feature_norm_D: dataset mean of Tr(Phi Phi^T).
        target_norm_D: dataset mean of Tr(Y Y^T).

    Returns:
        CopyingHeadBound(exact, worst_case, asymptotic).
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    if feature_norm_D <= 0.0 or target_norm_D <= 0.0:
        raise ValueError("dataset norms must be positive")
    scale = sigma2 * (1.0 - eps) * spec.dim_irrep / spec.trace * spec.z
    exact = scale / math.sqrt(feature_norm_D * target_norm_D)
    worst = scale / math.sqrt(copying_head_feature_norm_sup(spec) * spec.L)
    asymptotic = sigma2 * (1.0 - eps) * spec.L * spec.V / spec.trace
    return CopyingHeadBound(exact=exact, worst_case=worst, asymptotic=asymptotic)


def irrep_eigenvalue_bound(trace: float, dim_R: int) -> float:
    """Ceiling on a symmetry-degenerate eigenvalue: trace / dim_R."""
    if trace <= 0.0:
        raise ValueError("trace must be positive")
    if dim_R < 1:
        raise ValueError("dim_R must be at least 1")
    return trace / dim_R
