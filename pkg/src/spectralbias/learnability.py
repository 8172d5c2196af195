"""Learnability measures and the spectral sample-complexity bound.

Learnability of a target is the normalized alignment E[y f] / E[y^2] of the
predictor with the target.  Its cross-distribution variant replaces the
target-measure expectations with expectations over an auxiliary measure q on
which the kernel's eigensystem is known:

    L_i = E_q[phi_i f] / E_q[phi_i y]

For any training set inside the support of q, that quantity obeys an a
priori bound proportional to the eigenvalue of phi_i:

    L_i <= (lambda_i P / ridge) * sqrt(E_D[phi_i^2] E_D[y^2]) / |E_q[phi_i y]|

where the E_D norms are empirical means over exactly the P training points.
Inverting the bound at level 1 - eps gives a lower estimate of the sample
complexity of that feature.  The equivalent-kernel (EK) approximation
supplies the matching closed-form learnability on-measure, eta/(eta +
ridge/P), used by the worked examples.

Everything Monte Carlo here is paired: numerator and denominator of a
cross-learnability ratio are estimated on the same draw, and standard
errors come from the delta method on the joint sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# A denominator within this many standard errors of zero has no usable sign.
_OVERLAP_SE_FACTOR = 3.0


class UndefinedOverlapError(RuntimeError):
    """Raised when E_q[phi y] is indistinguishable from zero at 3 stderr."""


def learnability(y_vals: np.ndarray, f_vals: np.ndarray) -> float:
    """Empirical learnability mean(y * f) / mean(y * y) on paired samples."""
    y_vals = np.asarray(y_vals, dtype=float).ravel()
    f_vals = np.asarray(f_vals, dtype=float).ravel()
    if y_vals.shape != f_vals.shape or y_vals.size == 0:
        raise ValueError("y and f must be nonempty arrays of the same length")
    denom = float(np.mean(y_vals * y_vals))
    if denom <= 0.0:
        raise ValueError("target has zero empirical second moment")
    return float(np.mean(y_vals * f_vals) / denom)


@dataclass(frozen=True)
class CrossLearnability:
    """Paired Monte Carlo estimate of E_q[phi f] / E_q[phi y].

    ``numerator``/``denominator`` are the two sample means; the covariance
    of the means is kept so that ratio statistics (and bound margins) can be
    propagated with the delta method.
    """

    value: float
    stderr: float
    numerator: float
    denominator: float
    num_var: float  # variance of the numerator *mean*
    den_var: float
    num_den_cov: float
    n_mc: int

    @property
    def overlap(self) -> float:
        """|E_q[phi y]| as measured on the shared sample."""
        return abs(self.denominator)

    @property
    def overlap_stderr(self) -> float:
        return math.sqrt(self.den_var)


def cross_learnability_from_samples(num_terms, den_terms) -> CrossLearnability:
    """Build the paired ratio estimate from per-sample products.

    Parameters
    ----------
    num_terms : array
        Per-sample values of phi(x) f(x), x ~ q.
    den_terms : array
        Per-sample values of phi(x) y(x) on the *same* draw.
    """
    a = np.asarray(num_terms, dtype=float).ravel()
    b = np.asarray(den_terms, dtype=float).ravel()
    if a.shape != b.shape or a.size < 2:
        raise ValueError("need paired sample arrays with at least two entries")
    n = a.size
    A, B = float(np.mean(a)), float(np.mean(b))
    cov = np.cov(np.stack([a, b]), ddof=1) / n  # covariance of the means
    va, vb, vab = float(cov[0, 0]), float(cov[1, 1]), float(cov[0, 1])
    if abs(B) <= _OVERLAP_SE_FACTOR * math.sqrt(vb):
        raise UndefinedOverlapError(
            f"E_q[phi y] = {B:.3e} within {_OVERLAP_SE_FACTOR} stderr "
            f"({math.sqrt(vb):.3e}) of zero: cross-learnability undefined"
        )
    value = A / B
    # Delta method for the ratio of two correlated means.
    var = (va - 2.0 * value * vab + value * value * vb) / (B * B)
    return CrossLearnability(
        value=value,
        stderr=math.sqrt(max(var, 0.0)),
        numerator=A,
        denominator=B,
        num_var=va,
        den_var=vb,
        num_den_cov=vab,
        n_mc=n,
    )


def cross_dataset_learnability(
    feature_fn, predict_fn, target_fn, q_sampler, n_mc: int, seed: int
) -> CrossLearnability:
    """Monte Carlo cross-distribution learnability of a fitted predictor.

    Parameters
    ----------
    feature_fn, target_fn : callable
        Maps from an (n, d) array of q-samples to n values.
    predict_fn : callable
        The fitted predictor evaluated on the same samples.
    q_sampler : callable
        ``q_sampler(n, rng) -> (n, d)`` drawing from the auxiliary measure.
    """
    if n_mc < 2:
        raise ValueError("n_mc must be at least 2")
    rng = np.random.default_rng(seed)
    X = q_sampler(n_mc, rng)
    phi = np.asarray(feature_fn(X), dtype=float).ravel()
    f = np.asarray(predict_fn(X), dtype=float).ravel()
    y = np.asarray(target_fn(X), dtype=float).ravel()
    return cross_learnability_from_samples(phi * f, phi * y)


def cross_learnability_bound(
    eigenvalue: float,
    n_train: float,
    ridge: float,
    train_feature_sq: float,
    train_target_sq: float,
    overlap: float,
) -> float:
    """A priori upper bound on cross-distribution learnability.

    ``train_feature_sq`` and ``train_target_sq`` are the empirical means of
    phi^2 and y^2 over exactly the training points; ``overlap`` is
    |E_q[phi y]| > 0.  ``n_train`` may be fractional so the bound can be
    evaluated at sample-complexity estimates, where it returns 1 - eps.
    """
    if eigenvalue < 0:
        raise ValueError("eigenvalue must be nonnegative")
    if ridge <= 0 or n_train <= 0:
        raise ValueError("need ridge > 0 and a positive training-set size")
    if overlap <= 0:
        raise ValueError("overlap |E_q[phi y]| must be positive")
    if train_feature_sq < 0 or train_target_sq < 0:
        raise ValueError("squared norms must be nonnegative")
    return (
        eigenvalue
        * n_train
        / ridge
        * math.sqrt(train_feature_sq * train_target_sq)
        / overlap
    )


def sample_complexity_lower(
    eigenvalue: float,
    ridge: float,
    eps: float,
    overlap: float,
    train_feature_sq: float,
    train_target_sq: float,
) -> float:
    """Minimum training-set size for the bound to allow learnability 1 - eps.

    Exact inverse of :func:`cross_learnability_bound` in P: evaluating the
    bound at the returned P gives exactly 1 - eps.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    if eigenvalue <= 0:
        raise ValueError("eigenvalue must be positive to invert the bound")
    if overlap <= 0:
        raise ValueError("overlap |E_q[phi y]| must be positive")
    norms = math.sqrt(train_feature_sq * train_target_sq)
    if norms <= 0:
        raise ValueError("train norms must be positive to invert the bound")
    return ridge / eigenvalue * (1.0 - eps) * overlap / norms


def bound_margin(est: CrossLearnability, bound_scale: float) -> tuple[float, float]:
    """Margin (bound - L_xq) with a paired delta-method standard error.

    ``bound_scale`` is the deterministic part lambda * P / ridge *
    sqrt(E_D[phi^2] E_D[y^2]); the bound itself divides it by the *measured*
    overlap, so margin and estimate share the denominator and its noise
    largely cancels.  A margin below -3 stderr is a genuine violation.
    """
    if bound_scale < 0:
        raise ValueError("bound_scale must be nonnegative")
    s = 1.0 if est.denominator >= 0 else -1.0
    absB = abs(est.denominator)
    margin = (bound_scale - s * est.numerator) / absB
    # Gradient of (c - s*A)/|B| in (A, B); d|B|/dB = s.
    ga = -s / absB
    gb = -s * (bound_scale - s * est.numerator) / (absB * absB)
    var = (
        ga * ga * est.num_var
        + gb * gb * est.den_var
        + 2.0 * ga * gb * est.num_den_cov
    )
    return margin, math.sqrt(max(var, 0.0))


def ek_learnability(eta: float, n_train: float, ridge: float) -> float:
    """Equivalent-kernel learnability eta / (eta + ridge / P).

    ``n_train`` may be fractional so the curve can be evaluated at
    sample-complexity estimates, where it returns exactly 1 - eps.
    """
    if eta < 0 or ridge <= 0 or n_train <= 0:
        raise ValueError("need eta >= 0, ridge > 0, P > 0")
    return eta / (eta + ridge / n_train)


def ek_sample_complexity(eta: float, ridge: float, eps: float) -> float:
    """P at which the EK learnability reaches 1 - eps: ridge (1-eps)/(eta eps)."""
    if eta <= 0 or ridge <= 0:
        raise ValueError("need eta > 0 and ridge > 0")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return ridge * (1.0 - eps) / (eta * eps)


def linear_learnability_bound(eta: float, n_train: int, ridge: float) -> float:
    """Small-P linear bound eta P / ridge; dominates the EK concave curve."""
    if eta < 0 or ridge <= 0 or n_train < 0:
        raise ValueError("need eta >= 0, ridge > 0, P >= 0")
    return eta * n_train / ridge


@dataclass(frozen=True)
class LearnabilityReport:
    """One learning-curve point: measured learnabilities plus bound data."""

    dataset: str
    kernel: str
    feature_degree: int
    feature_seed: int
    n_train: int
    ridge: float
    l_emp: float
    l_xq: float
    bound: float
    pstar: dict  # eps -> sample-complexity lower estimate
    train_feature_sq: float
    train_target_sq: float
    overlap: float
    stderr_l_xq: float

    CSV_COLUMNS = (
        "dataset",
        "kernel",
        "feature_degree",
        "feature_seed",
        "P",
        "sigma2",
        "L_emp",
        "L_xq",
        "bound",
        "Pstar_eps0",
        "Pstar_eps0p7",
        "E_D_phi2",
        "E_D_y2",
        "overlap",
        "stderr_Lxq",
    )

    def csv_row(self) -> dict:
        return {
            "dataset": self.dataset,
            "kernel": self.kernel,
            "feature_degree": self.feature_degree,
            "feature_seed": self.feature_seed,
            "P": self.n_train,
            "sigma2": self.ridge,
            "L_emp": self.l_emp,
            "L_xq": self.l_xq,
            "bound": self.bound,
            "Pstar_eps0": self.pstar[0.0],
            "Pstar_eps0p7": self.pstar[0.7],
            "E_D_phi2": self.train_feature_sq,
            "E_D_y2": self.train_target_sq,
            "overlap": self.overlap,
            "stderr_Lxq": self.stderr_l_xq,
        }
