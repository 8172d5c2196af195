"""Density-ratio diagnostics linking spectral error to population MSE.

When training data follow a measure ``p`` but the kernel is diagonalized
under an auxiliary measure ``q``, the expected importance ratios

    I_bar = E_{x~p}[p(x)/q(x)],    J_bar = E_{x~q}[q(x)/p(x)]

relate the q-side spectral error

    q_mse = sum_i (1 - L_i)^2 * c_i^2,   c_i = E_q[y * phi_i]

to the population mean-squared error under ``p`` through the sandwich
candidates ``q_mse / J_bar`` and ``I_bar * q_mse``.  This module computes
both ratios (exactly for finite discrete distributions, by Monte Carlo
otherwise), the q-side error, and the sandwich report.

The sandwich inequality itself does not hold for general instances; see
``random_discrete_instance`` and ``discrete_mse`` for the enumeration
tools used to measure how often it fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SupportViolationError",
    "RatioEstimate",
    "DensityRatioReport",
    "importance_ratios",
    "q_side_mse",
    "mse_sandwich",
    "DiscreteInstance",
    "random_discrete_instance",
    "discrete_mse",
]

_PROB_SUM_TOL = 1e-9


class SupportViolationError(ValueError):
    """A density in a denominator vanished where the numerator has mass."""


@dataclass(frozen=True)
class RatioEstimate:
    """One expected importance ratio.

    Attributes:
        value: estimate of the ratio expectation.
        stderr: Monte Carlo standard error (0.0 for exact summation).
        n_terms: number of samples or atoms averaged.
    """

    value: float
    stderr: float
    n_terms: int


@dataclass(frozen=True)
class DensityRatioReport:
    """Sandwich report for one (p, q, predictor) instance.

    Attributes:
        i_bar: E_p[p/q], at least 1 by Jensen.
        j_bar: E_q[q/p], at least 1 by Jensen.
        q_mse: spectral error under q, sum_i (1 - L_i)^2 c_i^2.
        mse_lower: q_mse / j_bar.
        mse_upper: i_bar * q_mse.
        coeff_mass_included: sum of squared target coefficients supplied.
        coeff_mass_total: E_q[y^2]; the gap to coeff_mass_included is the
            truncation mass not covered by the supplied features.
    """

    i_bar: float
    j_bar: float
    q_mse: float
    mse_lower: float
    mse_upper: float
    coeff_mass_included: float
    coeff_mass_total: float

    CSV_COLUMNS = (
        "I_bar",
        "J_bar",
        "q_mse",
        "mse_lower",
        "mse_upper",
        "coeff_mass_included",
        "coeff_mass_total",
    )

    def __post_init__(self) -> None:
        if self.i_bar < 1.0 - 1e-6 or self.j_bar < 1.0 - 1e-6:
            raise ValueError(
                "expected importance ratios are bounded below by 1 "
                f"(got I_bar={self.i_bar!r}, J_bar={self.j_bar!r})"
            )
        if self.mse_lower > self.mse_upper * (1.0 + 1e-12) + 1e-300:
            raise ValueError("mse_lower exceeds mse_upper")

    def csv_row(self) -> dict[str, float]:
        """Return the report as a CSV row keyed by column name."""
        return {
            "I_bar": self.i_bar,
            "J_bar": self.j_bar,
            "q_mse": self.q_mse,
            "mse_lower": self.mse_lower,
            "mse_upper": self.mse_upper,
            "coeff_mass_included": self.coeff_mass_included,
            "coeff_mass_total": self.coeff_mass_total,
        }


def _validate_probability_table(name: str, table: np.ndarray) -> np.ndarray:
    table = np.asarray(table, dtype=float)
    if table.ndim != 1 or table.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d probability table")
    if np.any(table < 0.0):
        raise ValueError(f"{name} has negative entries")
    total = float(table.sum())
    if abs(total - 1.0) > _PROB_SUM_TOL:
        raise ValueError(f"{name} sums to {total!r}, expected 1")
    return table


def _discrete_ratios(
    p: np.ndarray, q: np.ndarray
) -> tuple[RatioEstimate, RatioEstimate]:
    if p.shape != q.shape:
        raise ValueError("p and q tables must have the same length")
    if np.any((p > 0.0) & (q == 0.0)):
        raise SupportViolationError("q vanishes on an atom where p has mass")
    if np.any((q > 0.0) & (p == 0.0)):
        raise SupportViolationError("p vanishes on an atom where q has mass")
    live = p > 0.0
    i_bar = float(np.sum(p[live] ** 2 / q[live]))
    j_bar = float(np.sum(q[live] ** 2 / p[live]))
    n = int(p.size)
    return RatioEstimate(i_bar, 0.0, n), RatioEstimate(j_bar, 0.0, n)


def _mc_ratio(
    num_density,
    den_density,
    samples: np.ndarray,
    what: str,
) -> RatioEstimate:
    num = np.asarray(num_density(samples), dtype=float)
    den = np.asarray(den_density(samples), dtype=float)
    if num.shape != den.shape or num.ndim != 1:
        raise ValueError("density callables must map samples to 1-d arrays")
    if np.any(den <= 0.0):
        raise SupportViolationError(
            f"denominator density vanishes on a sample while estimating {what}"
        )
    ratios = num / den
    n = int(ratios.size)
    if n < 2:
        raise ValueError("need at least 2 samples for a ratio estimate")
    value = float(ratios.mean())
    stderr = float(ratios.std(ddof=1) / math.sqrt(n))
    return RatioEstimate(value, stderr, n)


def importance_ratios(
    p_density,
    q_density,
    p_samples: np.ndarray | None = None,
    q_samples: np.ndarray | None = None,
) -> tuple[RatioEstimate, RatioEstimate]:
    """Compute the expected importance ratios I_bar and J_bar.

    Two branches:
      * exact summation — pass finite probability tables (1-d arrays over
        shared atoms) as ``p_density``/``q_density`` and no samples;
      * Monte Carlo — pass density callables together with ``p_samples``
        drawn from p (for I_bar) and ``q_samples`` drawn from q (for J_bar).

    Args:
        p_density: probability table or vectorized density callable for p.
        q_density: probability table or vectorized density callable for q.
        p_samples: samples from p (Monte Carlo branch only).
        q_samples: samples from q (Monte Carlo branch only).

    Returns:
        Pair ``(I_bar, J_bar)`` of RatioEstimate values.

    Raises:
        SupportViolationError: a denominator density is zero where the
            opposing measure has mass.
    """
    p_is_table = not callable(p_density)
    q_is_table = not callable(q_density)
    if p_is_table != q_is_table:
        raise ValueError("p_density and q_density must be both tables or both callables")
    if p_is_table:
        if p_samples is not None or q_samples is not None:
            raise ValueError("exact summation branch takes no samples")
        p = _validate_probability_table("p", np.asarray(p_density))
        q = _validate_probability_table("q", np.asarray(q_density))
        return _discrete_ratios(p, q)
    if p_samples is None or q_samples is None:
        raise ValueError("Monte Carlo branch needs both p_samples and q_samples")
    i_bar = _mc_ratio(p_density, q_density, np.asarray(p_samples), "I_bar")
    j_bar = _mc_ratio(q_density, p_density, np.asarray(q_samples), "J_bar")
    return i_bar, j_bar


def q_side_mse(learnabilities: np.ndarray, coefficients: np.ndarray) -> float:
    """Spectral error under q: sum_i (1 - L_i)^2 * c_i^2.

    Args:
        learnabilities: per-feature learnability values L_i.
        coefficients: target coefficients c_i = E_q[y * phi_i] against a
            q-orthonormal feature set.

    Returns:
        Nonnegative scalar; zero exactly when every supported coefficient
        has L_i = 1.
    """
    learn = np.asarray(learnabilities, dtype=float)
    coeff = np.asarray(coefficients, dtype=float)
    if learn.shape != coeff.shape or learn.ndim != 1:
        raise ValueError("learnabilities and coefficients must be 1-d and equal length")
    return float(np.sum((1.0 - learn) ** 2 * coeff**2))


def mse_sandwich(
    i_bar: float | RatioEstimate,
    j_bar: float | RatioEstimate,
    learnabilities: np.ndarray,
    coefficients: np.ndarray,
    target_sq_mean_q: float,
) -> DensityRatioReport:
    """Assemble the density-ratio sandwich report.

    Args:
        i_bar: E_p[p/q] (RatioEstimate or plain float).
        j_bar: E_q[q/p] (RatioEstimate or plain float).
        learnabilities: per-feature learnability values.
        coefficients: q-side target coefficients for the same features.
        target_sq_mean_q: E_q[y^2], the total coefficient mass; the report
            records how much of it the supplied features cover.

    Returns:
        DensityRatioReport with mse_lower = q_mse / J_bar and
        mse_upper = I_bar * q_mse.
    """
    i_slack = 0.0
    j_slack = 0.0
    if isinstance(i_bar, RatioEstimate):
        i_slack = 3.0 * i_bar.stderr
        i_bar = i_bar.value
    if isinstance(j_bar, RatioEstimate):
        j_slack = 3.0 * j_bar.stderr
        j_bar = j_bar.value
    if i_bar < 1.0 - i_slack - 1e-12 or j_bar < 1.0 - j_slack - 1e-12:
        raise ValueError("importance ratios below 1 beyond Monte Carlo error")
    qm = q_side_mse(learnabilities, coefficients)
    included = float(np.sum(np.asarray(coefficients, dtype=float) ** 2))
    return DensityRatioReport(
        i_bar=max(float(i_bar), 1.0),
        j_bar=max(float(j_bar), 1.0),
        q_mse=qm,
        mse_lower=qm / max(float(j_bar), 1.0),
        mse_upper=max(float(i_bar), 1.0) * qm,
        coeff_mass_included=included,
        coeff_mass_total=float(target_sq_mean_q),
    )


@dataclass(frozen=True)
class DiscreteInstance:
    """Finite instance on which every quantity is exactly enumerable.

    Attributes:
        p: training measure over the atoms.
        q: auxiliary measure over the atoms (full support).
        features: (n_atoms, n_features) matrix, columns orthonormal under q.
        learnabilities: per-feature multipliers defining the predictor.
        coefficients: target coefficients c_i; the target is
            y = features @ coefficients and the predictor is
            f = features @ (learnabilities * coefficients).
    """

    p: np.ndarray
    q: np.ndarray
    features: np.ndarray
    learnabilities: np.ndarray
    coefficients: np.ndarray

    def target(self) -> np.ndarray:
        """Target values y on the atoms."""
        return self.features @ self.coefficients

    def predictor(self) -> np.ndarray:
        """Predictor values f on the atoms."""
        return self.features @ (self.learnabilities * self.coefficients)


def discrete_mse(instance: DiscreteInstance) -> float:
    """Exact population MSE under p: sum_x p(x) (f(x) - y(x))^2."""
    diff = instance.predictor() - instance.target()
    return float(np.sum(instance.p * diff**2))


def random_discrete_instance(
    n_atoms: int,
    n_features: int,
    seed: int,
) -> DiscreteInstance:
    """Draw a random finite instance with q-orthonormal features.

    The measures are Dirichlet-like draws with full support; the feature
    columns are Gram-Schmidt orthonormalized under the q-weighted inner
    product, so q_side_mse and discrete_mse are exact on the instance.

    Args:
        n_atoms: number of atoms (at least n_features + 1).
        n_features: number of orthonormal feature columns.
        seed: RNG seed.

    Returns:
        DiscreteInstance with p, q > 0 everywhere.
    """
    if n_features < 1 or n_atoms < n_features + 1:
        raise ValueError("need n_atoms >= n_features + 1 and n_features >= 1")
    rng = np.random.default_rng(seed)
    # Floor the atom masses away from 0 so q-weighted Gram-Schmidt stays
    # well conditioned and the ratio expectations stay finite.
    p = rng.gamma(1.0, 1.0, size=n_atoms) + 1e-3
    q = rng.gamma(1.0, 1.0, size=n_atoms) + 1e-3
    p /= p.sum()
    q /= q.sum()
    raw = rng.standard_normal((n_atoms, n_features))
    basis = np.empty_like(raw)
    for j in range(n_features):
        vec = raw[:, j]
        for k in range(j):
            vec = vec - np.sum(q * vec * basis[:, k]) * basis[:, k]
        norm = math.sqrt(float(np.sum(q * vec**2)))
        if norm < 1e-12:
            raise RuntimeError("degenerate draw; use a different seed")
        basis[:, j] = vec / norm
    learn = rng.uniform(0.0, 1.0, size=n_features)
    coeff = rng.standard_normal(n_features)
    return DiscreteInstance(
        p=p, q=q, features=basis, learnabilities=learn, coefficients=coeff
    )
