"""Spectrum of rotation-invariant kernels on the uniform sphere.

A dot-product kernel restricted to S^(d-1) diagonalizes in spherical
harmonics: every degree-n harmonic is an eigenfunction with a shared
eigenvalue, so the whole spectrum reduces to one-dimensional integrals of
the kernel profile against normalized Gegenbauer polynomials (the
Funk-Hecke reduction).  This module computes those eigenvalues, the exact
degeneracy of each degree, and random features inside a fixed degree built
as normalized combinations of zonal polynomials.

Quadrature note: the Funk-Hecke integrand is evaluated in the angle
variable (t = cos phi), where the arc-cosine kernel profiles and the weight
(sin phi)^(d-2) are smooth.  Gauss-Legendre there converges geometrically,
which a plain [-1, 1] rule does not for these profiles at small d; every
eigenvalue is accepted only after an order-doubling check moves it by less
than 1e-10 in relative terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelSpec, unit_cosine_profile

# Relative change under quadrature order doubling that counts as converged.
_QUAD_RTOL = 1e-10
# Eigenvalues in [-1e-12, 0) are roundoff; anything more negative is an error.
_NEGATIVE_EIG_TOL = 1e-12


@dataclass(frozen=True)
class SpectralLine:
    """One degree of the sphere spectrum of a kernel.

    ``eigenvalue`` is per harmonic: the kernel trace decomposes as
    sum over n of eigenvalue(n) * degeneracy(n).
    """

    degree: int
    eigenvalue: float
    degeneracy: int
    input_dim: int
    measure_id: str

    def csv_row(self) -> dict:
        return {
            "measure_id": self.measure_id,
            "d": self.input_dim,
            "n": self.degree,
            "lambda": self.eigenvalue,
            "degeneracy": self.degeneracy,
        }


def sample_uniform_sphere(d: int, n: int, seed) -> np.ndarray:
    """Draw ``n`` points uniformly on S^(d-1).

    Gaussian draws normalized to unit length; ``seed`` may be an int or an
    existing ``numpy.random.Generator``.
    """
    if d < 2:
        raise ValueError("sphere sampling needs d >= 2")
    if n < 1:
        raise ValueError("need at least one sample")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    norms = np.linalg.norm(X, axis=1)
    # A zero draw has probability 0; resample defensively if it happens.
    bad = norms < 1e-12
    while np.any(bad):
        X[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(X, axis=1)
        bad = norms < 1e-12
    return X / norms[:, None]


def gegenbauer(n: int, alpha: float, t):
    """Gegenbauer polynomial C_n^alpha(t) by the three-term recurrence.

    Vectorized over ``t``; requires alpha > -1/2 and |t| <= 1 + 1e-12
    (values inside the tolerance band are clamped).
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if not alpha > -0.5:
        raise ValueError("alpha must exceed -1/2")
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    if np.any(np.abs(t_arr) > 1.0 + 1e-12):
        raise ValueError("argument outside [-1, 1] beyond roundoff tolerance")
    t_arr = np.clip(t_arr, -1.0, 1.0)
    c_prev = np.ones_like(t_arr)
    if n == 0:
        return float(c_prev) if scalar else c_prev
    c = 2.0 * alpha * t_arr
    for k in range(2, n + 1):
        c, c_prev = (2.0 * t_arr * (k + alpha - 1.0) * c - (k + 2.0 * alpha - 2.0) * c_prev) / k, c
    return float(c) if scalar else c


def degeneracy(n: int, d: int) -> int:
    """Dimension of the degree-n spherical-harmonic space on S^(d-1).

    Exact integer arithmetic: N(n, d) = ((2n + d - 2) / n) * binom(n+d-3, n-1)
    for n >= 1 and N(0, d) = 1.
    """
    if d < 2:
        raise ValueError("degeneracy needs d >= 2")
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return 1
    num = (2 * n + d - 2) * math.comb(n + d - 3, n - 1)
    quot, rem = divmod(num, n)
    if rem:  # cannot happen for integer n, d; guards the formula
        raise ArithmeticError(f"degeneracy formula not integral at n={n}, d={d}")
    return quot


def _require_rotation_invariant(spec: KernelSpec):
    if spec.symmetry_tag != "rotation-invariant":
        raise ValueError(
            "sphere spectrum requires a rotation-invariant kernel, got "
            f"symmetry_tag={spec.symmetry_tag!r}"
        )


def unit_sphere_trace(spec: KernelSpec) -> float:
    """E_q[k(x, x)] on the unit sphere, exact: the profile at cosine 1."""
    _require_rotation_invariant(spec)
    return float(unit_cosine_profile(spec, 1.0))


def _funk_hecke_quadrature(spec: KernelSpec, n: int, d: int, order: int) -> float:
    """One Funk-Hecke integral at a fixed Gauss-Legendre order (d >= 3)."""
    alpha = (d - 2) / 2.0
    nodes, weights = np.polynomial.legendre.leggauss(order)
    # Map [-1, 1] -> [0, pi] and integrate in the angle variable.
    phi = 0.5 * np.pi * (nodes + 1.0)
    w = 0.5 * np.pi * weights
    t = np.cos(phi)
    zonal = gegenbauer(n, alpha, t) / gegenbauer(n, alpha, 1.0)
    integrand = unit_cosine_profile(spec, t) * zonal * np.sin(phi) ** (d - 2)
    integral = float(w @ integrand)
    # Ratio of sphere surface areas omega_{d-2} / omega_{d-1}.
    log_ratio = (
        math.lgamma(d / 2.0) - math.lgamma((d - 1) / 2.0) - 0.5 * math.log(math.pi)
    )
    return math.exp(log_ratio) * integral


def _fourier_eigenvalue(spec: KernelSpec, n: int, order: int) -> float:
    """Exact circle case d = 2: Fourier coefficient of the profile.

    Uses the trapezoidal rule on the periodic analytic integrand, which is
    geometrically accurate; ``order`` is the number of grid points.
    """
    m = max(order, 8)
    u = 2.0 * np.pi * np.arange(m) / m
    vals = unit_cosine_profile(spec, np.cos(u))
    coeff = float(np.mean(vals * np.cos(n * u)))
    return coeff if n > 0 else float(np.mean(vals))


def funk_hecke_eigenvalue(spec: KernelSpec, n: int, d: int, quad_order: int | None = None) -> SpectralLine:
    """Eigenvalue of the kernel at harmonic degree ``n`` on uniform S^(d-1).

    Normalization: eigenfunctions orthonormal under the *normalized* uniform
    measure, so sum_n eigenvalue * degeneracy equals E_q[k(x, x)].

    The quadrature order defaults to 2 * (n + 32) and is doubled until the
    value is stable to 1e-10 relative; failure to converge raises.  d = 2 is
    served by the exact Fourier branch.
    """
    _require_rotation_invariant(spec)
    if d < 2:
        raise ValueError("sphere spectrum needs d >= 2")
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if quad_order is None:
        quad_order = 2 * (n + 32)
    if quad_order < 2:
        raise ValueError("quad_order must be at least 2")

    if d == 2:
        compute = lambda order: _fourier_eigenvalue(spec, n, order)
    else:
        compute = lambda order: _funk_hecke_quadrature(spec, n, d, order)
    value = compute(quad_order)
    # "Relative" is judged against the kernel's own scale so that degrees
    # with a true zero eigenvalue (pure quadrature noise) still converge.
    scale_floor = unit_sphere_trace(spec)
    order = quad_order
    for _ in range(6):
        order *= 2
        refined = compute(order)
        if abs(refined - value) <= _QUAD_RTOL * max(abs(refined), scale_floor):
            value = refined
            break
        value = refined
    else:
        raise RuntimeError(
            f"Funk-Hecke quadrature did not stabilize for degree {n} at d={d}"
        )

    if value < 0.0:
        if value < -_NEGATIVE_EIG_TOL:
            raise RuntimeError(
                f"negative eigenvalue {value:.3e} at degree {n}: kernel profile or "
                "quadrature is inconsistent with positive semidefiniteness"
            )
        value = 0.0
    return SpectralLine(
        degree=n,
        eigenvalue=value,
        degeneracy=degeneracy(n, d),
        input_dim=d,
        measure_id=f"sphere-uniform-d{d}",
    )


def spectrum_table(
    spec: KernelSpec, d: int, n_max: int, quad_order: int | None = None
) -> list[SpectralLine]:
    """All spectral lines for degrees 0..n_max, with the trace sum rule checked.

    Raises if sum_n eigenvalue * degeneracy exceeds E_q[k(x, x)] beyond a
    1e-6 relative slack -- that would mean the quadrature is broken.
    """
    lines = [funk_hecke_eigenvalue(spec, n, d, quad_order) for n in range(n_max + 1)]
    total = sum(line.eigenvalue * line.degeneracy for line in lines)
    trace = unit_sphere_trace(spec)
    if total > trace * (1.0 + 1e-6):
        raise RuntimeError(
            f"partial trace {total:.12g} exceeds E[k(x,x)] = {trace:.12g}; "
            "spectrum computation is inconsistent"
        )
    return lines


@dataclass(frozen=True)
class HarmonicFeature:
    """A random function inside one harmonic degree, normalized on the sphere.

    The function is a coefficient combination of zonal polynomials
    C_n^alpha(w_j . x) centered at random unit vectors w_j, scaled so that
    E_q[phi^2] = 1 under the uniform sphere measure.  Instances are callable.
    """

    degree: int
    centers: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    norm_const: float
    input_dim: int
    seed: int

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return harmonic_eval(self, X)


def random_harmonic(n: int, d: int, m_centers: int | None = None, seed: int = 0) -> HarmonicFeature:
    """Draw a random degree-n harmonic on S^(d-1), unit-normalized under q.

    The normalizer comes in closed form from the addition theorem: with
    zonal centers W and coefficients c,

        E_q[phi_raw^2] = (C_n^alpha(1) / N(n, d)) * sum_jk c_j c_k C_n^alpha(w_j . w_k)

    so dividing by its square root makes E_q[phi^2] = 1 exactly.  Requires
    d >= 3 (at alpha = 0 the zonal polynomials degenerate); the default
    number of centers is min(2 * N(n, d), 256).
    """
    if n < 1:
        raise ValueError("harmonic features need degree n >= 1")
    if d < 3:
        raise ValueError("random harmonics need d >= 3")
    if m_centers is None:
        m_centers = min(2 * degeneracy(n, d), 256)
    if m_centers < 1:
        raise ValueError("need at least one center")
    alpha = (d - 2) / 2.0
    rng = np.random.default_rng(seed)
    centers = sample_uniform_sphere(d, m_centers, rng)
    coeffs = rng.standard_normal(m_centers)
    gram = gegenbauer(n, alpha, np.clip(centers @ centers.T, -1.0, 1.0))
    raw_sq = gegenbauer(n, alpha, 1.0) / degeneracy(n, d) * float(coeffs @ gram @ coeffs)
    if raw_sq < 1e-24:
        raise RuntimeError(
            "degenerate coefficient draw: zonal combination has vanishing norm"
        )
    return HarmonicFeature(
        degree=n,
        centers=centers,
        coefficients=coeffs,
        norm_const=math.sqrt(raw_sq),
        input_dim=d,
        seed=seed,
    )


def harmonic_eval(feature: HarmonicFeature, X: np.ndarray) -> np.ndarray:
    """Evaluate a harmonic feature on rows of X, which must lie on the sphere.

    Rows whose norm differs from 1 by more than 1e-9 are rejected: the
    feature is only normalized with respect to the sphere measure.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != feature.input_dim:
        raise ValueError(f"X has shape {X.shape}, expected (*, {feature.input_dim})")
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("inputs must be unit vectors (within 1e-9) for harmonic features")
    alpha = (feature.input_dim - 2) / 2.0
    # Dots of two almost-unit vectors can spill past 1 by ~1e-9; clamp.
    dots = np.clip(X @ feature.centers.T, -1.0, 1.0)
    vals = gegenbauer(feature.degree, alpha, dots) @ feature.coefficients
    return vals / feature.norm_const


def harmonic_norm_mc(feature: HarmonicFeature, n_mc: int, seed: int) -> tuple[float, float]:
    """Monte Carlo cross-check of the closed-form normalization.

    Returns the sample mean of phi^2 over the uniform sphere and its
    standard error; the mean should sit within a few stderr of 1.
    """
    X = sample_uniform_sphere(feature.input_dim, n_mc, seed)
    sq = harmonic_eval(feature, X) ** 2
    return float(np.mean(sq)), float(np.std(sq, ddof=1) / np.sqrt(n_mc))
