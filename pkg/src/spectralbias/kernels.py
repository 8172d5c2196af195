"""Dot-product kernels: scaled linear and one-hidden-layer ReLU closed forms.

The ReLU kernels are the first-order arc-cosine family.  The NNGP variant is
the covariance of an infinitely wide one-hidden-layer ReLU network with no
bias terms; the NTK variant adds the gradient term of the same architecture.
All three families depend on the inputs only through their norms and the
angle between them, so every kernel here is rotation invariant:

    linear-scaled        k(x, y) = x.y / d
    arccos-nngp-1layer   k(x, y) = (|x||y| / pi) (sin t + (pi - t) cos t)
    arccos-ntk-1layer    nngp + (x.y / pi) (pi - t)

with t the angle between x and y.  Cosines are clamped to [-1, 1] before any
arccos so collinear inputs cannot produce NaN through roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KERNEL_FAMILIES = ("linear-scaled", "arccos-nngp-1layer", "arccos-ntk-1layer")

SYMMETRY_TAGS = ("rotation-invariant", "none")

# Norms below this are treated as zero vectors, which have no angle.
_NORM_FLOOR = 1e-300


@dataclass(frozen=True)
class KernelSpec:
    """Descriptor of one positive-semidefinite dot-product kernel.

    Parameters
    ----------
    family : str
        One of ``KERNEL_FAMILIES``.
    input_dim : int
        Expected number of input coordinates; every evaluation validates
        against it.
    symmetry_tag : str
        Declared symmetry, used by spectral routines to refuse kernels they
        cannot decompose.  All built-in families are rotation invariant.
    """

    family: str
    input_dim: int
    symmetry_tag: str = "rotation-invariant"

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(
                f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}"
            )
        if not isinstance(self.input_dim, (int, np.integer)) or self.input_dim < 1:
            raise ValueError(f"input_dim must be a positive integer, got {self.input_dim!r}")
        if self.symmetry_tag not in SYMMETRY_TAGS:
            raise ValueError(
                f"unknown symmetry_tag {self.symmetry_tag!r}; expected one of {SYMMETRY_TAGS}"
            )


@dataclass(frozen=True)
class TraceEstimate:
    """Monte Carlo estimate of E_q[k(x, x)] with its standard error."""

    value: float
    stderr: float
    n_mc: int


def _as_points(spec: KernelSpec, X: np.ndarray, name: str) -> np.ndarray:
    """Validate and reshape an array of points to (n, input_dim)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != spec.input_dim:
        raise ValueError(
            f"{name} has shape {np.asarray(X).shape}, expected (*, {spec.input_dim})"
        )
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite entries")
    return X


def unit_cosine_profile(spec: KernelSpec, t: np.ndarray) -> np.ndarray:
    """Kernel value between two unit vectors with cosine ``t``.

    This is the one-dimensional profile that the sphere spectrum integrates
    against.  ``t`` may exceed [-1, 1] by at most 1e-12 (roundoff); it is
    clamped before the arccos.
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise ValueError("cosine outside [-1, 1] beyond roundoff tolerance")
    t = np.clip(t, -1.0, 1.0)
    if spec.family == "linear-scaled":
        return t / spec.input_dim
    theta = np.arccos(t)
    nngp = (np.sin(theta) + (np.pi - theta) * t) / np.pi
    if spec.family == "arccos-nngp-1layer":
        return nngp
    return nngp + t * (np.pi - theta) / np.pi


def eval_kernel(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    """Evaluate k(x, y) for a single pair of points."""
    x = _as_points(spec, x, "x")[0]
    y = _as_points(spec, y, "y")[0]
    if spec.family == "linear-scaled":
        return float(x @ y / spec.input_dim)
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx < _NORM_FLOOR or ny < _NORM_FLOOR:
        raise ValueError("arc-cosine kernels are undefined at zero-norm inputs")
    cos = (x @ y) / (nx * ny)
    return float(nx * ny * unit_cosine_profile(spec, cos))


def cross_gram(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kernel matrix k(A_i, B_j) of shape (len(A), len(B))."""
    A = _as_points(spec, A, "A")
    B = _as_points(spec, B, "B")
    if spec.family == "linear-scaled":
        return A @ B.T / spec.input_dim
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    if np.any(na < _NORM_FLOOR) or np.any(nb < _NORM_FLOOR):
        raise ValueError("arc-cosine kernels are undefined at zero-norm inputs")
    cos = (A @ B.T) / np.outer(na, nb)
    # |cos| can exceed 1 by a few ulp for (near-)collinear rows.
    cos = np.clip(cos, -1.0, 1.0)
    return np.outer(na, nb) * unit_cosine_profile(spec, cos)


def gram_matrix(spec: KernelSpec, X: np.ndarray) -> np.ndarray:
    """Symmetric kernel matrix on one set of points.

    Exactly symmetric by construction (the strict upper triangle is computed
    once and mirrored), positive semidefinite up to roundoff.
    """
    X = _as_points(spec, X, "X")
    K = cross_gram(spec, X, X)
    iu = np.triu_indices(K.shape[0], k=1)
    K[iu[1], iu[0]] = K[iu]
    return K


def diagonal_values(spec: KernelSpec, X: np.ndarray) -> np.ndarray:
    """k(x, x) row by row, without forming a Gram matrix."""
    X = _as_points(spec, X, "X")
    sq = np.einsum("ij,ij->i", X, X)
    if spec.family == "linear-scaled":
        return sq / spec.input_dim
    if np.any(sq < _NORM_FLOOR**2):
        raise ValueError("arc-cosine kernels are undefined at zero-norm inputs")
    # theta = 0 on the diagonal: nngp profile is 1, ntk profile is 2.
    factor = 1.0 if spec.family == "arccos-nngp-1layer" else 2.0
    return factor * sq


def trace_estimate(spec, sampler, n_mc: int, seed: int) -> TraceEstimate:
    """Monte Carlo estimate of E[k(x, x)] under a sampled measure.

    Parameters
    ----------
    sampler : callable
        ``sampler(n, rng) -> (n, input_dim) array`` drawing from the measure.
    n_mc : int
        Number of draws; must be positive.
    seed : int
        Seed for the local generator, making the estimate deterministic.
    """
    if n_mc < 1:
        raise ValueError("n_mc must be positive")
    rng = np.random.default_rng(seed)
    X = sampler(n_mc, rng)
    vals = diagonal_values(spec, X)
    value = float(np.mean(vals))
    if n_mc == 1:
        return TraceEstimate(value, float("nan"), n_mc)
    stderr = float(np.std(vals, ddof=1) / np.sqrt(n_mc))
    return TraceEstimate(value, stderr, n_mc)
