"""Kernel ridge regression with an explicit ridge playing the noise role.

The posterior-mean predictor is

    f(x) = sum_nu k(x, x_nu) alpha_nu,    alpha = (K + ridge * I)^-1 y

solved through a Cholesky factorization of the symmetric positive-definite
system.  If the factorization fails through roundoff, a jitter of
1e-12 * trace(K) is added and escalated by factors of 10 at most three
times; any jitter actually used is recorded on the fitted model so
downstream bound checks can account for the effective ridge change.

Two call styles are provided: plain functions operating on a
``FittedPredictor`` record, and a scikit-learn style estimator wrapper
(``KernelRidgeRegressor``) so the model composes with the usual pipeline
tooling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from sklearn.base import BaseEstimator, RegressorMixin

from .kernels import KernelSpec, cross_gram, gram_matrix

# Jitter escalation: start at 1e-12 * trace(K), multiply by 10, three tries.
_JITTER_SCALE = 1e-12
_JITTER_TRIES = 3

# Cap on entries of any one prediction block, to bound peak memory.
_PREDICT_BLOCK_ENTRIES = 2**24


@dataclass(frozen=True)
class FittedPredictor:
    """A fitted kernel ridge model: training inputs plus dual coefficients."""

    kernel: KernelSpec
    train_inputs: np.ndarray = field(repr=False)
    dual_coeffs: np.ndarray = field(repr=False)
    ridge: float
    jitter: float = 0.0

    @property
    def n_train(self) -> int:
        return self.train_inputs.shape[0]


def fit(spec: KernelSpec, X: np.ndarray, y: np.ndarray, ridge: float) -> FittedPredictor:
    """Solve the ridge system on training data.

    Parameters
    ----------
    X : (P, d) array
        Training inputs.
    y : (P,) or (P, k) array
        Training targets; multiple target columns share one factorization.
    ridge : float
        Positive ridge (noise variance).

    Raises
    ------
    numpy.linalg.LinAlgError
        If the factorization still fails after jitter escalation.
    """
    if not (np.isscalar(ridge) and ridge > 0 and np.isfinite(ridge)):
        raise ValueError(f"ridge must be a positive finite scalar, got {ridge!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError(f"X must be a nonempty (P, d) matrix, got shape {X.shape}")
    if y.shape[0] != X.shape[0] or y.ndim > 2:
        raise ValueError(f"y has shape {y.shape}, expected ({X.shape[0]},) or ({X.shape[0]}, k)")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite entries")

    K = gram_matrix(spec, X)
    trace = float(np.trace(K))
    jitter = 0.0
    jitter_unit = trace if trace > 0 else 1.0
    try_jitters = [0.0] + [_JITTER_SCALE * jitter_unit * 10**k for k in range(_JITTER_TRIES)]
    last_err = None
    for jitter in try_jitters:
        system = K + (ridge + jitter) * np.eye(K.shape[0])
        try:
            factor = cho_factor(system, lower=True, check_finite=False)
            break
        except np.linalg.LinAlgError as err:  # pragma: no cover - needs a broken Gram
            last_err = err
    else:  # pragma: no cover
        raise np.linalg.LinAlgError(
            f"Cholesky failed after jitter escalation up to {jitter:.3e}: {last_err}"
        )
    alpha = cho_solve(factor, y, check_finite=False)
    return FittedPredictor(
        kernel=spec,
        train_inputs=X.copy(),
        dual_coeffs=alpha,
        ridge=float(ridge),
        jitter=float(jitter),
    )


def predict(model: FittedPredictor, X: np.ndarray) -> np.ndarray:
    """Evaluate the fitted predictor on new points, block by block."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    block = max(1, _PREDICT_BLOCK_ENTRIES // max(model.n_train, 1))
    parts = [
        cross_gram(model.kernel, X[i : i + block], model.train_inputs) @ model.dual_coeffs
        for i in range(0, X.shape[0], block)
    ]
    out = np.concatenate(parts, axis=0) if len(parts) > 1 else parts[0]
    return out[0] if single else out


def train_residual(model: FittedPredictor, y: np.ndarray) -> float:
    """Relative residual of the linear solve; should be ~1e-8 or below."""
    K = gram_matrix(model.kernel, model.train_inputs)
    system = K + (model.ridge + model.jitter) * np.eye(model.n_train)
    resid = system @ model.dual_coeffs - y
    return float(np.linalg.norm(resid) / max(np.linalg.norm(y), 1e-300))


class KernelRidgeRegressor(RegressorMixin, BaseEstimator):
    """Scikit-learn style wrapper around :func:`fit` / :func:`predict`.

    Parameters
    ----------
    kernel : KernelSpec
        Kernel descriptor.
    ridge : float, default=1.0
        Positive ridge added to the Gram diagonal.
    """

    def __init__(self, kernel: KernelSpec, ridge: float = 1.0):
        self.kernel = kernel
        self.ridge = ridge

    def fit(self, X, y):
        self.predictor_ = fit(self.kernel, X, y, self.ridge)
        return self

    def predict(self, X):
        if not hasattr(self, "predictor_"):
            raise RuntimeError("estimator is not fitted; call fit first")
        return predict(self.predictor_, X)
