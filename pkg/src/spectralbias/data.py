"""Dataset ingestion, preprocessing, and synthetic sample generators.

Real image data (MNIST / Fashion-MNIST IDX files, CIFAR-10 binary batches)
is reduced by PCA fit on the training split, optionally whitened, and
projected to the unit sphere so that it satisfies the support condition of
the uniform-sphere auxiliary measure.  Synthetic generators cover the
single-coordinate manifold, correlated hypercube, and one-hot token
sequence distributions used by the vignettes and experiments.

All preprocessing is deterministic given (source files, seed, parameters);
every applied transform is appended to the sample set's preprocessing
chain so a cached set can be reproduced bit-for-bit.
"""

from __future__ import annotations

import gzip
import hashlib
import json
import os
import struct
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

__all__ = [
    "DataFormatError",
    "DataUnavailableError",
    "SampleSet",
    "PCABasis",
    "load_idx",
    "load_cifar10",
    "pca_reduce",
    "project_sphere",
    "whiten",
    "PCAReducer",
    "SphereProjector",
    "synth_manifold",
    "synth_hypercube_correlated",
    "synth_onehot_sequences",
    "sequence_view",
    "cube_to_sphere",
    "real_data_pipeline",
    "save_sample_set",
    "load_sample_set",
    "resolve_data_dir",
]

DATA_DIR_ENV = "SPECTRALBIAS_DATA"

_IDX_MAGIC_IMAGES = 0x00000803
_IDX_MAGIC_LABELS = 0x00000801
_CIFAR_RECORD_BYTES = 3073
_EIGENVALUE_FLOOR = 1e-10
_UNIT_ROW_TOL = 1e-9

_SOURCES = (
    "mnist",
    "fashion-mnist",
    "cifar10",
    "sphere-uniform",
    "manifold",
    "hypercube-correlated",
    "onehot-seq",
)


class DataFormatError(ValueError):
    """A data file does not match its declared binary format."""


class DataUnavailableError(FileNotFoundError):
    """A required dataset file is absent from the data directory."""


@dataclass(frozen=True)
class SampleSet:
    """An input matrix with optional targets and its full provenance.

    Attributes:
        inputs: (P, d) float array.
        targets: optional (P,) or (P, k) float array.
        source: one of the known source names.
        preprocessing: ordered tuple of applied-transform records; each is
            a JSON-serializable dict with at least a "step" key.  The chain
            plus the source and seed fully determine reproduction.
        seed: RNG seed used by the generating step (0 for file-backed data).
    """

    inputs: np.ndarray
    targets: np.ndarray | None
    source: str
    preprocessing: tuple
    seed: int

    def __post_init__(self) -> None:
        if self.source not in _SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.inputs.ndim != 2:
            raise ValueError("inputs must be a 2-d matrix")
        if self.targets is not None and self.targets.shape[0] != self.inputs.shape[0]:
            raise ValueError("targets must have one row per input row")

    @property
    def n_samples(self) -> int:
        return int(self.inputs.shape[0])

    def with_step(self, inputs: np.ndarray, step: dict, targets="keep") -> "SampleSet":
        """Return a copy with new inputs and the step appended to the chain."""
        new_targets = self.targets if isinstance(targets, str) else targets
        return replace(
            self,
            inputs=inputs,
            targets=new_targets,
            preprocessing=self.preprocessing + (step,),
        )

    def assert_unit_rows(self, tol: float = _UNIT_ROW_TOL) -> None:
        """Raise if any input row is not unit-norm within tol."""
        norms = np.linalg.norm(self.inputs, axis=1)
        worst = float(np.max(np.abs(norms - 1.0))) if norms.size else 0.0
        if worst > tol:
            raise ValueError(f"rows deviate from unit norm by up to {worst:.3e}")


def resolve_data_dir(explicit: str | os.PathLike | None = None) -> Path:
    """Resolve the dataset root directory.

    Args:
        explicit: directory given by config or CLI; wins over the
            environment variable.

    Returns:
        Path to the dataset root.

    Raises:
        DataUnavailableError: neither an explicit directory nor the
            environment variable is set, or the directory does not exist.
    """
    root = Path(explicit) if explicit is not None else None
    if root is None:
        env = os.environ.get(DATA_DIR_ENV)
        if not env:
            raise DataUnavailableError(
                f"no dataset directory: pass one or set ${DATA_DIR_ENV}"
            )
        root = Path(env)
    if not root.is_dir():
        raise DataUnavailableError(f"dataset directory {root} does not exist")
    return root


def _read_binary(path: Path) -> bytes:
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        return gzip.decompress(raw)
    return raw


def load_idx(path: str | os.PathLike) -> np.ndarray:
    """Parse one big-endian IDX file (plain or gzipped).

    Image files (magic 0x00000803) come back as float64 arrays scaled to
    [0, 1]; label files (magic 0x00000801) come back as int64 vectors.

    Args:
        path: IDX file path.

    Returns:
        Array shaped per the file header.

    Raises:
        DataFormatError: bad magic, truncated payload, or header/payload
            dimension mismatch.
        DataUnavailableError: the file does not exist.
    """
    path = Path(path)
    if not path.is_file():
        raise DataUnavailableError(f"IDX file {path} not found")
    raw = _read_binary(path)
    if len(raw) < 4:
        raise DataFormatError(f"{path}: truncated header")
    (magic,) = struct.unpack(">I", raw[:4])
    if magic == _IDX_MAGIC_IMAGES:
        ndim = 3
    elif magic == _IDX_MAGIC_LABELS:
        ndim = 1
    else:
        raise DataFormatError(f"{path}: bad magic 0x{magic:08X}")
    header_len = 4 + 4 * ndim
    if len(raw) < header_len:
        raise DataFormatError(f"{path}: truncated dimension header")
    dims = struct.unpack(f">{ndim}I", raw[4:header_len])
    count = int(np.prod([int(d) for d in dims], dtype=np.int64))
    payload = raw[header_len:]
    if len(payload) != count:
        raise DataFormatError(
            f"{path}: header declares {count} bytes, payload has {len(payload)}"
        )
    data = np.frombuffer(payload, dtype=np.uint8).reshape(dims)
    if magic == _IDX_MAGIC_IMAGES:
        return data.astype(np.float64) / 255.0
    return data.astype(np.int64)


def load_cifar10(
    directory: str | os.PathLike, grayscale: bool = True
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Load the CIFAR-10 binary batches from a directory.

    Each record is 3073 bytes: one label byte then 3072 channel-major
    (R, G, B) pixel bytes of a 32x32 image.

    Args:
        directory: directory holding data_batch_1..5.bin and test_batch.bin.
        grayscale: average the color channels to a 1024-dim vector
            (default); otherwise keep the flattened 3072-dim layout.

    Returns:
        (train_images, train_labels, test_images, test_labels) with images
        scaled to [0, 1].

    Raises:
        DataFormatError: a file length is not a multiple of the record size.
        DataUnavailableError: a batch file is missing.
    """
    directory = Path(directory)
    train_parts = []
    label_parts = []
    names = [f"data_batch_{i}.bin" for i in range(1, 6)]
    for name in names + ["test_batch.bin"]:
        path = directory / name
        if not path.is_file():
            raise DataUnavailableError(f"CIFAR-10 batch {path} not found")
        raw = _read_binary(path)
        if len(raw) % _CIFAR_RECORD_BYTES != 0:
            raise DataFormatError(
                f"{path}: length {len(raw)} is not a multiple of "
                f"{_CIFAR_RECORD_BYTES}-byte records"
            )
        records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, _CIFAR_RECORD_BYTES)
        labels = records[:, 0].astype(np.int64)
        pixels = records[:, 1:].astype(np.float64) / 255.0
        if grayscale:
            pixels = pixels.reshape(-1, 3, 1024).mean(axis=1)
        if name.startswith("data_batch"):
            train_parts.append(pixels)
            label_parts.append(labels)
        else:
            test_images, test_labels = pixels, labels
    return np.vstack(train_parts), np.concatenate(label_parts), test_images, test_labels


@dataclass(frozen=True)
class PCABasis:
    """Fitted PCA statistics.

    Attributes:
        mean: per-feature mean of the fit split.
        components: (D, d_out) matrix of orthonormal eigenvector columns in
            decreasing eigenvalue order, signs fixed deterministically.
        eigenvalues: covariance eigenvalues of the kept components.
        variance_captured: fraction of total fit-split variance kept.
        rank_deficient: True when the fit split has rank below d_out.
    """

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    variance_captured: float
    rank_deficient: bool

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) @ self.components


def _fit_rows(X: np.ndarray, fit_split) -> np.ndarray:
    if fit_split is None:
        return X
    return X[np.asarray(fit_split)]


def _fit_pca(X_fit: np.ndarray, d_out: int) -> PCABasis:
    n, dim = X_fit.shape
    if not 1 <= d_out <= dim:
        raise ValueError(f"d_out must be in [1, {dim}], got {d_out}")
    if n < 2:
        raise ValueError("need at least 2 fit rows")
    mean = X_fit.mean(axis=0)
    centered = X_fit - mean
    # SVD of the centered matrix is the numerically stable route to the
    # covariance eigendecomposition.
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    eigenvalues = svals**2 / (n - 1)
    total = float(eigenvalues.sum())
    rank = int(np.sum(eigenvalues > max(total, 1.0) * 1e-15))
    components = vt[:d_out].T.copy()
    # Deterministic sign convention: the largest-magnitude entry of each
    # component is positive, so refits reproduce identical matrices.
    anchor = np.argmax(np.abs(components), axis=0)
    signs = np.sign(components[anchor, np.arange(components.shape[1])])
    signs[signs == 0.0] = 1.0
    components *= signs
    kept = eigenvalues[:d_out].copy()
    captured = float(kept.sum() / total) if total > 0.0 else 1.0
    deficient = rank < d_out
    if deficient:
        warnings.warn(
            f"fit split has rank {rank} < d_out={d_out}; trailing components "
            "span noise directions",
            RuntimeWarning,
            stacklevel=3,
        )
    return PCABasis(
        mean=mean,
        components=components,
        eigenvalues=kept,
        variance_captured=captured,
        rank_deficient=deficient,
    )


def pca_reduce(
    X: np.ndarray, d_out: int, fit_split=None
) -> tuple[np.ndarray, PCABasis, float]:
    """Project onto the top principal components of the fit split.

    Args:
        X: (P, D) data matrix.
        d_out: number of components to keep.
        fit_split: row indices (or boolean mask) of the split used to fit
            the mean and basis; None fits on all rows.

    Returns:
        (X_reduced, basis, variance_captured) where X_reduced is
        (X - mean) @ basis.components and variance_captured is the kept
        fraction of fit-split variance.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    basis = _fit_pca(_fit_rows(X, fit_split), d_out)
    return basis.transform(X), basis, basis.variance_captured


def project_sphere(X: np.ndarray) -> np.ndarray:
    """Scale each row to unit Euclidean norm.

    Args:
        X: (P, d) matrix with no zero rows.

    Returns:
        Matrix whose rows are unit-norm within 1e-12.

    Raises:
        ValueError: a row has (numerically) zero norm.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    norms = np.linalg.norm(X, axis=1)
    bad = np.nonzero(norms < 1e-12)[0]
    if bad.size:
        raise ValueError(f"zero-norm row at index {int(bad[0])}")
    return X / norms[:, None]


def whiten(
    X: np.ndarray, fit_split=None, n_components: int | None = None
) -> tuple[np.ndarray, PCABasis]:
    """Decorrelate and rescale so the fit-split covariance is the identity.

    Args:
        X: (P, D) data matrix.
        fit_split: rows used to fit mean/basis/eigenvalues (None = all).
        n_components: components to keep (default: all of D).

    Returns:
        (X_white, basis) with X_white = (X - mean) @ components / sqrt(eig).

    Raises:
        ValueError: a kept eigenvalue is at or below 1e-10 (the offending
            component index is reported).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    d_out = X.shape[1] if n_components is None else n_components
    basis = _fit_pca(_fit_rows(X, fit_split), d_out)
    small = np.nonzero(basis.eigenvalues <= _EIGENVALUE_FLOOR)[0]
    if small.size:
        idx = int(small[0])
        raise ValueError(
            f"component {idx} has near-zero eigenvalue "
            f"{basis.eigenvalues[idx]:.3e}; cannot whiten"
        )
    white = basis.transform(X) / np.sqrt(basis.eigenvalues)
    return white, basis


class PCAReducer(TransformerMixin, BaseEstimator):
    """PCA projection (optionally whitened) fit on the training split.

    Parameters:
        n_components: dimensions to keep.
        whiten: if True, rescale each kept component to unit variance.
    """

    def __init__(self, n_components: int = 18, whiten: bool = False):
        self.n_components = n_components
        self.whiten = whiten

    def fit(self, X, y=None):
        basis = _fit_pca(np.asarray(X, dtype=float), self.n_components)
        if self.whiten:
            small = np.nonzero(basis.eigenvalues <= _EIGENVALUE_FLOOR)[0]
            if small.size:
                idx = int(small[0])
                raise ValueError(
                    f"component {idx} has near-zero eigenvalue "
                    f"{basis.eigenvalues[idx]:.3e}; cannot whiten"
                )
        self.basis_ = basis
        self.variance_captured_ = basis.variance_captured
        return self

    def transform(self, X):
        if not hasattr(self, "basis_"):
            raise RuntimeError("PCAReducer is not fitted")
        out = self.basis_.transform(X)
        if self.whiten:
            out = out / np.sqrt(self.basis_.eigenvalues)
        return out


class SphereProjector(TransformerMixin, BaseEstimator):
    """Stateless transformer scaling every row to unit norm."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return project_sphere(X)


def synth_manifold(P: int, d: int, seed: int) -> SampleSet:
    """Single-coordinate manifold: x_1 ~ N(0, d), other coordinates 0.

    The target is y = x_1, so the linear-scaled kernel has unit feature
    scale eta = 1 on this distribution.

    Args:
        P: sample count.
        d: ambient dimension.
        seed: RNG seed.

    Returns:
        SampleSet with targets y = x_1.
    """
    if d < 1 or P < 1:
        raise ValueError("P and d must be positive")
    rng = np.random.default_rng(seed)
    inputs = np.zeros((P, d))
    inputs[:, 0] = rng.standard_normal(P) * np.sqrt(d)
    return SampleSet(
        inputs=inputs,
        targets=inputs[:, 0].copy(),
        source="manifold",
        preprocessing=({"step": "synth-manifold", "P": P, "d": d},),
        seed=seed,
    )


def synth_hypercube_correlated(P: int, d: int, alpha: float, seed: int) -> SampleSet:
    """Mixture of the all-coordinates-equal and uniform hypercube laws.

    With probability 1 - alpha a row is (s, s, ..., s) with s uniform in
    {-1, +1}; otherwise its coordinates are i.i.d. uniform signs.  Targets
    are the parity y = prod_i x_i.

    Args:
        P: sample count.
        d: cube dimension (even d collapses the correlated rows to y = 1).
        alpha: mixture weight of the uniform component, in [0, 1].
        seed: RNG seed.

    Returns:
        SampleSet with parity targets.
    """
    if d < 1 or P < 1:
        raise ValueError("P and d must be positive")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    uniform_row = rng.random(P) < alpha
    inputs = np.empty((P, d))
    signs = rng.integers(0, 2, size=(P, d)) * 2.0 - 1.0
    inputs[uniform_row] = signs[uniform_row]
    inputs[~uniform_row] = signs[~uniform_row, :1]
    targets = np.prod(inputs, axis=1)
    return SampleSet(
        inputs=inputs,
        targets=targets,
        source="hypercube-correlated",
        preprocessing=(
            {"step": "synth-hypercube", "P": P, "d": d, "alpha": alpha},
        ),
        seed=seed,
    )


def cube_to_sphere(X: np.ndarray) -> np.ndarray:
    """Scale hypercube corners onto the unit sphere (divide by sqrt(d))."""
    X = np.asarray(X, dtype=float)
    return X / np.sqrt(X.shape[1])


def synth_onehot_sequences(P: int, L_ctx: int, V_vocab: int, seed: int) -> SampleSet:
    """Uniform i.i.d. one-hot token sequences with copy targets.

    Each sample has positions a = 1..L_ctx+1, every position a one-hot row
    over a vocabulary of V_vocab + 1 tokens.  The attached targets are the
    inputs shifted by one position: target block a holds the one-hot token
    from position a - 1, for a = 2..L_ctx+1.

    Args:
        P: sample count.
        L_ctx: context length, at least 2.
        V_vocab: vocabulary parameter, at least 2 (tokens range over
            V_vocab + 1 symbols).
        seed: RNG seed.

    Returns:
        SampleSet with inputs (P, (L_ctx+1)(V_vocab+1)) and targets
        (P, L_ctx*(V_vocab+1)), both flattened row-major over positions.
    """
    if L_ctx < 2 or V_vocab < 2:
        raise ValueError("need L_ctx >= 2 and V_vocab >= 2")
    rng = np.random.default_rng(seed)
    n_tokens = V_vocab + 1
    tokens = rng.integers(0, n_tokens, size=(P, L_ctx + 1))
    onehot = np.zeros((P, L_ctx + 1, n_tokens))
    rows = np.arange(P)[:, None]
    cols = np.arange(L_ctx + 1)[None, :]
    onehot[rows, cols, tokens] = 1.0
    targets = onehot[:, :L_ctx, :].reshape(P, L_ctx * n_tokens).copy()
    return SampleSet(
        inputs=onehot.reshape(P, (L_ctx + 1) * n_tokens),
        targets=targets,
        source="onehot-seq",
        preprocessing=(
            {"step": "synth-onehot-seq", "P": P, "L": L_ctx, "V": V_vocab},
        ),
        seed=seed,
    )


def sequence_view(sample_set: SampleSet) -> np.ndarray:
    """Reshape a one-hot sequence SampleSet to (P, L+1, V+1) token matrices."""
    if sample_set.source != "onehot-seq":
        raise ValueError("sequence_view needs an onehot-seq SampleSet")
    params = sample_set.preprocessing[0]
    n_tokens = params["V"] + 1
    return sample_set.inputs.reshape(sample_set.n_samples, params["L"] + 1, n_tokens)


def _mnist_file(root: Path, dataset: str, stem: str) -> Path:
    for candidate in (root / dataset / stem, root / dataset / f"{stem}.gz"):
        if candidate.is_file():
            return candidate
    raise DataUnavailableError(f"{dataset} file {stem}[.gz] not found under {root}")


def real_data_pipeline(
    dataset: str,
    data_dir: str | os.PathLike | None = None,
    d_out: int = 18,
    whiten_data: bool = False,
    grayscale: bool = True,
) -> tuple[SampleSet, SampleSet]:
    """Load, PCA-reduce, optionally whiten, and sphere-project real data.

    The PCA mean/basis (and whitening scales) are fit on the training split
    only and applied to both splits; each split is then projected to the
    unit sphere, satisfying the uniform-sphere support condition.

    Args:
        dataset: "mnist", "fashion-mnist", or "cifar10".
        data_dir: dataset root (falls back to $SPECTRALBIAS_DATA).
        d_out: PCA output dimension.
        whiten_data: rescale components to unit train variance before the
            sphere projection.
        grayscale: CIFAR-10 only; average color channels before PCA.

    Returns:
        (train, test) SampleSets with class labels as targets and the full
        preprocessing chain recorded.
    """
    root = resolve_data_dir(data_dir)
    if dataset in ("mnist", "fashion-mnist"):
        train_x = load_idx(_mnist_file(root, dataset, "train-images-idx3-ubyte"))
        train_y = load_idx(_mnist_file(root, dataset, "train-labels-idx1-ubyte"))
        test_x = load_idx(_mnist_file(root, dataset, "t10k-images-idx3-ubyte"))
        test_y = load_idx(_mnist_file(root, dataset, "t10k-labels-idx1-ubyte"))
        train_x = train_x.reshape(train_x.shape[0], -1)
        test_x = test_x.reshape(test_x.shape[0], -1)
        chain = [{"step": "load-idx", "dataset": dataset}]
    elif dataset == "cifar10":
        train_x, train_y, test_x, test_y = load_cifar10(
            root / "cifar-10-batches-bin", grayscale=grayscale
        )
        chain = [{"step": "load-cifar10", "grayscale": grayscale}]
    else:
        raise ValueError(f"unknown real dataset {dataset!r}")

    reducer = PCAReducer(n_components=d_out, whiten=whiten_data).fit(train_x)
    train_red = reducer.transform(train_x)
    test_red = reducer.transform(test_x)
    chain.append(
        {
            "step": "pca",
            "d_out": d_out,
            "whiten": whiten_data,
            "variance_captured": reducer.variance_captured_,
        }
    )
    train_unit = project_sphere(train_red)
    test_unit = project_sphere(test_red)
    chain.append({"step": "project-sphere"})
    make = lambda inputs, labels: SampleSet(
        inputs=inputs,
        targets=labels.astype(np.float64),
        source=dataset,
        preprocessing=tuple(chain),
        seed=0,
    )
    return make(train_unit, train_y), make(test_unit, test_y)


def _sample_set_payload(sample_set: SampleSet) -> bytes:
    parts = [np.ascontiguousarray(sample_set.inputs, dtype=np.float64).tobytes()]
    if sample_set.targets is not None:
        parts.append(
            np.ascontiguousarray(sample_set.targets, dtype=np.float64).tobytes()
        )
    return b"".join(parts)


def save_sample_set(sample_set: SampleSet, stem: str | os.PathLike) -> None:
    """Cache a SampleSet as <stem>.bin plus a <stem>.json sidecar.

    The sidecar records shapes, the preprocessing chain, the seed, and the
    SHA-256 of the binary payload for integrity checking on reload.
    """
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    payload = _sample_set_payload(sample_set)
    stem.with_suffix(".bin").write_bytes(payload)
    sidecar = {
        "source": sample_set.source,
        "seed": sample_set.seed,
        "preprocessing": list(sample_set.preprocessing),
        "inputs_shape": list(sample_set.inputs.shape),
        "targets_shape": None
        if sample_set.targets is None
        else list(sample_set.targets.shape),
        "dtype": "float64",
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    stem.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True))


def load_sample_set(stem: str | os.PathLike) -> SampleSet:
    """Load a cached SampleSet, verifying the payload checksum."""
    stem = Path(stem)
    if not stem.with_suffix(".json").is_file() or not stem.with_suffix(".bin").is_file():
        raise DataUnavailableError(f"no cached sample set at {stem}")
    sidecar = json.loads(stem.with_suffix(".json").read_text())
    payload = stem.with_suffix(".bin").read_bytes()
    digest = hashlib.sha256(payload).hexdigest()
    if digest != sidecar["sha256"]:
        raise DataFormatError(f"{stem}.bin checksum mismatch")
    in_shape = tuple(sidecar["inputs_shape"])
    n_in = int(np.prod(in_shape))
    flat = np.frombuffer(payload, dtype=np.float64)
    inputs = flat[:n_in].reshape(in_shape).copy()
    targets = None
    if sidecar["targets_shape"] is not None:
        t_shape = tuple(sidecar["targets_shape"])
        targets = flat[n_in : n_in + int(np.prod(t_shape))].reshape(t_shape).copy()
    return SampleSet(
        inputs=inputs,
        targets=targets,
        source=sidecar["source"],
        preprocessing=tuple(sidecar["preprocessing"]),
        seed=int(sidecar["seed"]),
    )
