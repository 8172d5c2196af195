"""Shared fixtures: synthetic IDX / CIFAR-10 files for pipeline tests."""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np
import pytest

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


def write_idx_images(path: Path, images: np.ndarray, compress: bool = False) -> None:
    """Write a uint8 (n, rows, cols) array in IDX image format."""
    n, rows, cols = images.shape
    payload = struct.pack(">IIII", IDX_IMAGES_MAGIC, n, rows, cols)
    payload += images.astype(np.uint8).tobytes()
    if compress:
        path.write_bytes(gzip.compress(payload))
    else:
        path.write_bytes(payload)


def write_idx_labels(path: Path, labels: np.ndarray, compress: bool = False) -> None:
    """Write a uint8 (n,) array in IDX label format."""
    payload = struct.pack(">II", IDX_LABELS_MAGIC, labels.shape[0])
    payload += labels.astype(np.uint8).tobytes()
    if compress:
        path.write_bytes(gzip.compress(payload))
    else:
        path.write_bytes(payload)


def make_fake_mnist(root: Path, n_train: int = 256, n_test: int = 64, seed: int = 9) -> Path:
    """Create a gzip-compressed MNIST-layout dataset under root/mnist."""
    rng = np.random.default_rng(seed)
    mnist = root / "mnist"
    mnist.mkdir(parents=True)
    write_idx_images(
        mnist / "train-images-idx3-ubyte.gz",
        rng.integers(0, 256, size=(n_train, 28, 28), dtype=np.uint8),
        compress=True,
    )
    write_idx_labels(
        mnist / "train-labels-idx1-ubyte.gz",
        rng.integers(0, 10, size=n_train, dtype=np.uint8),
        compress=True,
    )
    write_idx_images(
        mnist / "t10k-images-idx3-ubyte.gz",
        rng.integers(0, 256, size=(n_test, 28, 28), dtype=np.uint8),
        compress=True,
    )
    write_idx_labels(
        mnist / "t10k-labels-idx1-ubyte.gz",
        rng.integers(0, 10, size=n_test, dtype=np.uint8),
        compress=True,
    )
    return root


def make_fake_cifar(root: Path, per_batch: int = 20, seed: int = 11) -> Path:
    """Create five train batches plus a test batch of CIFAR-10 binary records."""
    rng = np.random.default_rng(seed)
    cifar = root / "cifar-10-batches-bin"
    cifar.mkdir(parents=True)
    names = [f"data_batch_{i}.bin" for i in range(1, 6)] + ["test_batch.bin"]
    for name in names:
        records = bytearray()
        for _ in range(per_batch):
            records.append(int(rng.integers(0, 10)))
            records.extend(rng.integers(0, 256, size=3072, dtype=np.uint8).tobytes())
        (cifar / name).write_bytes(bytes(records))
    return root


@pytest.fixture
def fake_mnist_root(tmp_path):
    return make_fake_mnist(tmp_path)


@pytest.fixture
def fake_cifar_root(tmp_path):
    return make_fake_cifar(tmp_path)
