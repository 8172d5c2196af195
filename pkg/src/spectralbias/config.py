"""Experiment configuration: schema, defaults, and strict JSON validation.

A configuration is a flat JSON object.  Unknown keys are rejected rather
than ignored so a typo cannot silently fall back to a default, and every
reported error names the offending field.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .kernels import KERNEL_FAMILIES

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "EXPERIMENT_KINDS",
    "default_p_grid",
    "default_config",
    "validate_config_dict",
    "validate_config",
    "load_config",
]

EXPERIMENT_KINDS = (
    "fig1-sphere",
    "fig2-real",
    "fig3-whitened",
    "vignette-manifold",
    "vignette-parity",
    "vignette-copyhead",
    "prop21-demo",
)

_REAL_DATASETS = ("mnist", "fashion-mnist", "cifar10")


class ConfigError(ValueError):
    """A configuration failed validation; .errors lists field messages."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


def default_p_grid(low: int = 8, high: int = 4096, count: int = 16) -> tuple[int, ...]:
    """Log-spaced integer grid of training-set sizes, deduplicated."""
    if not 1 <= low <= high or count < 1:
        raise ValueError("need 1 <= low <= high and count >= 1")
    grid = []
    for k in range(count):
        t = k / max(count - 1, 1)
        value = round(math.exp(math.log(low) * (1 - t) + math.log(high) * t))
        if not grid or value > grid[-1]:
            grid.append(int(value))
    return tuple(grid)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated parameters of one experiment run.

    Attributes:
        experiment: one of EXPERIMENT_KINDS.
        kernel: kernel family name.
        d: input dimension (after preprocessing, for real datasets).
        sigma2: ridge parameter.
        feature_degrees: harmonic degrees of the target features.
        p_grid: training-set sizes, ascending.
        pool_size: per-seed sample pool; P values use its prefixes.
        eps_values: learnability shortfalls for the threshold columns.
        n_mc: Monte Carlo sample count for auxiliary-measure expectations.
        seeds: independent replication seeds.
        dataset: real dataset name (fig2/fig3).
        data_dir: dataset root; None defers to the environment variable.
        out_dir: directory receiving CSVs and the manifest.
        n_max_degree: highest degree in the spectrum table.
        subset_size: training rows used from a real dataset.
        copyhead_sizes: (L, V) pairs for the copying-head vignette.
        grayscale: average CIFAR-10 color channels before PCA.
    """

    experiment: str
    kernel: str = "arccos-nngp-1layer"
    d: int = 8
    sigma2: float = 1.0
    feature_degrees: tuple[int, ...] = (1, 2, 4)
    p_grid: tuple[int, ...] = field(default_factory=default_p_grid)
    pool_size: int = 10_000
    eps_values: tuple[float, ...] = (0.0, 0.7)
    n_mc: int = 10_000
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    dataset: str = "mnist"
    data_dir: str | None = None
    out_dir: str = "runs"
    n_max_degree: int = 20
    subset_size: int = 4000
    copyhead_sizes: tuple[tuple[int, int], ...] = (
        (4, 8),
        (8, 16),
        (64, 64),
        (8192, 65536),
    )
    grayscale: bool = True

    def to_dict(self) -> dict:
        """JSON-serializable dict mirroring the accepted config schema."""
        out = dataclasses.asdict(self)
        out["feature_degrees"] = list(self.feature_degrees)
        out["p_grid"] = list(self.p_grid)
        out["eps_values"] = list(self.eps_values)
        out["seeds"] = list(self.seeds)
        out["copyhead_sizes"] = [list(pair) for pair in self.copyhead_sizes]
        return out


_DEFAULT_OVERRIDES: dict[str, dict] = {
    "fig1-sphere": {},
    "fig2-real": {"d": 18, "sigma2": 0.1, "p_grid": default_p_grid(8, 4000, 16)},
    "fig3-whitened": {"d": 18, "sigma2": 0.1, "p_grid": default_p_grid(8, 4000, 16)},
    "vignette-manifold": {"sigma2": 200.0},
    "vignette-parity": {},
    "vignette-copyhead": {},
    "prop21-demo": {},
}


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    """Build the default configuration for an experiment kind."""
    if experiment not in EXPERIMENT_KINDS:
        raise ConfigError([f"experiment: unknown kind {experiment!r}"])
    params = dict(_DEFAULT_OVERRIDES[experiment])
    params.update(overrides)
    return ExperimentConfig(experiment=experiment, **params)


def _check_int(errors, raw, key, minimum=None, maximum=None):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, int):
        errors.append(f"{key}: expected an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        errors.append(f"{key}: must be >= {minimum}, got {value}")
        return None
    if maximum is not None and value > maximum:
        errors.append(f"{key}: must be <= {maximum}, got {value}")
        return None
    return value


def _check_number(errors, raw, key, positive=False):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{key}: expected a number, got {value!r}")
        return None
    value = float(value)
    if positive and not value > 0.0:
        errors.append(f"{key}: must be positive, got {value}")
        return None
    if not math.isfinite(value):
        errors.append(f"{key}: must be finite")
        return None
    return value


def _check_int_list(errors, raw, key, minimum, ascending=False):
    value = raw[key]
    if not isinstance(value, (list, tuple)) or not value:
        errors.append(f"{key}: expected a nonempty list of integers")
        return None
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, int):
            errors.append(f"{key}: entry {item!r} is not an integer")
            return None
        if item < minimum:
            errors.append(f"{key}: entry {item} is below {minimum}")
            return None
        out.append(item)
    if ascending and any(a >= b for a, b in zip(out, out[1:])):
        errors.append(f"{key}: entries must be strictly ascending")
        return None
    return tuple(out)


def validate_config_dict(raw: dict) -> tuple[ExperimentConfig | None, list[str]]:
    """Validate a parsed JSON object against the config schema.

    Args:
        raw: parsed JSON value.

    Returns:
        (config, errors); config is None whenever errors is nonempty.
    """
    errors: list[str] = []
    if not isinstance(raw, dict):
        return None, ["config: top-level value must be a JSON object"]
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key in sorted(set(raw) - known):
        errors.append(f"{key}: unknown key")
    if "experiment" not in raw:
        errors.append("experiment: missing required key")
        return None, errors
    experiment = raw["experiment"]
    if experiment not in EXPERIMENT_KINDS:
        errors.append(
            f"experiment: unknown kind {experiment!r} "
            f"(choices: {', '.join(EXPERIMENT_KINDS)})"
        )
        return None, errors

    fields: dict = {}
    if "kernel" in raw:
        if raw["kernel"] not in KERNEL_FAMILIES:
            errors.append(
                f"kernel: unknown family {raw['kernel']!r} "
                f"(choices: {', '.join(KERNEL_FAMILIES)})"
            )
        else:
            fields["kernel"] = raw["kernel"]
    if "d" in raw:
        value = _check_int(errors, raw, "d", minimum=1)
        if value is not None:
            fields["d"] = value
    if "sigma2" in raw:
        value = _check_number(errors, raw, "sigma2", positive=True)
        if value is not None:
            fields["sigma2"] = value
    if "feature_degrees" in raw:
        value = _check_int_list(errors, raw, "feature_degrees", minimum=1)
        if value is not None:
            fields["feature_degrees"] = value
    if "p_grid" in raw:
        value = _check_int_list(errors, raw, "p_grid", minimum=1, ascending=True)
        if value is not None:
            fields["p_grid"] = value
    if "pool_size" in raw:
        value = _check_int(errors, raw, "pool_size", minimum=2)
        if value is not None:
            fields["pool_size"] = value
    if "eps_values" in raw:
        value = raw["eps_values"]
        if not isinstance(value, (list, tuple)) or not value:
            errors.append("eps_values: expected a nonempty list of numbers")
        else:
            eps_out = []
            for item in value:
                if isinstance(item, bool) or not isinstance(item, (int, float)):
                    errors.append(f"eps_values: entry {item!r} is not a number")
                    eps_out = None
                    break
                if not 0.0 <= float(item) < 1.0:
                    errors.append(f"eps_values: entry {item} outside [0, 1)")
                    eps_out = None
                    break
                eps_out.append(float(item))
            if eps_out is not None:
                fields["eps_values"] = tuple(eps_out)
    if "n_mc" in raw:
        value = _check_int(errors, raw, "n_mc", minimum=2)
        if value is not None:
            fields["n_mc"] = value
    if "seeds" in raw:
        value = _check_int_list(errors, raw, "seeds", minimum=0)
        if value is not None:
            fields["seeds"] = value
    if "dataset" in raw:
        if raw["dataset"] not in _REAL_DATASETS:
            errors.append(
                f"dataset: unknown dataset {raw['dataset']!r} "
                f"(choices: {', '.join(_REAL_DATASETS)})"
            )
        else:
            fields["dataset"] = raw["dataset"]
    if "data_dir" in raw:
        if raw["data_dir"] is not None and not isinstance(raw["data_dir"], str):
            errors.append("data_dir: expected a string or null")
        else:
            fields["data_dir"] = raw["data_dir"]
    if "out_dir" in raw:
        if not isinstance(raw["out_dir"], str) or not raw["out_dir"]:
            errors.append("out_dir: expected a nonempty string")
        else:
            fields["out_dir"] = raw["out_dir"]
    if "n_max_degree" in raw:
        value = _check_int(errors, raw, "n_max_degree", minimum=0)
        if value is not None:
            fields["n_max_degree"] = value
    if "subset_size" in raw:
        value = _check_int(errors, raw, "subset_size", minimum=2)
        if value is not None:
            fields["subset_size"] = value
    if "copyhead_sizes" in raw:
        value = raw["copyhead_sizes"]
        pairs = []
        if not isinstance(value, (list, tuple)) or not value:
            errors.append("copyhead_sizes: expected a nonempty list of [L, V] pairs")
            pairs = None
        else:
            for item in value:
                if (
                    not isinstance(item, (list, tuple))
                    or len(item) != 2
                    or any(isinstance(x, bool) or not isinstance(x, int) for x in item)
                    or any(x < 2 for x in item)
                ):
                    errors.append(
                        f"copyhead_sizes: entry {item!r} is not a pair of ints >= 2"
                    )
                    pairs = None
                    break
                pairs.append((int(item[0]), int(item[1])))
        if pairs is not None:
            fields["copyhead_sizes"] = tuple(pairs)
    if "grayscale" in raw:
        if not isinstance(raw["grayscale"], bool):
            errors.append("grayscale: expected a boolean")
        else:
            fields["grayscale"] = raw["grayscale"]

    if errors:
        return None, errors
    config = default_config(experiment, **fields)
    if max(config.p_grid) > config.pool_size:
        errors.append(
            f"p_grid: largest value {max(config.p_grid)} exceeds "
            f"pool_size {config.pool_size}"
        )
    if config.experiment in ("fig2-real", "fig3-whitened") and max(
        config.p_grid
    ) > config.subset_size:
        errors.append(
            f"p_grid: largest value {max(config.p_grid)} exceeds "
            f"subset_size {config.subset_size}"
        )
    if errors:
        return None, errors
    return config, []


def validate_config(path: str | Path) -> list[str]:
    """Validate a config file; returns field-level error messages."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        return [f"config file {path} not found"]
    except json.JSONDecodeError as exc:
        return [f"config file {path} is not valid JSON: {exc}"]
    _, errors = validate_config_dict(raw)
    return errors


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a config file.

    Raises:
        ConfigError: the file is missing, malformed, or fails validation.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError([f"config file {path} not found"]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config file {path} is not valid JSON: {exc}"]) from None
    config, errors = validate_config_dict(raw)
    if errors:
        raise ConfigError(errors)
    return config
