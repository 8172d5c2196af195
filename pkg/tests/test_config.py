"""Config schema: defaults, strict validation, and file round-trips."""

import json

import pytest

from spectralbias import (
    ConfigError,
    EXPERIMENT_KINDS,
    ExperimentConfig,
    default_config,
    default_p_grid,
    load_config,
    validate_config,
    validate_config_dict,
)

FROZEN_DEFAULT_GRID = (
    8, 12, 18, 28, 42, 64, 97, 147, 223, 338,
    512, 776, 1176, 1783, 2702, 4096,
)


def test_default_p_grid_frozen_values():
    assert default_p_grid() == FROZEN_DEFAULT_GRID


def test_default_p_grid_is_ascending_and_deduplicated():
    grid = default_p_grid(3, 12, 40)  # more points than integers available
    assert all(a < b for a, b in zip(grid, grid[1:]))
    assert grid[0] == 3 and grid[-1] == 12


def test_default_p_grid_degenerate_and_invalid():
    assert default_p_grid(5, 5, 1) == (5,)
    with pytest.raises(ValueError):
        default_p_grid(10, 5)
    with pytest.raises(ValueError):
        default_p_grid(0, 5)


def test_defaults_round_trip_through_json():
    config = default_config("fig1-sphere")
    blob = json.dumps(config.to_dict())
    parsed, errors = validate_config_dict(json.loads(blob))
    assert errors == []
    assert parsed == config


def test_default_config_per_experiment_overrides():
    fig1 = default_config("fig1-sphere")
    assert fig1.d == 8 and fig1.sigma2 == 1.0
    assert fig1.p_grid == FROZEN_DEFAULT_GRID
    for kind in ("fig2-real", "fig3-whitened"):
        cfg = default_config(kind)
        assert cfg.d == 18 and cfg.sigma2 == 0.1
        assert cfg.p_grid[-1] == 4000 <= cfg.subset_size
    assert default_config("vignette-manifold").sigma2 == 200.0


def test_default_config_rejects_unknown_kind():
    with pytest.raises(ConfigError, match="unknown kind"):
        default_config("fig9-imaginary")


def test_every_experiment_kind_has_valid_defaults():
    for kind in EXPERIMENT_KINDS:
        config, errors = validate_config_dict({"experiment": kind})
        assert errors == []
        assert config.experiment == kind


def test_validate_rejects_non_object():
    config, errors = validate_config_dict(["experiment", "fig1-sphere"])
    assert config is None
    assert errors == ["config: top-level value must be a JSON object"]


def test_validate_requires_experiment_key():
    config, errors = validate_config_dict({"d": 4})
    assert config is None
    assert any("experiment: missing required key" in e for e in errors)


def test_validate_rejects_unknown_keys_and_names_them():
    config, errors = validate_config_dict(
        {"experiment": "fig1-sphere", "sigma_sq": 1.0}
    )
    assert config is None
    assert errors == ["sigma_sq: unknown key"]


def test_validate_lists_choices_for_unknown_kind():
    _, errors = validate_config_dict({"experiment": "fig4"})
    assert len(errors) == 1
    assert "fig1-sphere" in errors[0] and "prop21-demo" in errors[0]


def test_validate_lists_choices_for_unknown_kernel():
    _, errors = validate_config_dict(
        {"experiment": "fig1-sphere", "kernel": "rbf"}
    )
    assert len(errors) == 1
    assert errors[0].startswith("kernel: unknown family 'rbf'")
    assert "arccos-ntk-1layer" in errors[0]


@pytest.mark.parametrize(
    "patch, fragment",
    [
        ({"d": True}, "d: expected an integer"),
        ({"d": 0}, "d: must be >= 1"),
        ({"d": 4.0}, "d: expected an integer"),
        ({"sigma2": 0.0}, "sigma2: must be positive"),
        ({"sigma2": "big"}, "sigma2: expected a number"),
        ({"feature_degrees": []}, "feature_degrees: expected a nonempty list"),
        ({"feature_degrees": [1, 0]}, "feature_degrees: entry 0 is below 1"),
        ({"p_grid": [8, 8, 16]}, "p_grid: entries must be strictly ascending"),
        ({"p_grid": [32, 16]}, "p_grid: entries must be strictly ascending"),
        ({"pool_size": 1}, "pool_size: must be >= 2"),
        ({"eps_values": [0.5, 1.0]}, "eps_values: entry 1.0 outside [0, 1)"),
        ({"eps_values": [-0.1]}, "eps_values: entry -0.1 outside [0, 1)"),
        ({"eps_values": [True]}, "eps_values: entry True is not a number"),
        ({"n_mc": 1}, "n_mc: must be >= 2"),
        ({"seeds": [0, -1]}, "seeds: entry -1 is below 0"),
        ({"dataset": "imagenet"}, "dataset: unknown dataset 'imagenet'"),
        ({"data_dir": 7}, "data_dir: expected a string or null"),
        ({"out_dir": ""}, "out_dir: expected a nonempty string"),
        ({"copyhead_sizes": [[4]]}, "copyhead_sizes: entry [4]"),
        ({"copyhead_sizes": [[4, 1]]}, "copyhead_sizes: entry [4, 1]"),
        ({"grayscale": 1}, "grayscale: expected a boolean"),
    ],
)
def test_validate_rejects_bad_field(patch, fragment):
    raw = {"experiment": "fig1-sphere", **patch}
    config, errors = validate_config_dict(raw)
    assert config is None
    assert any(fragment in e for e in errors), errors


def test_validate_accumulates_multiple_errors():
    _, errors = validate_config_dict(
        {"experiment": "fig1-sphere", "d": -1, "sigma2": -2.0, "bogus": 1}
    )
    assert len(errors) == 3


def test_validate_cross_checks_grid_against_pool():
    _, errors = validate_config_dict(
        {"experiment": "fig1-sphere", "p_grid": [8, 64], "pool_size": 32}
    )
    assert errors == ["p_grid: largest value 64 exceeds pool_size 32"]


def test_validate_cross_checks_grid_against_real_subset():
    raw = {"experiment": "fig2-real", "p_grid": [8, 4096], "subset_size": 4000}
    _, errors = validate_config_dict(raw)
    assert errors == ["p_grid: largest value 4096 exceeds subset_size 4000"]
    # the same grid is fine for the synthetic experiment
    config, errors = validate_config_dict(
        {"experiment": "fig1-sphere", "p_grid": [8, 4096], "subset_size": 4000}
    )
    assert errors == [] and config is not None


def test_validate_accepts_null_data_dir_and_overrides():
    config, errors = validate_config_dict(
        {
            "experiment": "fig2-real",
            "dataset": "cifar10",
            "data_dir": None,
            "grayscale": False,
            "copyhead_sizes": [[4, 8]],
        }
    )
    assert errors == []
    assert config.dataset == "cifar10"
    assert config.data_dir is None
    assert config.grayscale is False
    assert config.copyhead_sizes == ((4, 8),)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps({"experiment": "fig1-sphere", "d": 3, "seeds": [7]})
    )
    config = load_config(path)
    assert config == default_config("fig1-sphere", d=3, seeds=(7,))
    assert validate_config(path) == []


def test_load_config_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/nonexistent/run.json")
    assert validate_config("/nonexistent/run.json") == [
        "config file /nonexistent/run.json not found"
    ]


def test_load_config_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(path)
    errors = validate_config(path)
    assert len(errors) == 1 and "not valid JSON" in errors[0]


def test_load_config_validation_failure_carries_field_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"experiment": "fig1-sphere", "d": 0}))
    with pytest.raises(ConfigError) as excinfo:
        load_config(path)
    assert excinfo.value.errors == ["d: must be >= 1, got 0"]


def test_config_is_immutable():
    config = default_config("fig1-sphere")
    with pytest.raises(Exception):
        config.d = 3  # frozen dataclass
