import json
import os

import pytest

import app
from data import SCHEMAS, read_csv, write_csv


def _write(tmp_path, config, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config, indent=2))
    return str(path)


@pytest.mark.parametrize("kind", sorted(app.experiment_registry))
def test_every_experiment_runs_its_test_inputs(tmp_path, kind):
    config = app.experiment_registry[kind].experiment()["test_inputs"]
    path = _write(tmp_path, config)
    prefix = str(tmp_path / "out" / kind)
    assert app.main(["run", path, "--out", prefix]) == app.EXIT_OK
    with open(f"{prefix}_meta.json") as f:
        meta = json.load(f)
    assert meta["kind"] == kind
    assert meta["version"] == app.app_config()["version"]
    assert all(os.path.exists(output) for output in meta["outputs"])


def test_sweep_writes_criticals(tmp_path):
    config = app.experiment_registry["sweep"].experiment()["test_inputs"]
    prefix = str(tmp_path / "sweep")
    app.run(_write(tmp_path, config), out=prefix)
    with open(f"{prefix}_criticals.json") as f:
        report = json.load(f)
    assert [c["omega"] for c in report["criticals"]] == pytest.approx([2.0, 4.0], abs=1e-6)
    assert [i["zone"] for i in report["intervals"]] == ["IV", "II", "I"]
    frame = read_csv(f"{prefix}_phase_diagram.csv", "phase_diagram")
    assert list(frame.columns) == list(SCHEMAS["phase_diagram"])


def test_outputs_are_deterministic(tmp_path):
    config = app.experiment_registry["simulate"].experiment()["test_inputs"]
    path = _write(tmp_path, config)
    first = app.run(path, out=str(tmp_path / "first"))
    second = app.run(path, out=str(tmp_path / "second"))
    for a, b in zip(first["outputs"], second["outputs"]):
        if a.endswith("_meta.json"):
            continue
        with open(a) as fa, open(b) as fb:
            assert fa.read() == fb.read()


def test_csv_round_trip_is_stable(tmp_path):
    config = app.experiment_registry["floquet"].experiment()["test_inputs"]
    prefix = str(tmp_path / "floquet")
    app.run(_write(tmp_path, config), out=prefix)
    original = f"{prefix}_floquet_trajectory.csv"
    frame = read_csv(original, "floquet_trajectory")
    copy = write_csv(frame, str(tmp_path / "copy.csv"), "floquet_trajectory")
    with open(original) as fa, open(copy) as fb:
        assert fa.read() == fb.read()


def test_missing_field_is_a_config_error(tmp_path, capsys):
    path = _write(tmp_path, {"kind": "simulate", "inertia": {"i1": 1.0, "i2": 1.0, "i3": 2.0}, "dt": 0.01})
    assert app.main(["run", path]) == app.EXIT_CONFIG
    assert "missing required field" in capsys.readouterr().err


def test_bad_value_error_points_at_its_line(tmp_path, capsys):
    config = {"kind": "simulate", "inertia": {"i1": 1.0, "i2": 1.0, "i3": 2.0},
              "initial": [0.0, 0.0, 1.0], "dt": "fast", "steps": 10}
    path = _write(tmp_path, config)
    assert app.main(["run", path]) == app.EXIT_CONFIG
    err = capsys.readouterr().err
    line = json.dumps(config, indent=2).splitlines().index('  "dt": "fast",') + 1
    assert err.startswith(f"{path}:{line}:")


@pytest.mark.parametrize(
    "config",
    [
        {"kind": "teleport", "inertia": {"i1": 1.0, "i2": 1.0, "i3": 1.0}},
        {"kind": "simulate", "inertia": {"i1": 1.0, "i2": 1.0, "i3": 2.0, "k4": 1.0},
         "initial": [0.0, 0.0, 1.0], "dt": 0.01, "steps": 10},
        {"kind": "simulate", "inertia": {"i1": 1.0, "i2": 1.0, "i3": 2.0},
         "initial": [0.0, 0.0, 1.0], "dt": 0.01, "steps": 10, "colour": "red"},
        {"kind": "spectrum", "inertia": {"i1": 1.0, "i2": 1.0, "i3": 2.0},
         "direction": [0.0, 0.0, 1.0], "omega": [0.0, 1.0]},
        {"kind": "sweep", "twisting": {"chi1": 1.0, "chi2": 0.0, "chi3": 0.0},
         "direction": [0.0, 0.0, 1.0], "omega": [1.0, 0.5], "bigj": 1.0},
        {"kind": "floquet", "protocol": {"i0": 1.0, "k3": 0.0, "tau0": 45.2},
         "initial": [1.2, -0.02, 1.98], "periods": 2},
        {"kind": "sweep", "twisting": {"chi1": 4.0, "chi2": 3.0, "chi3": 2.0},
         "direction": [0.0, 0.0, 1.0], "omega": [0.5, 1.0], "bigj": 0.0},
        {"kind": "stationary", "twisting": {"chi1": 4.0, "chi2": 3.0, "chi3": 2.0}, "bigj": -1.0},
        {"kind": "sweep", "twisting": {"chi1": 4.0, "chi2": 3.0, "chi3": 2.0},
         "direction": [0.0, 0.0, 1.0], "omega": [0.5, 1.0]},
    ],
)
def test_invalid_configs_exit_with_config_code(tmp_path, config):
    assert app.main(["run", _write(tmp_path, config)]) == app.EXIT_CONFIG


def test_unreadable_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "kind": "simulate",\n  oops\n}')
    assert app.main(["run", str(path)]) == app.EXIT_CONFIG
    assert f"{path}:3:" in capsys.readouterr().err


def test_numeric_failure_exit_code(tmp_path):
    config = {"kind": "simulate", "inertia": {"i1": 1.0, "i2": 2.0, "i3": 3.0},
              "initial": [1e3, 1e3, 1e3], "dt": 10.0, "steps": 1000}
    assert app.main(["run", _write(tmp_path, config), "--out", str(tmp_path / "boom")]) == app.EXIT_NUMERIC


def test_recipes_are_listed(capsys):
    assert app.main(["recipes"]) == app.EXIT_OK
    out = capsys.readouterr().out
    for recipe_id in ("fig5", "fig8a", "fig9a", "fig12", "fig14"):
        assert recipe_id in out


def test_every_recipe_points_at_a_valid_config():
    for recipe in app.app_config()["recipes"]:
        path = app.recipe_path(recipe["id"])
        with open(path) as f:
            config = json.load(f)
        assert config["kind"] == recipe["kind"]


def test_recipe_target_runs(tmp_path):
    prefix = str(tmp_path / "fig5")
    assert app.main(["run", "recipe:fig5", "--out", prefix, "--log-level", "warning"]) == app.EXIT_OK
    assert os.path.exists(f"{prefix}_trajectory.csv")


def test_unknown_recipe(capsys):
    assert app.main(["run", "recipe:fig99"]) == app.EXIT_CONFIG


def test_negative_bigj_points_at_its_line(tmp_path, capsys):
    config = {"kind": "sweep", "twisting": {"chi1": 4.0, "chi2": 3.0, "chi3": 2.0},
              "direction": [0.0, 0.0, 1.0], "omega": [0.5, 1.0], "bigj": -1.0}
    path = _write(tmp_path, config)
    assert app.main(["run", path]) == app.EXIT_CONFIG
    err = capsys.readouterr().err
    line = json.dumps(config, indent=2).splitlines().index('  "bigj": -1.0') + 1
    assert err.startswith(f"{path}:{line}:")
    assert "must be positive" in err
