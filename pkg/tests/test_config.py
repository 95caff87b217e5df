import json

import numpy as np
import pytest

from ramancomb.data.states import Fock, SqueezedVacuum, Thermal
from ramancomb.exceptions import ConfigError
from ramancomb.utils.config import ScenarioConfig, SweepSpec, dump, load, loads, parse_config

FIG2 = {
    "mode": "single",
    "inputs": [{"q": 0, "state": {"kind": "fock", "n": 5}}],
    "kappa_L": {"start": 0.0, "stop": 10.0, "steps": 501},
    "observables": ["mean_ratio", "gamma2_ratio"],
    "sidebands": [0, 1, 5],
    "output": {"path": "fig2.csv", "format": "csv"},
}

FIG4 = {
    "mode": "two",
    "inputs": [
        {"q": 1, "state": {"kind": "thermal", "mean": 1.0}},
        {"q": 0, "state": {"kind": "fock", "n": 5}},
    ],
    "kappa_L": 5.0,
    "observables": ["g2"],
    "sidebands": [-1, 2],
    "window": [-20, 20],
}


def test_minimal_config_defaults():
    config = parse_config({"mode": "single", "inputs": [{"q": 0, "state": {"kind": "vacuum"}}], "kappa_L": 1.5})
    assert config.window == "auto"
    assert config.sidebands == (0,)
    assert config.observables == ("mean_photon", "gamma2", "g2", "squeezing")
    assert config.output.path is None and config.output.format == "csv"
    np.testing.assert_array_equal(config.kappa_values(), [1.5])
    assert config.max_kappa_L == 1.5


def test_sweep_config():
    config = ScenarioConfig.from_dict(FIG2)
    assert isinstance(config.kappa_L, SweepSpec)
    values = config.kappa_values()
    assert len(values) == 501 and values[0] == 0.0 and values[-1] == 10.0
    assert config.max_kappa_L == 10.0
    assert config.sideband_observables() == ["mean_ratio", "gamma2_ratio"]
    assert config.pair_observables() == []
    assert config.input_map == {0: Fock(5)}


def test_two_mode_inputs_are_ordered():
    config = parse_config(FIG4)
    assert [q for q, _ in config.inputs] == [0, 1]
    assert config.nu == 1
    assert config.input_map[1] == Thermal(1.0)
    assert config.window == (-20, 20)


@pytest.mark.parametrize("data", [FIG2, FIG4])
def test_round_trip_through_text(data, tmp_path):
    config = parse_config(data)
    assert loads(config.dumps()) == config
    path = tmp_path / "scenario.json"
    dump(config, path)
    assert load(path) == config


def test_replace_applies_overrides():
    config = parse_config(FIG2)
    assert config.replace(out=None, format=None) is config
    changed = config.replace(out="other.json", format="json", window=8, seed=3)
    assert changed.output.path == "other.json"
    assert changed.output.format == "json"
    assert changed.window == 8
    assert changed.seed == 3
    assert changed.sidebands == config.sidebands
    with pytest.raises(ConfigError):
        config.replace(format="xml")


def test_syntax_error_reports_line():
    with pytest.raises(ConfigError) as error:
        loads('{\n  "mode": "single",\n  "inputs": [,\n}')
    assert error.value.line == 3
    assert "line 3" in str(error.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load(tmp_path / "absent.json")


def _with(**changes):
    data = json.loads(json.dumps(FIG2))
    data.update(changes)
    return data


@pytest.mark.parametrize(
    "data, field",
    [
        (_with(mode="triple"), "mode"),
        (_with(kappa_L=-1.0), "kappa_L"),
        (_with(kappa_L="long"), "kappa_L"),
        (_with(kappa_L={"start": 0.0, "stop": 1.0}), "kappa_L.steps"),
        (_with(kappa_L={"start": 0.0, "stop": 1.0, "steps": 0}), "kappa_L.steps"),
        (_with(observables=["mean_ratio", "W11"]), "observables[1]"),
        (_with(observables=[]), "observables"),
        (_with(observables=["g2", "g2"]), "observables"),
        (_with(inputs=[]), "inputs"),
        (_with(inputs=[{"q": 1, "state": {"kind": "fock", "n": 1}}]), "inputs"),
        (_with(inputs=[{"q": 0, "state": {"kind": "fock", "n": -2}}]), "inputs[0].state"),
        (_with(inputs=[{"q": 0, "state": {"kind": "laser"}}]), "inputs[0].state.kind"),
        (_with(window=[2, 5]), "window"),
        (_with(window=-3), "window"),
        (_with(pairs=[[0, 1]]), "pairs"),
        (_with(observables=["gamma_kl"], pairs=[[0]]), "pairs[0]"),
        (_with(observables=["concurrence"], pairs=[[0, 1]]), "observables"),
        (
            _with(
                inputs=[{"q": 0, "state": {"kind": "fock", "n": 1}}],
                observables=["concurrence"],
                pairs=[[0, 1], [2, 2]],
            ),
            "pairs[1]",
        ),
        (_with(observables=["marginal"]), "n_max"),
        (_with(sidebands=[0, 1.5]), "sidebands[1]"),
        (_with(output={"format": "xml"}), "output.format"),
        (_with(phi="zero"), "phi"),
    ],
)
def test_invalid_fields_are_named(data, field):
    with pytest.raises(ConfigError) as error:
        parse_config(data)
    assert error.value.field == field


def test_unknown_and_missing_keys():
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_config(_with(colour="red"))
    data = _with()
    del data["kappa_L"]
    with pytest.raises(ConfigError) as error:
        parse_config(data)
    assert error.value.field == "kappa_L"
    with pytest.raises(ConfigError):
        parse_config(["not", "an", "object"])


def test_mode_specific_inputs():
    two_photon = {
        "mode": "two_photon",
        "inputs": [
            {"q": 0, "state": {"kind": "fock", "n": 1}},
            {"q": 1, "state": {"kind": "fock", "n": 1}},
        ],
        "kappa_L": 1.0,
        "observables": ["W11"],
        "pairs": [[0, 1]],
        "sidebands": [],
    }
    config = parse_config(two_photon)
    assert config.pair_observables() == ["W11"]
    with pytest.raises(ConfigError) as error:
        parse_config(dict(two_photon, pairs=[[0, 0]]))
    assert error.value.field == "pairs[0]"
    two_photon["inputs"][1]["state"]["n"] = 2
    with pytest.raises(ConfigError):
        parse_config(two_photon)

    two = dict(FIG4, inputs=[{"q": 0, "state": {"kind": "squeezed_vacuum", "r": 1.0}}])
    with pytest.raises(ConfigError):
        parse_config(two)
    squeezed = parse_config(dict(FIG4, inputs=[
        {"q": 0, "state": {"kind": "squeezed_vacuum", "r": 1.0}},
        {"q": -2, "state": {"kind": "thermal", "mean": 1.0}},
    ]))
    assert squeezed.nu == -2
    assert squeezed.input_map[0] == SqueezedVacuum(1.0)


def test_marginal_and_concurrence_accepted_when_valid():
    config = parse_config(
        _with(
            inputs=[{"q": 0, "state": {"kind": "fock", "n": 1}}],
            observables=["marginal", "concurrence"],
            pairs=[[0, 1]],
            n_max=3,
        )
    )
    assert config.n_max == 3
    assert config.sideband_observables() == ["marginal"]
    assert config.pair_observables() == ["concurrence"]
