"""Scenario configuration files.

A scenario is a JSON object, for example::

    {
      "mode": "single",
      "inputs": [{"q": 0, "state": {"kind": "fock", "n": 5}}],
      "kappa_L": {"start": 0.0, "stop": 10.0, "steps": 501},
      "window": "auto",
      "observables": ["mean_ratio", "gamma2_ratio"],
      "sidebands": [0, 1, 5],
      "output": {"path": "fig2.csv", "format": "csv"}
    }

Only ``mode``, ``inputs`` and ``kappa_L`` are required.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ramancomb.data.states import Fock, state_from_dict, state_to_dict
from ramancomb.exceptions import ConfigError

MODES = ("single", "two", "two_photon")
FORMATS = ("csv", "json")

SIDEBAND_OBSERVABLES = {
    "single": (
        "mean_photon",
        "gamma2",
        "g2",
        "squeezing",
        "normalized_squeezing",
        "best_squeezing",
        "mean_ratio",
        "gamma2_ratio",
        "marginal",
    ),
    "two": ("mean_photon", "gamma2", "g2", "squeezing", "normalized_squeezing", "best_squeezing"),
    "two_photon": ("mean_photon", "W2", "W1"),
}
PAIR_OBSERVABLES = {
    "single": ("gamma_kl", "g_kl", "gamma_kl_ratio", "concurrence"),
    "two": (),
    "two_photon": ("W11",),
}
# pair observables defined only for k != l
DISTINCT_PAIR_OBSERVABLES = ("W11", "concurrence")
DEFAULT_OBSERVABLES = {
    "single": ("mean_photon", "gamma2", "g2", "squeezing"),
    "two": ("mean_photon", "gamma2", "g2", "squeezing"),
    "two_photon": ("mean_photon", "W2", "W11"),
}
KNOWN_KEYS = {
    "mode",
    "inputs",
    "kappa_L",
    "window",
    "observables",
    "sidebands",
    "pairs",
    "phi",
    "n_max",
    "output",
    "seed",
}


@dataclass(frozen=True)
class SweepSpec:
    """``steps`` evenly spaced effective lengths from ``start`` to ``stop``."""

    start: float
    stop: float
    steps: int

    def values(self):
        return np.linspace(self.start, self.stop, self.steps)

    def to_dict(self):
        return {"start": self.start, "stop": self.stop, "steps": self.steps}


@dataclass(frozen=True)
class OutputSpec:
    path: str = None
    format: str = "csv"

    def to_dict(self):
        return {"path": self.path, "format": self.format}


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario; build with ``from_dict`` or ``load``."""

    mode: str
    inputs: tuple
    kappa_L: object
    window: object = "auto"
    observables: tuple = ()
    sidebands: tuple = (0,)
    pairs: tuple = ()
    phi: float = 0.0
    n_max: int = None
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = None

    @property
    def input_map(self):
        return dict(self.inputs)

    @property
    def nu(self):
        """Order of the second input in two-mode scenarios."""
        return next(q for q, _ in self.inputs if q != 0)

    @property
    def max_kappa_L(self):
        if isinstance(self.kappa_L, SweepSpec):
            return max(self.kappa_L.start, self.kappa_L.stop)
        return self.kappa_L

    def kappa_values(self):
        if isinstance(self.kappa_L, SweepSpec):
            return self.kappa_L.values()
        return np.array([self.kappa_L])

    def sideband_observables(self):
        return [name for name in self.observables if name in SIDEBAND_OBSERVABLES[self.mode]]

    def pair_observables(self):
        return [name for name in self.observables if name in PAIR_OBSERVABLES[self.mode]]

    @classmethod
    def from_dict(cls, data):
        return parse_config(data)

    def to_dict(self):
        window = list(self.window) if isinstance(self.window, tuple) else self.window
        return {
            "mode": self.mode,
            "inputs": [{"q": q, "state": state_to_dict(state)} for q, state in self.inputs],
            "kappa_L": self.kappa_L.to_dict() if isinstance(self.kappa_L, SweepSpec) else self.kappa_L,
            "window": window,
            "observables": list(self.observables),
            "sidebands": list(self.sidebands),
            "pairs": [list(pair) for pair in self.pairs],
            "phi": self.phi,
            "n_max": self.n_max,
            "output": self.output.to_dict(),
            "seed": self.seed,
        }

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def replace(self, **changes):
        """Copy with command-line overrides applied and re-validated."""
        changes = {key: value for key, value in changes.items() if value is not None}
        if not changes:
            return self
        data = self.to_dict()
        if "format" in changes or "out" in changes:
            data["output"] = {
                "path": changes.pop("out", self.output.path),
                "format": changes.pop("format", self.output.format),
            }
        data.update(changes)
        return parse_config(data)


def _number(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=name)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", field=name)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field=name)
    return value


def _integer(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field=name)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field=name)
    return value


def _parse_kappa(value):
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "steps"}
        if unknown:
            raise ConfigError(f"unexpected keys {sorted(unknown)}", field="kappa_L")
        for key in ("start", "stop", "steps"):
            if key not in value:
                raise ConfigError(f"missing '{key}'", field=f"kappa_L.{key}")
        return SweepSpec(
            start=_number(value["start"], "kappa_L.start", 0.0),
            stop=_number(value["stop"], "kappa_L.stop", 0.0),
            steps=_integer(value["steps"], "kappa_L.steps", 1),
        )
    return _number(value, "kappa_L", 0.0)


def _parse_window(value):
    if value == "auto":
        return value
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError("explicit window must be [q_min, q_max]", field="window")
        q_min = _integer(value[0], "window[0]")
        q_max = _integer(value[1], "window[1]")
        if not q_min <= 0 <= q_max:
            raise ConfigError("window must contain sideband 0", field="window")
        return (q_min, q_max)
    return _integer(value, "window", 0)


def _parse_inputs(value, mode):
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of {q, state}", field="inputs")
    inputs, seen = [], set()
    for i, entry in enumerate(value):
        name = f"inputs[{i}]"
        if not isinstance(entry, dict) or set(entry) != {"q", "state"}:
            raise ConfigError("each input needs exactly 'q' and 'state'", field=name)
        q = _integer(entry["q"], f"{name}.q")
        if q in seen:
            raise ConfigError(f"sideband {q} appears twice", field=f"{name}.q")
        seen.add(q)
        inputs.append((q, state_from_dict(entry["state"], field=f"{name}.state")))
    inputs.sort(key=lambda item: item[0])
    orders = [q for q, _ in inputs]
    if mode == "single" and orders != [0]:
        raise ConfigError("single mode takes one input at q=0", field="inputs")
    if mode == "two" and (len(orders) != 2 or 0 not in orders):
        raise ConfigError("two mode takes an input at q=0 and one at q=nu != 0", field="inputs")
    if mode == "two_photon":
        photons = {q: state for q, state in inputs}
        if orders != [0, 1] or any(state != Fock(1) for state in photons.values()):
            raise ConfigError("two_photon mode takes Fock(1) at q=0 and at q=1", field="inputs")
    return tuple(inputs)


def _parse_observables(value, mode):
    if value is None:
        return DEFAULT_OBSERVABLES[mode]
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list of names", field="observables")
    allowed = SIDEBAND_OBSERVABLES[mode] + PAIR_OBSERVABLES[mode]
    for i, name in enumerate(value):
        if name not in allowed:
            raise ConfigError(
                f"unknown observable {name!r} for mode {mode}; expected one of {list(allowed)}",
                field=f"observables[{i}]",
            )
    if len(set(value)) != len(value):
        raise ConfigError("observables repeat", field="observables")
    return tuple(value)


def _parse_pairs(value):
    if not isinstance(value, list):
        raise ConfigError("expected a list of [k, l]", field="pairs")
    pairs = []
    for i, pair in enumerate(value):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError("each pair must be [k, l]", field=f"pairs[{i}]")
        pairs.append((_integer(pair[0], f"pairs[{i}][0]"), _integer(pair[1], f"pairs[{i}][1]")))
    return tuple(pairs)


def _parse_output(value):
    if value is None:
        return OutputSpec()
    if not isinstance(value, dict) or set(value) - {"path", "format"}:
        raise ConfigError("expected {path, format}", field="output")
    path = value.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("must be a string", field="output.path")
    fmt = value.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {list(FORMATS)}", field="output.format")
    return OutputSpec(path=path, format=fmt)


def parse_config(data):
    """Validate a decoded JSON object into a ScenarioConfig."""
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")
    for key in ("mode", "inputs", "kappa_L"):
        if key not in data:
            raise ConfigError("missing required key", field=key)
    mode = data["mode"]
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {list(MODES)}, got {mode!r}", field="mode")
    inputs = _parse_inputs(data["inputs"], mode)
    observables = _parse_observables(data.get("observables"), mode)
    pairs = _parse_pairs(data.get("pairs", []) or [])
    if pairs and not any(name in PAIR_OBSERVABLES[mode] for name in observables):
        raise ConfigError("pairs given but no pair observable requested", field="pairs")
    distinct = [name for name in observables if name in DISTINCT_PAIR_OBSERVABLES]
    for i, (k, l) in enumerate(pairs):
        if distinct and k == l:
            raise ConfigError(f"{distinct[0]} needs two distinct sidebands, got [{k}, {l}]", field=f"pairs[{i}]")
    if "concurrence" in observables:
        if inputs[0][1] != Fock(1):
            raise ConfigError("concurrence needs a single-photon input", field="observables")
    sidebands = data.get("sidebands", [0])
    if not isinstance(sidebands, list):
        raise ConfigError("expected a list of orders", field="sidebands")
    sidebands = tuple(_integer(q, f"sidebands[{i}]") for i, q in enumerate(sidebands))
    n_max = data.get("n_max")
    if n_max is not None:
        n_max = _integer(n_max, "n_max", 0)
    if "marginal" in observables and n_max is None:
        raise ConfigError("marginal needs n_max", field="n_max")
    seed = data.get("seed")
    if seed is not None:
        seed = _integer(seed, "seed")
    return ScenarioConfig(
        mode=mode,
        inputs=inputs,
        kappa_L=_parse_kappa(data["kappa_L"]),
        window=_parse_window(data.get("window", "auto")),
        observables=observables,
        sidebands=sidebands,
        pairs=pairs,
        phi=_number(data.get("phi", 0.0), "phi"),
        n_max=n_max,
        output=_parse_output(data.get("output")),
        seed=seed,
    )


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError(error.msg, line=error.lineno) from error
    return parse_config(data)


def load(path):
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as error:
        raise ConfigError(f"cannot read {path}: {error.strerror}") from error
    return loads(text)


def dump(config, path):
    Path(path).write_text(config.dumps())

