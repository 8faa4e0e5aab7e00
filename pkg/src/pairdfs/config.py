"""Scenario configuration: JSON loading, validation and defaults."""

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

SCENARIOS = (
    "dfs_immunity",
    "mismatch_sweep",
    "fhe_mistuning",
    "general_noise",
    "gate_check",
    "constraint_cert",
    "dephasing_oracle",
    "singlet_code",
)

DEFAULT_TOLERANCES = {"kernel_tol": 1e-9, "hermitian_tol": 1e-12}

# (section, key) pairs each scenario needs
REQUIRED = {
    "dfs_immunity": [("system", "pairs"), ("system", "axes"), ("bath", "modes"),
                     ("bath", "couplings"), ("params", "epsilon"),
                     ("params", "logical_state"), ("times", None)],
    "mismatch_sweep": [("system", "pairs"), ("system", "axes"), ("bath", "modes"),
                       ("bath", "couplings"), ("params", "epsilons"),
                       ("params", "t_star"), ("params", "break_epsilon"),
                       ("params", "logical_state"), ("times", None)],
    "fhe_mistuning": [("system", "pairs"), ("system", "axes"),
                      ("system", "qubit_frequencies"), ("params", "deltas"),
                      ("times", None)],
    "general_noise": [("system", "pairs"), ("bath", "modes"), ("bath", "couplings"),
                      ("params", "seed"), ("params", "amplitude_scale"),
                      ("params", "logical_state"), ("times", None)],
    "gate_check": [("system", "pairs"), ("system", "axes"), ("params", "seed"),
                   ("params", "samples"), ("params", "gate_times")],
    "constraint_cert": [("params", "dims"), ("params", "samples"), ("params", "seed"),
                        ("params", "claimed_ns")],
    "dephasing_oracle": [("params", "g"), ("params", "omega"), ("params", "n_max"),
                         ("params", "n_max_check"), ("times", None)],
    "singlet_code": [("bath", "modes"), ("bath", "couplings"), ("params", "seed"),
                     ("params", "num_axes"), ("times", None)],
}


class ConfigError(ValidationError):
    pass


@dataclass
class ScenarioConfig:
    scenario: str
    system: dict = field(default_factory=dict)
    bath: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    times: list = field(default_factory=list)
    output: str = "out"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "system": copy.deepcopy(self.system),
            "bath": copy.deepcopy(self.bath),
            "params": copy.deepcopy(self.params),
            "times": list(self.times),
            "output": self.output,
            "tolerances": dict(self.tolerances),
        }

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def seed(self):
        return self.params.get("seed")


def _expand_times(raw):
    if isinstance(raw, dict):
        try:
            start, stop, num = float(raw["start"]), float(raw["stop"]), int(raw["num"])
        except KeyError as exc:
            raise ConfigError(f"times grid missing field {exc.args[0]!r}") from None
        return [float(t) for t in np.linspace(start, stop, num)]
    if not isinstance(raw, list):
        raise ConfigError("times must be a list or a {start, stop, num} grid")
    return [float(t) for t in raw]


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    name = data.get("scenario")
    if name is None:
        raise ConfigError("missing field 'scenario'")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}")
    unknown = set(data) - {"scenario", "system", "bath", "params", "times",
                           "output", "tolerances"}
    if unknown:
        raise ConfigError(f"unknown top-level field(s): {sorted(unknown)}")
    for section, key in REQUIRED[name]:
        if key is None:
            if section not in data:
                raise ConfigError(f"missing field {section!r}")
        elif key not in data.get(section, {}):
            raise ConfigError(f"missing field '{section}.{key}'")
    times = _expand_times(data["times"]) if "times" in data else []
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError("times not increasing")
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(data.get("tolerances", {}))
    cfg = ScenarioConfig(
        scenario=name,
        system=copy.deepcopy(data.get("system", {})),
        bath=copy.deepcopy(data.get("bath", {})),
        params=copy.deepcopy(data.get("params", {})),
        times=times,
        output=str(data.get("output", "out")),
        tolerances=tolerances,
    )
    _check_shapes(cfg)
    return cfg


def _check_shapes(cfg):
    sysc, bath = cfg.system, cfg.bath
    if "pairs" in sysc:
        pairs = sysc["pairs"]
        if not all(isinstance(p, list) and len(p) == 2 for p in pairs):
            raise ConfigError("system.pairs must be a list of index pairs")
        if "axes" in sysc and len(sysc["axes"]) != len(pairs):
            raise ConfigError("system.axes needs one axis per pair")
    if "modes" in bath:
        for m in bath["modes"]:
            if "omega" not in m or "n_max" not in m:
                raise ConfigError("each bath mode needs 'omega' and 'n_max'")
    if cfg.scenario == "mismatch_sweep" and len(cfg.params["epsilons"]) != 2:
        raise ConfigError("params.epsilons must hold exactly two values")
    if cfg.scenario in ("general_noise", "gate_check", "constraint_cert",
                        "singlet_code") and cfg.seed is None:
        raise ConfigError("missing field 'params.seed'")


def load_config(path):
    """Read and validate a scenario config. Missing files raise OSError."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    return config_from_dict(data)
