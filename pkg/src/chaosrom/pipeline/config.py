"""Experiment configuration: one JSON document describing the whole run.

Example (the synthetic smoke configuration):

    {
      "system": "synthetic",
      "t_final": 30.0,
      "transient_discard": 5.0,
      "splits": [0.6, 0.2, 0.2],
      "n_initial_conditions": 3,
      "forecast_horizon": 2.0,
      "reduction": {"kind": "pca", "r": 3},
      "solver": {"kind": "regularized",
                 "grid": {"log10_min": -8, "log10_max": -4, "log10_step": 2}},
      "seeds": [11, 12, 13]
    }

Unlisted keys fall back to per-system defaults (dt_output, the Lyapunov
exponent, the metric space). Unknown keys are rejected so typos fail
fast instead of silently using a default.
"""

import json
from dataclasses import dataclass, field

from ..errors import ConfigurationError

_SYSTEMS = ("lorenz96", "ks", "synthetic")
_REDUCTION_KINDS = ("none", "pca")
_SOLVER_KINDS = ("pseudoinverse", "regularized")
_METRIC_SPACES = ("latent", "full")
_DERIVATIVE_SOURCES = ("finite_difference", "spline", "exact")

_KNOWN_KEYS = {
    "system", "system_params", "t_final", "dt_output", "transient_discard",
    "splits", "n_initial_conditions", "forecast_horizon", "reduction",
    "solver", "vpt_epsilon", "lyapunov_exponent", "seeds", "metric_space",
    "derivative_source", "integrator", "restart",
}

# Published maximal Lyapunov exponents used to normalize horizons.
_DEFAULT_MLE = {
    ("lorenz96", 8.0): 1.68,
    ("lorenz96", 10.0): 2.27,
    ("ks", None): 0.094,
    ("synthetic", None): 0.9056,
}


@dataclass
class ExperimentConfig:
    system: str
    t_final: float
    forecast_horizon: float
    splits: tuple = (0.5, 0.0, 0.5)
    system_params: dict = field(default_factory=dict)
    dt_output: float = 0.01
    transient_discard: float = 0.0
    n_initial_conditions: int = 1
    reduction: dict = field(default_factory=lambda: {"kind": "none"})
    solver: dict = field(default_factory=lambda: {"kind": "pseudoinverse"})
    vpt_epsilon: float = 0.5
    lyapunov_exponent: float | None = None
    seeds: tuple = (0,)
    metric_space: str | None = None
    derivative_source: str = "finite_difference"
    integrator: dict = field(default_factory=dict)
    restart: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.system not in _SYSTEMS:
            raise ConfigurationError(
                f"system must be one of {_SYSTEMS}, got {self.system!r}")
        self.splits = tuple(float(f) for f in self.splits)
        if len(self.splits) != 3 or any(f < 0 for f in self.splits):
            raise ConfigurationError(
                f"splits must be three non-negative fractions, got {self.splits}")
        if abs(sum(self.splits) - 1.0) > 1e-12:
            raise ConfigurationError(
                f"splits must sum to 1 within 1e-12, got sum {sum(self.splits)!r}")
        if not self.forecast_horizon >= 0:
            raise ConfigurationError(
                f"forecast_horizon must be >= 0, got {self.forecast_horizon}")
        if not (self.t_final > 0 and self.dt_output > 0):
            raise ConfigurationError("t_final and dt_output must be positive")
        if self.transient_discard < 0:
            raise ConfigurationError("transient_discard must be >= 0")
        if self.n_initial_conditions < 1:
            raise ConfigurationError("n_initial_conditions must be >= 1")
        if not self.vpt_epsilon > 0:
            raise ConfigurationError("vpt_epsilon must be > 0")
        self.seeds = tuple(int(s) for s in self.seeds)
        if len(self.seeds) == 0:
            raise ConfigurationError("seeds must be a non-empty list")

        kind = self.reduction.get("kind")
        if kind not in _REDUCTION_KINDS:
            raise ConfigurationError(
                f"reduction.kind must be one of {_REDUCTION_KINDS}, got {kind!r}")
        if kind == "pca" and ("r" in self.reduction) == ("energy" in self.reduction):
            raise ConfigurationError(
                "pca reduction takes exactly one of 'r' or 'energy'")
        kind = self.solver.get("kind")
        if kind not in _SOLVER_KINDS:
            raise ConfigurationError(
                f"solver.kind must be one of {_SOLVER_KINDS}, got {kind!r}")
        if kind == "regularized" and \
                ("grid" in self.solver) == ("lambdas" in self.solver):
            raise ConfigurationError(
                "regularized solver takes exactly one of 'grid' or 'lambdas'")
        if self.derivative_source not in _DERIVATIVE_SOURCES:
            raise ConfigurationError(
                f"derivative_source must be one of {_DERIVATIVE_SOURCES}")

        if self.lyapunov_exponent is None:
            self.lyapunov_exponent = self._default_mle()
        if not self.lyapunov_exponent > 0:
            raise ConfigurationError("lyapunov_exponent must be > 0")
        if self.metric_space is None:
            self.metric_space = ("latent" if self.reduction.get("kind") == "pca"
                                 else "full")
        if self.metric_space not in _METRIC_SPACES:
            raise ConfigurationError(
                f"metric_space must be one of {_METRIC_SPACES}")
        if self.system == "ks":
            # KS snapshots land on the spectral solver's own grid.
            ks_dt = float(self.system_params.get("dt", 0.125))
            if "dt_output" not in self.system_params and \
                    abs(self.dt_output - ks_dt) > 1e-12:
                self.dt_output = ks_dt

    def _default_mle(self):
        if self.system == "lorenz96":
            forcing = float(self.system_params.get("forcing", 8.0))
            key = (self.system, forcing)
            if key in _DEFAULT_MLE:
                return _DEFAULT_MLE[key]
            raise ConfigurationError(
                f"no default lyapunov_exponent for lorenz96 forcing={forcing}; "
                "set it explicitly")
        return _DEFAULT_MLE[(self.system, None)]

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "system_params": dict(self.system_params),
            "t_final": self.t_final,
            "dt_output": self.dt_output,
            "transient_discard": self.transient_discard,
            "splits": list(self.splits),
            "n_initial_conditions": self.n_initial_conditions,
            "forecast_horizon": self.forecast_horizon,
            "reduction": dict(self.reduction),
            "solver": dict(self.solver),
            "vpt_epsilon": self.vpt_epsilon,
            "lyapunov_exponent": self.lyapunov_exponent,
            "seeds": list(self.seeds),
            "metric_space": self.metric_space,
            "derivative_source": self.derivative_source,
            "integrator": dict(self.integrator),
            "restart": dict(self.restart),
        }


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigurationError("config document must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for key in ("system", "t_final", "forecast_horizon"):
        if key not in doc:
            raise ConfigurationError(f"config is missing required key '{key}'")
    return ExperimentConfig(**doc)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def dump_config(config: ExperimentConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
