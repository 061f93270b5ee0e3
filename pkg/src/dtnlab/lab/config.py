"""Run configuration: parsing, defaults and hashing."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

DEFAULT_TOLERANCES = {
    "lemma_residual": 1e-10,
    "dtn_entry": 1e-10,
    "splitting": 1e-9,
    "zero_difference": 1e-10,
    "stability_drift": 2.0,
    "stability_band": 3.0,
    "resolvent_oracle": 1e-10,
    "resolvent_decay": 1e-4,
    "e7_slope": [-1.2, -0.8],
    "incomplete_identity": 1e-12,
    "incomplete_drift": 2.0,
    "uniqueness_distance": 1e-10,
    "uniqueness_separation": 1e-6,
    "series_full": 1e-10,
}


class ConfigError(ValueError):
    """Malformed run configuration (exit code 2 at the CLI)."""


@dataclass
class RunConfig:
    grid: dict = field(default_factory=lambda: {"dim": 2, "extents": [1.0, 1.0], "counts": [17, 17]})
    refine_counts: list | None = None
    metric: dict = field(default_factory=lambda: {"family": "constant", "value": 1.0})
    q: dict = field(default_factory=lambda: {"family": "bumps", "bumps": [
        {"center": [0.4, 0.5], "width": 0.15, "amplitude": 2.0}], "base": 0.5})
    q_tilde: dict = field(default_factory=lambda: {"family": "bumps", "bumps": [
        {"center": [0.4, 0.5], "width": 0.15, "amplitude": 2.0},
        {"center": [0.6, 0.45], "width": 0.1, "amplitude": 0.5}], "base": 0.5})
    epsilon: float = 0.1
    aleph: float = 5.0
    Ks: list | None = None
    tau: dict = field(default_factory=lambda: {"min": 1.0, "max": 1000.0, "count": 31})
    mu: dict = field(default_factory=lambda: {"min": 1.0, "max": 1e8, "count": 33})
    tail_index: int = 5
    weyl_window: list | None = None
    n_pairs: int = 20
    n_potentials: int = 5
    n_probes: int = 5
    collar: bool = True
    shift: list | None = None
    output_dir: str = "results"
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(self.tolerances or {})
        self.tolerances = tol
        g = self.grid
        for key in ("dim", "extents", "counts"):
            if key not in g:
                raise ConfigError(f"grid spec lacks {key!r}")
        if not 0 < self.epsilon < 0.5:
            raise ConfigError("epsilon must lie in (0, 1/2)")
        if self.aleph <= 0:
            raise ConfigError("aleph must be positive")
        if self.tau["min"] < 1:
            raise ConfigError("tau.min must be >= 1")
        if self.tau["max"] < self.tau["min"]:
            raise ConfigError("tau.max must be >= tau.min")
        if self.mu["min"] <= 0:
            raise ConfigError("mu.min must be positive")
        if self.tail_index < 1:
            raise ConfigError("tail_index must be >= 1")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**copy.deepcopy(data))
        except (TypeError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> RunConfig:
        data = self.to_dict()
        data.update(changes)
        return RunConfig.from_dict(data)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# The incomplete-data sweep follows λ = (τ + i)² from τ = 1; a wide box keeps
# the low eigenvalues below the start of the path so the sweep is monotone.
# Grid dispersion flattens the Weyl slope below 0.85 on 17x17 for any
# window past k ~ 20, so the eigen report defaults to 33x33 and k in [10, 200].
# The stability sweep uses an incommensurate rectangle so that no eigenvalue
# clusters are near-degenerate and the distance stays linear in small changes.
EXPERIMENT_DEFAULTS: dict[str, dict] = {
    "eig": {"grid": {"dim": 2, "extents": [1.0, 1.0], "counts": [33, 33]}, "weyl_window": [10, 200]},
    "stability": {"grid": {"dim": 2, "extents": [1.0, 1.37], "counts": [17, 17]}},
    "incomplete": {"grid": {"dim": 2, "extents": [8.0, 8.0], "counts": [17, 17]}},
}


def default_config(experiment: str | None = None) -> RunConfig:
    return RunConfig.from_dict(copy.deepcopy(EXPERIMENT_DEFAULTS.get(experiment, {})))
