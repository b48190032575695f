"""Experiment configuration: INI-style file with CLI flag overrides.

The file has a [network] section for the physical parameters and a [run]
section for execution settings. Values round-trip losslessly through
to_file/from_file; unknown keys are rejected with the offending key named.
The shipped defaults reproduce the reference operating point (D = 10 m,
epsilon = 0.1, alpha = 4, beta = 3, M = N).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields

from .network import NetworkParams, Scheme

_NETWORK_KEYS = {
    "lam": float, "alpha": float, "distance": float, "rho": float,
    "eta": float, "beta": float, "epsilon": float,
    "m": int, "n": int, "k": int,
}
_RUN_KEYS = {
    "schemes": str, "grid": str, "mode": str, "trials": int, "seed": int,
    "tolerance": float, "out": str, "format": str, "method": str,
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    lam: float = 1e-4
    alpha: float = 4.0
    distance: float = 10.0
    rho: float = 1.0
    eta: float = 0.0
    beta: float = 3.0
    epsilon: float = 0.1
    m: int = 1
    n: int = 1
    k: int = 1
    schemes: list[str] = field(default_factory=lambda: ["zf-miso"])
    grid: list[str] = field(default_factory=lambda: ["2", "4", "8", "16"])
    mode: str = "analytic"
    trials: int = 100_000
    seed: int = 1
    tolerance: float = 0.02
    out: str = "results.csv"
    format: str = "csv"
    method: str = "small-eps"

    def validate(self) -> None:
        try:
            self.network_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.mode not in ("analytic", "mc", "both"):
            raise ConfigError(f"mode must be analytic | mc | both, got {self.mode!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv | json, got {self.format!r}")
        if self.method not in ("small-eps", "upper-bound", "sandwich"):
            raise ConfigError(f"method must be small-eps | upper-bound | sandwich, "
                              f"got {self.method!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.schemes:
            raise ConfigError("scheme list is empty")
        for name in self.schemes:
            try:
                Scheme.from_name(name)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        for entry in self.grid:
            self._parse_grid_entry(entry)

    def network_params(self, scheme: Scheme | None = None) -> NetworkParams:
        return NetworkParams(lam=self.lam, alpha=self.alpha, D=self.distance,
                             rho=self.rho, eta=self.eta, beta=self.beta,
                             epsilon=self.epsilon, M=self.m, N=self.n, K=self.k)

    @staticmethod
    def _parse_grid_entry(entry: str) -> tuple[int, ...]:
        parts = entry.split(":")
        if len(parts) not in (1, 3):
            raise ConfigError(f"grid entry {entry!r} must be A or M:N:K")
        try:
            values = tuple(int(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"grid entry {entry!r} is not integer-valued") from exc
        if any(v < 1 for v in values):
            raise ConfigError(f"grid entry {entry!r} has non-positive values")
        return values

    def antenna_grid(self, scheme: Scheme) -> list[tuple[int, int, int]]:
        """Resolve grid entries to (M, N, K) triples for one scheme.

        Single-number entries are antenna counts expanded per the scheme's
        M = N sweep convention; M:N:K triples are taken verbatim.
        """
        out = []
        for entry in self.grid:
            values = self._parse_grid_entry(entry)
            if len(values) == 1:
                out.append(scheme.default_config(values[0]))
            else:
                out.append(values)
        return out

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")
        cfg = cls()
        for section, allowed in (("network", _NETWORK_KEYS), ("run", _RUN_KEYS)):
            if not parser.has_section(section):
                continue
            for key, raw in parser.items(section):
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                cls._apply(cfg, key, raw)
        for section in parser.sections():
            if section not in ("network", "run"):
                raise ConfigError(f"unknown section [{section}]")
        cfg.validate()
        return cfg

    @staticmethod
    def _apply(cfg: "ExperimentConfig", key: str, raw: str) -> None:
        caster = {**_NETWORK_KEYS, **_RUN_KEYS}[key]
        if key == "schemes":
            cfg.schemes = [s.strip() for s in raw.split(",") if s.strip()]
        elif key == "grid":
            cfg.grid = [s.strip() for s in raw.split(",") if s.strip()]
        else:
            try:
                setattr(cfg, key, caster(raw))
            except ValueError as exc:
                raise ConfigError(f"invalid value {raw!r} for key {key!r}") from exc

    def to_file(self, path: str) -> None:
        parser = configparser.ConfigParser()
        parser["network"] = {
            "lam": repr(self.lam), "alpha": repr(self.alpha),
            "distance": repr(self.distance), "rho": repr(self.rho),
            "eta": repr(self.eta), "beta": repr(self.beta),
            "epsilon": repr(self.epsilon),
            "m": str(self.m), "n": str(self.n), "k": str(self.k),
        }
        parser["run"] = {
            "schemes": ",".join(self.schemes), "grid": ",".join(self.grid),
            "mode": self.mode, "trials": str(self.trials),
            "seed": str(self.seed), "tolerance": repr(self.tolerance),
            "out": self.out, "format": self.format, "method": self.method,
        }
        with open(path, "w") as fh:
            parser.write(fh)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
