"""Run configuration: flat TOML file, overridden key by key from the command line."""

from __future__ import annotations

import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


PATH_KEYS = ("corpus", "journals", "taxonomy", "out", "network_a", "network_b")


@dataclass
class RunConfig:
    corpus: list[str] = field(default_factory=list)
    journals: str | None = None
    taxonomy: str | None = None
    out: str = "out"
    year: int | None = None
    ni_month: int = 6
    seed: int = 42
    workers: int = 1
    core_policy: str = "intersection"
    viz_threshold: float = 0.080
    bins: int = 30
    regression_bins: int = 20
    top_k: int = 3
    diff_top_k: int = 5
    betweenness_norm: str = "graph"
    inter_mode: str = "full"
    network_a: str | None = None
    network_b: str | None = None

    def validate(self) -> None:
        if not 1 <= self.ni_month <= 12:
            raise ConfigError("ni_month must be in 1..12")
        if self.core_policy not in ("intersection", "per-network"):
            raise ConfigError(f"core_policy must be intersection or per-network, not {self.core_policy!r}")
        if self.betweenness_norm not in ("graph", "component"):
            raise ConfigError("betweenness_norm must be graph or component")
        if self.inter_mode not in ("full", "half"):
            raise ConfigError("inter_mode must be full or half")
        for key in ("workers", "bins", "regression_bins", "top_k", "diff_top_k"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1")
        if self.bins < 2:
            raise ConfigError("bins must be >= 2")

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def provenance(self) -> dict:
        d = asdict(self)
        d.pop("out")
        if not d["corpus"]:
            d["corpus"] = None
        return d


def _rebase(base: Path, value: str) -> str:
    p = Path(value)
    return value if p.is_absolute() else os.path.normpath(base / p)


def load_config(path: str | Path) -> dict:
    """Read a flat TOML config. Relative paths in it resolve against the file's directory."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(f"{path}: config must be flat, {key!r} is a table")
    if isinstance(data.get("corpus"), str):
        data["corpus"] = [data["corpus"]]
    for key in PATH_KEYS:
        if key == "corpus" and key in data:
            data[key] = [_rebase(path.parent, v) for v in data[key]]
        elif isinstance(data.get(key), str):
            data[key] = _rebase(path.parent, data[key])
    return data


def make_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then config-file values, then non-None overrides."""
    values = dict(file_values or {})
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg
