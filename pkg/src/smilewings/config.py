"""Run configuration: defaults, config-file overrides, thread budget."""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass
from typing import Literal, Mapping

from .errors import DomainError, FileFormatError

__all__ = ["RunConfig", "load_config_file", "resolve_config", "thread_count"]


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-8
    q_ceiling: float = 1e3
    seed: int = 42
    z_range: float = 12.0
    output_format: Literal["json", "csv"] = "json"

    def __post_init__(self) -> None:
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise DomainError(f"tol must be a finite positive real, got {self.tol}")
        if not self.q_ceiling > 0.0:
            raise DomainError(f"q_ceiling must be > 0, got {self.q_ceiling}")
        if self.seed < 0:
            raise DomainError(f"seed must be >= 0, got {self.seed}")
        if not self.z_range > 0.0:
            raise DomainError(f"z_range must be > 0, got {self.z_range}")
        if self.output_format not in ("json", "csv"):
            raise DomainError(f"output_format must be json or csv, got {self.output_format!r}")

    def replaced(self, **overrides) -> "RunConfig":
        """A copy with the non-None overrides applied."""
        clean = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **clean) if clean else self


_PARSERS = {
    "tol": float,
    "q_ceiling": float,
    "seed": int,
    "z_range": float,
    "output_format": str,
}


def load_config_file(path: str) -> dict:
    """Parse a simple `key=value` config file ('#' comments, blank lines ok)."""
    overrides: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise FileFormatError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FileFormatError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        parser = _PARSERS.get(key)
        if parser is None:
            raise FileFormatError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            overrides[key] = parser(val)
        except ValueError as exc:
            raise FileFormatError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
    return overrides


def resolve_config(config_path: str | None = None, **flag_overrides) -> RunConfig:
    """Defaults, then the config file, then explicit flags (flags win)."""
    cfg = RunConfig()
    if config_path is not None:
        cfg = cfg.replaced(**load_config_file(config_path))
    return cfg.replaced(**flag_overrides)


def thread_count(env: Mapping[str, str] | None = None) -> int:
    """Worker budget from SMILE_WINGS_THREADS (0 or unset = auto)."""
    raw = (env if env is not None else os.environ).get("SMILE_WINGS_THREADS", "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise FileFormatError(
            f"SMILE_WINGS_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise FileFormatError(f"SMILE_WINGS_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)
