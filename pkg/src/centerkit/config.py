"""Budgets and seeds in one place.

Defaults below can be overridden by a JSON file (``--config`` on the command
line or the ``CENTERKIT_CONFIG`` environment variable) and then by individual
environment variables ``CENTERKIT_<KEY>`` (for example
``CENTERKIT_GB_SECONDS=60``).
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace

ENV_PREFIX = "CENTERKIT_"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    gb_seconds: float = 1800.0  # wall clock per Groebner computation
    gb_steps: int = 10 ** 7  # reduction steps per Groebner computation
    integration_steps: int = 20000  # accepted steps per orbit
    integration_tol: float = 1e-9
    desing_depth: int = 6
    lyapunov_max_n: int = 9
    random_seed: int = 20240917

    def budget(self):
        from .ideals import Budget

        return Budget(max_steps=self.gb_steps, seconds=self.gb_seconds)

    def to_json(self) -> dict:
        return asdict(self)


def _coerce(name: str, value, typ):
    try:
        if typ is int or typ == "int":
            if isinstance(value, str):
                return int(float(value)) if "e" in value.lower() else int(value)
            return int(value)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"config key {name!r}: cannot interpret {value!r} as {typ}") from None


def load_config(path: str | None = None, environ=None) -> Config:
    """Defaults, then the JSON file, then ``CENTERKIT_*`` variables."""
    env = os.environ if environ is None else environ
    cfg = Config()
    types = {f.name: f.type for f in fields(Config)}
    path = path or env.get(ENV_PREFIX + "CONFIG")
    updates = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for k, v in data.items():
            if k not in types:
                raise ConfigError(f"unknown config key {k!r}")
            updates[k] = _coerce(k, v, types[k])
    for k, typ in types.items():
        v = env.get(ENV_PREFIX + k.upper())
        if v is not None:
            updates[k] = _coerce(k, v, typ)
    return replace(cfg, **updates)


__all__ = ["Config", "ConfigError", "ENV_PREFIX", "load_config"]
