"""Server configuration: key = value file, environment overrides
(ARMORDB_ prefix), and validation.

Recognized keys:

    listen_address              default 127.0.0.1
    listen_port                 default 8421
    buffered_manipulation       default false   (new references)
    continuous_reasoner_update  default true    (new references)
    mandatory_mount             default false
    reasoner                    must be builtin-el
    procedures_file             optional path
    preload                     comma-separated ref:path pairs; repeatable
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

ENV_PREFIX = "ARMORDB_"
BUILTIN_REASONER = "builtin-el"

_BOOL_KEYS = ("buffered_manipulation", "continuous_reasoner_update", "mandatory_mount")
_KEYS = _BOOL_KEYS + ("listen_address", "listen_port", "reasoner", "procedures_file", "preload")


class ConfigError(Exception):
    pass


@dataclass
class ServerConfig:
    listen_address: str = "127.0.0.1"
    listen_port: int = 8421
    buffered_manipulation: bool = False
    continuous_reasoner_update: bool = True
    mandatory_mount: bool = False
    reasoner: str = BUILTIN_REASONER
    procedures_file: str | None = None
    preload: list = field(default_factory=list)  # (reference name, path)

    def validate(self):
        if self.reasoner != BUILTIN_REASONER:
            raise ConfigError(
                f"unknown reasoner {self.reasoner!r}; only {BUILTIN_REASONER!r} is available"
            )
        if not (0 <= self.listen_port <= 65535):
            raise ConfigError(f"invalid port {self.listen_port}")
        return self


def _parse_bool(key, value):
    if value == "true":
        return True
    if value == "false":
        return False
    raise ConfigError(f"{key} must be 'true' or 'false', got {value!r}")


def _parse_preload(value):
    pairs = []
    for chunk in value.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, path = chunk.partition(":")
        if not sep or not name.strip() or not path.strip():
            raise ConfigError(f"preload entries need 'name:path' form, got {chunk!r}")
        pairs.append((name.strip(), path.strip()))
    return pairs


def _apply(config: ServerConfig, key: str, value: str, where: str):
    if key not in _KEYS:
        raise ConfigError(f"unknown configuration key {key!r} ({where})")
    if key in _BOOL_KEYS:
        setattr(config, key, _parse_bool(key, value))
    elif key == "listen_port":
        try:
            config.listen_port = int(value)
        except ValueError:
            raise ConfigError(f"listen_port must be an integer, got {value!r}") from None
    elif key == "preload":
        config.preload.extend(_parse_preload(value))
    elif key == "procedures_file":
        config.procedures_file = value
    else:
        setattr(config, key, value)


def load_config(path: str | None = None, env: dict | None = None) -> ServerConfig:
    """Build a config from an optional file plus environment overrides."""
    config = ServerConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            _apply(config, key.strip(), value.strip(), f"{path}:{lineno}")
    env = os.environ if env is None else env
    for key in _KEYS:
        value = env.get(ENV_PREFIX + key.upper())
        if value is not None:
            _apply(config, key, value, "environment")
    return config.validate()
