"""Flat key=value tool configuration.

Precedence, lowest to highest: built-in defaults, the config file, then
command-line flags. The file is plain `key = value` lines with # comments;
unknown keys are rejected so typos fail loudly. Secrets never live here —
the file only names the environment variable that holds the endpoint
token.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import InputError

DEFAULT_CONFIG_NAME = "simpkit.cfg"
LANGUAGES = ("et", "en")


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_str(text: str) -> str:
    return text


_PARSERS = {
    "data_dir": _parse_str,
    "templates_dir": _parse_str,
    "endpoint_url": _parse_str,
    "endpoint_model": _parse_str,
    "token_env": _parse_str,
    "language": _parse_str,
    "workers": _parse_int,
    "rps": _parse_int,
    "seed": _parse_int,
    "timeout": _parse_float,
}


@dataclass(frozen=True)
class ToolConfig:
    data_dir: str = "."
    templates_dir: str = "."
    endpoint_url: str | None = None
    endpoint_model: str = "default"
    token_env: str = "SIMPKIT_TOKEN"
    language: str = "et"
    workers: int = 1
    rps: int | None = None
    seed: int | None = None
    timeout: float = 30.0

    def validate(self) -> None:
        if self.language not in LANGUAGES:
            raise InputError(
                f"language must be one of {', '.join(LANGUAGES)}, got {self.language!r}"
            )
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")
        if self.rps is not None and self.rps < 1:
            raise InputError(f"rps must be >= 1, got {self.rps}")
        if self.timeout <= 0:
            raise InputError(f"timeout must be positive, got {self.timeout}")
        if not self.token_env:
            raise InputError("token_env must name an environment variable")

    def merged(self, **overrides) -> "ToolConfig":
        """New config with the given non-None overrides applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        unknown = sorted(set(changes) - {f.name for f in fields(self)})
        if unknown:
            raise InputError(f"unknown config overrides: {', '.join(unknown)}")
        merged = replace(self, **changes)
        merged.validate()
        return merged


def parse_config_text(text: str, where: str = "config") -> ToolConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{where}:{lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise InputError(
                f"{where}:{lineno}: unknown config key {key!r} "
                f"(known: {', '.join(sorted(_PARSERS))})"
            )
        if key in values:
            raise InputError(f"{where}:{lineno}: duplicate config key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise InputError(f"{where}:{lineno}: bad value for {key}: {value!r}") from exc
    config = ToolConfig(**values)
    config.validate()
    return config


def load_config(path: str | Path | None = None, cwd: str | Path | None = None) -> ToolConfig:
    """Load configuration: an explicit path must exist; otherwise the
    well-known file in the working directory is used when present."""
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise InputError(f"config file not found: {path}")
        return parse_config_text(path.read_text(encoding="utf-8"), where=str(path))
    implicit = Path(cwd or ".") / DEFAULT_CONFIG_NAME
    if implicit.exists():
        return parse_config_text(implicit.read_text(encoding="utf-8"), where=str(implicit))
    return ToolConfig()
