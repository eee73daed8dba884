"""Judge configuration.

Resolution order is flags > environment > config file > defaults.  The
environment variables are ``BELNAP_BASE_URL``, ``BELNAP_MODEL`` and the API
key variable named by ``api_key_env`` (``BELNAP_API_KEY`` by default).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from typing import Any, Mapping

ENV_BASE_URL = "BELNAP_BASE_URL"
ENV_MODEL = "BELNAP_MODEL"
DEFAULT_KEY_ENV = "BELNAP_API_KEY"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class JudgeConfig:
    base_url: str = ""
    model: str = ""
    api_key_env: str = DEFAULT_KEY_ENV
    prompt_style: str = "direct"
    samples_per_side: int = 3
    temperature: float = 0.1
    timeout: float = 60.0
    max_retries: int = 3
    max_in_flight: int = 3
    lenient: bool = False

    def __post_init__(self):
        if self.samples_per_side < 1:
            raise ConfigError("samples_per_side must be >= 1")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.prompt_style not in ("direct", "zero_shot", "few_shot"):
            raise ConfigError(f"unknown prompt_style {self.prompt_style!r}")
        if self.max_retries < 0 or self.max_in_flight < 1:
            raise ConfigError("max_retries must be >= 0 and max_in_flight >= 1")

    def fingerprint(self) -> str:
        """Hash of the settings that influence verdicts (not secrets or plumbing)."""
        relevant = {
            "base_url": self.base_url,
            "model": self.model,
            "prompt_style": self.prompt_style,
            "samples_per_side": self.samples_per_side,
            "temperature": self.temperature,
            "lenient": self.lenient,
        }
        blob = json.dumps(relevant, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(
    path: str | os.PathLike | None = None,
    overrides: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
) -> JudgeConfig:
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if env.get(ENV_BASE_URL):
        values["base_url"] = env[ENV_BASE_URL]
    if env.get(ENV_MODEL):
        values["model"] = env[ENV_MODEL]
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {f.name for f in dataclasses.fields(JudgeConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return JudgeConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
