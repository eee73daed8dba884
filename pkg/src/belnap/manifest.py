from __future__ import annotations

import json
import os
import sys
from dataclasses import asdict, dataclass, field

from .cache import utc_now


def manifest_path(output: str | os.PathLike) -> str:
    return f"{output}.manifest.json"


@dataclass
class RunManifest:
    """What a command ran with and what it wrote."""

    command: str
    argv: list[str] = field(default_factory=lambda: list(sys.argv[1:]))
    config_fingerprint: str | None = None
    seed: int | None = None
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    started: str = field(default_factory=utc_now)
    finished: str | None = None
    version: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.version:
            from . import __version__

            self.version = __version__

    def finish(self) -> "RunManifest":
        self.finished = utc_now()
        return self

    def write(self, path: str | os.PathLike) -> None:
        if self.finished is None:
            self.finish()
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path: str | os.PathLike) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))
