"""Run manifests: one JSON record per CLI invocation.

Manifests round-trip losslessly through JSON and keep a stable key order,
so two runs with identical inputs differ only in the timing fields.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

TOOL_VERSION = "0.1.0"

# fields expected to differ between otherwise identical runs
TIMING_FIELDS = ("created_at", "wall_time_s")


@dataclass
class RunManifest:
    command: str
    inputs: list[str] = field(default_factory=list)
    outputs: dict[str, str] = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    blur: str | None = None
    noise: str | None = None
    k: int | None = None
    seed: int | None = None
    iterations: list[int] | None = None
    final_energy: list[float] | None = None
    metrics: dict = field(default_factory=dict)
    wall_time_s: float = 0.0
    created_at: str = ""
    version: str = TOOL_VERSION

    def __post_init__(self):
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))

    def comparable_dict(self) -> dict:
        """The manifest minus fields that legitimately vary between runs."""
        data = self.to_dict()
        for key in TIMING_FIELDS:
            data.pop(key, None)
        return data
