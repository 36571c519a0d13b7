"""JSON fit reports."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from refl import __version__
from refl.io import atomic_write_text


@dataclass
class FitReport:
    parameters: dict
    best_lnL: float
    config: dict
    seeds: dict
    optimizer: dict = field(default_factory=dict)
    posterior: Optional[dict] = None
    sampler: Optional[dict] = None
    notes: list = field(default_factory=list)
    version: str = __version__
    timings: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FitReport":
        return cls(**json.loads(text))

    def save(self, path) -> None:
        atomic_write_text(path, self.to_json())

    @classmethod
    def load(cls, path) -> "FitReport":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def theta(self, names) -> list:
        missing = [n for n in names if n not in self.parameters]
        if missing:
            raise KeyError(f"report has no value for {missing}")
        return [self.parameters[n] for n in names]


def without_timings(text: str) -> dict:
    """Parsed report minus wall-clock data, for reproducibility checks."""
    d = json.loads(text)
    d.pop("timings", None)
    return d
