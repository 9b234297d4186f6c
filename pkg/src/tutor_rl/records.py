"""Persisted outcome of one training run (one config cell, one seed)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


@dataclass
class RunRecord:
    environment: str
    algorithm: str
    tutor: str
    reuse: str  # "on" / "off" / "na" (baseline)
    seed: int
    total_steps: int
    episode_returns: list[float]
    episode_lengths: list[int]
    tutor_stats: dict[str, int]
    latencies: list[float]
    # accounted time spent waiting on the tutor: the sum of response
    # latencies (simulated for scripted oracles, measured for HTTP). Host
    # compute time is deliberately not persisted so records stay
    # reproducible bit-for-bit.
    tutor_wall_seconds: float
    checkpoint_paths: dict[str, str] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "RunRecord":
        with open(path) as fh:
            return cls.from_json(fh.read())
