"""Common environment interface: stepping, prompts, canonical state keys."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np


class IllegalAction(Exception):
    """Raised when an action is out of range or not playable in the current state."""


class EpisodeOver(Exception):
    """Raised when step() is called after termination/truncation without reset()."""


@dataclass(frozen=True)
class StepResult:
    observation: Any
    reward: float
    terminated: bool
    truncated: bool


INSTRUCTION_FOOTER = (
    "Please clarify the current state of the game and determine what "
    "the agent should do in this current state.\n"
    "Finally, please suggest the correct action and output its index "
    "in the <action></action> tags.\n"
    "Do not provide reasoning."
)


class Env:
    """Single-threaded episodic environment.

    Subclasses define the observation dataclass, game rules, the
    natural-language prompt transform and an injective canonical key.
    Instances may be moved between threads but never shared mutably.
    """

    name: str = ""
    key: str = ""  # config-facing identifier
    action_names: dict[int, str] = {}
    observation_description: str = ""

    def __init__(self) -> None:
        self._rng = np.random.default_rng(0)
        self._finished = True

    @property
    def action_count(self) -> int:
        return len(self.action_names)

    def reset(self, seed: int | None = None):
        """Start a new episode; same seed reproduces the same episode stream."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._finished = False
        return self._reset_state()

    def step(self, action: int) -> StepResult:
        if self._finished:
            raise EpisodeOver(f"{self.name}: episode finished, call reset()")
        if not (0 <= int(action) < self.action_count):
            raise IllegalAction(f"{self.name}: action {action} not in 0..{self.action_count - 1}")
        result = self._step(int(action))
        if result.terminated or result.truncated:
            self._finished = True
        return result

    def legal_actions(self, obs) -> list[int]:
        """Actions playable from obs. Default: every action index."""
        return list(range(self.action_count))

    # subclass hooks -----------------------------------------------------
    def _reset_state(self):
        raise NotImplementedError

    def _step(self, action: int) -> StepResult:
        raise NotImplementedError

    def to_prompt(self, obs) -> str:
        raise NotImplementedError

    def canonical_key(self, obs) -> bytes:
        raise NotImplementedError

    def encode(self, obs) -> np.ndarray:
        """Flatten obs into the real-valued feature vector fed to networks."""
        raise NotImplementedError

    @property
    def obs_dim(self) -> int:
        raise NotImplementedError
