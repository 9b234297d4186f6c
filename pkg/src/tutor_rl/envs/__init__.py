"""Game environments behind one stepping/prompt/keying interface."""

from __future__ import annotations

from .base import Env, EpisodeOver, IllegalAction, StepResult
from .blackjack import BlackjackEnv, BlackjackObs
from .connect_four import ConnectFourEnv, ConnectFourObs, opponent_move
from .snake import SnakeEnv, SnakeObs

ENV_NAMES = ("blackjack", "connect_four", "snake")


def make_env(name: str, **kwargs) -> Env:
    if name == "blackjack":
        return BlackjackEnv(**kwargs)
    if name == "connect_four":
        return ConnectFourEnv(**kwargs)
    if name == "snake":
        return SnakeEnv(**kwargs)
    raise ValueError(f"unknown environment {name!r}; expected one of {ENV_NAMES}")


def canonical_key(obs) -> bytes:
    """Injective serialization of any observation, stable across processes."""
    if isinstance(obs, BlackjackObs):
        return BlackjackEnv().canonical_key(obs)
    if isinstance(obs, ConnectFourObs):
        return ConnectFourEnv().canonical_key(obs)
    if isinstance(obs, SnakeObs):
        return SnakeEnv().canonical_key(obs)
    raise TypeError(f"not an observation: {type(obs).__name__}")


__all__ = [
    "Env", "EpisodeOver", "IllegalAction", "StepResult",
    "BlackjackEnv", "BlackjackObs", "ConnectFourEnv", "ConnectFourObs",
    "SnakeEnv", "SnakeObs", "ENV_NAMES", "make_env", "canonical_key",
    "opponent_move",
]
