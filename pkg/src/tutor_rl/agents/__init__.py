"""Student agents: DQN, PPO, A2C, and the tutor-gated training loop."""

from __future__ import annotations

from .a2c import A2cAgent, A2cLossSummary, a2c_loss_and_grads, a2c_update, n_step_returns
from .actor_critic import ActorCriticAgent, RolloutBuffer
from .common import (
    ActionDecision,
    BufferTooSmall,
    EmptyRollout,
    SOURCE_POLICY,
    SOURCE_RANDOM_FALLBACK,
    SOURCE_TUTOR_FRESH,
    SOURCE_TUTOR_REUSED,
    split_seed,
)
from .dqn import DqnAgent, ReplayBuffer, dqn_update, td_loss, td_loss_and_grads
from .ppo import PpoAgent, PpoLossSummary, compute_gae, ppo_loss_and_grads, ppo_update
from .training import select_action, train

ALGORITHMS = ("dqn", "ppo", "a2c")


def make_agent(algorithm: str, obs_dim: int, n_actions: int, seed: int = 0,
               **overrides):
    if algorithm == "dqn":
        return DqnAgent(obs_dim, n_actions, seed=seed, **overrides)
    if algorithm == "ppo":
        return PpoAgent(obs_dim, n_actions, seed=seed, **overrides)
    if algorithm == "a2c":
        return A2cAgent(obs_dim, n_actions, seed=seed, **overrides)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


__all__ = [
    "A2cAgent", "A2cLossSummary", "ActionDecision", "ActorCriticAgent",
    "BufferTooSmall", "DqnAgent", "EmptyRollout", "PpoAgent",
    "PpoLossSummary", "ReplayBuffer", "RolloutBuffer", "ALGORITHMS",
    "SOURCE_POLICY", "SOURCE_RANDOM_FALLBACK", "SOURCE_TUTOR_FRESH",
    "SOURCE_TUTOR_REUSED", "a2c_loss_and_grads", "a2c_update", "compute_gae",
    "dqn_update", "make_agent", "n_step_returns", "ppo_loss_and_grads",
    "ppo_update", "select_action", "split_seed", "td_loss",
    "td_loss_and_grads", "train",
]
