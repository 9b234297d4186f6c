"""Shared actor-critic machinery for the on-policy agents."""

from __future__ import annotations

import numpy as np

from ..nncore import AdamState, Mlp, softmax_logits_to_distribution
from .common import split_seed


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def distribution_stats(logits: np.ndarray, actions: np.ndarray):
    """Per-sample (probs, log_prob of action, entropy) for a logits batch."""
    probs = softmax_logits_to_distribution(logits)
    logp = log_softmax(logits)
    taken = logp[np.arange(len(actions)), actions]
    entropy = -(probs * logp).sum(axis=1)
    return probs, taken, entropy


def entropy_grad_logits(probs: np.ndarray, entropy: np.ndarray) -> np.ndarray:
    """d(entropy)/d(logits) for a softmax distribution."""
    logp = np.log(np.clip(probs, 1e-300, None))
    return -probs * (logp + entropy[:, None])


class RolloutBuffer:
    """On-policy storage for one update window."""

    def __init__(self):
        self.obs: list[np.ndarray] = []
        self.actions: list[int] = []
        self.log_probs: list[float] = []
        self.values: list[float] = []
        self.value_next: list[float] = []
        self.rewards: list[float] = []
        self.terminated: list[bool] = []
        self.cut: list[bool] = []  # terminated or truncated: credit stops here

    def __len__(self) -> int:
        return len(self.actions)

    def push(self, obs_vec, action, log_prob, value, value_next, reward,
             terminated, truncated) -> None:
        self.obs.append(np.asarray(obs_vec, dtype=np.float64))
        self.actions.append(int(action))
        self.log_probs.append(float(log_prob))
        self.values.append(float(value))
        self.value_next.append(float(value_next))
        self.rewards.append(float(reward))
        self.terminated.append(bool(terminated))
        self.cut.append(bool(terminated or truncated))

    def clear(self) -> None:
        self.__init__()


class ActorCriticAgent:
    """Two separate networks; subclasses define the update trigger and loss."""

    kind = "actor_critic"

    def __init__(self, obs_dim: int, n_actions: int, learning_rate: float,
                 gamma: float, hidden: tuple[int, ...] = (64, 64),
                 entropy_coef: float = 0.01, value_coef: float = 0.5,
                 seed: int = 0):
        actor_seed, critic_seed, rng_seed = split_seed(seed, 3)
        self.actor = Mlp([obs_dim, *hidden, n_actions], seed=actor_seed)
        self.critic = Mlp([obs_dim, *hidden, 1], seed=critic_seed)
        self.adam_actor = AdamState(learning_rate)
        self.adam_critic = AdamState(learning_rate)
        self.rng = np.random.default_rng(rng_seed)
        self.gamma = gamma
        self.entropy_coef = entropy_coef
        self.value_coef = value_coef
        self.rollout = RolloutBuffer()
        self.env_steps = 0

    def action_probabilities(self, obs_vec: np.ndarray) -> np.ndarray:
        return softmax_logits_to_distribution(self.actor.forward(obs_vec))

    def policy_action(self, obs_vec: np.ndarray, legal: list[int],
                      explore: bool = True) -> int:
        """Sample from the actor distribution restricted to legal actions."""
        probs = self.action_probabilities(obs_vec)
        mass = probs[legal]
        total = mass.sum()
        if total <= 0.0:  # vanishing legal mass: fall back to uniform
            mass = np.full(len(legal), 1.0 / len(legal))
        else:
            mass = mass / total
        return int(self.rng.choice(legal, p=mass))

    def evaluate(self, obs_vec: np.ndarray, action: int) -> tuple[float, float]:
        """(log_prob, value) of an action under the current networks, whatever
        chose it."""
        logits = self.actor.forward(obs_vec)
        logp = log_softmax(logits[None, :])[0, action]
        value = float(self.critic.forward(obs_vec)[0])
        return float(logp), value

    def state_value(self, obs_vec: np.ndarray) -> float:
        return float(self.critic.forward(obs_vec)[0])

    def on_episode_end(self) -> None:
        pass

    def advance_step(self) -> None:
        self.env_steps += 1

    def networks(self) -> dict[str, Mlp]:
        return {"actor": self.actor, "critic": self.critic}
