"""Advantage actor-critic updated every five collected steps (or episode end)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nncore import adam_step
from .actor_critic import (
    ActorCriticAgent,
    distribution_stats,
    entropy_grad_logits,
)
from .common import EmptyRollout


@dataclass
class A2cLossSummary:
    policy_loss: float
    value_loss: float
    entropy: float
    total: float


def n_step_returns(rollout, gamma: float) -> np.ndarray:
    """Discounted returns bootstrapped with the stored value of the last
    successor state; terminal steps bootstrap nothing."""
    n = len(rollout)
    returns = np.zeros(n)
    running = 0.0
    for t in range(n - 1, -1, -1):
        if rollout.cut[t]:
            bootstrap = 0.0 if rollout.terminated[t] else rollout.value_next[t]
            running = rollout.rewards[t] + gamma * bootstrap
        elif t == n - 1:
            running = rollout.rewards[t] + gamma * rollout.value_next[t]
        else:
            running = rollout.rewards[t] + gamma * running
        returns[t] = running
    return returns


def a2c_loss_and_grads(actor, critic, batch: dict, value_coef: float,
                       entropy_coef: float):
    """Policy/value/entropy loss and gradients; advantages enter as constants."""
    obs = batch["obs"]
    actions = batch["actions"]
    adv = batch["advantages"]
    n = len(actions)
    if n == 0:
        raise EmptyRollout("no samples to update on")

    logits = actor.forward(obs)
    probs, logp, entropy = distribution_stats(logits, actions)
    policy_loss = -float(np.mean(logp * adv))
    values = critic.forward(obs)[:, 0]
    value_err = values - batch["returns"]
    value_loss = float(np.mean(value_err ** 2))
    mean_entropy = float(np.mean(entropy))
    total = policy_loss + value_coef * value_loss - entropy_coef * mean_entropy

    onehot = np.zeros_like(probs)
    onehot[np.arange(n), actions] = 1.0
    d_logits = -adv[:, None] * (onehot - probs) / n
    d_logits -= entropy_coef * entropy_grad_logits(probs, entropy) / n
    actor_grads = actor.backward(d_logits)
    critic_grads = critic.backward(value_coef * 2.0 * value_err[:, None] / n)

    return (A2cLossSummary(policy_loss, value_loss, mean_entropy, total),
            actor_grads, critic_grads)


class A2cAgent(ActorCriticAgent):
    kind = "a2c"

    def __init__(self, obs_dim: int, n_actions: int, learning_rate: float = 0.0007,
                 gamma: float = 0.99, n_steps: int = 5,
                 hidden: tuple[int, ...] = (64, 64), entropy_coef: float = 0.01,
                 value_coef: float = 0.5, seed: int = 0):
        super().__init__(obs_dim, n_actions, learning_rate, gamma, hidden,
                         entropy_coef, value_coef, seed)
        self.n_steps = n_steps

    def observe(self, obs_vec, decision, reward, terminated, truncated,
                next_obs_vec) -> None:
        value_next = 0.0 if terminated else self.state_value(next_obs_vec)
        self.rollout.push(obs_vec, decision.action, decision.log_prob,
                          decision.value, value_next, reward, terminated,
                          truncated)
        if len(self.rollout) >= self.n_steps:
            a2c_update(self, self.rollout)
            self.rollout.clear()

    def on_episode_end(self) -> None:
        if len(self.rollout) > 0:
            a2c_update(self, self.rollout)
            self.rollout.clear()


def a2c_update(agent: A2cAgent, rollout) -> A2cLossSummary:
    """One gradient step on the collected (at most n_steps-long) segment."""
    if len(rollout) == 0:
        raise EmptyRollout("rollout is empty")
    returns = n_step_returns(rollout, agent.gamma)
    batch = {
        "obs": np.stack(rollout.obs),
        "actions": np.asarray(rollout.actions),
        "advantages": returns - np.asarray(rollout.values),
        "returns": returns,
    }
    summary, actor_grads, critic_grads = a2c_loss_and_grads(
        agent.actor, agent.critic, batch, agent.value_coef, agent.entropy_coef)
    adam_step(agent.actor.parameters(), actor_grads.as_list(), agent.adam_actor)
    adam_step(agent.critic.parameters(), critic_grads.as_list(),
              agent.adam_critic)
    return summary
