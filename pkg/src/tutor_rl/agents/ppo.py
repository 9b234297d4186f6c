"""Proximal policy optimization with a clipped surrogate objective."""

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
class PpoLossSummary:
    policy_loss: float
    value_loss: float
    entropy: float
    total: float
    clip_fraction: float


def ppo_loss_and_grads(actor, critic, batch: dict, clip_range: float,
                       value_coef: float, entropy_coef: float):
    """Clipped-surrogate loss and analytic gradients for both networks.

    batch carries obs, actions, old_log_probs, advantages, returns; the
    advantages are treated as constants.
    """
    obs = batch["obs"]
    actions = batch["actions"]
    adv = batch["advantages"]
    n = len(actions)
    if n == 0:
        raise EmptyRollout("no samples to update on")

    logits = actor.forward(obs)
    probs, new_logp, entropy = distribution_stats(logits, actions)
    ratio = np.exp(new_logp - batch["old_log_probs"])
    clipped = np.clip(ratio, 1.0 - clip_range, 1.0 + clip_range)
    surr_raw = ratio * adv
    surr_clip = clipped * adv
    policy_loss = -float(np.mean(np.minimum(surr_raw, surr_clip)))

    values = critic.forward(obs)[:, 0]
    value_err = values - batch["returns"]
    value_loss = float(np.mean(value_err ** 2))
    mean_entropy = float(np.mean(entropy))
    total = policy_loss + value_coef * value_loss - entropy_coef * mean_entropy

    # min() follows the raw branch unless the clipped one is strictly
    # smaller, in which case the clip has saturated and the gradient is zero
    active = (surr_raw <= surr_clip).astype(np.float64)
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), actions] = 1.0
    d_logits = -(active * ratio * adv)[:, None] * (onehot - probs) / n
    d_logits -= entropy_coef * entropy_grad_logits(probs, entropy) / n
    actor_grads = actor.backward(d_logits)

    d_values = value_coef * 2.0 * value_err[:, None] / n
    critic_grads = critic.backward(d_values)

    summary = PpoLossSummary(
        policy_loss, value_loss, mean_entropy, total,
        float(np.mean(np.abs(ratio - 1.0) > clip_range)),
    )
    return summary, actor_grads, critic_grads


def compute_gae(rollout, gamma: float, lam: float):
    """Generalized advantage estimates and returns from stored rollout data."""
    n = len(rollout)
    adv = np.zeros(n)
    running = 0.0
    for t in range(n - 1, -1, -1):
        not_terminal = 0.0 if rollout.terminated[t] else 1.0
        delta = (rollout.rewards[t]
                 + gamma * rollout.value_next[t] * not_terminal
                 - rollout.values[t])
        chain = 0.0 if rollout.cut[t] else 1.0
        running = delta + gamma * lam * chain * running
        adv[t] = running
    returns = adv + np.asarray(rollout.values)
    return adv, returns


class PpoAgent(ActorCriticAgent):
    kind = "ppo"

    def __init__(self, obs_dim: int, n_actions: int, learning_rate: float = 0.0003,
                 gamma: float = 0.99, clip_range: float = 0.2,
                 batch_size: int = 64, gae_lambda: float = 0.95,
                 epochs: int = 4, hidden: tuple[int, ...] = (64, 64),
                 entropy_coef: float = 0.01, value_coef: float = 0.5,
                 seed: int = 0):
        super().__init__(obs_dim, n_actions, learning_rate, gamma, hidden,
                         entropy_coef, value_coef, seed)
        self.clip_range = clip_range
        self.batch_size = batch_size
        self.gae_lambda = gae_lambda
        self.epochs = epochs

    def observe(self, obs_vec, decision, reward, terminated, truncated,
                next_obs_vec) -> None:
        value_next = 0.0 if terminated else self.state_value(next_obs_vec)
        self.rollout.push(obs_vec, decision.action, decision.log_prob,
                          decision.value, value_next, reward, terminated,
                          truncated)
        if len(self.rollout) >= self.batch_size:
            ppo_update(self, self.rollout)
            self.rollout.clear()


def ppo_update(agent: PpoAgent, rollout) -> PpoLossSummary:
    """Several epochs of clipped-surrogate steps over one rollout window."""
    if len(rollout) == 0:
        raise EmptyRollout("rollout is empty")
    adv, returns = compute_gae(rollout, agent.gamma, agent.gae_lambda)
    batch = {
        "obs": np.stack(rollout.obs),
        "actions": np.asarray(rollout.actions),
        "old_log_probs": np.asarray(rollout.log_probs),
        "advantages": adv,
        "returns": returns,
    }
    summary = None
    for _ in range(agent.epochs):
        summary, actor_grads, critic_grads = ppo_loss_and_grads(
            agent.actor, agent.critic, batch, agent.clip_range,
            agent.value_coef, agent.entropy_coef)
        adam_step(agent.actor.parameters(), actor_grads.as_list(),
                  agent.adam_actor)
        adam_step(agent.critic.parameters(), critic_grads.as_list(),
                  agent.adam_critic)
    return summary
