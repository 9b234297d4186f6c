"""Deep Q-learning with a ring replay buffer and a hard-synced target network."""

from __future__ import annotations

import numpy as np

from ..nncore import AdamState, Mlp, adam_step
from .common import BufferTooSmall, split_seed


class ReplayBuffer:
    """Fixed-capacity ring of (obs, action, reward, next_obs, done)."""

    def __init__(self, capacity: int, obs_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_dim))
        self.dones = np.zeros(capacity)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, obs, action, reward, next_obs, done) -> None:
        i = self._next
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = float(done)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict:
        idx = rng.integers(0, self._size, size=batch_size)
        return {
            "obs": self.obs[idx], "actions": self.actions[idx],
            "rewards": self.rewards[idx], "next_obs": self.next_obs[idx],
            "dones": self.dones[idx],
        }


def td_loss(q_net: Mlp, target_net: Mlp, batch: dict, gamma: float) -> float:
    """Mean squared TD error with a frozen bootstrap target."""
    q = q_net.forward(batch["obs"])
    chosen = q[np.arange(len(batch["actions"])), batch["actions"]]
    next_q = target_net.forward(batch["next_obs"]).max(axis=1)
    target = batch["rewards"] + gamma * next_q * (1.0 - batch["dones"])
    return float(np.mean((chosen - target) ** 2))


def td_loss_and_grads(q_net: Mlp, target_net: Mlp, batch: dict, gamma: float):
    batch_size = len(batch["actions"])
    q = q_net.forward(batch["obs"])
    chosen = q[np.arange(batch_size), batch["actions"]]
    next_q = target_net.forward(batch["next_obs"]).max(axis=1)
    target = batch["rewards"] + gamma * next_q * (1.0 - batch["dones"])
    loss = float(np.mean((chosen - target) ** 2))
    grad_out = np.zeros_like(q)
    grad_out[np.arange(batch_size), batch["actions"]] = \
        2.0 * (chosen - target) / batch_size
    return loss, q_net.backward(grad_out)


class DqnAgent:
    kind = "dqn"

    def __init__(self, obs_dim: int, n_actions: int, learning_rate: float = 0.0001,
                 gamma: float = 0.99, buffer_capacity: int = 1000,
                 batch_size: int = 32, hidden: tuple[int, ...] = (64, 64),
                 target_sync_every: int = 100, eps_start: float = 1.0,
                 eps_end: float = 0.05, eps_decay_steps: int = 1000,
                 seed: int = 0):
        net_seed, rng_seed = split_seed(seed, 2)
        dims = [obs_dim, *hidden, n_actions]
        self.q_net = Mlp(dims, seed=net_seed)
        self.target_net = Mlp(dims, seed=net_seed)
        self.target_net.copy_weights_from(self.q_net)
        self.adam = AdamState(learning_rate)
        self.replay = ReplayBuffer(buffer_capacity, obs_dim)
        self.rng = np.random.default_rng(rng_seed)
        self.gamma = gamma
        self.batch_size = batch_size
        self.target_sync_every = target_sync_every
        self.eps_start = eps_start
        self.eps_end = eps_end
        self.eps_decay_steps = eps_decay_steps
        self.env_steps = 0
        self.updates = 0

    def epsilon(self) -> float:
        frac = min(1.0, self.env_steps / self.eps_decay_steps)
        return self.eps_start + frac * (self.eps_end - self.eps_start)

    def policy_action(self, obs_vec: np.ndarray, legal: list[int],
                      explore: bool) -> int:
        if explore and float(self.rng.random()) < self.epsilon():
            return int(legal[self.rng.integers(0, len(legal))])
        q = self.q_net.forward(obs_vec)
        return int(legal[int(np.argmax(q[legal]))])

    def evaluate(self, obs_vec, action) -> tuple[None, None]:
        return None, None  # value-based agent carries no log_prob/value

    def observe(self, obs_vec, decision, reward, terminated, truncated,
                next_obs_vec) -> None:
        # the stored action is the one actually executed, whatever chose it
        self.replay.push(obs_vec, decision.action, reward, next_obs_vec,
                         terminated)
        if len(self.replay) >= self.batch_size:
            dqn_update(self)

    def on_episode_end(self) -> None:
        pass

    def advance_step(self) -> None:
        self.env_steps += 1

    def networks(self) -> dict[str, Mlp]:
        return {"q_net": self.q_net}


def dqn_update(agent: DqnAgent) -> float:
    """One minibatch step on the TD loss; hard-syncs the target periodically."""
    if len(agent.replay) < agent.batch_size:
        raise BufferTooSmall(
            f"replay holds {len(agent.replay)} < batch {agent.batch_size}")
    batch = agent.replay.sample(agent.batch_size, agent.rng)
    loss, grads = td_loss_and_grads(agent.q_net, agent.target_net, batch,
                                    agent.gamma)
    adam_step(agent.q_net.parameters(), grads.as_list(), agent.adam)
    agent.updates += 1
    if agent.updates % agent.target_sync_every == 0:
        agent.target_net.copy_weights_from(agent.q_net)
    return loss
