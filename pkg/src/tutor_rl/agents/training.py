"""The gated action-selection point and the step-driven training loop."""

from __future__ import annotations

from ..records import RunRecord
from ..tutor.gate import RetriesExhausted, TutorGate
from .common import (
    ActionDecision,
    SOURCE_POLICY,
    SOURCE_RANDOM_FALLBACK,
    SOURCE_TUTOR_FRESH,
    SOURCE_TUTOR_REUSED,
)


def select_action(agent, env, obs, tutor_gate: TutorGate | None) -> ActionDecision:
    """Pick the next action: the tutor path with the schedule's probability,
    the agent's own policy otherwise.

    Actor-critic agents get log_prob and value for the returned action under
    the current networks regardless of who chose it. With no gate configured,
    no engagement draw happens at all, so baselines are unaffected by the
    tutor machinery.
    """
    obs_vec = env.encode(obs)
    if tutor_gate is not None and tutor_gate.engage():
        try:
            action, reused = tutor_gate.set_action(obs)
            source = SOURCE_TUTOR_REUSED if reused else SOURCE_TUTOR_FRESH
        except RetriesExhausted:
            action = tutor_gate.fallback_action(obs)
            source = SOURCE_RANDOM_FALLBACK
    else:
        action = agent.policy_action(obs_vec, env.legal_actions(obs),
                                     explore=tutor_gate is None)
        source = SOURCE_POLICY
    log_prob, value = agent.evaluate(obs_vec, action)
    return ActionDecision(action, source, log_prob, value)


def train(agent, env, tutor_gate: TutorGate | None, total_steps: int,
          seed: int, tutor_label: str = "none", reuse_label: str = "na",
          config: dict | None = None) -> RunRecord:
    """Run one training cell for total_steps environment steps.

    The tutor schedule advances by one step per environment step; per-episode
    returns, tutor counters, and response latencies land in the RunRecord.
    """
    obs = env.reset(seed=seed)
    episode_returns: list[float] = []
    episode_lengths: list[int] = []
    ep_return, ep_len = 0.0, 0

    for _ in range(total_steps):
        decision = select_action(agent, env, obs, tutor_gate)
        result = env.step(decision.action)
        agent.observe(env.encode(obs), decision, result.reward,
                      result.terminated, result.truncated,
                      env.encode(result.observation))
        ep_return += result.reward
        ep_len += 1
        if result.terminated or result.truncated:
            agent.on_episode_end()
            episode_returns.append(ep_return)
            episode_lengths.append(ep_len)
            ep_return, ep_len = 0.0, 0
            obs = env.reset()
        else:
            obs = result.observation
        if tutor_gate is not None:
            tutor_gate.schedule.advance()
        agent.advance_step()

    stats = (tutor_gate.cache.stats.as_dict() if tutor_gate is not None
             else {})
    latencies = list(tutor_gate.latencies) if tutor_gate is not None else []
    return RunRecord(
        environment=getattr(env, "key", env.name),
        algorithm=agent.kind,
        tutor=tutor_label,
        reuse=reuse_label,
        seed=seed,
        total_steps=total_steps,
        episode_returns=episode_returns,
        episode_lengths=episode_lengths,
        tutor_stats=stats,
        latencies=latencies,
        tutor_wall_seconds=float(sum(latencies)),
        config=dict(config or {}),
    )
