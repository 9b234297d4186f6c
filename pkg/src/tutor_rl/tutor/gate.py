"""The teacher gate: engagement draws, cached advice, query/parse/retry chain."""

from __future__ import annotations

import numpy as np

from .backends import TransportError, query_backend
from .cache import AdviceCache, DEFAULT_BUDGET
from .parsing import ParseFailure, parse_action
from .prompts import build_system_prompt
from .schedule import TutorSchedule

DEFAULT_RETRY_CAP = 5


class RetriesExhausted(Exception):
    """No valid, applicable advice after retry_cap backend attempts."""


class TutorGate:
    """Owns the schedule, cache, and backend for one training loop.

    Advice flow for a state: budgeted cache hit if reuse is enabled,
    otherwise query -> parse -> applicability check, re-prompting until a
    valid action is acquired or the retry cap trips.
    """

    def __init__(self, env, backend, schedule: TutorSchedule,
                 reuse_enabled: bool = True, budget: int = DEFAULT_BUDGET,
                 retry_cap: int = DEFAULT_RETRY_CAP, seed: int = 0,
                 timeout: float | None = None):
        self.env = env
        self.backend = backend
        self.schedule = schedule
        self.cache = AdviceCache(reuse_enabled=reuse_enabled, initial_budget=budget)
        self.retry_cap = retry_cap
        self.timeout = timeout
        self.rng = np.random.default_rng(seed)
        self.latencies: list[float] = []
        self.system_prompt = build_system_prompt(
            env.name, env.observation_description, env.action_names)

    def current_probability(self) -> float:
        return self.schedule.current_probability()

    def engage(self) -> bool:
        """One engagement draw: consult the tutor this step?"""
        return float(self.rng.random()) < self.schedule.current_probability()

    def set_action(self, obs) -> tuple[int, bool]:
        """Advised action for obs; the flag reports a cache reuse.

        Raises RetriesExhausted when the backend keeps failing; the caller
        substitutes a uniform random legal action via fallback_action().
        """
        key = self.env.canonical_key(obs)
        cached = self.cache.lookup(key)
        if cached is not None:
            return cached, True

        stats = self.cache.stats
        prompt = self.env.to_prompt(obs)
        legal = self.env.legal_actions(obs)
        for _ in range(self.retry_cap):
            try:
                raw, latency = query_backend(
                    self.backend, self.system_prompt, prompt,
                    timeout=self.timeout, obs=obs)
            except TransportError:
                stats.transport_errors += 1
                continue
            stats.fresh_queries += 1
            self.latencies.append(latency)
            parsed = parse_action(raw, self.env.action_count)
            if isinstance(parsed, ParseFailure):
                stats.parse_failures += 1
                continue
            if parsed not in legal:
                stats.inapplicable += 1
                continue
            self.cache.store(key, parsed)
            return parsed, False
        raise RetriesExhausted(f"no valid advice after {self.retry_cap} attempts")

    def fallback_action(self, obs) -> int:
        """Uniform random legal action, counted as a random fallback."""
        self.cache.stats.random_fallbacks += 1
        legal = self.env.legal_actions(obs)
        return int(legal[self.rng.integers(0, len(legal))])

    def tutor_wall_seconds(self) -> float:
        """Total time spent waiting on the backend (simulated for oracles)."""
        return float(sum(self.latencies))
