"""Tutor backends: an Ollama-compatible HTTP client and scripted oracles."""

from __future__ import annotations

import hashlib
import os
import time

import numpy as np
import requests

from ..envs import BlackjackObs, ConnectFourObs, SnakeObs, canonical_key
from ..envs.connect_four import legal_columns, winning_columns, AGENT, OPPONENT
from ..envs.snake import DELTAS, SIZE, SNAKE

ENV_URL_VARIABLE = "TUTOR_RL_LLM_URL"
DEFAULT_BASE_URL = "http://localhost:11434"


class TransportError(Exception):
    """HTTP failure, malformed response body, or unreachable backend."""


class Timeout(TransportError):
    """The backend did not answer within the configured timeout."""


class HttpLlmBackend:
    """Blocking client for a local /api/generate endpoint.

    Sends model, system, prompt and stream=false; the generated text is
    expected in the response field of the JSON body.
    """

    def __init__(self, model: str, base_url: str | None = None,
                 timeout: float = 300.0):
        self.model = model
        self.base_url = (base_url or os.environ.get(ENV_URL_VARIABLE)
                         or DEFAULT_BASE_URL).rstrip("/")
        self.timeout = timeout

    def generate(self, system: str, prompt: str, obs=None,
                 timeout: float | None = None) -> tuple[str, float]:
        body = {"model": self.model, "system": system, "prompt": prompt,
                "stream": False}
        start = time.perf_counter()
        try:
            resp = requests.post(f"{self.base_url}/api/generate", json=body,
                                 timeout=timeout or self.timeout)
        except requests.Timeout as exc:
            raise Timeout(f"{self.base_url}: {exc}") from exc
        except requests.RequestException as exc:
            raise TransportError(f"{self.base_url}: {exc}") from exc
        latency = time.perf_counter() - start
        if resp.status_code // 100 != 2:
            raise TransportError(f"{self.base_url}: HTTP {resp.status_code}")
        try:
            text = resp.json()["response"]
        except (ValueError, KeyError) as exc:
            raise TransportError(f"{self.base_url}: malformed body") from exc
        return str(text), latency


class ScriptedBackend:
    """Deterministic oracle emitting <action>N</action> replies without an LLM.

    Policies: optimal, heuristic, random, adversarial, malformed. Latency is
    simulated (returned, never slept) so time-saved accounting is exercisable.
    """

    POLICIES = ("optimal", "heuristic", "random", "adversarial", "malformed")

    def __init__(self, policy: str = "optimal", latency: float = 0.01,
                 seed: int = 0):
        if policy not in self.POLICIES:
            raise ValueError(f"unknown scripted policy {policy!r}")
        self.policy = policy
        self.latency = latency
        self.seed = seed

    def generate(self, system: str, prompt: str, obs=None,
                 timeout: float | None = None) -> tuple[str, float]:
        if self.policy == "malformed":
            return "I am sorry, I cannot decide on an action here.", self.latency
        if obs is None:
            raise ValueError("scripted backend needs the raw observation")
        action = scripted_action(self.policy, obs, self.seed)
        return f"<action>{action}</action>", self.latency


def _state_rng(obs, seed: int) -> np.random.Generator:
    digest = hashlib.sha256(seed.to_bytes(8, "little", signed=True)
                            + canonical_key(obs)).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def scripted_action(policy: str, obs, seed: int = 0) -> int:
    if isinstance(obs, SnakeObs):
        return _snake_action(policy, obs, seed)
    if isinstance(obs, BlackjackObs):
        return _blackjack_action(policy, obs, seed)
    if isinstance(obs, ConnectFourObs):
        return _connect_four_action(policy, obs, seed)
    raise TypeError(f"no scripted policy for {type(obs).__name__}")


def _snake_action(policy: str, obs: SnakeObs, seed: int) -> int:
    hr, hc = obs.head_pos
    fr, fc = obs.food_pos
    moves = {}
    for action, (dr, dc) in DELTAS.items():
        moves[action] = (hr + dr, hc + dc)
    if policy == "random":
        return int(_state_rng(obs, seed).integers(0, len(moves)))

    def distance(cell):
        return abs(cell[0] - fr) + abs(cell[1] - fc)

    if policy == "adversarial":
        return max(sorted(moves), key=lambda a: distance(moves[a]))
    if policy == "heuristic":  # food-greedy, blind to collisions
        return min(sorted(moves), key=lambda a: distance(moves[a]))
    # optimal: greedy over moves that stay on the grid and off the body
    safe = {}
    for action, (r, c) in moves.items():
        if 0 <= r < SIZE and 0 <= c < SIZE and obs.grid[r][c] != SNAKE:
            safe[action] = (r, c)
    if not safe:
        return 0
    return min(sorted(safe), key=lambda a: distance(safe[a]))


def _blackjack_action(policy: str, obs: BlackjackObs, seed: int) -> int:
    if policy == "random":
        return int(_state_rng(obs, seed).integers(0, 2))
    if policy == "adversarial":
        return 1  # always hit, busting as often as possible
    if policy == "heuristic":
        return 1 if obs.player_sum < 17 else 0
    # optimal-ish: draw freely on soft hands, stand on hard 17+
    if obs.usable_ace:
        return 1 if obs.player_sum < 18 else 0
    return 1 if obs.player_sum < 17 else 0


_CENTER_OUT = (3, 2, 4, 1, 5, 0, 6)
_EDGES_FIRST = (0, 6, 1, 5, 2, 4, 3)


def _connect_four_action(policy: str, obs: ConnectFourObs, seed: int) -> int:
    legal = legal_columns(obs.board)
    if policy == "random":
        return int(legal[_state_rng(obs, seed).integers(0, len(legal))])
    if policy == "heuristic":
        return next(c for c in _CENTER_OUT if c in legal)
    if policy == "adversarial":
        avoid = set(winning_columns(obs.board, AGENT))
        harmless = [c for c in _EDGES_FIRST if c in legal and c not in avoid]
        return harmless[0] if harmless else next(c for c in _EDGES_FIRST if c in legal)
    # optimal: win now, else deny the opponent's win, else centre columns
    wins = winning_columns(obs.board, AGENT)
    if wins:
        return wins[0]
    blocks = winning_columns(obs.board, OPPONENT)
    if blocks:
        return blocks[0]
    return next(c for c in _CENTER_OUT if c in legal)


def query_backend(backend, system: str, prompt: str,
                  timeout: float | None = None, obs=None) -> tuple[str, float]:
    """One backend round-trip: returns (raw_text, latency_seconds)."""
    return backend.generate(system, prompt, obs=obs, timeout=timeout)
