"""Simplified blackjack: infinite deck, dealer stands on 17, win/lose/draw rewards."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Env, StepResult, INSTRUCTION_FOOTER

# Infinite deck drawn with replacement; ace counts as 1 here and may be
# promoted to 11 via the usable-ace rule. Ten-valued ranks appear 4/13.
DECK = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 10, 10, 10)

STICK, HIT = 0, 1


@dataclass(frozen=True)
class BlackjackObs:
    player_sum: int  # 4..31 (>21 only in the terminal bust observation)
    dealer_card: int  # dealer's face-up card, 1..10
    usable_ace: bool  # an ace currently counted as 11


def hand_value(cards: list[int]) -> tuple[int, bool]:
    """Best total for a hand and whether an ace is counted as 11."""
    total = sum(cards)
    if 1 in cards and total + 10 <= 21:
        return total + 10, True
    return total, False


def dealer_play(upcard: int, hole: int, rng: np.random.Generator) -> int:
    """Dealer draws to 17 or more (soft 17 stands); returns the final total."""
    cards = [upcard, hole]
    while hand_value(cards)[0] < 17:
        cards.append(int(rng.choice(DECK)))
    return hand_value(cards)[0]


class BlackjackEnv(Env):
    name = "Blackjack"
    key = "blackjack"
    action_names = {STICK: "stick", HIT: "hit"}
    observation_description = (
        "current state of the game as your hand's total value, the dealer's "
        "face-up card (1-10, where 1 is an ace), and whether you hold a "
        "usable ace counted as 11"
    )

    def _draw(self) -> int:
        return int(self._rng.choice(DECK))

    def _reset_state(self) -> BlackjackObs:
        self._player = [self._draw(), self._draw()]
        self._dealer_up = self._draw()
        self._dealer_hole = self._draw()
        return self._obs()

    def _obs(self) -> BlackjackObs:
        total, usable = hand_value(self._player)
        return BlackjackObs(total, self._dealer_up, usable)

    def _step(self, action: int) -> StepResult:
        if action == HIT:
            self._player.append(self._draw())
            total, _ = hand_value(self._player)
            if total > 21:
                return StepResult(self._obs(), -1.0, True, False)
            return StepResult(self._obs(), 0.0, False, False)
        # stick: dealer resolves, highest non-bust total wins
        player_total, _ = hand_value(self._player)
        dealer_total = dealer_play(self._dealer_up, self._dealer_hole, self._rng)
        if dealer_total > 21 or player_total > dealer_total:
            reward = 1.0
        elif player_total < dealer_total:
            reward = -1.0
        else:
            reward = 0.0
        return StepResult(self._obs(), reward, True, False)

    def to_prompt(self, obs: BlackjackObs) -> str:
        ace = "You have a usable ace counted as 11." if obs.usable_ace \
            else "You do not have a usable ace."
        return (
            "This is the current state of the blackjack game:\n"
            f"Your hand's total value is {obs.player_sum}. "
            f"The dealer is showing a {obs.dealer_card}. {ace}\n"
            f"{INSTRUCTION_FOOTER}"
        )

    def canonical_key(self, obs: BlackjackObs) -> bytes:
        return f"bj|{obs.player_sum}|{obs.dealer_card}|{int(obs.usable_ace)}".encode()

    def encode(self, obs: BlackjackObs) -> np.ndarray:
        return np.array(
            [obs.player_sum / 21.0, obs.dealer_card / 10.0, float(obs.usable_ace)],
            dtype=np.float64,
        )

    @property
    def obs_dim(self) -> int:
        return 3
