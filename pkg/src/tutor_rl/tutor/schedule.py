"""Linearly decaying engagement probability with a clamped floor."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class TutorSchedule:
    theta: int  # steps over which the probability decays to its floor
    p_initial: float = 1.0
    p_final: float = 0.1
    tau: int = 0  # environment steps taken so far

    def __post_init__(self) -> None:
        if self.theta <= 0:
            raise ValueError("theta must be a positive integer")
        if not (0.0 <= self.p_final <= self.p_initial <= 1.0):
            raise ValueError("need 0 <= p_final <= p_initial <= 1")

    def current_probability(self) -> float:
        p = self.p_initial - (self.tau / self.theta) * (self.p_initial - self.p_final)
        return max(self.p_final, p)

    def advance(self, steps: int = 1) -> None:
        self.tau += steps


def current_probability(schedule: TutorSchedule) -> float:
    return schedule.current_probability()
