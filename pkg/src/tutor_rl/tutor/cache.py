"""Advice cache keyed by canonical state keys, with per-entry reuse budgets."""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_BUDGET = 3


@dataclass
class AdviceEntry:
    action: int
    budget: int


@dataclass
class TutorStats:
    fresh_queries: int = 0  # backend round-trips issued
    reuses: int = 0  # cache answers served
    parse_failures: int = 0
    inapplicable: int = 0  # parsed fine but not playable in the state
    transport_errors: int = 0
    random_fallbacks: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


@dataclass
class AdviceCache:
    reuse_enabled: bool = True
    initial_budget: int = DEFAULT_BUDGET
    entries: dict[bytes, AdviceEntry] = field(default_factory=dict)
    stats: TutorStats = field(default_factory=TutorStats)

    def lookup(self, key: bytes) -> int | None:
        """Budgeted cache read; never reads when reuse is disabled."""
        if not self.reuse_enabled:
            return None
        entry = self.entries.get(key)
        if entry is None or entry.budget <= 0:
            return None
        entry.budget -= 1
        self.stats.reuses += 1
        return entry.action

    def store(self, key: bytes, action: int) -> None:
        self.entries[key] = AdviceEntry(action, self.initial_budget)
