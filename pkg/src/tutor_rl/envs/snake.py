"""Snake on a 10x10 grid: +1 per food, -1 on death, truncation after 200 foodless steps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Env, StepResult, INSTRUCTION_FOOTER

SIZE = 10
START_LENGTH = 3
FOODLESS_LIMIT = 200

EMPTY, FOOD, SNAKE = 0, 1, -1

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
DELTAS = {UP: (-1, 0), DOWN: (1, 0), LEFT: (0, -1), RIGHT: (0, 1)}


@dataclass(frozen=True)
class SnakeObs:
    grid: tuple[tuple[int, ...], ...]  # 0 empty, 1 food, -1 any snake cell (head included)
    head_pos: tuple[int, int]
    food_pos: tuple[int, int]


def grid_block(grid) -> str:
    """Render the grid the way the tutor prompt expects: one bracketed
    integer row per line, wrapped in an outer pair of brackets. Rows
    containing -1 widen all of their cells, rows without stay compact."""
    return "[" + "\n".join(str(np.asarray(row)) for row in grid) + "]"


class SnakeEnv(Env):
    name = "Snake"
    key = "snake"
    action_names = {UP: "up", DOWN: "down", LEFT: "left", RIGHT: "right"}
    observation_description = (
        "current 10x10 2D grid of the game, where 0 is an empty cell, 1 is "
        "the food, and -1 is a cell occupied by the snake, together with the "
        "coordinates of the snake's head and of the food"
    )

    def _reset_state(self) -> SnakeObs:
        # horizontal snake, head on the right, at a seeded random position
        row = int(self._rng.integers(0, SIZE))
        head_col = int(self._rng.integers(START_LENGTH - 1, SIZE))
        # body from tail to head
        self._body = [(row, head_col - i) for i in range(START_LENGTH - 1, -1, -1)]
        self._steps_since_food = 0
        self._spawn_food()
        return self._obs()

    def _spawn_food(self) -> None:
        occupied = set(self._body)
        free = [(r, c) for r in range(SIZE) for c in range(SIZE) if (r, c) not in occupied]
        self._food = free[int(self._rng.integers(0, len(free)))]

    def _obs(self) -> SnakeObs:
        grid = [[EMPTY] * SIZE for _ in range(SIZE)]
        grid[self._food[0]][self._food[1]] = FOOD
        for r, c in self._body:
            grid[r][c] = SNAKE
        return SnakeObs(tuple(tuple(row) for row in grid), self._body[-1], self._food)

    def _step(self, action: int) -> StepResult:
        hr, hc = self._body[-1]
        dr, dc = DELTAS[action]
        new_head = (hr + dr, hc + dc)
        eats = new_head == self._food

        if not (0 <= new_head[0] < SIZE and 0 <= new_head[1] < SIZE):
            return StepResult(self._obs(), -1.0, True, False)
        # the tail cell vacates this step unless the snake grows
        blocked = self._body if eats else self._body[1:]
        if new_head in blocked:
            return StepResult(self._obs(), -1.0, True, False)

        self._body.append(new_head)
        if eats:
            self._steps_since_food = 0
            self._spawn_food()
            return StepResult(self._obs(), 1.0, False, False)
        self._body.pop(0)
        self._steps_since_food += 1
        truncated = self._steps_since_food >= FOODLESS_LIMIT
        return StepResult(self._obs(), 0.0, False, truncated)

    def to_prompt(self, obs: SnakeObs) -> str:
        return (
            "This is the current 2D grid of the snake game:\n"
            f"{grid_block(obs.grid)}\n"
            f"The snake's head is located at row {obs.head_pos[0]}, column "
            f"{obs.head_pos[1]}, and the food is located at row "
            f"{obs.food_pos[0]}, column {obs.food_pos[1]}. The rest of the "
            "snake's body is represented by -1.\n"
            f"{INSTRUCTION_FOOTER}"
        )

    def canonical_key(self, obs: SnakeObs) -> bytes:
        cells = "".join("2" if v == SNAKE else str(v) for row in obs.grid for v in row)
        return (
            f"sn|{cells}|{obs.head_pos[0]},{obs.head_pos[1]}"
            f"|{obs.food_pos[0]},{obs.food_pos[1]}".encode()
        )

    def encode(self, obs: SnakeObs) -> np.ndarray:
        flat = [float(v) for row in obs.grid for v in row]
        flat += [
            obs.head_pos[0] / (SIZE - 1), obs.head_pos[1] / (SIZE - 1),
            obs.food_pos[0] / (SIZE - 1), obs.food_pos[1] / (SIZE - 1),
        ]
        return np.array(flat, dtype=np.float64)

    @property
    def obs_dim(self) -> int:
        return SIZE * SIZE + 4
