"""Connect Four vs. a configurable scripted opponent; the learner always moves first."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Env, IllegalAction, StepResult, INSTRUCTION_FOOTER

ROWS, COLS = 6, 7
EMPTY, AGENT, OPPONENT = 0, 1, 2
_MARKS = {EMPTY: ".", AGENT: "X", OPPONENT: "O"}


@dataclass(frozen=True)
class ConnectFourObs:
    board: tuple[tuple[int, ...], ...]  # row 0 is the top; values EMPTY/AGENT/OPPONENT
    to_move: int  # AGENT in every observation handed to the learner


def legal_columns(board) -> list[int]:
    return [c for c in range(COLS) if board[0][c] == EMPTY]


def drop(board: list[list[int]], col: int, player: int) -> tuple[int, int]:
    """Place a token with gravity; returns its (row, col). Raises on a full column."""
    for row in range(ROWS - 1, -1, -1):
        if board[row][col] == EMPTY:
            board[row][col] = player
            return row, col
    raise IllegalAction(f"column {col} is full")


def has_won(board, player: int) -> bool:
    """Four in a row horizontally, vertically, or on either diagonal."""
    for r in range(ROWS):
        for c in range(COLS):
            if board[r][c] != player:
                continue
            for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
                rr, cc = r + 3 * dr, c + 3 * dc
                if not (0 <= rr < ROWS and 0 <= cc < COLS):
                    continue
                if all(board[r + i * dr][c + i * dc] == player for i in range(4)):
                    return True
    return False


def winning_columns(board, player: int) -> list[int]:
    """Columns whose drop wins immediately for player (one-ply scan)."""
    wins = []
    for col in legal_columns(board):
        trial = [list(row) for row in board]
        drop(trial, col, player)
        if has_won(trial, player):
            wins.append(col)
    return wins


def opponent_move(obs: ConnectFourObs, rng: np.random.Generator,
                  policy: str = "random") -> int:
    """Pick the scripted opponent's column.

    "random" plays uniformly over legal columns; "heuristic" wins if
    possible, blocks an immediate agent win, and otherwise plays random.
    """
    legal = legal_columns(obs.board)
    if not legal:
        raise IllegalAction("no legal column for the opponent")
    if policy == "heuristic":
        wins = winning_columns(obs.board, OPPONENT)
        if wins:
            return wins[0]
        blocks = winning_columns(obs.board, AGENT)
        if blocks:
            return blocks[0]
    elif policy != "random":
        raise ValueError(f"unknown opponent policy {policy!r}")
    return int(rng.choice(legal))


class ConnectFourEnv(Env):
    name = "Connect Four"
    key = "connect_four"
    action_names = {c: f"drop token in column {c}" for c in range(COLS)}
    observation_description = (
        "current 6x7 board of the game, where '.' is an empty cell, 'X' is "
        "one of your tokens, and 'O' is an opponent token; row 0 is the top "
        "of the board and tokens fall to the lowest empty cell of a column"
    )

    def __init__(self, opponent: str = "random") -> None:
        super().__init__()
        self.opponent = opponent

    def _reset_state(self) -> ConnectFourObs:
        self._board = [[EMPTY] * COLS for _ in range(ROWS)]
        return self._obs()

    def _obs(self) -> ConnectFourObs:
        return ConnectFourObs(tuple(tuple(row) for row in self._board), AGENT)

    def legal_actions(self, obs: ConnectFourObs) -> list[int]:
        return legal_columns(obs.board)

    def _step(self, action: int) -> StepResult:
        drop(self._board, action, AGENT)
        if has_won(self._board, AGENT):
            return StepResult(self._obs(), 1.0, True, False)
        if not legal_columns(self._board):
            return StepResult(self._obs(), 0.0, True, False)
        reply = opponent_move(self._obs(), self._rng, self.opponent)
        drop(self._board, reply, OPPONENT)
        if has_won(self._board, OPPONENT):
            return StepResult(self._obs(), -1.0, True, False)
        if not legal_columns(self._board):
            return StepResult(self._obs(), 0.0, True, False)
        return StepResult(self._obs(), 0.0, False, False)

    def to_prompt(self, obs: ConnectFourObs) -> str:
        rows = "\n".join(" ".join(_MARKS[v] for v in row) for row in obs.board)
        actions = "\n".join(f"{c}: drop token in column {c}" for c in range(COLS))
        return (
            "This is the current board of the Connect Four game "
            "(row 0 is the top, tokens fall to the lowest empty cell):\n"
            f"{rows}\n"
            "You are playing 'X' and the opponent is 'O'. You win by "
            "connecting four of your tokens in a row, column, or diagonal.\n"
            f"The available actions are:\n{actions}\n"
            f"{INSTRUCTION_FOOTER}"
        )

    def canonical_key(self, obs: ConnectFourObs) -> bytes:
        cells = "".join(str(v) for row in obs.board for v in row)
        return f"c4|{cells}|{obs.to_move}".encode()

    def encode(self, obs: ConnectFourObs) -> np.ndarray:
        # one plane per player, flattened: 42 agent cells then 42 opponent cells
        flat = [v for row in obs.board for v in row]
        mine = [1.0 if v == AGENT else 0.0 for v in flat]
        theirs = [1.0 if v == OPPONENT else 0.0 for v in flat]
        return np.array(mine + theirs, dtype=np.float64)

    @property
    def obs_dim(self) -> int:
        return 2 * ROWS * COLS
