"""The token-moving game on a digraph: whoever cannot move loses.

On a DAG the positions that lose for the player to move are exactly the
kernel vertices, so moving onto the kernel is a winning strategy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .digraph import Digraph, DigraphError, dag_kernel, enumerate_kernels, topological_order

__all__ = [
    "Player",
    "GamePosition",
    "losing_positions",
    "optimal_move",
    "first_player_wins",
    "suggest_move",
]


class Player(enum.Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Player":
        return Player.B if self is Player.A else Player.A


@dataclass(frozen=True)
class GamePosition:
    digraph: Digraph
    vertex: int
    to_move: Player = Player.A

    def __post_init__(self):
        if not 1 <= self.vertex <= self.digraph.n:
            raise DigraphError(f"vertex {self.vertex} outside 1..{self.digraph.n}")

    def moves(self) -> tuple[int, ...]:
        return self.digraph.children(self.vertex)

    def play(self, child: int) -> "GamePosition":
        if child not in self.moves():
            raise DigraphError(f"{child} is not a child of {self.vertex}")
        return GamePosition(self.digraph, child, self.to_move.other)

    @property
    def over(self) -> bool:
        return not self.moves()


def losing_positions(d: Digraph) -> frozenset[int]:
    """Vertices from which the player to move loses, by backward induction."""
    losing: set[int] = set()
    for v in reversed(topological_order(d)):
        # losing iff every move hands the opponent a winning position
        if all(w not in losing for w in d.children(v)):
            losing.add(v)
    result = frozenset(losing)
    if result != dag_kernel(d).as_set():
        raise AssertionError("losing positions differ from the kernel")
    return result


def optimal_move(d: Digraph, v: int, losing: Optional[frozenset[int]] = None) -> Optional[int]:
    """Smallest child in the losing set, else the smallest child; None at a sink."""
    losing = losing_positions(d) if losing is None else losing
    children = sorted(d.children(v))
    if not children:
        return None
    for w in children:
        if w in losing:
            return w
    return children[0]


def first_player_wins(d: Digraph, v0: int) -> bool:
    return v0 not in losing_positions(d)


def suggest_move(d: Digraph, v: int) -> Optional[int]:
    """Heuristic move for digraphs with circuits: aim for the first kernel.

    No optimality claim under the no-repetition rule; returns None at a sink.
    """
    children = sorted(d.children(v))
    if not children:
        return None
    kernels = enumerate_kernels(d)
    if kernels:
        for w in children:
            if w in kernels[0]:
                return w
    return children[0]
