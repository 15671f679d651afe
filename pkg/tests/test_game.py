from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache

import pytest

from kernelgf import oracle
from kernelgf.digraph import Digraph, DigraphError, NotADAGError, dag_kernel
from kernelgf.game import GamePosition, Player, first_player_wins, losing_positions, optimal_move, suggest_move


def random_dag(n, rng, p=0.35):
    order = list(range(1, n + 1))
    rng.shuffle(order)
    return Digraph(n, [(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def minimax_losing(d):
    """Plain recursive game search, independent of the kernel code."""

    @lru_cache(maxsize=None)
    def to_move_wins(v):
        return any(not to_move_wins(w) for w in d.children(v))

    return {v for v in d.vertices if not to_move_wins(v)}


def test_examples():
    assert losing_positions(Digraph(1)) == {1}
    p = Digraph.path(3)
    assert losing_positions(p) == {1, 3}
    assert optimal_move(p, 2) == 3
    assert optimal_move(p, 3) is None
    d = Digraph(3, [(1, 2), (1, 3), (2, 3)])
    assert losing_positions(d) == {3}
    assert optimal_move(d, 1) == 3
    assert not first_player_wins(Digraph(1), 1)
    assert first_player_wins(p, 2)


def test_circuit_rejected():
    with pytest.raises(NotADAGError):
        losing_positions(Digraph.circuit(3))
    with pytest.raises(NotADAGError):
        first_player_wins(Digraph.circuit(3), 1)


def test_minimax_agrees_on_random_dags():
    rng = random.Random(2024)
    for _ in range(1000):
        d = random_dag(rng.randint(1, 10), rng)
        losing = losing_positions(d)
        assert losing == minimax_losing(d) == dag_kernel(d).as_set()


def test_optimal_move_property():
    rng = random.Random(99)
    for _ in range(300):
        d = random_dag(rng.randint(1, 9), rng)
        losing = losing_positions(d)
        for v in d.vertices:
            w = optimal_move(d, v, losing)
            if first_player_wins(d, v):
                assert w in losing
            else:
                assert all(c not in losing for c in d.children(v))


def test_relabeling_equivariance():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 9)
        d = random_dag(n, rng)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        m = {v: perm[v - 1] for v in d.vertices}
        e = d.relabel(m)
        assert losing_positions(e) == {m[v] for v in losing_positions(d)}
        for v in d.vertices:
            assert first_player_wins(e, m[v]) == first_player_wins(d, v)


def test_green_root_fraction_n7_equals_series_ratio():
    tc = oracle.count_trees(7)
    assert Fraction(tc.rooted_green, tc.rooted) == Fraction(3478083, 7529536)


def test_game_position():
    p = GamePosition(Digraph.path(3), 1)
    assert p.moves() == (2,)
    q = p.play(2)
    assert q.to_move is Player.B and q.vertex == 2
    assert q.play(3).over
    with pytest.raises(DigraphError):
        p.play(3)
    with pytest.raises(DigraphError):
        GamePosition(Digraph.path(3), 4)


def test_suggest_move_on_circuit():
    c4 = Digraph.circuit(4)
    assert suggest_move(c4, 1) == 2
    assert suggest_move(Digraph(2, [(1, 2)]), 2) is None
