"""Generating functions of well-coloured trees, circuits and unicyclic digraphs.

Every function returns exact :class:`~kernelgf.egf.TruncatedEGF` prefixes.
Where two independent derivations exist (fixed-point iteration versus the
Cayley-function closed forms, the brick decomposition versus the simplified
unicycle formula) both are evaluated when ``check`` is true and compared
coefficient by coefficient; a mismatch raises :class:`ConsistencyError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .egf import SeriesError, TruncatedEGF, fixed_point

__all__ = [
    "ConsistencyError",
    "TreeSeries",
    "UnrootedTrees",
    "BivariateEGF",
    "cayley",
    "tree_system",
    "trees",
    "unrooted_trees",
    "circuit_series",
    "cycle_series",
    "lucas",
    "unicircuit_series",
    "unicycle_series",
    "two_kernel_series",
    "two_kernel_literal_sign",
    "uncolored_series",
    "red_circuit_bivariate",
    "SERIES_NAMES",
    "named_series",
]


class ConsistencyError(SeriesError):
    """Two derivations of the same series disagree."""


def _agree(name: str, a: TruncatedEGF, b: TruncatedEGF) -> None:
    if a != b:
        n = next(i for i, (x, y) in enumerate(zip(a.counts, b.counts)) if x != y)
        raise ConsistencyError(f"{name}: routes disagree at n={n}: {a.count(n)} != {b.count(n)}")


@dataclass(frozen=True)
class TreeSeries:
    """Rooted well-coloured directed trees: all, green root, red root."""

    T: TruncatedEGF
    Tg: TruncatedEGF
    Tr: TruncatedEGF


@dataclass(frozen=True)
class UnrootedTrees:
    T_unr: TruncatedEGF
    Tg_unr: TruncatedEGF
    Tr_unr: TruncatedEGF


def _cayley_closed(N: int) -> TruncatedEGF:
    return TruncatedEGF([0] + [n ** (n - 1) for n in range(1, N + 1)])


@lru_cache(maxsize=None)
def cayley(N: int, check: bool = True) -> TruncatedEGF:
    """Cayley tree function ``C = z exp(C)``, counts ``n^(n-1)``."""
    if N < 0:
        raise SeriesError("order must be nonnegative")
    C = _cayley_closed(N)
    if check and N >= 1:
        (it,) = fixed_point(lambda x, k: (TruncatedEGF.z(k) * x[0].exp(),), N, 1, name="cayley")
        _agree("cayley", C, it)
    return C


def _tree_closed_forms(N: int) -> TreeSeries:
    C = cayley(N, check=False)
    z = TruncatedEGF.z(N)
    T = C(z.scale(2)) / 2
    Cm = C(-T)
    return TreeSeries(T=T, Tg=T + Cm, Tr=-Cm)


def _tree_step(x, k):
    Tg, Tr = x
    T = Tg + Tr
    z = TruncatedEGF.z(k)
    return (z * (2 * T).exp() - z * (T + Tg).exp(), z * (Tg + T).exp())


@lru_cache(maxsize=None)
def tree_system(N: int) -> TreeSeries:
    """Solve the well-coloured tree system by fixed-point iteration.

    The iteration is checked against ``T = C(2z)/2``, ``T_r = -C(-C(2z)/2)``
    and ``T_g = T - T_r``.
    """
    if N < 1:
        raise SeriesError("tree_system needs N >= 1")
    Tg, Tr = fixed_point(_tree_step, N, 2, name="tree system")
    it = TreeSeries(T=Tg + Tr, Tg=Tg, Tr=Tr)
    closed = _tree_closed_forms(N)
    for name in ("T", "Tg", "Tr"):
        _agree(name, getattr(it, name), getattr(closed, name))
    return it


@lru_cache(maxsize=None)
def _trees_fast(N: int) -> TreeSeries:
    # T from (2n)^(n-1); T_r from T_r = T exp(-T_r), one coefficient at a time
    t = [0] + [(2 * n) ** (n - 1) for n in range(1, N + 1)]
    r = [0]
    e = [1]  # counts of exp(-T_r)
    for n in range(1, N + 1):
        r.append(sum(comb(n, k) * t[k] * e[n - k] for k in range(1, n + 1)))
        e.append(-sum(comb(n - 1, k - 1) * r[k] * e[n - k] for k in range(1, n + 1)))
    T, Tr = TruncatedEGF(t), TruncatedEGF(r)
    return TreeSeries(T=T, Tg=T - Tr, Tr=Tr)


def trees(N: int, check: bool = True) -> TreeSeries:
    """``T, T_g, T_r`` to order N.

    With ``check`` the full two-route :func:`tree_system` runs; without it the
    ``(2n)^(n-1)`` closed form and the ``T_r e^{T_r} = T`` recurrence are
    used, which is what the high-order asymptotic tables need.
    """
    if check:
        ts = tree_system(N)
        fast = _trees_fast(N)
        for name in ("T", "Tg", "Tr"):
            _agree(name, getattr(ts, name), getattr(fast, name))
        return ts
    return _trees_fast(N)


@lru_cache(maxsize=None)
def unrooted_trees(N: int, check: bool = True) -> UnrootedTrees:
    """Unrooted well-coloured trees.

    ``T_unr = T - T^2``; the red variant uses
    ``2T - 2T T_r + T_r - 2T/T_r + T_r^2/2`` whose constant term (-2) is
    dropped.  ``T/T_r`` loses one order, so the rooted series are taken to
    order ``N + 1``.
    """
    ts = trees(N + 1, check=check)
    T, Tr = ts.T, ts.Tr
    ratio = T / Tr
    T, Tr = T.truncate(N), Tr.truncate(N)
    T_unr = T - T * T
    raw = 2 * T - 2 * T * Tr + Tr - 2 * ratio + Tr * Tr / 2
    if raw.count(0) != -2:
        raise ConsistencyError(f"unexpected constant term {raw.count(0)} in T_r unrooted")
    Tr_unr = TruncatedEGF((0,) + raw.counts[1:])
    if check:
        # unrooting a rooted counting series divides a_n by n
        rooted = trees(N, check=check)
        for name, s, r in (("T_unr", T_unr, rooted.T), ("Tr_unr", Tr_unr, rooted.Tr)):
            _agree(name, s, r.shift_down().antiderivative())
    return UnrootedTrees(T_unr=T_unr, Tg_unr=T_unr - Tr_unr, Tr_unr=Tr_unr)


def lucas(n: int) -> int:
    """Lucas numbers with ``L_1 = 1``, ``L_2 = 3``."""
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@lru_cache(maxsize=None)
def circuit_series(N: int) -> TruncatedEGF:
    """Possible well-coloured circuits, ``-ln(1 - z - z^2)``."""
    z = TruncatedEGF.z(N)
    L = (z + z * z).log_inv_one_minus()
    for n in range(1, N + 1):
        if L.count(n) != factorial(n - 1) * lucas(n):
            raise ConsistencyError(f"L: a_{n} = {L.count(n)} is not (n-1)! Lucas_n")
    return L.check_counting("L")


@lru_cache(maxsize=None)
def cycle_series(N: int) -> TruncatedEGF:
    """Possible well-coloured cycles, ``-ln(1 - 2z - 4z^2)``."""
    z = TruncatedEGF.z(N)
    cyc = (2 * z + 4 * z * z).log_inv_one_minus()
    L = circuit_series(N)
    for n in range(N + 1):
        if cyc.count(n) != 2**n * L.count(n):
            raise ConsistencyError(f"cycle: a_{n} = {cyc.count(n)} is not 2^n a_n(L)")
    return cyc.check_counting("cycle")


@lru_cache(maxsize=None)
def unicircuit_series(N: int, check: bool = True) -> TruncatedEGF:
    """Well-colourings of trees and unicircuit digraphs."""
    ts = trees(N, check=check)
    T, Tg, Tr = ts.T, ts.Tg, ts.Tr
    T_unr = unrooted_trees(N, check=check).T_unr
    # a green root whose extra arc points at a red vertex is counted by T
    U = T_unr - Tg + (Tg + T * Tr).log_inv_one_minus()
    if check:
        C = cayley(N, check=False)
        half = C(TruncatedEGF.z(N).scale(2)) / 2
        Cm = C(-half)
        closed = -(half * half) - Cm - (1 - half - Cm + Cm * half).log()
        _agree("U", U, closed)
    return U.check_counting("U")


def _unicycle_bricks(ts: TreeSeries, T_unr: TruncatedEGF) -> TruncatedEGF:
    T, Tg, Tr = ts.T, ts.Tg, ts.Tr
    Tgr = T
    green_only = (2 * Tg).log_inv_one_minus() / 2 - Tg - Tg * Tg / 2
    chain = (Tr * Tg + Tr * Tgr + 2 * Tr * Tgr * Tg + 2 * Tr * Tgr * Tgr) / (1 - 2 * Tg)
    with_red = (2 * Tr * Tgr + chain).log_inv_one_minus() / 2
    return T_unr + green_only - Tr * Tg / 2 - Tr * T / 2 + with_red


@lru_cache(maxsize=None)
def unicycle_series(N: int, check: bool = True) -> TruncatedEGF:
    """Well-colourings of trees and unicycle digraphs."""
    ts = trees(N, check=check)
    T, Tr = ts.T, ts.Tr
    T_unr = unrooted_trees(N, check=check).T_unr
    V = T_unr - T + Tr - T * T / 2 - (1 + Tr).log() - (1 - 2 * T).log() / 2
    if check:
        _agree("V", _unicycle_bricks(ts, T_unr), V)
    return V.check_counting("V")


@lru_cache(maxsize=None)
def two_kernel_series(N: int, check: bool = True) -> TruncatedEGF:
    """Unicyclic digraphs with exactly two kernels, ``1/2 ln(1/(1 - T_r^2))``.

    The cycle is an even circuit alternating between the two colourings; the
    factor 1/2 removes the choice of which half of the circuit is red first.
    """
    Tr = trees(N, check=check).Tr
    D = (Tr * Tr).log_inv_one_minus() / 2
    try:
        return D.check_counting("D")
    except SeriesError as exc:
        raise ConsistencyError(f"two-kernel series has a non-counting coefficient: {exc}") from exc


def two_kernel_literal_sign(N: int) -> TruncatedEGF:
    """``-ln sqrt(1 + C(-C(2z)/2)^2)`` read literally, i.e. ``-1/2 ln(1 + T_r^2)``.

    Kept only to show that this reading is not a counting series.
    """
    C = cayley(N, check=False)
    Cm = C(-(C(TruncatedEGF.z(N).scale(2)) / 2))
    return -(1 + Cm * Cm).log() / 2


@lru_cache(maxsize=None)
def uncolored_series(N: int, check: bool = True) -> tuple[TruncatedEGF, TruncatedEGF]:
    """``(F, G)``: all trees plus unicircuit / unicycle digraphs, uncoloured."""
    T = trees(N, check=check).T
    T_unr = unrooted_trees(N, check=check).T_unr
    F = T_unr + T.log_inv_one_minus() - T
    # of the 4 length-2 cycles from the log, 1 is a duplicate and 2 are parallel arcs
    G = T_unr + (2 * T).log_inv_one_minus() / 2 - T - T * T / 2
    return F.check_counting("F"), G.check_counting("G")


class BivariateEGF:
    """Series in ``z`` (exponential) and ``u`` (ordinary), truncated in ``z``.

    ``rows[n][k]`` is the ordinary coefficient of ``z^n u^k``.
    """

    def __init__(self, rows):
        self.rows = tuple(tuple(Fraction(c) for c in row) for row in rows)
        for n, row in enumerate(self.rows):
            if len(row) > n + 1:
                raise SeriesError("support must satisfy k <= n")

    @property
    def order(self) -> int:
        return len(self.rows) - 1

    def count(self, n: int, k: int) -> Fraction:
        row = self.rows[n]
        return row[k] * factorial(n) if k < len(row) else Fraction(0)

    def marginal(self) -> TruncatedEGF:
        """Evaluation at ``u = 1``."""
        return TruncatedEGF([sum(row) * factorial(n) for n, row in enumerate(self.rows)])

    def du_at_1(self) -> TruncatedEGF:
        """``d/du`` evaluated at ``u = 1``."""
        return TruncatedEGF(
            [sum(k * c for k, c in enumerate(row)) * factorial(n) for n, row in enumerate(self.rows)]
        )


@lru_cache(maxsize=None)
def red_circuit_bivariate(N: int) -> BivariateEGF:
    """``ln(1/(1 - (z + u z^2)))``, ``u`` marking red vertices."""
    # sum_m (z + u z^2)^m / m: the z^n u^k term comes from m = n - k
    rows = [[Fraction(0)]]
    for n in range(1, N + 1):
        rows.append([Fraction(comb(n - k, k), n - k) for k in range(n // 2 + 1)])
    return BivariateEGF(rows)


SERIES_NAMES = ("T", "Tg", "Tr", "Tunr", "Tgunr", "Trunr", "L", "cycle", "U", "V", "D", "F", "G")


def named_series(name: str, N: int, check: bool = True) -> TruncatedEGF:
    """Look a series up by its short name (see :data:`SERIES_NAMES`)."""
    if name in ("T", "Tg", "Tr"):
        return getattr(trees(N, check=check), name)
    if name in ("Tunr", "Tgunr", "Trunr"):
        u = unrooted_trees(N, check=check)
        return {"Tunr": u.T_unr, "Tgunr": u.Tg_unr, "Trunr": u.Tr_unr}[name]
    if name == "L":
        return circuit_series(N)
    if name == "cycle":
        return cycle_series(N)
    if name == "U":
        return unicircuit_series(N, check=check)
    if name == "V":
        return unicycle_series(N, check=check)
    if name == "D":
        return two_kernel_series(N, check=check)
    if name in ("F", "G"):
        F, G = uncolored_series(N, check=check)
        return F if name == "F" else G
    raise KeyError(f"unknown series {name!r}; expected one of {', '.join(SERIES_NAMES)}")
