"""Brute-force ground truth for the counting series.

Labelled directed trees come from Pruefer sequences times arc orientations;
unicyclic digraphs from scanning every ``n``-subset of the ``n(n-1)`` ordered
pairs.  Well-colourings are counted by testing all ``2^n`` red sets, which is
independent of every generating-function computation in :mod:`kernelgf.series`.

The scans run on numpy bitmask arrays; the plain generators
(:func:`enum_directed_trees`, :func:`enum_unicyclic`) yield
:class:`~kernelgf.digraph.Digraph` objects for small sizes and for tests.
"""

from __future__ import annotations

import heapq
import json
import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Mapping, Optional

import numpy as np

from . import series as S
from .digraph import Digraph, classify, enumerate_kernels
from .egf import TruncatedEGF

log = logging.getLogger(__name__)

__all__ = [
    "OracleSizeError",
    "VerificationError",
    "CountReport",
    "TreeCounts",
    "WellColoringCount",
    "Check",
    "Verification",
    "prufer_to_edges",
    "enum_directed_trees",
    "random_directed_tree",
    "enum_unicyclic",
    "count_well_colorings",
    "count_trees",
    "count_unicyclic",
    "verify_family",
    "MAX_TREE_N",
    "MAX_UNICYCLIC_N",
]

MAX_TREE_N = 9
MAX_UNICYCLIC_N = 7


class OracleSizeError(ValueError):
    pass


class VerificationError(AssertionError):
    def __init__(self, family: str, series: str, n: int, expected, got):
        self.family, self.series, self.n, self.expected, self.got = family, series, n, expected, got
        super().__init__(f"{family}: {series} at n={n}: series gives {expected}, oracle counts {got}")


@dataclass(frozen=True)
class CountReport:
    n: int
    family: str
    total_graphs: int
    total_well_colorings: int
    graphs_with_kernel: int
    graphs_with_two_kernels: int

    def __post_init__(self):
        if min(self.total_graphs, self.total_well_colorings, self.graphs_with_kernel, self.graphs_with_two_kernels) < 0:
            raise ValueError("counts are nonnegative")
        if self.total_well_colorings != self.graphs_with_kernel + self.graphs_with_two_kernels:
            raise ValueError(f"{self.family} n={self.n}: a graph has more than two kernels")

    def __add__(self, other: "CountReport") -> "CountReport":
        if (self.n, self.family) != (other.n, other.family):
            raise ValueError("can only merge reports of the same cell")
        return CountReport(
            self.n,
            self.family,
            self.total_graphs + other.total_graphs,
            self.total_well_colorings + other.total_well_colorings,
            self.graphs_with_kernel + other.graphs_with_kernel,
            self.graphs_with_two_kernels + other.graphs_with_two_kernels,
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, line: str) -> "CountReport":
        return cls(**json.loads(line))


@dataclass(frozen=True)
class TreeCounts:
    """Oriented labelled trees on ``n`` vertices, by colour of a marked vertex.

    ``rooted_*`` sum over every choice of root; ``vertex1_*`` look at vertex 1
    only, which is how unrooted objects are split by colour.
    """

    n: int
    trees: int
    rooted_red: int
    rooted_green: int
    vertex1_red: int
    vertex1_green: int

    @property
    def rooted(self) -> int:
        return self.rooted_red + self.rooted_green


@dataclass(frozen=True)
class WellColoringCount:
    colorings: int
    kernels: int


# -- trees ------------------------------------------------------------------------


def prufer_to_edges(seq, n: int) -> list[tuple[int, int]]:
    """Undirected edges of the labelled tree on ``1..n`` with Pruefer code ``seq``."""
    if n == 1:
        return []
    if len(seq) != n - 2:
        raise ValueError("a Pruefer code has length n - 2")
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def _check_tree_n(n: int) -> None:
    if not 1 <= n <= MAX_TREE_N:
        raise OracleSizeError(f"tree enumeration needs 1 <= n <= {MAX_TREE_N}, got {n}")


def _oriented(edges, bits: int) -> list[tuple[int, int]]:
    return [(a, b) if not (bits >> i) & 1 else (b, a) for i, (a, b) in enumerate(edges)]


def enum_directed_trees(n: int, rooted: bool = False) -> Iterator:
    """Every oriented labelled tree on ``n`` vertices.

    Yields :class:`Digraph`, or ``(Digraph, root)`` pairs when ``rooted``.
    """
    _check_tree_n(n)
    codes = product(range(1, n + 1), repeat=n - 2) if n > 1 else [()]
    for seq in codes:
        edges = prufer_to_edges(seq, n)
        for bits in range(1 << (n - 1)):
            d = Digraph(n, _oriented(edges, bits))
            if rooted:
                for r in d.vertices:
                    yield d, r
            else:
                yield d


def random_directed_tree(n: int, rng: random.Random) -> tuple[Digraph, int]:
    """Uniform rooted oriented tree: random code, orientation bits and root."""
    if n < 1:
        raise OracleSizeError("n must be positive")
    seq = [rng.randint(1, n) for _ in range(n - 2)]
    edges = prufer_to_edges(seq, n)
    bits = rng.getrandbits(n - 1) if n > 1 else 0
    return Digraph(n, _oriented(edges, bits)), rng.randint(1, n)


# -- vectorised colouring counts ------------------------------------------------


def _well_colored_table(out: np.ndarray, n: int) -> np.ndarray:
    """``(B, 2^n - 1)`` booleans: row b, column R-1 is True iff R is a kernel."""
    R = np.arange(1, 1 << n, dtype=np.int64)
    ok = np.ones((out.shape[0], R.size), dtype=bool)
    for v in range(n):
        is_red = ((R >> v) & 1).astype(bool)
        red_child = (out[:, v : v + 1] & R[None, :]) != 0
        # red iff no red child
        ok &= red_child != is_red[None, :]
    return ok


def _coloring_counts(out: np.ndarray, n: int, chunk: int = 1 << 22) -> tuple[np.ndarray, np.ndarray]:
    """Kernel count per row, and the red mask of the first kernel (0 if none)."""
    rows = max(1, chunk >> n)
    counts = np.empty(out.shape[0], dtype=np.int64)
    first = np.zeros(out.shape[0], dtype=np.int64)
    for lo in range(0, out.shape[0], rows):
        ok = _well_colored_table(out[lo : lo + rows], n)
        counts[lo : lo + rows] = ok.sum(axis=1)
        first[lo : lo + rows] = np.where(ok.any(axis=1), ok.argmax(axis=1) + 1, 0)
    return counts, first


def _popcount(x: np.ndarray) -> np.ndarray:
    c = np.zeros_like(x)
    while np.any(x):
        c += x & 1
        x = x >> 1
    return c


def count_well_colorings(d: Digraph) -> WellColoringCount:
    """Number of well-colourings (= number of kernels)."""
    if d.n > 30:
        raise OracleSizeError("count_well_colorings supports n <= 30")
    kernels = len(enumerate_kernels(d)) if d.n else 0
    if 1 <= d.n <= 12:
        masks = np.array([d.out_masks()], dtype=np.int64)
        scanned = int(_coloring_counts(masks, d.n)[0][0])
        if scanned != kernels:
            raise AssertionError(f"kernel search found {kernels}, colouring scan found {scanned} for {d!r}")
    return WellColoringCount(colorings=kernels, kernels=kernels)


def _tree_out_masks(n: int) -> Iterator[np.ndarray]:
    """Out-masks of all oriented trees, one block per Pruefer code."""
    m = n - 1
    bits = np.arange(1 << m, dtype=np.int64)
    for seq in product(range(1, n + 1), repeat=n - 2):
        edges = prufer_to_edges(seq, n)
        out = np.zeros((bits.size, n), dtype=np.int64)
        for i, (a, b) in enumerate(edges):
            flip = ((bits >> i) & 1).astype(bool)
            out[~flip, a - 1] |= 1 << (b - 1)
            out[flip, b - 1] |= 1 << (a - 1)
        yield out


def _dag_kernel_masks(out: np.ndarray, n: int) -> np.ndarray:
    """Red masks of the unique kernels of a batch of DAGs (n + 1 Jacobi rounds)."""
    red = np.zeros(out.shape[0], dtype=np.int64)
    for _ in range(n + 1):
        new = np.zeros_like(red)
        for v in range(n):
            new |= np.where((out[:, v] & red) == 0, 1 << v, 0)
        red = new
    return red


@lru_cache(maxsize=None)
def count_trees(n: int) -> TreeCounts:
    """Enumerate all oriented trees on ``n`` vertices and tally kernel colours."""
    _check_tree_n(n)
    if n == 1:
        return TreeCounts(1, 1, 1, 0, 1, 0)
    trees = red_total = v1_red = 0
    batch: list[np.ndarray] = []
    pending = 0

    def flush():
        nonlocal trees, red_total, v1_red, batch, pending
        out = np.concatenate(batch)
        if n <= 10:
            counts, red = _coloring_counts(out, n)
            if not np.all(counts == 1):
                raise AssertionError("an oriented tree without exactly one kernel")
        else:
            red = _dag_kernel_masks(out, n)
        trees += out.shape[0]
        red_total += int(_popcount(red).sum())
        v1_red += int((red & 1).sum())
        batch, pending = [], 0

    for block in _tree_out_masks(n):
        batch.append(block)
        pending += block.shape[0]
        if pending >= 1 << 16:
            flush()
    if batch:
        flush()
    return TreeCounts(
        n=n,
        trees=trees,
        rooted_red=red_total,
        rooted_green=n * trees - red_total,
        vertex1_red=v1_red,
        vertex1_green=trees - v1_red,
    )


def tree_report(n: int) -> CountReport:
    tc = count_trees(n)
    return CountReport(n, "tree", tc.trees, tc.trees, tc.trees, 0)


# -- unicyclic digraphs ----------------------------------------------------------


def _check_unicyclic_n(n: int) -> None:
    if not 2 <= n <= MAX_UNICYCLIC_N:
        raise OracleSizeError(f"unicyclic enumeration needs 2 <= n <= {MAX_UNICYCLIC_N}, got {n}")


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]


def _weakly_connected(n: int, arcs) -> bool:
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in arcs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def enum_unicyclic(n: int) -> Iterator[tuple[Digraph, bool]]:
    """Weakly connected digraphs with ``n`` vertices and ``n`` arcs.

    Yields ``(digraph, cycle_is_circuit)`` in lexicographic order of the
    chosen arc indices.
    """
    _check_unicyclic_n(n)
    pairs = _pairs(n)
    for subset in combinations(pairs, n):
        if _weakly_connected(n, subset):
            d = Digraph(n, subset)
            yield d, classify(d).unique_cycle_is_circuit


@lru_cache(maxsize=None)
def _combinations(m: int, k: int) -> np.ndarray:
    """All k-subsets of ``range(m)`` as rows, lexicographic."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int8)
    if m < k:
        return np.zeros((0, k), dtype=np.int8)
    blocks = []
    for j in range(m - k + 1):
        tail = _combinations(m - j - 1, k - 1) + (j + 1)
        head = np.full((tail.shape[0], 1), j, dtype=np.int8)
        blocks.append(np.hstack([head, tail.astype(np.int8)]))
    arr = np.vstack(blocks)
    arr.setflags(write=False)
    return arr


@dataclass
class _Partial:
    n: int
    circuit: list = field(default_factory=lambda: [0, 0, 0, 0])  # graphs, colourings, >=1, ==2
    acyclic: list = field(default_factory=lambda: [0, 0, 0, 0])
    two_kernel_non_circuit: int = 0

    def __add__(self, other):
        return _Partial(
            self.n,
            [a + b for a, b in zip(self.circuit, other.circuit)],
            [a + b for a, b in zip(self.acyclic, other.acyclic)],
            self.two_kernel_non_circuit + other.two_kernel_non_circuit,
        )


def _scan_partition(n: int, first: int, chunk: int = 1 << 18) -> _Partial:
    """All n-subsets of ordered pairs whose smallest arc index is ``first``."""
    pairs = _pairs(n)
    P = len(pairs)
    src = np.array([u - 1 for u, _ in pairs], dtype=np.int64)
    dst = np.array([v - 1 for _, v in pairs], dtype=np.int64)
    tails = _combinations(P - first - 1, n - 1)
    part = _Partial(n)
    for lo in range(0, tails.shape[0], chunk):
        idx = np.hstack(
            [np.full((min(chunk, tails.shape[0] - lo), 1), first, dtype=np.int64), tails[lo : lo + chunk].astype(np.int64) + first + 1]
        )
        U, W = src[idx], dst[idx]
        B = idx.shape[0]
        # quick-find union: each arc merges the two label classes completely
        lab = np.tile(np.arange(n, dtype=np.int64), (B, 1))
        rows = np.arange(B)
        for j in range(n):
            lu = lab[rows, U[:, j]][:, None]
            lw = lab[rows, W[:, j]][:, None]
            lab = np.where((lab == lu) | (lab == lw), np.minimum(lu, lw), lab)
        conn = np.all(lab == lab[:, :1], axis=1)
        if not conn.any():
            continue
        U, W = U[conn], W[conn]
        B = U.shape[0]
        rows = np.arange(B)
        out = np.zeros((B, n), dtype=np.int64)
        for j in range(n):
            out[rows, U[:, j]] |= np.int64(1) << W[:, j]
        # peel sinks; whatever survives n sweeps lies on a circuit
        alive = np.full(B, (1 << n) - 1, dtype=np.int64)
        for _ in range(n):
            for v in range(n):
                sink = ((out[:, v] & alive) == 0) & (((alive >> v) & 1) == 1)
                alive = np.where(sink, alive & ~(1 << v), alive)
        circ = alive != 0
        counts, _ = _coloring_counts(out, n)
        if np.any(counts > 2):
            raise AssertionError("a unicyclic digraph with more than two kernels")
        for mask, acc in ((circ, part.circuit), (~circ, part.acyclic)):
            c = counts[mask]
            acc[0] += int(c.size)
            acc[1] += int(c.sum())
            acc[2] += int((c >= 1).sum())
            acc[3] += int((c == 2).sum())
        part.two_kernel_non_circuit += int(((counts == 2) & ~circ).sum())
    return part


@lru_cache(maxsize=None)
def count_unicyclic(n: int, jobs: int = 1) -> dict[str, CountReport]:
    """Scan all ``C(n(n-1), n)`` arc subsets; reports for the circuit-cycle
    subfamily (``"unicircuit"``) and for all unicyclic digraphs (``"unicycle"``).

    Work is split by the smallest arc index; ``jobs > 1`` uses processes.
    """
    _check_unicyclic_n(n)
    P = n * (n - 1)
    firsts = list(range(P - n + 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_scan_partition, [n] * len(firsts), firsts))
    else:
        parts = [_scan_partition(n, f) for f in firsts]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    if total.two_kernel_non_circuit:
        raise AssertionError("a two-kernel unicyclic digraph whose cycle is not a circuit")
    c, a = total.circuit, total.acyclic
    # acyclic ones are DAGs and have exactly one kernel
    if a[1] != a[0] or a[2] != a[0]:
        raise AssertionError("a unicyclic DAG without exactly one kernel")
    return {
        "unicircuit": CountReport(n, "unicircuit", *c),
        "unicycle": CountReport(n, "unicycle", c[0] + a[0], c[1] + a[1], c[2] + a[2], c[3] + a[3]),
    }


# -- verification harness ----------------------------------------------------------


@dataclass(frozen=True)
class Check:
    family: str
    series: str
    n: int
    expected: int
    got: int

    @property
    def ok(self) -> bool:
        return self.expected == self.got


@dataclass
class Verification:
    family: str
    reports: list[CountReport]
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


FAMILIES = ("trees", "unicyclic")


def _series(name: str, N: int, overrides: Optional[Mapping[str, TruncatedEGF]]) -> TruncatedEGF:
    if overrides and name in overrides:
        return overrides[name]
    return S.named_series(name, N)


def verify_family(
    family: str,
    n_max: int,
    jobs: int = 1,
    overrides: Optional[Mapping[str, TruncatedEGF]] = None,
    strict: bool = True,
) -> Verification:
    """Compare oracle counts with ``n! [z^n]`` of the matching series.

    ``overrides`` replaces named series (used to check that the harness
    catches a corrupted coefficient).  With ``strict`` the first mismatch
    raises :class:`VerificationError`.
    """
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    reports: list[CountReport] = []
    checks: list[Check] = []
    if family == "trees":
        _check_tree_n(n_max)
        names = ("T", "Tg", "Tr", "Tunr", "Tgunr", "Trunr")
        ser = {k: _series(k, n_max, overrides) for k in names}
        for n in range(1, n_max + 1):
            tc = count_trees(n)
            reports.append(tree_report(n))
            got = {
                "T": tc.rooted,
                "Tg": tc.rooted_green,
                "Tr": tc.rooted_red,
                "Tunr": tc.trees,
                "Tgunr": tc.vertex1_green,
                "Trunr": tc.vertex1_red,
            }
            checks += [Check(family, k, n, ser[k].count(n), got[k]) for k in names]
    else:
        _check_unicyclic_n(n_max)
        names = ("U", "V", "D", "F", "G")
        ser = {k: _series(k, n_max, overrides) for k in names}
        for n in range(1, n_max + 1):
            trees = count_trees(n).trees
            if n == 1:
                got = {"U": 1, "V": 1, "D": 0, "F": 1, "G": 1}
            else:
                rep = count_unicyclic(n, jobs)
                reports += [rep["unicircuit"], rep["unicycle"]]
                uc, uy = rep["unicircuit"], rep["unicycle"]
                got = {
                    "U": trees + uc.total_well_colorings,
                    "V": trees + uy.total_well_colorings,
                    "D": uy.graphs_with_two_kernels,
                    "F": trees + uc.total_graphs,
                    "G": trees + uy.total_graphs,
                }
            checks += [Check(family, k, n, ser[k].count(n), got[k]) for k in names]
    result = Verification(family, reports, checks)
    for c in checks:
        log.debug("%s %s n=%d expected=%s got=%s", c.family, c.series, c.n, c.expected, c.got)
    if strict and not result.ok:
        bad = result.failures()[0]
        raise VerificationError(bad.family, bad.series, bad.n, bad.expected, bad.got)
    return result


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("KERNELGF_JOBS", "1")))
    except ValueError:
        return 1
