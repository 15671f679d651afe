"""Digraphs, well-colourings and kernels.

Vertices are labelled ``1..n``.  A kernel is a nonempty independent set that
dominates every other vertex through an out-arc; equivalently, the red set of
a colouring in which every green vertex has a red child and no red vertex has
a red child.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

__all__ = [
    "Color",
    "Digraph",
    "Coloring",
    "KernelSet",
    "Family",
    "FamilyKind",
    "DigraphError",
    "ColoringError",
    "NotADAGError",
    "is_well_colored",
    "is_kernel",
    "find_circuit",
    "topological_order",
    "dag_kernel",
    "enumerate_kernels",
    "classify",
]


class DigraphError(ValueError):
    pass


class ColoringError(ValueError):
    pass


class NotADAGError(DigraphError):
    """Raised by DAG-only algorithms; ``circuit`` is a witness vertex sequence."""

    def __init__(self, circuit: Sequence[int]):
        self.circuit = tuple(circuit)
        super().__init__("digraph has a circuit: " + " -> ".join(map(str, self.circuit + self.circuit[:1])))


class Color(enum.Enum):
    RED = "red"
    GREEN = "green"


class Digraph:
    """Immutable digraph on ``1..n``: no loops, no repeated arcs, digons allowed."""

    __slots__ = ("n", "arcs", "_out", "_in")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise DigraphError("vertex count must be nonnegative")
        arc_list = [(int(u), int(v)) for u, v in arcs]
        seen = set()
        for u, v in arc_list:
            if not (1 <= u <= n and 1 <= v <= n):
                raise DigraphError(f"arc ({u}, {v}) has an endpoint outside 1..{n}")
            if u == v:
                raise DigraphError(f"loop at vertex {u}")
            if (u, v) in seen:
                raise DigraphError(f"repeated arc ({u}, {v})")
            seen.add((u, v))
        self.n = n
        self.arcs = frozenset(seen)
        out = [[] for _ in range(n + 1)]
        inc = [[] for _ in range(n + 1)]
        for u, v in sorted(seen):
            out[u].append(v)
            inc[v].append(u)
        self._out = tuple(tuple(x) for x in out)
        self._in = tuple(tuple(x) for x in inc)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def children(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def parents(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def out_masks(self) -> list[int]:
        """Children of each vertex as a bitmask (vertex ``v`` is bit ``v-1``)."""
        masks = [0] * self.n
        for u, v in self.arcs:
            masks[u - 1] |= 1 << (v - 1)
        return masks

    def relabel(self, perm: Mapping[int, int] | Sequence[int]) -> "Digraph":
        """Image under ``v -> perm[v]`` (a sequence is read as 1-based)."""
        if not isinstance(perm, Mapping):
            perm = {i + 1: p for i, p in enumerate(perm)}
        if sorted(perm.values()) != list(self.vertices):
            raise DigraphError("relabelling must be a permutation of 1..n")
        return Digraph(self.n, ((perm[u], perm[v]) for u, v in self.arcs))

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.n, self.arcs))

    def __repr__(self):
        return f"Digraph({self.n}, {self.sorted_arcs()})"

    # -- builders ---------------------------------------------------------

    @classmethod
    def path(cls, n: int) -> "Digraph":
        return cls(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def circuit(cls, n: int) -> "Digraph":
        return cls(n, [(i, i % n + 1) for i in range(1, n + 1)])


@dataclass(frozen=True)
class Coloring:
    """Total red/green assignment on ``1..n``."""

    n: int
    red: frozenset

    def __post_init__(self):
        if any(not 1 <= v <= self.n for v in self.red):
            raise ColoringError("red vertex outside 1..n")

    @classmethod
    def from_red(cls, n: int, red: Iterable[int]) -> "Coloring":
        return cls(n, frozenset(red))

    @classmethod
    def from_mapping(cls, n: int, colors: Mapping[int, Color]) -> "Coloring":
        if set(colors) != set(range(1, n + 1)):
            raise ColoringError("colouring must be defined on exactly the vertices 1..n")
        return cls(n, frozenset(v for v, c in colors.items() if c is Color.RED))

    def __getitem__(self, v: int) -> Color:
        if not 1 <= v <= self.n:
            raise ColoringError(f"vertex {v} outside 1..{self.n}")
        return Color.RED if v in self.red else Color.GREEN

    @property
    def green(self) -> frozenset:
        return frozenset(range(1, self.n + 1)) - self.red


@dataclass(frozen=True, order=True)
class KernelSet:
    """A kernel, ordered lexicographically by its sorted member list."""

    members: tuple[int, ...]

    @classmethod
    def of(cls, vertices: Iterable[int]) -> "KernelSet":
        members = tuple(sorted(set(vertices)))
        if not members:
            raise DigraphError("a kernel is nonempty")
        return cls(members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self.members

    def as_set(self) -> frozenset:
        return frozenset(self.members)

    def coloring(self, n: int) -> Coloring:
        return Coloring.from_red(n, self.members)


def is_well_colored(d: Digraph, c: Coloring | Mapping[int, Color]) -> bool:
    """Every green vertex has a red child and no red vertex has a red child."""
    if not isinstance(c, Coloring):
        c = Coloring.from_mapping(d.n, c)
    if c.n != d.n:
        raise ColoringError(f"colouring is on {c.n} vertices, digraph has {d.n}")
    red = c.red
    for v in d.vertices:
        has_red_child = any(w in red for w in d.children(v))
        if (v in red) == has_red_child:
            return False
    return True


def is_kernel(d: Digraph, k: Iterable[int]) -> bool:
    k = set(k)
    if not k <= set(d.vertices):
        raise DigraphError("kernel candidate contains non-vertices")
    if not k:
        return False
    for v in d.vertices:
        hits = any(w in k for w in d.children(v))
        if v in k and hits:
            return False
        if v not in k and not hits:
            return False
    return True


def find_circuit(d: Digraph) -> Optional[list[int]]:
    """Some directed circuit as a vertex list, or None for a DAG."""
    state = [0] * (d.n + 1)  # 0 new, 1 on stack, 2 done
    parent = [0] * (d.n + 1)
    for root in d.vertices:
        if state[root]:
            continue
        stack = [(root, iter(d.children(root)))]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                state[v] = 2
                stack.pop()
            elif state[w] == 0:
                state[w] = 1
                parent[w] = v
                stack.append((w, iter(d.children(w))))
            elif state[w] == 1:
                cyc = [v]
                while cyc[-1] != w:
                    cyc.append(parent[cyc[-1]])
                return cyc[::-1]
    return None


def topological_order(d: Digraph) -> list[int]:
    """Vertices with every arc pointing forward; raises on a circuit."""
    indeg = [0] * (d.n + 1)
    for _, v in d.arcs:
        indeg[v] += 1
    ready = [v for v in d.vertices if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for w in d.children(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) != d.n:
        raise NotADAGError(find_circuit(d))
    return order


def dag_kernel(d: Digraph) -> KernelSet:
    """The unique kernel of a DAG.

    Vertices are coloured from the sinks upwards: a vertex is red exactly when
    none of its children is red.
    """
    if d.n < 1:
        raise DigraphError("the empty digraph has no kernel")
    red = [False] * (d.n + 1)
    for v in reversed(topological_order(d)):
        red[v] = not any(red[w] for w in d.children(v))
    return KernelSet.of(v for v in d.vertices if red[v])


_RED, _GREEN = 1, 2


def _propagate(d: Digraph, col: list[int], queue: list[int]) -> bool:
    """Apply the forced moves; False on contradiction."""

    def assign(v, c):
        if col[v] == c:
            return True
        if col[v]:
            return False
        col[v] = c
        queue.append(v)
        return True

    def check_green(v):
        # a green vertex needs a red child
        open_children = []
        for w in d.children(v):
            if col[w] == _RED:
                return True
            if not col[w]:
                open_children.append(w)
        if not open_children:
            return False
        if len(open_children) == 1:
            return assign(open_children[0], _RED)
        return True

    def check_open(v):
        # an uncoloured vertex whose children are all green must be red
        if col[v]:
            return True
        if all(col[w] == _GREEN for w in d.children(v)):
            return assign(v, _RED)
        return True

    while queue:
        v = queue.pop()
        if col[v] == _RED:
            for w in d.children(v) + d.parents(v):
                if not assign(w, _GREEN):
                    return False
        elif not check_green(v):
            return False
        if col[v] == _GREEN:
            for u in d.parents(v):
                if col[u] == _GREEN and not check_green(u):
                    return False
                if not check_open(u):
                    return False
    return True


def enumerate_kernels(d: Digraph) -> list[KernelSet]:
    """All kernels, sorted lexicographically.

    Backtracking over vertex colours with unit propagation of the two
    colouring rules; branches on the uncoloured vertex of largest out-degree
    (smallest label on ties).
    """
    if d.n < 1:
        return []
    col = [0] * (d.n + 1)
    col[0] = _GREEN  # sentinel slot, never a vertex
    queue = [v for v in d.vertices if d.out_degree(v) == 0]
    # sinks cannot be green
    for v in queue:
        col[v] = _RED
    found: set[KernelSet] = set()

    def search(col, queue):
        if not _propagate(d, col, queue):
            return
        open_vertices = [v for v in d.vertices if not col[v]]
        if not open_vertices:
            red = [v for v in d.vertices if col[v] == _RED]
            if red and is_kernel(d, red):
                found.add(KernelSet.of(red))
            return
        v = max(open_vertices, key=lambda u: (d.out_degree(u), -u))
        for c in (_RED, _GREEN):
            branch = col[:]
            branch[v] = c
            search(branch, [v])

    search(col, queue)
    return sorted(found)


class Family(enum.Enum):
    TREE = "tree"
    DAG = "dag"
    UNICIRCUIT = "unicircuit"
    UNICYCLE = "unicycle"
    OTHER = "other"


@dataclass(frozen=True)
class FamilyKind:
    family: Family
    weakly_connected: bool
    cycle_count: int
    unique_cycle_is_circuit: Optional[bool] = None


def _components(d: Digraph) -> int:
    parent = list(range(d.n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = d.n
    for u, v in d.arcs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps


def classify(d: Digraph) -> FamilyKind:
    """Most specific of tree, unicircuit, unicycle, DAG, other.

    ``cycle_count`` is the cyclomatic number of the underlying multigraph, in
    which a digon contributes two parallel edges.
    """
    if d.n < 1:
        raise DigraphError("cannot classify the empty digraph")
    comps = _components(d)
    connected = comps == 1
    cycles = len(d.arcs) - d.n + comps
    has_circuit = find_circuit(d) is not None
    if connected and cycles == 0:
        return FamilyKind(Family.TREE, True, 0)
    if connected and cycles == 1:
        # a circuit, if any, can only be the unique cycle
        fam = Family.UNICIRCUIT if has_circuit else Family.UNICYCLE
        return FamilyKind(fam, True, 1, has_circuit)
    fam = Family.OTHER if has_circuit else Family.DAG
    return FamilyKind(fam, connected, cycles)
