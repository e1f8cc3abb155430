"""Anti-compatibility graphs, twin classes, twin-free quotients and line-graph
recognition with Krausz decompositions and root graphs.

Adjacency is stored as one integer bitmask per vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .pauli import Hamiltonian, PauliOp


@dataclass(frozen=True)
class AntiGraph:
    vertex_count: int
    adj: tuple[int, ...]
    vertex_labels: tuple[int, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.vertex_labels:
            object.__setattr__(self, "vertex_labels", tuple(range(self.vertex_count)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], **kw) -> "AntiGraph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj), **kw)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.vertex_count) for v in _bits(self.adj[u]) if u < v]

    @property
    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def subgraph(self, vertices: Sequence[int]) -> "AntiGraph":
        """Induced subgraph; new vertex i is ``vertices[i]`` and keeps its label."""
        index = {v: i for i, v in enumerate(vertices)}
        adj = []
        for v in vertices:
            m = 0
            for w in _bits(self.adj[v]):
                j = index.get(w)
                if j is not None:
                    m |= 1 << j
            adj.append(m)
        labels = tuple(self.vertex_labels[v] for v in vertices)
        names = tuple(self.names[v] for v in vertices) if self.names else ()
        return AntiGraph(len(vertices), tuple(adj), labels, names)

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.vertex_count):
            text = self.names[v] if self.names else str(self.vertex_labels[v])
            lines.append(f'  {v} [label="{text}"];')
        for u, v in self.edges():
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def anticommutation_matrix(ops: Sequence[PauliOp]) -> np.ndarray:
    """Boolean matrix ``M[i, j] = ops[i] and ops[j] anticommute``."""
    k = len(ops)
    if k == 0:
        return np.zeros((0, 0), dtype=bool)
    n = ops[0].n_qubits
    xs = np.zeros((k, n), dtype=np.uint8)
    zs = np.zeros((k, n), dtype=np.uint8)
    for i, op in enumerate(ops):
        for q in op.support():
            xs[i, q] = (op.x >> q) & 1
            zs[i, q] = (op.z >> q) & 1
    sym = xs.astype(np.int32) @ zs.T.astype(np.int32) + zs.astype(np.int32) @ xs.T.astype(np.int32)
    return (sym % 2).astype(bool)


def bitmasks_from_matrix(mat: np.ndarray) -> list[int]:
    weights = [1 << j for j in range(mat.shape[0])]
    return [sum(w for w, b in zip(weights, row) if b) for row in mat.tolist()]


def build_anti_graph(h: Hamiltonian | Sequence[PauliOp]) -> AntiGraph:
    ops = h.ops if isinstance(h, Hamiltonian) else list(h)
    adj = bitmasks_from_matrix(anticommutation_matrix(ops))
    return AntiGraph(len(ops), tuple(adj), tuple(range(len(ops))), tuple(op.label() or "I" for op in ops))


def connected_components(g: AntiGraph) -> list[list[int]]:
    """Components in order of their smallest vertex, vertices sorted."""
    seen = 0
    comps = []
    for s in range(g.vertex_count):
        if (seen >> s) & 1:
            continue
        comp = 1 << s
        frontier = 1 << s
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= g.adj[v]
            frontier = nxt & ~comp
            comp |= nxt
        seen |= comp
        comps.append(_bits(comp))
    return comps


def isolated_vertices(g: AntiGraph) -> list[int]:
    return [v for v in range(g.vertex_count) if g.adj[v] == 0]


# --------------------------------------------------------------------------
# twins


@dataclass(frozen=True)
class TwinPartition:
    classes: tuple[tuple[int, ...], ...]

    def class_of(self) -> dict[int, int]:
        return {v: i for i, cls in enumerate(self.classes) for v in cls}


def twin_partition(g: AntiGraph) -> TwinPartition:
    """Classes of vertices with identical open neighbourhoods, ordered by their
    smallest member."""
    groups: dict[int, list[int]] = {}
    for v in range(g.vertex_count):
        groups.setdefault(g.adj[v], []).append(v)
    classes = sorted((tuple(vs) for vs in groups.values()), key=lambda c: c[0])
    return TwinPartition(tuple(classes))


def quotient_graph(g: AntiGraph, t: TwinPartition) -> AntiGraph:
    """One vertex per class, labelled by the class's first member."""
    cls_of = t.class_of()
    if sorted(cls_of) != list(range(g.vertex_count)):
        raise ValueError("partition does not cover the graph exactly once")
    reps = [c[0] for c in t.classes]
    for c in t.classes:
        for v in c[1:]:
            if g.adj[v] != g.adj[c[0]]:
                raise ValueError(f"vertices {c[0]} and {v} are not twins")
    sub = g.subgraph(reps)
    return sub


def twin_free_core(g: AntiGraph) -> tuple[AntiGraph, list[int], TwinPartition]:
    """Drop isolated vertices, then take the twin-free quotient.

    Returns the quotient, the kept (non-isolated) vertex ids and the twin
    partition expressed in those original ids.
    """
    kept = [v for v in range(g.vertex_count) if g.adj[v]]
    sub = g.subgraph(kept)
    tp = twin_partition(sub)
    q = quotient_graph(sub, tp)
    original = TwinPartition(tuple(tuple(kept[v] for v in c) for c in tp.classes))
    return q, kept, original


# --------------------------------------------------------------------------
# line graphs


@dataclass(frozen=True)
class KrauszDecomposition:
    """Edge-disjoint cliques; every vertex lies in exactly two of them.

    Padding cliques are single vertices (they carry no edge).
    """

    vertex_count: int
    cliques: tuple[tuple[int, ...], ...]
    membership: tuple[tuple[int, int], ...]

    def validate(self, g: AntiGraph) -> None:
        if g.vertex_count != self.vertex_count:
            raise ValueError("decomposition is for a different graph")
        count = [0] * g.vertex_count
        for i, cl in enumerate(self.cliques):
            for v in cl:
                count[v] += 1
                if i not in self.membership[v]:
                    raise ValueError(f"membership of vertex {v} misses clique {i}")
            for u, v in combinations(cl, 2):
                if not g.has_edge(u, v):
                    raise ValueError(f"clique {i} is not complete")
        if any(c != 2 for c in count):
            raise ValueError("some vertex is not in exactly two cliques")
        for u, v in g.edges():
            a, b = set(self.membership[u]), set(self.membership[v])
            shared = [i for i in a & b if len(self.cliques[i]) > 1]
            if len(shared) != 1:
                raise ValueError(f"edge ({u}, {v}) covered {len(shared)} times")
        for u in range(g.vertex_count):
            i, j = self.membership[u]
            if i == j:
                raise ValueError(f"vertex {u} listed twice in clique {i}")


@dataclass(frozen=True)
class RootGraph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    edge_labels: tuple[int, ...]
    vertex_names: tuple[str, ...] = ()

    def edge_of(self) -> dict[int, tuple[int, int]]:
        return {lab: e for lab, e in zip(self.edge_labels, self.edges)}

    def line_graph(self) -> AntiGraph:
        """Line graph with vertex ``edge_labels[i]`` for root edge ``i``."""
        n = len(self.edges)
        order = sorted(range(n), key=lambda i: self.edge_labels[i])
        pos = {i: k for k, i in enumerate(order)}
        pairs = []
        for a, b in combinations(range(n), 2):
            if set(self.edges[a]) & set(self.edges[b]):
                pairs.append((pos[a], pos[b]))
        labels = tuple(self.edge_labels[i] for i in order)
        return AntiGraph.from_edges(n, pairs, vertex_labels=labels)

    def to_dot(self, name: str = "R") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.vertex_count):
            text = self.vertex_names[v] if self.vertex_names else str(v)
            lines.append(f'  {v} [label="{text}"];')
        for (u, v), lab in zip(self.edges, self.edge_labels):
            lines.append(f'  {u} -- {v} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _is_clique(g: AntiGraph, mask: int) -> bool:
    for v in _bits(mask):
        if (g.adj[v] | (1 << v)) & mask != mask:
            return False
    return True


def _two_clique_splits(g: AntiGraph, v: int) -> list[tuple[int, int]]:
    """Candidate splits of N(v) into the two Krausz cliques at ``v``.

    In a line graph the complement of G[N(v)] is bipartite with at most two
    components, unless N(v) is itself a clique; with three or more
    neighbours that clique must then be a single Krausz clique.
    """
    nb = g.adj[v]
    verts = _bits(nb)
    if _is_clique(g, nb) and len(verts) >= 3:
        return [(nb, 0)]
    colour: dict[int, int] = {}
    comps: list[tuple[int, int]] = []
    for s in verts:
        if s in colour:
            continue
        colour[s] = 0
        sides = [1 << s, 0]
        stack = [s]
        while stack:
            u = stack.pop()
            for w in _bits(nb & ~g.adj[u] & ~(1 << u)):
                if w not in colour:
                    colour[w] = 1 - colour[u]
                    sides[colour[w]] |= 1 << w
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return []
        comps.append((sides[0], sides[1]))
        if len(comps) > 2:
            return []
    if len(comps) == 1:
        return [comps[0]]
    (a0, a1), (b0, b1) = comps
    return [(a0 | b0, a1 | b1), (a0 | b1, a1 | b0)]


def _propagate(g: AntiGraph, start: int, a: int, b: int) -> list[int] | None:
    """Grow the Krausz cover from the two cliques at ``start``; every further
    clique is forced. Returns the list of nonempty clique masks or None."""
    n = g.vertex_count
    assigned: list[list[int]] = [[] for _ in range(n)]
    cliques: list[int] = []
    queue: list[int] = []

    def add(mask: int) -> bool:
        if mask in cliques:
            return True
        if not _is_clique(g, mask):
            return False
        for u in _bits(mask):
            if len(assigned[u]) >= 2:
                return False
            for other in assigned[u]:
                if bin(other & mask).count("1") > 1:
                    return False
            assigned[u].append(mask)
        cliques.append(mask)
        queue.append(mask)
        return True

    sbit = 1 << start
    for part in (a, b):
        if part and not add(part | sbit):
            return None
    while queue:
        cl = queue.pop(0)
        for u in _bits(cl):
            if len(assigned[u]) != 1:
                continue
            rest = g.adj[u] & ~assigned[u][0]
            if rest:
                if not add(rest | (1 << u)):
                    return None
    # every edge covered exactly once
    for u in range(n):
        covered = 0
        for cl in assigned[u]:
            covered |= cl
        if covered & ~(1 << u) != g.adj[u]:
            return None
    return cliques


def recognize_line_graph(g: AntiGraph) -> KrauszDecomposition | None:
    """Krausz decomposition of a connected graph, or None if it is not a line
    graph. K3 is given the three-edge cover (triangle root)."""
    n = g.vertex_count
    if n == 0:
        return KrauszDecomposition(0, (), ())
    if n == 1:
        return KrauszDecomposition(1, ((0,), (0,)), ((0, 1),))
    if any(a == 0 for a in g.adj):
        raise ValueError("isolated vertices must be removed before recognition")
    if n == 3 and g.edge_count == 3:
        cliques = ((0, 1), (1, 2), (0, 2))
        return KrauszDecomposition(3, cliques, ((0, 2), (0, 1), (1, 2)))
    # start from a vertex of minimum degree: fewest candidate splits
    start = min(range(n), key=lambda v: (g.degree(v), v))
    for a, b in _two_clique_splits(g, start):
        found = _propagate(g, start, a, b)
        if found is not None:
            return _finalize(g, found)
    return None


def _finalize(g: AntiGraph, masks: list[int]) -> KrauszDecomposition:
    n = g.vertex_count
    nonempty = sorted((tuple(_bits(m)) for m in masks if m.bit_count() > 1))
    cliques = list(nonempty)
    member: list[list[int]] = [[] for _ in range(n)]
    for i, cl in enumerate(cliques):
        for v in cl:
            member[v].append(i)
    for v in range(n):
        while len(member[v]) < 2:
            member[v].append(len(cliques))
            cliques.append((v,))
    kd = KrauszDecomposition(n, tuple(cliques), tuple(tuple(sorted(m)) for m in member))
    kd.validate(g)
    return kd


def root_graph(k: KrauszDecomposition) -> RootGraph:
    """Root vertex per clique, root edge per line-graph vertex."""
    edges = tuple(k.membership[v] for v in range(k.vertex_count))
    names = tuple("".join(str(v) for v in cl) for cl in k.cliques)
    return RootGraph(len(k.cliques), edges, tuple(range(k.vertex_count)), names)


def is_line_graph(g: AntiGraph) -> bool:
    """Every component (isolated vertices included) is a line graph."""
    for comp in connected_components(g):
        if recognize_line_graph(g.subgraph(comp)) is None:
            return False
    return True


def line_graph_isomorphism_holds(g: AntiGraph, r: RootGraph) -> bool:
    """Check that ``edge_labels`` is an isomorphism L(r) -> g."""
    if len(r.edges) != g.vertex_count:
        return False
    if sorted(r.edge_labels) != list(range(g.vertex_count)):
        return False
    if len(set(tuple(sorted(e)) for e in r.edges)) != len(r.edges):
        return False  # parallel edges
    for i, j in combinations(range(len(r.edges)), 2):
        share = bool(set(r.edges[i]) & set(r.edges[j]))
        if share != g.has_edge(r.edge_labels[i], r.edge_labels[j]):
            return False
    return True
