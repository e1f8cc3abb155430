"""Factorization of symmetry-augmented TWC-FF fragments.

A fragment ``sum_P h_P P`` is rewritten as

    sum_lambda sum_a p_a(C) X_a + p_0(C)

where the ``C_k`` are independent commuting Pauli symmetries, each ``X_a``
lives on an edge of a root graph, and, within a component, the ``X_a`` obey
the Majorana edge algebra ``X_a = s_a * rho(i g_i g_j)`` for the root edge
``(i, j)``.  The representation ``rho`` is fixed on a BFS spanning tree of
the root graph; non-tree generators are dressed by the symmetry of their
fundamental cycle so that the representation is consistent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .classify import SolvabilityClass, graph_is_sym_variant
from .hamgraph import (
    AntiGraph,
    RootGraph,
    build_anti_graph,
    connected_components,
    recognize_line_graph,
    root_graph,
    twin_partition,
)
from .pauli import (
    Hamiltonian,
    PauliError,
    PauliOp,
    WeightedTerm,
    commutes,
    express_in_generators,
    independent_generators,
    multiply,
    product,
)

PHASE_TOL = 1e-12


class FactorizationError(ValueError):
    """Fragment is not Sym-TWC-FF, or an internal identity failed.

    ``pair`` carries the offending operators when there are any.
    """

    def __init__(self, message: str, pair: tuple | None = None):
        super().__init__(message if pair is None else f"{message}: {pair[0]} / {pair[1]}")
        self.pair = pair


# --------------------------------------------------------------------------
# polynomials over the symmetry generators


@dataclass(frozen=True)
class SymPolynomial:
    """Real polynomial in commuting +-1 valued generators.

    ``terms`` maps an exponent bitmask (bit k -> generator k) to a coefficient.
    """

    generator_count: int
    terms: tuple[tuple[int, float], ...] = ()

    @classmethod
    def from_dict(cls, k: int, d: dict[int, float]) -> "SymPolynomial":
        return cls(k, tuple((e, c) for e, c in d.items() if c != 0.0))

    def __len__(self) -> int:
        return len(self.terms)

    def exponent_bits(self, e: int) -> str:
        return "".join(str((e >> k) & 1) for k in range(self.generator_count))


def evaluate_poly(p: SymPolynomial, v: Sequence[int]) -> float:
    """Value at the sign vector ``v``."""
    if len(v) != p.generator_count:
        raise ValueError(f"sign vector has length {len(v)}, expected {p.generator_count}")
    neg = 0
    for k, s in enumerate(v):
        if s == -1:
            neg |= 1 << k
        elif s != 1:
            raise ValueError("sign vector entries must be +-1")
    total = 0.0
    for e, c in p.terms:
        total += -c if (e & neg).bit_count() % 2 else c
    return total


# --------------------------------------------------------------------------
# Majorana monomials


def majorana_mul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    """Product of ``i^pa g_A`` and ``i^pb g_B`` with ``g_A`` the ascending
    product of the Majoranas in bitmask ``A``."""
    pa, ma = a
    pb, mb = b
    swaps = 0
    m = mb
    while m:
        low = m & -m
        swaps += (ma & ~((low << 1) - 1)).bit_count()
        m ^= low
    return ((pa + pb + 2 * swaps) % 4, ma ^ mb)


def edge_majorana(i: int, j: int) -> tuple[int, int]:
    """``i g_i g_j`` for ``i < j``."""
    return (1, (1 << i) | (1 << j))


# --------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class SoGenerator:
    pauli: PauliOp  # X_a, phase +1
    root_edge: tuple[int, int]
    coeff_poly: SymPolynomial
    orientation: int  # X_a = orientation * rho(i g_i g_j)
    representative: PauliOp
    dressing: PauliOp  # S_a (identity when undressed)
    source_terms: tuple[int, ...]
    tree_edge: bool


@dataclass(frozen=True)
class SoComponent:
    generators: tuple[SoGenerator, ...]
    root: RootGraph
    parent: tuple[int, ...]  # BFS tree over root vertices, -1 at the root
    parent_edge: tuple[int, ...]  # generator index of the tree edge to the parent
    parity: PauliOp | None  # rho(i^(m/2) g_0...g_{m-1}) for even m

    @property
    def mode_count(self) -> int:
        return self.root.vertex_count

    @property
    def irrep_dim_log2(self) -> int:
        m = self.mode_count
        return (m - 1) // 2 if m % 2 else m // 2 - 1

    def tree_path(self, u: int, w: int) -> list[int]:
        """Generator indices along the tree path u -> w."""
        up_u, up_w = [], []
        depth = self._depths()
        a, b = u, w
        while depth[a] > depth[b]:
            up_u.append(self.parent_edge[a])
            a = self.parent[a]
        while depth[b] > depth[a]:
            up_w.append(self.parent_edge[b])
            b = self.parent[b]
        while a != b:
            up_u.append(self.parent_edge[a])
            a = self.parent[a]
            up_w.append(self.parent_edge[b])
            b = self.parent[b]
        return up_u + up_w[::-1]

    def _depths(self) -> list[int]:
        depth = [-1] * self.mode_count
        for v in range(self.mode_count):
            chain = []
            x = v
            while x != -1 and depth[x] == -1:
                chain.append(x)
                x = self.parent[x]
            d = -1 if x == -1 else depth[x]
            for y in reversed(chain):
                d += 1
                depth[y] = d
        return depth

    def majorana_pair(self, u: int, w: int) -> PauliOp:
        """``rho(i g_u g_w)`` for ``u < w`` as a Hermitian Pauli with sign."""
        if not u < w:
            raise ValueError("need u < w")
        n = self.generators[0].pauli.n_qubits
        maj = (0, 0)
        pauli = PauliOp.identity(n)
        for a in self.tree_path(u, w):
            i, j = self.generators[a].root_edge
            maj = majorana_mul(maj, edge_majorana(i, j))
            pauli = multiply(pauli, self.generators[a].pauli)
        # rho(g_u g_w) = i^(pp - pm) L
        out = pauli.with_phase(pauli.phase - maj[0] + 1)
        if not out.is_hermitian:  # pragma: no cover - guarded by factorize
            raise FactorizationError("inconsistent Majorana representation")
        return out


@dataclass(frozen=True)
class FactorizedFragment:
    n_qubits: int
    symmetry_generators: tuple[PauliOp, ...]
    components: tuple[SoComponent, ...]
    constant_poly: SymPolynomial
    source: tuple[WeightedTerm, ...]
    constant_terms: tuple[int, ...] = ()

    @property
    def K(self) -> int:
        return len(self.symmetry_generators)

    def expand(self) -> list[WeightedTerm]:
        """Multiply the factorized form back out into Pauli terms."""
        out = []
        gens = self.symmetry_generators
        n = self.n_qubits

        def monomial(e: int) -> PauliOp:
            return product((g for k, g in enumerate(gens) if (e >> k) & 1), n)

        def emit(op: PauliOp, c: float):
            if op.phase % 2:
                raise FactorizationError(f"residual imaginary phase on {op}")
            out.append(WeightedTerm(op.letters, c if op.phase == 0 else -c))

        for e, c in self.constant_poly.terms:
            emit(monomial(e), c)
        for comp in self.components:
            for gen in comp.generators:
                for e, c in gen.coeff_poly.terms:
                    emit(multiply(monomial(e), gen.pauli), c)
        return out

    def reconstruction_ok(self) -> bool:
        want = {t.op.key: t.coeff for t in self.source}
        got = {}
        for t in self.expand():
            if t.op.key in got:
                return False
            got[t.op.key] = t.coeff
        return got == want


# --------------------------------------------------------------------------
# pipeline


def _spanning_tree(root: RootGraph) -> tuple[list[int], list[int], set[int]]:
    m = root.vertex_count
    incident: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for a, (i, j) in enumerate(root.edges):
        incident[i].append((a, j))
        incident[j].append((a, i))
    parent = [-2] * m
    parent_edge = [-1] * m
    tree: set[int] = set()
    for s in range(m):
        if parent[s] != -2:
            continue
        parent[s] = -1
        queue = [s]
        while queue:
            u = queue.pop(0)
            for a, w in incident[u]:
                if parent[w] == -2:
                    parent[w] = u
                    parent_edge[w] = a
                    tree.add(a)
                    queue.append(w)
    return parent, parent_edge, tree


def symmetry_factor_for_generators(
    component_paulis: Sequence[PauliOp], root: RootGraph
) -> list[PauliOp]:
    """Dressing symmetries ``S_a`` making ``X_a = S_a A_a`` a consistent
    Majorana edge representation: identity on BFS-tree edges, the fundamental
    cycle product on the others."""
    parent, parent_edge, tree = _spanning_tree(root)
    n = component_paulis[0].n_qubits
    probe = SoComponent(
        tuple(
            SoGenerator(p, root.edges[a], SymPolynomial(0), 1, p, PauliOp.identity(n), (), a in tree)
            for a, p in enumerate(component_paulis)
        ),
        root,
        tuple(parent),
        tuple(parent_edge),
        None,
    )
    out = []
    for a, p in enumerate(component_paulis):
        if a in tree:
            out.append(PauliOp.identity(n))
            continue
        i, j = root.edges[a]
        cycle = p
        for t in probe.tree_path(i, j):
            cycle = multiply(cycle, component_paulis[t])
        s = cycle.letters
        for b, other in enumerate(component_paulis):
            if not commutes(s, other):
                raise FactorizationError("cycle symmetry fails to commute", (s, other))
        out.append(s)
    return out


def _component(
    ops: Sequence[PauliOp], classes: list[tuple[int, ...]], quotient: AntiGraph
) -> tuple[SoComponent, list[list[int]]]:
    kd = recognize_line_graph(quotient)
    if kd is None:
        raise FactorizationError("component quotient is not a line graph")
    root = root_graph(kd)
    reps = [ops[c[0]] for c in classes]
    dressings = symmetry_factor_for_generators(reps, root)
    parent, parent_edge, tree = _spanning_tree(root)
    n = reps[0].n_qubits

    xs = []
    for a, (rep, s) in enumerate(zip(reps, dressings)):
        x = multiply(s, rep).letters
        xs.append(x)
    for a in range(len(xs)):
        for b in range(a + 1, len(xs)):
            share = bool(set(root.edges[a]) & set(root.edges[b]))
            if commutes(xs[a], xs[b]) == share:
                raise FactorizationError("generator pattern disagrees with root graph", (xs[a], xs[b]))

    gens = [
        SoGenerator(xs[a], root.edges[a], SymPolynomial(0), 1, reps[a], dressings[a], classes[a], a in tree)
        for a in range(len(xs))
    ]
    comp = SoComponent(tuple(gens), root, tuple(parent), tuple(parent_edge), None)
    # orientation of non-tree generators
    for a in range(len(gens)):
        if a in tree:
            continue
        i, j = root.edges[a]
        rho = comp.majorana_pair(i, j)
        if rho.letters.key != xs[a].key:
            raise FactorizationError("cycle dressing left a residual symmetry", (rho, xs[a]))
        gens[a] = SoGenerator(
            xs[a], (i, j), SymPolynomial(0), rho.sign, reps[a], dressings[a], classes[a], False
        )
    comp = SoComponent(tuple(gens), root, tuple(parent), tuple(parent_edge), _parity(gens, root, parent, parent_edge, n))
    return comp, [list(c) for c in classes]


def _parity(gens, root: RootGraph, parent, parent_edge, n: int) -> PauliOp | None:
    m = root.vertex_count
    if m % 2:
        return None
    # T-join on the tree: tree edge to the parent is used when the subtree is odd
    children: list[list[int]] = [[] for _ in range(m)]
    for v in range(m):
        if parent[v] >= 0:
            children[parent[v]].append(v)
    size = [1] * m
    order = [v for v in range(m) if parent[v] == -1]
    k = 0
    while k < len(order):
        order.extend(children[order[k]])
        k += 1
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    maj = (0, 0)
    pauli = PauliOp.identity(n)
    for v in range(m):
        if parent[v] >= 0 and size[v] % 2:
            a = parent_edge[v]
            i, j = root.edges[a]
            maj = majorana_mul(maj, edge_majorana(i, j))
            pauli = multiply(pauli, gens[a].pauli)
    if maj[1] != (1 << m) - 1:  # pragma: no cover
        raise FactorizationError("parity T-join does not cover every mode")
    out = pauli.with_phase(pauli.phase - maj[0] + m // 2)
    if not out.is_hermitian:  # pragma: no cover
        raise FactorizationError("parity operator is not Hermitian")
    return out


def _as_terms(frag) -> tuple[int, tuple[WeightedTerm, ...]]:
    if isinstance(frag, Hamiltonian):
        return frag.n_qubits, frag.terms
    terms = tuple(frag.terms) if hasattr(frag, "terms") else tuple(frag)
    if not terms:
        raise FactorizationError("empty fragment")
    return terms[0].op.n_qubits, terms


def factorize(frag) -> FactorizedFragment:
    """Factorize a fragment (Fragment, Hamiltonian or sequence of terms)."""
    n, terms = _as_terms(frag)
    ops = [t.op for t in terms]
    g = build_anti_graph(ops)
    if not graph_is_sym_variant(g, SolvabilityClass.TWC_FF):
        raise FactorizationError("fragment is not Sym-TWC-FF")

    z_class = [v for v in range(len(ops)) if g.adj[v] == 0]
    kept = [v for v in range(len(ops)) if g.adj[v]]
    sub = g.subgraph(kept)

    components: list[SoComponent] = []
    all_classes: list[list[list[int]]] = []
    for comp_local in connected_components(sub):
        comp = [kept[v] for v in comp_local]
        cg = g.subgraph(comp)
        tp = twin_partition(cg)
        classes = [tuple(comp[v] for v in c) for c in tp.classes]
        quotient = cg.subgraph([c[0] for c in tp.classes])
        so, cls = _component(ops, classes, quotient)
        components.append(so)
        all_classes.append(cls)

    # twin products are symmetries of the whole fragment
    candidates: list[PauliOp] = [ops[v] for v in z_class]
    for classes in all_classes:
        for c in classes:
            for b in c[1:]:
                twin = multiply(ops[b], ops[c[0]])
                for other in ops:
                    if not commutes(twin, other):
                        raise FactorizationError("twin product is not a symmetry", (ops[b], ops[c[0]]))
                candidates.append(twin.letters)
    for comp in components:
        candidates.extend(gen.dressing for gen in comp.generators if not gen.dressing.is_identity)
    for comp in components:
        if comp.parity is not None and not comp.parity.is_identity:
            candidates.append(comp.parity.letters)
    gens = independent_generators(candidates)
    K = len(gens)
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            if not commutes(a, b):
                raise FactorizationError("symmetry generators do not commute", (a, b))

    def real_phase(phase: int, where: PauliOp) -> int:
        if phase % 2:
            raise FactorizationError(f"imaginary phase expressing {where}")
        return 1 if phase == 0 else -1

    p0: dict[int, float] = {}
    for v in z_class:
        exps, phase = express_in_generators(ops[v], gens)
        e = sum(bit << k for k, bit in enumerate(exps))
        p0[e] = terms[v].coeff * real_phase(phase, ops[v])

    final_components = []
    for comp in components:
        new_gens = []
        for gen in comp.generators:
            poly: dict[int, float] = {}
            for src in gen.source_terms:
                d = multiply(ops[src], gen.pauli)
                exps, phase = express_in_generators(d, gens)
                e = sum(bit << k for k, bit in enumerate(exps))
                if e in poly:
                    raise FactorizationError("two terms share a monomial", (ops[src], gen.pauli))
                poly[e] = terms[src].coeff * real_phase(phase, ops[src])
            new_gens.append(
                SoGenerator(
                    gen.pauli,
                    gen.root_edge,
                    SymPolynomial.from_dict(K, poly),
                    gen.orientation,
                    gen.representative,
                    gen.dressing,
                    gen.source_terms,
                    gen.tree_edge,
                )
            )
            for c in gens:
                if not commutes(c, gen.pauli):
                    raise FactorizationError("symmetry does not commute with generator", (c, gen.pauli))
        final_components.append(
            SoComponent(tuple(new_gens), comp.root, comp.parent, comp.parent_edge, comp.parity)
        )

    ff = FactorizedFragment(
        n,
        tuple(gens),
        tuple(final_components),
        SymPolynomial.from_dict(K, p0),
        tuple(terms),
        tuple(z_class),
    )
    if not ff.reconstruction_ok():
        raise FactorizationError("factorized form does not reproduce the fragment")
    return ff


# --------------------------------------------------------------------------
# JSON


def to_dict(ff: FactorizedFragment) -> dict:
    def poly(p: SymPolynomial):
        return [[p.exponent_bits(e), c] for e, c in p.terms]

    return {
        "n_qubits": ff.n_qubits,
        "K": ff.K,
        "symmetry_generators": [g.label() or "I" for g in ff.symmetry_generators],
        "constant_poly": poly(ff.constant_poly),
        "components": [
            {
                "d": len(comp.generators),
                "modes": comp.mode_count,
                "root_edges": [list(e) for e in comp.root.edges],
                "parity": None if comp.parity is None else str(comp.parity),
                "generators": [
                    {
                        "pauli": gen.pauli.label(),
                        "root_edge": list(gen.root_edge),
                        "orientation": gen.orientation,
                        "dressing": gen.dressing.label() or "I",
                        "coeff_poly": poly(gen.coeff_poly),
                    }
                    for gen in comp.generators
                ],
            }
            for comp in ff.components
        ],
    }
