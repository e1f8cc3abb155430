"""Solvability classes of Pauli term sets, decided on the anti-compatibility
graph alone.

Every ``graph_*`` predicate takes an :class:`AntiGraph`; the term-level
wrappers build the graph first.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .hamgraph import (
    AntiGraph,
    build_anti_graph,
    connected_components,
    recognize_line_graph,
    twin_free_core,
)
from .pauli import Hamiltonian, PauliOp, WeightedTerm


class SolvabilityClass(str, enum.Enum):
    PAULI = "Pauli"
    FC = "FC"
    AC = "AC"
    NC = "NC"
    TWC_AC = "TWC-AC"
    SYM_TWC_AC = "Sym-TWC-AC"
    FF = "FF"
    SYM_FF = "Sym-FF"
    TWC_FF = "TWC-FF"
    SYM_TWC_FF = "Sym-TWC-FF"

    @classmethod
    def parse(cls, text: str) -> "SolvabilityClass":
        norm = text.strip().upper().replace("_", "-")
        for member in cls:
            if member.value.upper() == norm or member.name == norm.replace("-", "_"):
                return member
        if norm == "SYM-AC":
            return cls.NC
        raise ValueError(f"unknown solvability class {text!r}")


# column order of the benchmark tables
TABLE_ORDER = (
    SolvabilityClass.PAULI,
    SolvabilityClass.FC,
    SolvabilityClass.AC,
    SolvabilityClass.NC,
    SolvabilityClass.TWC_AC,
    SolvabilityClass.SYM_TWC_AC,
    SolvabilityClass.FF,
    SolvabilityClass.SYM_FF,
    SolvabilityClass.TWC_FF,
    SolvabilityClass.SYM_TWC_FF,
)

_S = SolvabilityClass
_DIRECT_SUPERCLASSES = {
    _S.PAULI: (_S.FC, _S.AC),
    _S.FC: (_S.TWC_AC, _S.NC),
    _S.AC: (_S.TWC_AC, _S.FF, _S.NC),
    _S.NC: (_S.SYM_TWC_AC, _S.SYM_FF),
    _S.TWC_AC: (_S.TWC_FF, _S.SYM_TWC_AC),
    _S.SYM_TWC_AC: (_S.SYM_TWC_FF,),
    _S.FF: (_S.TWC_FF, _S.SYM_FF),
    _S.SYM_FF: (_S.SYM_TWC_FF,),
    _S.TWC_FF: (_S.SYM_TWC_FF,),
    _S.SYM_TWC_FF: (),
}

SYM_OF = {_S.AC: _S.NC, _S.TWC_AC: _S.SYM_TWC_AC, _S.FF: _S.SYM_FF, _S.TWC_FF: _S.SYM_TWC_FF}


@lru_cache(maxsize=None)
def superclasses(cls: SolvabilityClass) -> frozenset:
    out = {cls}
    for parent in _DIRECT_SUPERCLASSES[cls]:
        out |= superclasses(parent)
    return frozenset(out)


def is_subclass(a: SolvabilityClass, b: SolvabilityClass) -> bool:
    """True when every ``a`` term set is also a ``b`` term set."""
    return b in superclasses(a)


# --------------------------------------------------------------------------
# graph predicates


def graph_is_fc(g: AntiGraph) -> bool:
    return not any(g.adj)


def graph_is_ac(g: AntiGraph) -> bool:
    full = (1 << g.vertex_count) - 1
    return all(a == full ^ (1 << v) for v, a in enumerate(g.adj))


def graph_is_twc_ac(g: AntiGraph) -> bool:
    # each component is a clique <=> every vertex's closed neighbourhood
    # equals that of each of its neighbours
    for v, a in enumerate(g.adj):
        closed = a | (1 << v)
        m = a
        while m:
            low = m & -m
            w = low.bit_length() - 1
            if g.adj[w] | low != closed:
                return False
            m ^= low
    return True


def graph_is_ff(g: AntiGraph) -> bool:
    if g.vertex_count <= 1:
        return True
    if len(connected_components(g)) != 1:
        return False
    return recognize_line_graph(g) is not None


def graph_is_twc_ff(g: AntiGraph) -> bool:
    for comp in connected_components(g):
        if len(comp) <= 2:
            continue  # K1, K2 are line graphs
        if recognize_line_graph(g.subgraph(comp)) is None:
            return False
    return True


_BASE = {
    _S.AC: graph_is_ac,
    _S.TWC_AC: graph_is_twc_ac,
    _S.FF: graph_is_ff,
    _S.TWC_FF: graph_is_twc_ff,
}


def graph_is_sym_variant(g: AntiGraph, base: SolvabilityClass) -> bool:
    if base not in _BASE:
        raise ValueError(f"no symmetry-augmented variant for {base}")
    core, _, _ = twin_free_core(g)
    return _BASE[base](core)


def graph_predicate(cls: SolvabilityClass) -> Callable[[AntiGraph], bool]:
    cls = SolvabilityClass(cls)
    if cls is _S.PAULI:
        return lambda g: g.vertex_count <= 1
    if cls is _S.FC:
        return graph_is_fc
    if cls in _BASE:
        return _BASE[cls]
    base = {v: k for k, v in SYM_OF.items()}[cls]
    return lambda g: graph_is_sym_variant(g, base)


# --------------------------------------------------------------------------
# term-level predicates

Terms = Hamiltonian | Sequence[WeightedTerm] | Sequence[PauliOp]


def _graph(terms: Terms) -> AntiGraph:
    if isinstance(terms, Hamiltonian):
        return build_anti_graph(terms)
    ops = [t.op if isinstance(t, WeightedTerm) else t for t in terms]
    return build_anti_graph(ops)


def is_fc(terms: Terms) -> bool:
    return graph_is_fc(_graph(terms))


def is_ac(terms: Terms) -> bool:
    return graph_is_ac(_graph(terms))


def is_twc_ac(terms: Terms) -> bool:
    return graph_is_twc_ac(_graph(terms))


def is_ff(terms: Terms) -> bool:
    return graph_is_ff(_graph(terms))


def is_twc_ff(terms: Terms) -> bool:
    return graph_is_twc_ff(_graph(terms))


def is_nc(terms: Terms) -> bool:
    return graph_is_sym_variant(_graph(terms), _S.AC)


def is_sym_variant(terms: Terms, base: SolvabilityClass) -> bool:
    return graph_is_sym_variant(_graph(terms), SolvabilityClass(base))


def check(cls: SolvabilityClass | str, terms: Terms) -> bool:
    """Membership of ``terms`` in ``cls``."""
    if isinstance(cls, str) and not isinstance(cls, SolvabilityClass):
        cls = SolvabilityClass.parse(cls)
    return graph_predicate(cls)(_graph(terms))


def classes_satisfied(terms: Terms) -> list[SolvabilityClass]:
    g = _graph(terms)
    return [c for c in TABLE_ORDER if graph_predicate(c)(g)]
