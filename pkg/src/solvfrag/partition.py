"""Greedy sorted-insertion partitioning into solvable fragments."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classify import SolvabilityClass, check, graph_predicate
from .hamgraph import AntiGraph, anticommutation_matrix
from .pauli import Hamiltonian, WeightedTerm, parse_pauli


@dataclass(frozen=True)
class Fragment:
    terms: tuple[WeightedTerm, ...]
    class_tag: SolvabilityClass
    source_indices: tuple[int, ...] = ()

    @property
    def n_qubits(self) -> int:
        return self.terms[0].op.n_qubits

    @property
    def l1_norm(self) -> float:
        return sum(abs(t.coeff) for t in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def as_hamiltonian(self) -> Hamiltonian:
        return Hamiltonian(self.n_qubits, self.terms)


@dataclass(frozen=True)
class Partition:
    """Fragments of a Hamiltonian; identity terms are kept aside in
    ``constant`` and are not assigned to any fragment."""

    fragments: tuple[Fragment, ...]
    parent_hash: str
    n_qubits: int
    class_tag: SolvabilityClass
    constant: float = 0.0
    label: str = ""

    def __len__(self) -> int:
        return len(self.fragments)


@dataclass(frozen=True)
class FragmentStats:
    l1_norm: float
    term_count: int
    verified: bool


@dataclass(frozen=True)
class PartitionStats:
    fragments: tuple[FragmentStats, ...]
    largest: int  # index of the largest-L1 fragment, -1 when empty

    @property
    def largest_l1(self) -> float:
        return self.fragments[self.largest].l1_norm if self.fragments else 0.0

    @property
    def largest_count(self) -> int:
        return self.fragments[self.largest].term_count if self.fragments else 0

    @property
    def fragment_count(self) -> int:
        return len(self.fragments)


def hamiltonian_digest(h: Hamiltonian) -> str:
    text = "\n".join(f"{t.coeff!r}\t{t.op.label()}" for t in h.terms)
    return hashlib.sha256(f"{h.n_qubits}\n{text}".encode()).hexdigest()


def _mask_from_row(row: np.ndarray) -> int:
    if row.size == 0:
        return 0
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def sorted_insertion(h: Hamiltonian, cls: SolvabilityClass | str) -> Partition:
    """Visit terms by descending |coeff| (ties: input order) and put each in the
    first fragment that stays in ``cls``; open a new fragment otherwise."""
    if not isinstance(cls, SolvabilityClass):
        cls = SolvabilityClass.parse(cls)
    predicate = graph_predicate(cls)
    idx = [i for i, t in enumerate(h.terms) if not t.op.is_identity]
    constant = sum(t.coeff for t in h.terms if t.op.is_identity)
    order = sorted(idx, key=lambda i: -abs(h.terms[i].coeff))
    anti = anticommutation_matrix(h.ops)

    members: list[list[int]] = []
    graphs: list[list[int]] = []  # local adjacency bitmasks per fragment
    for i in order:
        placed = False
        if cls is not SolvabilityClass.PAULI:
            for f, (mem, adj) in enumerate(zip(members, graphs)):
                k = len(mem)
                new_mask = _mask_from_row(anti[i, mem])
                bit = 1 << k
                tentative = [a | bit if (new_mask >> j) & 1 else a for j, a in enumerate(adj)]
                tentative.append(new_mask)
                if predicate(AntiGraph(k + 1, tuple(tentative))):
                    mem.append(i)
                    graphs[f] = tentative
                    placed = True
                    break
        if not placed:
            members.append([i])
            graphs.append([0])

    fragments = tuple(
        Fragment(tuple(h.terms[i] for i in mem), cls, tuple(mem)) for mem in members
    )
    return Partition(fragments, hamiltonian_digest(h), h.n_qubits, cls, constant, h.label)


def partition_report(p: Partition) -> PartitionStats:
    stats = []
    for frag in p.fragments:
        stats.append(FragmentStats(frag.l1_norm, len(frag), check(frag.class_tag, frag.terms)))
    largest = max(range(len(stats)), key=lambda i: stats[i].l1_norm, default=-1)
    return PartitionStats(tuple(stats), largest)


def reconstruct(p: Partition) -> dict[tuple[int, int], float]:
    """Term map (x, z) -> coeff rebuilt from the fragments plus the constant."""
    out: dict[tuple[int, int], float] = {}
    for frag in p.fragments:
        for t in frag.terms:
            if t.op.key in out:
                raise ValueError(f"term {t.op} appears in two fragments")
            out[t.op.key] = t.coeff
    if p.constant != 0.0:
        out[(0, 0)] = p.constant
    return out


def is_exact_partition(p: Partition, h: Hamiltonian) -> bool:
    source = {t.op.key: t.coeff for t in h.terms}
    if sum(1 for t in h.terms if t.op.is_identity) > 1:
        return False
    return reconstruct(p) == source


# --------------------------------------------------------------------------
# JSON


def partition_to_dict(p: Partition, stats: PartitionStats | None = None) -> dict:
    stats = stats or partition_report(p)
    return {
        "n_qubits": p.n_qubits,
        "label": p.label,
        "class": p.class_tag.value,
        "parent_hash": p.parent_hash,
        "constant": p.constant,
        "largest_fragment": stats.largest,
        "fragments": [
            {
                "class": frag.class_tag.value,
                "source_indices": list(frag.source_indices),
                "terms": [[t.op.label(), t.coeff] for t in frag.terms],
                "l1_norm": s.l1_norm,
                "term_count": s.term_count,
                "verified": s.verified,
            }
            for frag, s in zip(p.fragments, stats.fragments)
        ],
    }


def fragment_from_dict(d: dict, n_qubits: int) -> Fragment:
    terms = tuple(WeightedTerm(parse_pauli(label, n_qubits), float(c)) for label, c in d["terms"])
    return Fragment(terms, SolvabilityClass.parse(d["class"]), tuple(d.get("source_indices", ())))


def partition_from_dict(d: dict) -> Partition:
    n = int(d["n_qubits"])
    frags = tuple(fragment_from_dict(f, n) for f in d["fragments"])
    return Partition(
        frags,
        d["parent_hash"],
        n,
        SolvabilityClass.parse(d["class"]),
        float(d.get("constant", 0.0)),
        d.get("label", ""),
    )


def dumps(p: Partition) -> str:
    # float repr round-trips bit-exactly
    return json.dumps(partition_to_dict(p), indent=1)


def loads(text: str) -> Partition:
    return partition_from_dict(json.loads(text))
