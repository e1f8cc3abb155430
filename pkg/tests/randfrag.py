"""Random Sym-TWC-FF fragments: Jordan-Wigner Majorana edge operators on
random root graphs, dressed by random symmetries and scrambled by a random
Clifford."""
from __future__ import annotations

import random

from solvfrag.pauli import (
    Hamiltonian,
    PauliOp,
    WeightedTerm,
    conjugate,
    gate_tableau,
    multiply,
)


def majorana(n: int, k: int, offset: int) -> PauliOp:
    q = offset + k // 2
    z = ((1 << q) - 1) ^ ((1 << offset) - 1)
    bit = 1 << q
    return PauliOp(n, bit, z | (bit if k % 2 else 0))


def edge_op(n: int, i: int, j: int, offset: int) -> PauliOp:
    p = multiply(majorana(n, i, offset), majorana(n, j, offset)).with_phase(0)
    return p  # letters only; sign goes into the coefficient


def random_connected_graph(rng: random.Random, m: int, extra: float) -> list[tuple[int, int]]:
    edges = set()
    for v in range(1, m):
        edges.add((rng.randrange(v), v))
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < extra:
                edges.add((i, j))
    return sorted(edges)


def random_clifford_gates(rng: random.Random, n: int, depth: int) -> list[tuple]:
    gates = []
    for _ in range(depth):
        r = rng.random()
        if r < 0.3:
            gates.append(("H", rng.randrange(n)))
        elif r < 0.5:
            gates.append(("S", rng.randrange(n)))
        elif n > 1:
            a, b = rng.sample(range(n), 2)
            gates.append(("CNOT", a, b))
    return gates


def random_sym_twc_ff(seed: int, max_qubits: int = 8) -> Hamiltonian:
    rng = random.Random(seed)
    n = rng.randint(2, max_qubits)
    sym_qubits = rng.randint(0, min(3, n - 1))
    budget = n - sym_qubits
    ops: list[PauliOp] = []
    parity_of: list[PauliOp | None] = []  # per op, its block's parity for even m
    offset = 0
    while budget > 0:
        q = rng.randint(1, budget)
        m = rng.randint(2, 2 * q)  # modes that fit on q qubits
        # for even m the mode parity is Z on the first m/2 qubits of the block
        parity = PauliOp(n, 0, ((1 << (m // 2)) - 1) << offset) if m % 2 == 0 else None
        for i, j in random_connected_graph(rng, m, rng.choice((0.0, 0.2, 0.5))):
            ops.append(edge_op(n, i, j, offset))
            parity_of.append(parity)
        offset += q
        budget -= q
    syms = [PauliOp(n, 0, 1 << q) for q in range(n - sym_qubits, n)]

    def random_sym() -> PauliOp:
        p = PauliOp.identity(n)
        for s in syms:
            if rng.random() < 0.5:
                p = multiply(p, s)
        return p

    terms: dict[tuple[int, int], float] = {}

    def add(p: PauliOp):
        terms.setdefault(p.letters.key, round(rng.uniform(-2, 2), 6) or 0.5)

    use_parity = rng.random() < 0.5
    for op, parity in zip(ops, parity_of):
        base = multiply(op, random_sym()) if rng.random() < 0.5 else op
        add(base)
        for _ in range(rng.randint(0, 2)):
            add(multiply(base, random_sym()))
        if use_parity and parity is not None and rng.random() < 0.5:
            # twin dressed by the mode parity: coefficients depend on it
            add(multiply(base, parity))
    for _ in range(rng.randint(0, 3)):
        s = random_sym()
        if not s.is_identity:
            add(s)
    gates = random_clifford_gates(rng, n, rng.randint(0, 4 * n))
    out = []
    for (x, z), c in terms.items():
        p = PauliOp(n, x, z)
        for g in gates:
            p = conjugate(gate_tableau(n, g), p)
        out.append(WeightedTerm(p.letters, c * p.sign))
    rng.shuffle(out)
    return Hamiltonian(n, tuple(out), f"random-{seed}")
