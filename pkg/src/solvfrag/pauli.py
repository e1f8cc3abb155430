"""Pauli strings in symplectic GF(2) form, weighted sums, GF(2) elimination
and Clifford tableaux.

A :class:`PauliOp` stores the X- and Z-parts as Python integers used as
packed bit-vectors (bit ``q`` is qubit ``q``) and the phase as an exponent of
``i`` mod 4.  The phase is relative to the letter form, i.e. ``Y`` is the
Hermitian Pauli ``Y`` (phase 0), not ``XZ``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

DEDUP_THRESHOLD = 1e-12

_PHASE_TEXT = {0: "", 1: "i", 2: "-", 3: "-i"}
_TOKEN = re.compile(r"^([XYZ])(\d+)$")


class PauliError(ValueError):
    """Raised on malformed Pauli text or incompatible operands."""


class MembershipError(PauliError):
    """Raised when an operator is not in the span of a generating set."""


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliOp:
    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits <= 0:
            raise PauliError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise PauliError("bit-vector longer than n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliOp":
        return cls(n_qubits)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliOp":
        bit = 1 << qubit
        x = bit if letter in "XY" else 0
        z = bit if letter in "ZY" else 0
        return cls(n_qubits, x, z)

    @property
    def letters(self) -> "PauliOp":
        """The same string with phase +1."""
        if self.phase == 0:
            return self
        return PauliOp(self.n_qubits, self.x, self.z)

    @property
    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    @property
    def symplectic(self) -> int:
        """Concatenated (x | z << n) vector used for GF(2) elimination."""
        return self.x | (self.z << self.n_qubits)

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 / -1 for Hermitian operators."""
        if not self.is_hermitian:
            raise PauliError(f"{self} is not Hermitian")
        return 1 if self.phase == 0 else -1

    def letter(self, q: int) -> str:
        xb, zb = (self.x >> q) & 1, (self.z >> q) & 1
        return "IXZY"[xb | (zb << 1)]

    def support(self) -> list[int]:
        s = self.x | self.z
        return [q for q in range(self.n_qubits) if (s >> q) & 1]

    def label(self) -> str:
        """Text form without phase, e.g. ``"X0 Z1"``; empty for identity."""
        return " ".join(f"{self.letter(q)}{q}" for q in self.support())

    def dense_label(self) -> str:
        return "".join(self.letter(q) for q in range(self.n_qubits))

    def with_phase(self, phase: int) -> "PauliOp":
        return PauliOp(self.n_qubits, self.x, self.z, phase)

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    def __neg__(self) -> "PauliOp":
        return self.with_phase(self.phase + 2)

    def __str__(self) -> str:
        body = self.label() or "I"
        return f"{_PHASE_TEXT[self.phase]}{body}"

    def __repr__(self) -> str:
        return f"PauliOp({self})"


def parse_pauli(text: str, n_qubits: int) -> PauliOp:
    """Parse ``"X0 Y2 Z5"`` style text. The empty string is the identity."""
    x = z = 0
    seen = set()
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise PauliError(f"malformed Pauli token {tok!r}")
        letter, q = m.group(1), int(m.group(2))
        if q >= n_qubits:
            raise PauliError(f"qubit index out of range in token {tok!r}")
        if q in seen:
            raise PauliError(f"repeated qubit index in token {tok!r}")
        seen.add(q)
        if letter in "XY":
            x |= 1 << q
        if letter in "ZY":
            z |= 1 << q
    return PauliOp(n_qubits, x, z)


def _check_same(p: PauliOp, q: PauliOp) -> None:
    if p.n_qubits != q.n_qubits:
        raise PauliError(f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}")


def commutes(p: PauliOp, q: PauliOp) -> bool:
    _check_same(p, q)
    return _popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    """Operator product ``p @ q`` with the phase tracked exactly."""
    _check_same(p, q)
    x, z = p.x ^ q.x, p.z ^ q.z
    # letters = i^y X^x Z^z; moving Z^{z_p} past X^{x_q} costs (-1)^{|z_p & x_q|}
    ph = (
        p.phase
        + q.phase
        + p.y_count
        + q.y_count
        + 2 * _popcount(p.z & q.x)
        - _popcount(x & z)
    )
    return PauliOp(p.n_qubits, x, z, ph)


def product(ops: Iterable[PauliOp], n_qubits: int) -> PauliOp:
    acc = PauliOp.identity(n_qubits)
    for op in ops:
        acc = multiply(acc, op)
    return acc


def is_real_symmetric(p: PauliOp) -> bool:
    return p.y_count % 2 == 0 and p.phase % 2 == 0


# --------------------------------------------------------------------------
# weighted sums


@dataclass(frozen=True)
class WeightedTerm:
    op: PauliOp
    coeff: float

    def __post_init__(self):
        if self.op.phase != 0:
            raise PauliError("weighted terms carry their phase in the coefficient")
        if not math.isfinite(self.coeff):
            raise PauliError(f"non-finite coefficient for {self.op}")


@dataclass(frozen=True)
class Hamiltonian:
    """Real-weighted Pauli sum; duplicates merged, tiny coefficients dropped.

    Term order is first-occurrence order of the input.
    """

    n_qubits: int
    terms: tuple[WeightedTerm, ...] = field(default_factory=tuple)
    label: str = ""

    def __post_init__(self):
        merged: dict[tuple[int, int], list] = {}
        for t in self.terms:
            if t.op.n_qubits != self.n_qubits:
                raise PauliError("term qubit count differs from Hamiltonian")
            slot = merged.get(t.op.key)
            if slot is None:
                merged[t.op.key] = [t.op, t.coeff]
            else:
                slot[1] += t.coeff
        kept = tuple(
            WeightedTerm(op, c) for op, c in merged.values() if abs(c) > DEDUP_THRESHOLD
        )
        object.__setattr__(self, "terms", kept)

    @classmethod
    def from_pairs(cls, n_qubits: int, pairs: Iterable[tuple[float, str]], label: str = ""):
        terms = []
        for c, text in pairs:
            terms.append(WeightedTerm(parse_pauli(text, n_qubits), float(c)))
        return cls(n_qubits, tuple(terms), label)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def ops(self) -> list[PauliOp]:
        return [t.op for t in self.terms]

    @property
    def coeffs(self) -> list[float]:
        return [t.coeff for t in self.terms]

    def l1_norm(self, include_identity: bool = False) -> float:
        return sum(abs(t.coeff) for t in self.terms if include_identity or not t.op.is_identity)

    def constant(self) -> float:
        return sum(t.coeff for t in self.terms if t.op.is_identity)


# --------------------------------------------------------------------------
# GF(2) linear algebra


class _Eliminator:
    """Incremental GF(2) row reduction that remembers how each pivot row was
    built from the inserted vectors."""

    def __init__(self):
        self.rows: list[tuple[int, int, int]] = []  # (pivot bit, vector, combination mask)

    def reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        for pivot, row, rcombo in self.rows:
            if (v >> pivot) & 1:
                v ^= row
                combo ^= rcombo
        return v, combo

    def insert(self, v: int, index: int) -> bool:
        r, combo = self.reduce(v)
        if r == 0:
            return False
        pivot = r.bit_length() - 1
        combo ^= 1 << index
        # keep rows fully reduced so reduce() is a single pass
        new_rows = []
        for p, row, rc in self.rows:
            if (row >> pivot) & 1:
                row ^= r
                rc ^= combo
            new_rows.append((p, row, rc))
        new_rows.append((pivot, r, combo))
        self.rows = new_rows
        return True


def gf2_rank(ops: Sequence[PauliOp]) -> int:
    elim = _Eliminator()
    return sum(elim.insert(op.symplectic, i) for i, op in enumerate(ops))


def independent_generators(ops: Sequence[PauliOp]) -> list[PauliOp]:
    """Greedy GF(2) basis: keep each operator that is independent of the ones
    kept before it. Returned operators have phase +1."""
    elim = _Eliminator()
    basis: list[PauliOp] = []
    for op in ops:
        if elim.insert(op.symplectic, len(basis)):
            basis.append(op.letters)
    return basis


def express_in_generators(op: PauliOp, gens: Sequence[PauliOp]) -> tuple[list[int], int]:
    """Solve ``op = i^phase * prod_k gens[k]^e[k]`` (product in increasing k).

    Returns ``(e, phase)``.
    """
    elim = _Eliminator()
    for k, g in enumerate(gens):
        if not elim.insert(g.symplectic, k):
            raise PauliError("generators are not independent")
    residual, combo = elim.reduce(op.symplectic)
    if residual:
        raise MembershipError(f"{op} is not in the span of the generators")
    exps = [(combo >> k) & 1 for k in range(len(gens))]
    n = op.n_qubits
    prod = product((g for g, e in zip(gens, exps) if e), n)
    # op = i^phase * prod
    return exps, (op.phase - prod.phase) % 4


# --------------------------------------------------------------------------
# Clifford tableaux


@dataclass(frozen=True)
class CliffordTableau:
    """Images ``U x_q U^dag`` and ``U z_q U^dag`` of the single-qubit generators.

    ``gates`` records the elementary gate sequence (applied left to right to a
    state) when the tableau was built by synthesis; it is empty otherwise.
    """

    n_qubits: int
    x_images: tuple[PauliOp, ...]
    z_images: tuple[PauliOp, ...]
    gates: tuple[tuple, ...] = ()

    @classmethod
    def identity(cls, n_qubits: int) -> "CliffordTableau":
        xs = tuple(PauliOp.single(n_qubits, q, "X") for q in range(n_qubits))
        zs = tuple(PauliOp.single(n_qubits, q, "Z") for q in range(n_qubits))
        return cls(n_qubits, xs, zs)

    def is_symplectic(self) -> bool:
        n = self.n_qubits
        for a in range(n):
            for b in range(n):
                if not commutes(self.x_images[a], self.x_images[b]):
                    return False
                if not commutes(self.z_images[a], self.z_images[b]):
                    return False
                if commutes(self.x_images[a], self.z_images[b]) != (a != b):
                    return False
        return all(p.is_hermitian for p in self.x_images + self.z_images)

    def then(self, gate: tuple) -> "CliffordTableau":
        """Tableau of ``G U`` where ``G`` is an elementary gate."""
        g = gate_tableau(self.n_qubits, gate)
        xs = tuple(conjugate(g, p) for p in self.x_images)
        zs = tuple(conjugate(g, p) for p in self.z_images)
        return CliffordTableau(self.n_qubits, xs, zs, self.gates + (gate,))


def conjugate(t: CliffordTableau, p: PauliOp) -> PauliOp:
    """Return ``U p U^dag``."""
    if t.n_qubits != p.n_qubits:
        raise PauliError("tableau and operator qubit counts differ")
    # p = i^(phase + y) * prod_q X_q^{x_q} * prod_q Z_q^{z_q}
    acc = PauliOp(p.n_qubits, 0, 0, p.phase + p.y_count)
    for q in range(p.n_qubits):
        if (p.x >> q) & 1:
            acc = multiply(acc, t.x_images[q])
    for q in range(p.n_qubits):
        if (p.z >> q) & 1:
            acc = multiply(acc, t.z_images[q])
    return acc


def gate_tableau(n: int, gate: tuple) -> CliffordTableau:
    name = gate[0]
    xs = [PauliOp.single(n, q, "X") for q in range(n)]
    zs = [PauliOp.single(n, q, "Z") for q in range(n)]
    if name == "H":
        q = gate[1]
        xs[q], zs[q] = zs[q], xs[q]
    elif name == "S":
        # S X S^dag = Y, S Z S^dag = Z
        q = gate[1]
        xs[q] = PauliOp.single(n, q, "Y")
    elif name == "CNOT":
        c, t = gate[1], gate[2]
        xs[c] = multiply(xs[c], xs[t])
        zs[t] = multiply(zs[c], zs[t])
    elif name == "SWAP":
        a, b = gate[1], gate[2]
        xs[a], xs[b] = xs[b], xs[a]
        zs[a], zs[b] = zs[b], zs[a]
    else:
        raise PauliError(f"unknown gate {name!r}")
    return CliffordTableau(n, tuple(xs), tuple(zs))


def synthesize_clifford(ops: Sequence[PauliOp], n_qubits: int | None = None) -> CliffordTableau:
    """Clifford mapping ``ops[k]`` to ``+-Z_k`` for every k.

    Symplectic Gaussian elimination with H / S / CNOT / SWAP moves; the pivot
    is always the lowest eligible qubit.
    """
    if n_qubits is None:
        if not ops:
            raise PauliError("n_qubits required for an empty generator list")
        n_qubits = ops[0].n_qubits
    n = n_qubits
    if len(ops) > n:
        raise PauliError("more generators than qubits")
    for i, a in enumerate(ops):
        for b in ops[i + 1:]:
            if not commutes(a, b):
                raise PauliError(f"generators {a} and {b} do not commute")
    if gf2_rank(ops) != len(ops):
        raise PauliError("generators are not independent")

    tab = CliffordTableau.identity(n)
    current = [op.letters for op in ops]

    def apply(gate):
        nonlocal tab, current
        g = gate_tableau(n, gate)
        tab = tab.then(gate)
        current = [conjugate(g, p) for p in current]

    for k in range(len(current)):
        p = current[k]
        target = 1 << k
        if p.z == target and p.x == 0:
            continue
        high = ~((1 << k) - 1)
        # turn every Y / Z on qubits >= k into X
        for q in range(k, n):
            letter = p.letter(q)
            if letter == "Y":
                apply(("S", q))
                apply(("S", q))
                apply(("S", q))  # S^dag: Y -> X
            elif letter == "Z":
                apply(("H", q))
            p = current[k]
        xs_high = p.x & high
        if not xs_high:
            raise PauliError("generators are not independent")
        pivot = (xs_high & -xs_high).bit_length() - 1
        for q in range(pivot + 1, n):
            if (p.x >> q) & 1:
                apply(("CNOT", pivot, q))
        apply(("H", pivot))
        if pivot != k:
            apply(("SWAP", pivot, k))
        p = current[k]
        for q in range(k):
            if (p.z >> q) & 1:
                apply(("CNOT", q, k))
        p = current[k]
        if not (p.x == 0 and p.z == target):
            raise PauliError("clifford synthesis failed to reach z_k")  # pragma: no cover
    for k, (src, img) in enumerate(zip(ops, current)):
        if conjugate(tab, src.letters).key != (0, 1 << k):
            raise PauliError("clifford synthesis verification failed")  # pragma: no cover
    return tab
