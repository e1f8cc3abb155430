"""Dense statevectors and matrix-free Pauli-sum application.

Basis convention: qubit q is bit q of the basis index, so ``|b>`` with
``b = sum_q b_q 2^q``. A Pauli acts as
``P|b> = i^(phase + y) (-1)^(z.b) |b ^ x>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..pauli import Hamiltonian, PauliOp, WeightedTerm

DENSE_CAP = 10
MEMORY_CAP_QUBITS = 16
_I_POW = np.array([1, 1j, -1, -1j])


class DimensionError(ValueError):
    pass


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise DimensionError(
                f"{self.amplitudes.shape[0]} amplitudes for {self.n_qubits} qubits"
            )

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        amp = np.zeros(1 << n_qubits, dtype=complex)
        amp[index] = 1.0
        return cls(n_qubits, amp)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=complex)
        n = amp.shape[0].bit_length() - 1
        if normalize:
            amp = amp / np.linalg.norm(amp)
        s = cls(n, amp)
        if abs(s.norm() - 1.0) > 1e-10:
            raise ValueError("state is not normalized")
        return s

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _parity(mask: int, idx: np.ndarray) -> np.ndarray:
    return np.bitwise_count(idx & mask) & 1


def pauli_diagonal(p: PauliOp, idx: np.ndarray | None = None) -> np.ndarray:
    """``d[b]`` with ``P|b> = d[b] |b ^ x>``."""
    if idx is None:
        idx = _indices(p.n_qubits)
    signs = 1 - 2 * _parity(p.z, idx).astype(float)
    return _I_POW[(p.phase + p.y_count) % 4] * signs


def _apply_raw(p: PauliOp, amp: np.ndarray) -> np.ndarray:
    idx = _indices(p.n_qubits)
    d = pauli_diagonal(p, idx) * amp
    return d[idx ^ p.x]


def apply_pauli(p: PauliOp, s: StateVector) -> StateVector:
    if p.n_qubits != s.n_qubits:
        raise DimensionError(f"operator on {p.n_qubits} qubits, state on {s.n_qubits}")
    return StateVector(s.n_qubits, _apply_raw(p, s.amplitudes))


def _walsh_hadamard(a: np.ndarray, n: int) -> np.ndarray:
    """``out[b] = sum_z a[z] (-1)^popcount(z & b)``."""
    a = a.copy()
    for q in range(n):
        a = a.reshape(-1, 2, 1 << q)
        u = a[:, 0, :].copy()
        v = a[:, 1, :]
        a[:, 0, :] = u + v
        a[:, 1, :] = u - v
    return a.reshape(-1)


class PauliSumOperator:
    """Matrix-free ``sum_t c_t P_t`` grouped by x-mask.

    For each x-mask the diagonal ``D_x[b] = sum_t c_t i^(y_t) (-1)^(z_t.b)`` is
    computed once by a Walsh-Hadamard transform; ``H psi`` is then a gather
    per mask.
    """

    def __init__(self, n_qubits: int, terms: Iterable[WeightedTerm], cache: bool = True):
        self.n_qubits = n_qubits
        groups: dict[int, list[tuple[int, complex]]] = {}
        for t in terms:
            op = t.op
            if op.n_qubits != n_qubits:
                raise DimensionError("term qubit count differs from operator")
            groups.setdefault(op.x, []).append(
                (op.z, t.coeff * _I_POW[(op.phase + op.y_count) % 4])
            )
        self._groups = groups
        self._cache = cache
        self._diag: dict[int, np.ndarray] = {}
        self._idx = _indices(n_qubits)

    @classmethod
    def of(cls, h, cache: bool = True) -> "PauliSumOperator":
        n, terms = _terms_of(h)
        return cls(n, terms, cache)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def is_real(self) -> bool:
        return all(abs(c.imag) == 0 for g in self._groups.values() for _, c in g)

    def diagonal_for(self, x: int) -> np.ndarray:
        d = self._diag.get(x)
        if d is not None:
            return d
        a = np.zeros(self.dim, dtype=complex)
        for z, c in self._groups[x]:
            a[z] += c
        d = _walsh_hadamard(a, self.n_qubits)
        if np.all(d.imag == 0):
            d = d.real.copy()
        if self._cache:
            self._diag[x] = d
        return d

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=complex)
        for x in self._groups:
            w = self.diagonal_for(x) * v
            if x:
                out += w[self._idx ^ x]
            else:
                out += w
        return out

    def dense(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for x in self._groups:
            m[self._idx ^ x, self._idx] += self.diagonal_for(x)
        return m


def _terms_of(h) -> tuple[int, Sequence[WeightedTerm]]:
    if isinstance(h, Hamiltonian):
        return h.n_qubits, h.terms
    if isinstance(h, PauliOp):
        return h.n_qubits, (WeightedTerm(h.letters, float(h.sign)),)
    terms = tuple(h.terms) if hasattr(h, "terms") else tuple(h)
    if not terms:
        raise DimensionError("empty operator has no qubit count")
    return terms[0].op.n_qubits, terms


def apply_hamiltonian(h, s: StateVector) -> StateVector:
    op = h if isinstance(h, PauliSumOperator) else PauliSumOperator.of(h, cache=False)
    if op.n_qubits != s.n_qubits:
        raise DimensionError(f"operator on {op.n_qubits} qubits, state on {s.n_qubits}")
    return StateVector(s.n_qubits, op.matvec(s.amplitudes))


def expectation(h, s: StateVector) -> float:
    """``<s|H|s>``; the imaginary residue must be below 1e-10."""
    hs = apply_hamiltonian(h, s)
    val = np.vdot(s.amplitudes, hs.amplitudes)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)


def variance(h, s: StateVector) -> float:
    """``<H^2> - <H>^2`` from two applications, clipped at zero."""
    hs = apply_hamiltonian(h, s)
    mean = np.vdot(s.amplitudes, hs.amplitudes).real
    second = np.vdot(hs.amplitudes, hs.amplitudes).real
    var = float(second - mean * mean)
    if var < 0:
        if var < -1e-12 * max(1.0, second):
            raise ValueError(f"negative variance {var:.3g}")
        var = 0.0
    return var


def dense_matrix(h, cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit ``2^n x 2^n`` matrix (oracle use only)."""
    op = h if isinstance(h, PauliSumOperator) else PauliSumOperator.of(h, cache=False)
    if op.n_qubits > cap:
        raise DimensionError(f"dense matrix capped at {cap} qubits, got {op.n_qubits}")
    return op.dense()


# --------------------------------------------------------------------------
# gates


def apply_gate(gate: tuple, amp: np.ndarray, n: int) -> np.ndarray:
    """One H / S / CNOT / SWAP gate on a raw amplitude vector (new array)."""
    name = gate[0]
    idx = _indices(n)
    if name == "H":
        q = gate[1]
        a = amp.reshape(-1, 2, 1 << q)
        u, v = a[:, 0, :], a[:, 1, :]
        out = np.empty_like(a)
        out[:, 0, :] = (u + v) / np.sqrt(2)
        out[:, 1, :] = (u - v) / np.sqrt(2)
        return out.reshape(-1)
    if name == "S":
        q = gate[1]
        return np.where((idx >> q) & 1, 1j * amp, amp)
    if name == "CNOT":
        c, t = gate[1], gate[2]
        src = np.where((idx >> c) & 1, idx ^ (1 << t), idx)
        return amp[src]
    if name == "SWAP":
        a, b = gate[1], gate[2]
        ba, bb = (idx >> a) & 1, (idx >> b) & 1
        src = idx ^ ((ba ^ bb) * ((1 << a) | (1 << b)))
        return amp[src]
    raise ValueError(f"unknown gate {name!r}")


def apply_gates(gates: Sequence[tuple], amp: np.ndarray, n: int) -> np.ndarray:
    for g in gates:
        amp = apply_gate(g, amp, n)
    return amp


def apply_pauli_rotation(p: PauliOp, theta: float, amp: np.ndarray) -> np.ndarray:
    """``exp(-i theta/2 P) amp`` for Hermitian ``P`` (sign included)."""
    return np.cos(theta / 2) * amp - 1j * np.sin(theta / 2) * _apply_raw(p, amp)
