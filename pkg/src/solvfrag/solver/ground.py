"""Exact ground states of qubit Hamiltonians."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .statevector import MEMORY_CAP_QUBITS, DimensionError, PauliSumOperator, StateVector

DENSE_FALLBACK = 10
MAX_ITERATIONS = 10_000
RESIDUAL_TOL = 1e-8
DEGENERACY_TOL = 1e-8
SEED = 1234


class NonConvergenceError(RuntimeError):
    pass


@dataclass
class GroundState:
    energy: float
    state: StateVector
    residual: float
    degenerate: bool
    gap: float

    def __iter__(self):
        # allows ``energy, state = ground_state(h)``
        return iter((self.energy, self.state))


def ground_state(
    h,
    max_qubits: int = MEMORY_CAP_QUBITS,
    tol: float = RESIDUAL_TOL,
    max_iterations: int = MAX_ITERATIONS,
    seed: int = SEED,
) -> GroundState:
    """Lowest eigenpair. Dense ``eigh`` up to 10 qubits, Lanczos (ARPACK,
    implicitly restarted) beyond. Raises :class:`NonConvergenceError` when the
    residual ``|Hs - Es|`` stays above ``tol``."""
    op = h if isinstance(h, PauliSumOperator) else PauliSumOperator.of(h)
    n = op.n_qubits
    if n > max_qubits:
        raise DimensionError(f"{n} qubits exceeds the statevector cap of {max_qubits}")
    if n <= DENSE_FALLBACK:
        m = op.dense()
        if op.is_real:
            m = m.real
        w, v = np.linalg.eigh(m)
        vals, vec = w[:2], v[:, 0].astype(complex)
    else:
        real = op.is_real
        dtype = float if real else complex

        def mv(x):
            y = op.matvec(np.asarray(x).reshape(-1))
            return y.real if real else y

        lin = LinearOperator((op.dim, op.dim), matvec=mv, dtype=dtype)
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(op.dim)
        if not real:
            v0 = v0 + 1j * rng.standard_normal(op.dim)
        try:
            w, v = eigsh(lin, k=2, which="SA", v0=v0, maxiter=max_iterations, tol=tol * 1e-3)
        except ArpackNoConvergence as exc:
            raise NonConvergenceError(f"Lanczos did not converge: {exc}") from None
        order = np.argsort(w)
        vals, vec = w[order], v[:, order[0]].astype(complex)
    vec = vec / np.linalg.norm(vec)
    # fix the global phase on the largest amplitude for reproducibility
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    energy = float(vals[0])
    residual = float(np.linalg.norm(op.matvec(vec) - energy * vec))
    if residual > tol:
        raise NonConvergenceError(f"ground-state residual {residual:.3g} above {tol:.1g}")
    gap = float(vals[1] - vals[0]) if len(vals) > 1 else float("inf")
    return GroundState(energy, StateVector(n, vec), residual, gap < DEGENERACY_TOL, gap)
