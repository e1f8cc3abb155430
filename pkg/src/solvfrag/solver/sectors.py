"""Closed-form spectra of factorized fragments.

In a symmetry sector ``v`` each component is the free-fermion Hamiltonian
``(i/2) sum_ij h_ij g_i g_j`` on its root-graph modes. With the
singular values ``eps_k`` of ``h`` its eigenvalues are ``sum_k s_k eps_k``.
For an even number of modes the component parity is fixed in the sector and
only patterns with ``prod_k s_k = sign(Pf h) * parity`` occur.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import svdvals

from ..factor import FactorizedFragment, SoComponent, evaluate_poly
from ..pauli import express_in_generators

ZERO_MODE_TOL = 1e-12
SECTOR_CAP = 20


def pfaffian(a: np.ndarray) -> float:
    """Pfaffian of a real skew-symmetric matrix (Parlett-Reid elimination
    with partial pivoting)."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if n % 2:
        return 0.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k, k + 1:])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k, k + 1] == 0.0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            row = a[k + 1, k + 2:].copy()
            a[k + 2:, k + 2:] += np.outer(row, tau) - np.outer(tau, row)
    return pf


def skew_singular_values(h: np.ndarray) -> np.ndarray:
    """Nonnegative ``eps_k``, one per mode pair, ascending.

    The singular values of a skew-symmetric ``h`` come in equal pairs (plus
    one zero for odd size); pairs are averaged. Values below 1e-12 become
    exact zeros. Real SVD keeps full absolute accuracy near zero modes,
    unlike square roots of the eigenvalues of ``h^T h``."""
    m = h.shape[0]
    if m < 2:
        return np.zeros(0)
    w = np.sort(svdvals(h))
    if m % 2:
        w = w[1:]
    eps = (w[0::2] + w[1::2]) / 2
    eps[eps < ZERO_MODE_TOL] = 0.0
    return eps


def sign_vectors(k: int) -> Iterable[tuple[int, ...]]:
    """All sectors in lexicographic order, +1 first."""
    return itertools.product((1, -1), repeat=k)


def _signed_value(exps: Sequence[int], phase: int, v: Sequence[int]) -> int:
    val = 1 if phase == 0 else -1
    for e, s in zip(exps, v):
        if e:
            val *= s
    return val


@dataclass(frozen=True)
class SectorSolution:
    sector: tuple[int, ...]
    evaluated_constant: float
    component_matrices: tuple[np.ndarray, ...]
    singular_values: tuple[np.ndarray, ...]
    parities: tuple[int | None, ...]  # parity eigenvalue, None for odd mode count
    pfaffian_signs: tuple[int | None, ...]

    def component_levels(self, lam: int) -> np.ndarray:
        """Admitted energies of component ``lam`` in this sector (one per
        irrep basis state)."""
        eps = self.singular_values[lam]
        r = len(eps)
        if r == 0:
            return np.zeros(1)
        patterns = np.array(list(sign_vectors(r)), dtype=float)
        if self.parities[lam] is not None:
            if np.all(eps > 0):
                need = self.pfaffian_signs[lam] * self.parities[lam]
            else:
                need = 1  # a zero mode makes both halves equal
            patterns = patterns[np.prod(patterns, axis=1) == need]
        return patterns @ eps

    def levels(self) -> np.ndarray:
        """Distinct-basis-state energies of the sector, without the outer
        multiplicity."""
        total = np.array([self.evaluated_constant])
        for lam in range(len(self.component_matrices)):
            total = (total[:, None] + self.component_levels(lam)[None, :]).reshape(-1)
        return total


def component_matrix(comp: SoComponent, v: Sequence[int]) -> np.ndarray:
    m = comp.mode_count
    h = np.zeros((m, m))
    for gen in comp.generators:
        i, j = gen.root_edge
        val = gen.orientation * evaluate_poly(gen.coeff_poly, v)
        h[i, j] += val
        h[j, i] -= val
    return h


def parity_table(ff: FactorizedFragment) -> list[tuple[list[int], int] | None]:
    """Per component: ``(exps, phase)`` expressing the parity operator over
    the symmetry generators, None for odd mode count."""
    out = []
    for comp in ff.components:
        if comp.parity is None:
            out.append(None)
        else:
            out.append(express_in_generators(comp.parity, ff.symmetry_generators))
    return out


def solve_sector(ff: FactorizedFragment, v: Sequence[int], parities=None) -> SectorSolution:
    v = tuple(int(s) for s in v)
    if len(v) != ff.K:
        raise ValueError(f"sector has {len(v)} signs, fragment has K={ff.K}")
    if parities is None:
        parities = parity_table(ff)
    mats, svals, pars, pfs = [], [], [], []
    for comp, par in zip(ff.components, parities):
        h = component_matrix(comp, v)
        mats.append(h)
        svals.append(skew_singular_values(h))
        if par is None:
            pars.append(None)
            pfs.append(None)
        else:
            pars.append(_signed_value(par[0], par[1], v))
            pf = pfaffian(h)
            pfs.append(1 if pf >= 0 else -1)
    p0 = evaluate_poly(ff.constant_poly, v)
    return SectorSolution(v, p0, tuple(mats), tuple(svals), tuple(pars), tuple(pfs))


def sector_solutions(
    ff: FactorizedFragment, sectors: Iterable[Sequence[int]] | None = None, cap: int = SECTOR_CAP
) -> list[SectorSolution]:
    if sectors is None:
        if ff.K > cap:
            raise ValueError(f"K={ff.K} exceeds the enumeration cap {cap}; pass sectors explicitly")
        sectors = sign_vectors(ff.K)
    parities = parity_table(ff)
    return [solve_sector(ff, v, parities) for v in sectors]


def sector_multiplicity(ff: FactorizedFragment) -> int:
    """Degeneracy of every sector level from the symmetry-free qubits."""
    log2 = ff.n_qubits - ff.K - sum(c.irrep_dim_log2 for c in ff.components)
    if log2 < 0:  # pragma: no cover - impossible for a valid factorization
        raise ValueError("negative multiplicity exponent")
    return 1 << log2


def fragment_spectrum(ff: FactorizedFragment, cap_qubits: int = 16) -> np.ndarray:
    """Full sorted eigenvalue multiset of the fragment (``2^n`` values)."""
    if ff.n_qubits > cap_qubits:
        raise ValueError("spectrum enumeration capped")
    mult = sector_multiplicity(ff)
    levels = [sol.levels() for sol in sector_solutions(ff)]
    return np.sort(np.repeat(np.concatenate(levels), mult))
