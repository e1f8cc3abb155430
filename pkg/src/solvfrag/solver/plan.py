"""Measurement plans for factorized fragments and their shot simulation.

The plan measures a fragment in three stages: the Clifford ``U_c`` maps the
symmetry generators to ``+-z_k`` on the first K qubits, a sector-dependent
product of Pauli rotations brings every component to its canonical pairing
``sum_k t_k i g_2k g_2k+1``, and a final Clifford ``V_c`` diagonalizes the
pair operators. The outcome is ``E = p_0(v) + sum t_k w_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from ..factor import FactorizedFragment, SoComponent
from ..pauli import (
    CliffordTableau,
    PauliOp,
    conjugate,
    express_in_generators,
    independent_generators,
    synthesize_clifford,
)
from .sectors import ZERO_MODE_TOL, component_matrix, solve_sector
from .statevector import StateVector, apply_gates, apply_pauli_rotation
from ..factor import evaluate_poly

ANGLE_TOL = 1e-15


@dataclass(frozen=True)
class Givens:
    """Rotation ``exp(-i theta/2 P)`` with ``P = rho(i g_i g_j)``."""

    component: int
    modes: tuple[int, int]
    theta: float
    pauli: PauliOp


@dataclass(frozen=True)
class SectorRotation:
    sector: tuple[int, ...]
    constant: float  # p_0(v)
    rotations: tuple[Givens, ...]  # in application order
    pair_energies: tuple[tuple[float, ...], ...]  # signed t_k per component
    orthogonal: tuple[np.ndarray, ...]  # O per component, h = O^T T O


def canonical_form(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``O`` with ``det O = +1`` and ``O h O^T`` block diagonal with blocks
    ``[[0, t_k], [-t_k, 0]]`` on modes ``(2k, 2k+1)``; zero modes last.

    Returns ``(O, t)``; at most one ``t_k`` is negative (absorbing the
    determinant when there is no zero mode)."""
    m = h.shape[0]
    if m == 0:
        return np.eye(0), np.zeros(0)
    t_mat, z = schur(h, output="real")
    o = z.T
    blocks, zeros = [], []
    k = 0
    while k < m:
        if k + 1 < m and abs(t_mat[k + 1, k]) > 0:
            blocks.append((k, k + 1))
            k += 2
        else:
            zeros.append(k)
            k += 1
    rows, t = [], []
    for a, b in blocks:
        val = t_mat[a, b]
        if abs(val) <= ZERO_MODE_TOL:
            zeros.extend((a, b))
            continue
        if val < 0:
            a, b, val = b, a, -val
        rows.extend((a, b))
        t.append(val)
    r = m // 2
    # zero-mode rows: pad pairs with value 0
    rows.extend(zeros)
    o = o[rows]
    t.extend([0.0] * (r - len(t)))
    t = np.array(t)
    if np.linalg.det(o) < 0:
        if m % 2:
            o[m - 1] *= -1
        elif t[-1] == 0.0:
            o[m - 1] *= -1
        else:
            o[m - 1] *= -1
            t[-1] = -t[-1]
    return o, t


def givens_sequence(o: np.ndarray) -> list[tuple[int, int, float]]:
    """Rotations ``(i, j, theta)`` in state-application order for the
    Gaussian unitary ``W`` with ``W g'_a W^dag = g_a`` where ``g' = O g``."""
    r = np.array(o.T, dtype=float)  # W g W^dag = O^T g
    m = r.shape[0]
    seq = []
    for c in range(m - 1):
        for row in range(m - 1, c, -1):
            if abs(r[row, c]) < ANGLE_TOL and not (row == c + 1 and r[c, c] < 0):
                continue  # a -1 pivot still needs a half turn
            phi = np.arctan2(-r[row, c], r[c, c])
            cs, sn = np.cos(phi), np.sin(phi)
            top, bot = r[c].copy(), r[row].copy()
            r[c] = cs * top - sn * bot
            r[row] = sn * top + cs * bot
            seq.append((c, row, -phi))
    return seq


@dataclass
class MeasurementPlan:
    fragment: FactorizedFragment
    clifford_pre: CliffordTableau
    symmetry_signs: tuple[int, ...]  # U_c C_k U_c^dag = sign_k z_k
    pair_paulis: tuple[tuple[PauliOp, ...], ...]  # Q_lk = rho(i g_2k g_2k+1)
    clifford_post: CliffordTableau  # V_c, acting after U_c and the rotations
    post_signs: tuple[int, ...]  # V_c G'_j V_c^dag = sign_j z_j
    pair_readout: tuple[tuple[tuple[int, int], ...], ...]  # (bitmask, sign) per Q
    _pair_cache: dict = field(default_factory=dict, repr=False)

    @property
    def K(self) -> int:
        return self.fragment.K

    def majorana_pair(self, lam: int, i: int, j: int) -> PauliOp:
        key = (lam, i, j)
        if key not in self._pair_cache:
            self._pair_cache[key] = self.fragment.components[lam].majorana_pair(i, j)
        return self._pair_cache[key]

    def sector(self, v: Sequence[int]) -> SectorRotation:
        ff = self.fragment
        sol = solve_sector(ff, v)
        rots, energies, orths = [], [], []
        for lam, comp in enumerate(ff.components):
            o, t = canonical_form(sol.component_matrices[lam])
            for i, j, theta in givens_sequence(o):
                rots.append(Givens(lam, (i, j), theta, self.majorana_pair(lam, i, j)))
            energies.append(tuple(float(x) for x in t))
            orths.append(o)
        return SectorRotation(sol.sector, sol.evaluated_constant, tuple(rots), tuple(energies), tuple(orths))

    def energy(self, rot: SectorRotation, w: Sequence[Sequence[int]]) -> float:
        """``E_H(v, w) = p_0(v) + sum t_k w_k``."""
        return rot.constant + sum(
            t * s for ts, ws in zip(rot.pair_energies, w) for t, s in zip(ts, ws)
        )

    def conjugated_terms_ok(self) -> bool:
        """Every fragment term acts only as z or identity on the first K
        qubits after ``U_c``."""
        low = (1 << self.K) - 1
        return all(conjugate(self.clifford_pre, t.op).x & low == 0 for t in self.fragment.source)


def build_measurement_plan(ff: FactorizedFragment) -> MeasurementPlan:
    n = ff.n_qubits
    gens = list(ff.symmetry_generators)
    u_c = synthesize_clifford(gens, n) if gens else CliffordTableau.identity(n)
    signs = []
    for k, g in enumerate(gens):
        img = conjugate(u_c, g)
        signs.append(img.sign)

    pairs = []
    for lam, comp in enumerate(ff.components):
        m = comp.mode_count
        pairs.append(tuple(comp.majorana_pair(2 * k, 2 * k + 1) for k in range(m // 2)))
    # pair operators in the U_c frame, together with z_0..z_{K-1}
    frame = [PauliOp(n, 0, 1 << k) for k in range(len(gens))]
    frame_pairs = [[conjugate(u_c, q) for q in qs] for qs in pairs]
    basis = independent_generators(frame + [q for qs in frame_pairs for q in qs])
    v_c = synthesize_clifford(basis, n) if basis else CliffordTableau.identity(n)
    post_signs = tuple(conjugate(v_c, b).sign for b in basis)
    readout = []
    for qs in frame_pairs:
        row = []
        for q in qs:
            exps, phase = express_in_generators(q, basis)
            if phase % 2:
                raise ValueError(f"pair operator {q} has an imaginary readout phase")
            sign = 1 if phase == 0 else -1
            mask = 0
            for j, e in enumerate(exps):
                if e:
                    mask |= 1 << j
                    sign *= post_signs[j]
            row.append((mask, sign))
        readout.append(tuple(row))
    plan = MeasurementPlan(ff, u_c, tuple(signs), tuple(pairs), v_c, post_signs, tuple(readout))
    return plan


# --------------------------------------------------------------------------
# simulation


@dataclass(frozen=True)
class OutcomeDistribution:
    values: np.ndarray
    probabilities: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.values @ self.probabilities)

    @property
    def variance(self) -> float:
        mu = self.mean
        return float(((self.values - mu) ** 2) @ self.probabilities)


def outcome_distribution(
    plan: MeasurementPlan, s: StateVector, prob_floor: float = 1e-16
) -> OutcomeDistribution:
    """Exact Born distribution of the plan's outcome ``E_H(v, w)`` in state ``s``."""
    ff = plan.fragment
    n, K = ff.n_qubits, ff.K
    if s.n_qubits != n:
        raise ValueError("state and fragment qubit counts differ")
    amp = apply_gates(plan.clifford_pre.gates, s.amplitudes, n)
    idx = np.arange(1 << n, dtype=np.int64)
    low = idx & ((1 << K) - 1)
    sector_prob = np.bincount(low, weights=np.abs(amp) ** 2, minlength=1 << K)
    values, probs = [], []
    for pattern in range(1 << K):
        p_sec = sector_prob[pattern]
        if p_sec <= prob_floor:
            continue
        v = tuple(
            plan.symmetry_signs[k] * (-1 if (pattern >> k) & 1 else 1) for k in range(K)
        )
        if not ff.components:
            values.append(np.array([evaluate_poly(ff.constant_poly, v)]))
            probs.append(np.array([p_sec]))
            continue
        proj = np.where(low == pattern, amp, 0)
        rot = plan.sector(v)
        for g in rot.rotations:
            proj = apply_pauli_rotation(conjugate(plan.clifford_pre, g.pauli), g.theta, proj)
        proj = apply_gates(plan.clifford_post.gates, proj, n)
        p = np.abs(proj) ** 2
        keep = p > prob_floor
        b = idx[keep]
        e = np.full(b.shape, rot.constant)
        for ts, rows in zip(rot.pair_energies, plan.pair_readout):
            for t, (mask, sign) in zip(ts, rows):
                w = sign * (1 - 2 * (np.bitwise_count(b & mask).astype(np.int64) & 1))
                e = e + t * w
        values.append(e)
        probs.append(p[keep])
    vals = np.concatenate(values)
    pr = np.concatenate(probs)
    # merge outcomes that agree to rounding
    key = np.round(vals, 12)
    uniq, inv = np.unique(key, return_inverse=True)
    merged_p = np.bincount(inv, weights=pr)
    merged_v = np.bincount(inv, weights=vals * pr) / merged_p
    merged_p = merged_p / merged_p.sum()
    return OutcomeDistribution(merged_v, merged_p)


@dataclass(frozen=True)
class ShotResult:
    estimate: float
    stderr: float
    shots: int
    sample_variance: float

    def __iter__(self):
        return iter((self.estimate, self.stderr))


def sample_outcomes(dist: OutcomeDistribution, shots: int, rng: np.random.Generator) -> ShotResult:
    if shots <= 0:
        raise ValueError("shots must be positive")
    counts = rng.multinomial(shots, dist.probabilities)
    used = counts > 0
    vals, cnt = dist.values[used], counts[used]
    mean = float(vals @ cnt / shots)
    if len(vals) == 1:
        return ShotResult(float(vals[0]), 0.0, shots, 0.0)
    var = float(((vals - mean) ** 2) @ cnt / (shots - 1)) if shots > 1 else 0.0
    return ShotResult(mean, float(np.sqrt(var / shots)), shots, var)


def simulate_measurements(
    plan: MeasurementPlan, ff: FactorizedFragment | None, s: StateVector, shots: int, seed: int
) -> ShotResult:
    """Sample ``shots`` plan outcomes in state ``s``; deterministic per seed."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    if ff is not None and ff is not plan.fragment:
        raise ValueError("plan was built for a different fragment")
    dist = outcome_distribution(plan, s)
    return sample_outcomes(dist, shots, np.random.default_rng(seed))
