"""Regenerate the molecular Hamiltonian fixtures under src/solvfrag/data/.

Requires the optional ``fixtures`` extra (openfermion, openfermionpyscf, pyscf).
STO-3G basis, Bravyi-Kitaev mapping, all orbitals active.
"""
import math
import sys
from pathlib import Path

import openfermion
import openfermionpyscf
import pyscf
from openfermion import MolecularData, bravyi_kitaev, get_fermion_operator
from openfermionpyscf import run_pyscf

OUT = Path(__file__).resolve().parents[1] / "src" / "solvfrag" / "data"


def _h2o(r=1.0, angle=107.6):
    half = math.radians(angle) / 2
    return [
        ("O", (0.0, 0.0, 0.0)),
        ("H", (r * math.sin(half), 0.0, r * math.cos(half))),
        ("H", (-r * math.sin(half), 0.0, r * math.cos(half))),
    ]


def _nh3(r=1.0, angle=107.0):
    # three H on a circle of radius rho, N above the centre
    d_hh = 2 * r * math.sin(math.radians(angle) / 2)
    rho = d_hh / math.sqrt(3)
    h = math.sqrt(r * r - rho * rho)
    geom = [("N", (0.0, 0.0, h))]
    for k in range(3):
        phi = 2 * math.pi * k / 3
        geom.append(("H", (rho * math.cos(phi), rho * math.sin(phi), 0.0)))
    return geom


MOLECULES = {
    "h2": ("H2", [("H", (0, 0, 0)), ("H", (0, 0, 1.0))], "R(H-H) = 1 A"),
    "lih": ("LiH", [("Li", (0, 0, 0)), ("H", (0, 0, 1.0))], "R(Li-H) = 1 A"),
    "beh2": (
        "BeH2",
        [("H", (0, 0, -1.0)), ("Be", (0, 0, 0)), ("H", (0, 0, 1.0))],
        "R(Be-H) = 1 A, linear",
    ),
    "h2o": ("H2O", _h2o(), "R(O-H) = 1 A, angle HOH = 107.6 deg"),
    "nh3": ("NH3", _nh3(), "R(N-H) = 1 A, angle HNH = 107 deg"),
}


def pauli_text(term):
    return " ".join(f"{p}{q}" for q, p in term)


def generate(key):
    label, geometry, geo_note = MOLECULES[key]
    mol = MolecularData(geometry, "sto-3g", 1, 0)
    mol = run_pyscf(mol, run_scf=True, run_fci=True)
    qop = bravyi_kitaev(get_fermion_operator(mol.get_molecular_hamiltonian()))
    qop.compress(1e-12)
    n_qubits = 2 * mol.n_orbitals
    lines = [
        f"# label: {label}",
        f"# n_qubits: {n_qubits}",
        f"# geometry: {geo_note}",
        "# basis: sto-3g; mapping: bravyi-kitaev; active space: all orbitals",
        f"# generator: openfermion {openfermion.__version__}, "
        f"openfermionpyscf {openfermionpyscf.__version__}, pyscf {pyscf.__version__}",
        f"# fci_energy: {float(mol.fci_energy)!r}",
        f"# hf_energy: {float(mol.hf_energy)!r}",
    ]
    for term, coeff in qop.terms.items():
        assert abs(coeff.imag) < 1e-12
        lines.append(f"{coeff.real:.17g}\t{pauli_text(term)}")
    path = OUT / f"{key}.ham"
    path.write_text("\n".join(lines) + "\n")
    print(f"{label}: {len(qop.terms)} terms, {n_qubits} qubits -> {path}")


if __name__ == "__main__":
    for key in sys.argv[1:] or MOLECULES:
        generate(key)
