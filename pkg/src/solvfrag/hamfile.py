"""Plain-text Hamiltonian files.

Format::

    # label: H2
    # n_qubits: 4
    # any other "key: value" header lines are kept as metadata
    -0.32760818967480937<TAB>
    0.13716572937099519<TAB>Z0
    0.04919764587136753<TAB>X0 Z1 X2

Blank lines are ignored. Duplicate Pauli strings are an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .pauli import Hamiltonian, PauliError, WeightedTerm, parse_pauli

FIXTURES = ("h2", "lih", "beh2", "h2o", "nh3")


class HamiltonianFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = f"{path or '<text>'}:{line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass
class HamiltonianFile:
    hamiltonian: Hamiltonian
    header: dict[str, str] = field(default_factory=dict)

    @property
    def fci_energy(self) -> float | None:
        value = self.header.get("fci_energy")
        return float(value) if value is not None else None


def parse_text(text: str, path: str | None = None) -> HamiltonianFile:
    header: dict[str, str] = {}
    rows: list[tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, value = body.split(":", 1)
                header[key.strip()] = value.strip()
            continue
        if "\t" in line:
            coeff_text, pauli_text = line.split("\t", 1)
        else:
            coeff_text, _, pauli_text = line.strip().partition(" ")
        rows.append((lineno, coeff_text.strip(), pauli_text.strip()))

    if "n_qubits" in header:
        try:
            n_qubits = int(header["n_qubits"])
        except ValueError:
            raise HamiltonianFileError("n_qubits header is not an integer", path=path) from None
    else:
        n_qubits = 1
        for _, _, p in rows:
            for tok in p.split():
                if tok[1:].isdigit():
                    n_qubits = max(n_qubits, int(tok[1:]) + 1)

    terms = []
    seen = set()
    for lineno, coeff_text, pauli_text in rows:
        try:
            coeff = float(coeff_text)
        except ValueError:
            raise HamiltonianFileError(f"bad coefficient {coeff_text!r}", lineno, path) from None
        if not math.isfinite(coeff):
            raise HamiltonianFileError(f"non-finite coefficient {coeff_text!r}", lineno, path)
        try:
            op = parse_pauli(pauli_text, n_qubits)
        except PauliError as exc:
            raise HamiltonianFileError(str(exc), lineno, path) from None
        if op.key in seen:
            raise HamiltonianFileError(f"duplicate Pauli string {pauli_text!r}", lineno, path)
        seen.add(op.key)
        terms.append(WeightedTerm(op, coeff))
    h = Hamiltonian(n_qubits, tuple(terms), header.get("label", ""))
    return HamiltonianFile(h, header)


def read(path: str | Path) -> HamiltonianFile:
    path = Path(path)
    return parse_text(path.read_text(), str(path))


def load_fixture(name: str) -> HamiltonianFile:
    """Bundled molecular Hamiltonian (``h2``, ``lih``, ``beh2``, ``h2o``, ``nh3``)."""
    name = name.lower()
    if name not in FIXTURES:
        raise KeyError(f"no bundled fixture {name!r}")
    text = resources.files("solvfrag.data").joinpath(f"{name}.ham").read_text()
    return parse_text(text, f"{name}.ham")


def resolve(source: str | Path) -> HamiltonianFile:
    """A path, or the name of a bundled fixture when no such file exists."""
    p = Path(source)
    if not p.exists() and str(source).lower() in FIXTURES:
        return load_fixture(str(source))
    return read(p)


def dumps(h: Hamiltonian, header: dict[str, str] | None = None) -> str:
    meta = dict(header or {})
    meta.setdefault("label", h.label)
    meta["n_qubits"] = str(h.n_qubits)
    lines = [f"# label: {meta.pop('label')}", f"# n_qubits: {meta.pop('n_qubits')}"]
    lines += [f"# {k}: {v}" for k, v in meta.items()]
    lines += [f"{t.coeff:.17g}\t{t.op.label()}" for t in h.terms]
    return "\n".join(lines) + "\n"
