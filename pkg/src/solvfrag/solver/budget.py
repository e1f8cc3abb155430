"""Shot budget for independent fragment measurement."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import StateVector, variance


@dataclass(frozen=True)
class MeasurementBudget:
    """``metric = (sum_a sqrt(Var_a))^2``, i.e. ``eps^2 M(eps)`` for the
    optimal allocation ``m_a / M = sqrt(Var_a) / sum_b sqrt(Var_b)``."""

    variances: tuple[float, ...]
    fractions: tuple[float, ...]
    metric: float

    @classmethod
    def from_variances(cls, variances) -> "MeasurementBudget":
        var = tuple(float(v) for v in variances)
        roots = np.sqrt(np.asarray(var, dtype=float))
        total = float(roots.sum())
        if total > 0:
            fractions = tuple(float(r / total) for r in roots)
        else:
            fractions = tuple(1.0 / len(var) for _ in var) if var else ()
        return cls(var, fractions, total * total)

    def allocate(self, shots: int) -> list[int]:
        """Integer shot counts: rounded optimal fractions, at least one shot
        per fragment."""
        return [max(1, int(round(f * shots))) for f in self.fractions]


def variance_metric(p, s: StateVector) -> MeasurementBudget:
    """Budget for a partition (or any sequence of fragments) in state ``s``."""
    fragments = p.fragments if hasattr(p, "fragments") else p
    return MeasurementBudget.from_variances(variance(f, s) for f in fragments)
