"""Whole-Hamiltonian energy estimation from independently measured fragments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..factor import factorize
from .budget import MeasurementBudget
from .plan import OutcomeDistribution, build_measurement_plan, outcome_distribution, sample_outcomes
from .statevector import StateVector


@dataclass(frozen=True)
class PartitionEstimate:
    estimate: float
    stderr: float
    exact: float
    shots: tuple[int, ...]
    budget: MeasurementBudget

    @property
    def total_shots(self) -> int:
        return sum(self.shots)

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == self.exact else float("inf")
        return (self.estimate - self.exact) / self.stderr


def fragment_distributions(partition, s: StateVector) -> list[OutcomeDistribution]:
    """Exact outcome distribution of every fragment's measurement plan."""
    out = []
    for frag in partition.fragments:
        ff = factorize(frag)
        out.append(outcome_distribution(build_measurement_plan(ff), s))
    return out


def estimate_energy(
    partition,
    s: StateVector,
    shots: int,
    seed: int,
    distributions: list[OutcomeDistribution] | None = None,
) -> PartitionEstimate:
    """Split ``shots`` by the optimal fractions (at least one shot per
    fragment), sample every fragment and sum the means. The identity
    constant is added exactly."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    dists = distributions if distributions is not None else fragment_distributions(partition, s)
    budget = MeasurementBudget.from_variances(d.variance for d in dists)
    alloc = budget.allocate(shots)
    rng = np.random.default_rng(seed)
    est, var = partition.constant, 0.0
    exact = partition.constant
    for d, m in zip(dists, alloc):
        r = sample_outcomes(d, m, rng)
        est += r.estimate
        var += r.stderr**2
        exact += d.mean
    return PartitionEstimate(float(est), float(np.sqrt(var)), float(exact), tuple(alloc), budget)
