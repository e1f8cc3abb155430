"""Exact solving, measurement plans and shot simulation."""
from .budget import MeasurementBudget, variance_metric
from .ground import GroundState, NonConvergenceError, ground_state
from .sectors import (
    SectorSolution,
    fragment_spectrum,
    pfaffian,
    sector_multiplicity,
    sector_solutions,
    skew_singular_values,
    solve_sector,
)
from .statevector import (
    DimensionError,
    PauliSumOperator,
    StateVector,
    apply_gate,
    apply_gates,
    apply_hamiltonian,
    apply_pauli,
    apply_pauli_rotation,
    dense_matrix,
    expectation,
    variance,
)
from .estimate import PartitionEstimate, estimate_energy, fragment_distributions
from .plan import (
    MeasurementPlan,
    OutcomeDistribution,
    SectorRotation,
    ShotResult,
    build_measurement_plan,
    canonical_form,
    givens_sequence,
    outcome_distribution,
    simulate_measurements,
)
