"""Dissipative preparation of four-mode continuous-variable cluster states.

Gaussian covariance-matrix simulation of four atomic-ensemble modes coupled
to a damped ring-cavity mode, the pulse protocols that squeeze the combined
modes one stage at a time, nullifier-variance verification of the resulting
linear, square and T-shape cluster states, and an independent truncated
number-basis oracle for the reduced two-mode dynamics.
"""

from .errors import (
    CutoffTooSmallError,
    InvalidParameterError,
    InvalidTransformError,
    NonHurwitzError,
    SimulationError,
    UnphysicalStateError,
)
from .fock import FockConfig, FockResult, covariance_from_density, integrate_two_mode
from .gaussian import (
    DriftDiffusion,
    GaussianState,
    QuadraticHamiltonian,
    apply_mode_transform,
    drift_diffusion,
    evolve,
    purity,
    steady_state,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_from_unitary,
)
from .model import (
    ConvergenceInfo,
    PhysicalParams,
    PulseStage,
    RegimeReport,
    build_effective_hamiltonian,
    cavity_damping,
    cavity_decay_from_finesse,
    convergence_eigenvalues,
    effective_couplings,
    effective_spontaneous_rate,
    reduced_hamiltonian,
    two_mode_drift_diffusion,
    validate_dispersive_regime,
)
from .protocols import (
    MODE_LABELS,
    PROTOCOL_KINDS,
    STAGE_PHASE_FACTORS,
    CouplingReport,
    ModeTransform,
    Protocol,
    ProtocolRun,
    StageTrace,
    builtin_protocol,
    builtin_transform,
    run_protocol,
    stage_from_mode_vector,
    stage_relaxation,
    transformed_coupling,
)
from .tables import (
    KNOWN_DISCREPANCIES,
    TableCheckReport,
    check_tables,
    compare_stages,
    generated_stage,
    reference_stage,
)
from .verify import (
    ClusterGraph,
    VarianceReport,
    analytic_targets,
    builtin_graph,
    is_cluster,
    nullifier_coefficients,
    nullifier_labels,
    nullifier_variances,
    vacuum_targets,
)

__version__ = "0.1.0"

__all__ = [
    "CutoffTooSmallError",
    "InvalidParameterError",
    "InvalidTransformError",
    "NonHurwitzError",
    "SimulationError",
    "UnphysicalStateError",
    "FockConfig",
    "FockResult",
    "covariance_from_density",
    "integrate_two_mode",
    "DriftDiffusion",
    "GaussianState",
    "QuadraticHamiltonian",
    "apply_mode_transform",
    "drift_diffusion",
    "evolve",
    "purity",
    "steady_state",
    "symplectic_eigenvalues",
    "symplectic_form",
    "symplectic_from_unitary",
    "ConvergenceInfo",
    "PhysicalParams",
    "PulseStage",
    "RegimeReport",
    "build_effective_hamiltonian",
    "cavity_damping",
    "cavity_decay_from_finesse",
    "convergence_eigenvalues",
    "effective_couplings",
    "effective_spontaneous_rate",
    "reduced_hamiltonian",
    "two_mode_drift_diffusion",
    "validate_dispersive_regime",
    "MODE_LABELS",
    "PROTOCOL_KINDS",
    "STAGE_PHASE_FACTORS",
    "CouplingReport",
    "ModeTransform",
    "Protocol",
    "ProtocolRun",
    "StageTrace",
    "builtin_protocol",
    "builtin_transform",
    "run_protocol",
    "stage_from_mode_vector",
    "stage_relaxation",
    "transformed_coupling",
    "KNOWN_DISCREPANCIES",
    "TableCheckReport",
    "check_tables",
    "compare_stages",
    "generated_stage",
    "reference_stage",
    "ClusterGraph",
    "VarianceReport",
    "analytic_targets",
    "builtin_graph",
    "is_cluster",
    "nullifier_coefficients",
    "nullifier_labels",
    "nullifier_variances",
    "vacuum_targets",
]
