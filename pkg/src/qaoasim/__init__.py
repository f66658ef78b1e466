"""qaoasim: simulate and classically optimize alternating-operator ansatz circuits.

Statevector and feasible-subspace simulation, MaxCut / MaxBisection / TSP
encodings, derivative-free angle optimization, and brute-force oracles for
desk-scale verification.
"""

from .ansatz import (
    Angles,
    Ansatz,
    AnsatzSpec,
    ansatz_expectation,
    apply_mixer,
    apply_phase_separator,
    infeasible_leakage,
    prepare_initial,
    run_ansatz,
    transition_condition_check,
)
from .errors import (
    ConfigurationError,
    ObjectiveError,
    ParseError,
    ResourceLimitError,
    UndefinedRatioError,
)
from .optimize import (
    OptimizerConfig,
    RunResult,
    depth_sweep,
    grid_search,
    monotone_expectations,
    nelder_mead,
    vqa_loop,
)
from .oracle import (
    CatalogEntry,
    OracleReport,
    approximation_ratio,
    brute_force,
    instance_catalog,
)
from .problems import (
    Graph,
    MaxBisectionProblem,
    MaxCutProblem,
    ProblemDefinition,
    TspInstance,
    TspProblem,
    cost_diagonal,
    maxbis_feasible,
    maxcut_cost,
    tsp_cost,
    tsp_decode,
    tsp_encode,
    tsp_phase_diagonal,
)
from .states import (
    DiagonalObservable,
    Statevector,
    SubspaceState,
    apply_diagonal_phase,
    apply_grover_mixer,
    apply_rzz,
    apply_single_qubit,
    apply_xy,
    expectation_diagonal,
    new_basis_state,
    sample,
    set_validation,
    subspace_exponential_apply,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
