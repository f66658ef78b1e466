"""Brute-force ground truth, approximation metrics, and the fixed instance catalog.

Every catalog instance is embedded as a data constant together with its
enumerated optimum, so acceptance checks never depend on generator code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzSpec
from .errors import ResourceLimitError, UndefinedRatioError
from .problems import (
    MAXIMIZE,
    Graph,
    MaxBisectionProblem,
    MaxCutProblem,
    ProblemDefinition,
    TspInstance,
    TspProblem,
    graph_from_edges,
    permutation_basis,
)
from .states import index_to_bits

BRUTE_FORCE_LIMIT = 10 ** 7


@dataclass
class OracleReport:
    """Exhaustive enumeration summary of a problem's feasible set."""

    optimum: float
    argopt: list[str]
    feasible_count: int
    uniform_mean: float
    worst: float


def brute_force(problem: ProblemDefinition) -> OracleReport:
    """Enumerate the feasible basis and report optimum, witnesses, mean, worst."""
    count = problem.feasible_count()
    if count > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(
            f"feasible set of {count} states exceeds the {BRUTE_FORCE_LIMIT} budget"
        )
    basis = problem.feasible_basis()
    costs = problem.cost_array(basis)
    if problem.sense == MAXIMIZE:
        optimum, worst = float(costs.max()), float(costs.min())
    else:
        optimum, worst = float(costs.min()), float(costs.max())
    argopt = [
        index_to_bits(int(k), problem.num_qubits) for k in basis[costs == optimum]
    ]
    return OracleReport(
        optimum=optimum,
        argopt=argopt,
        feasible_count=int(count),
        uniform_mean=float(costs.mean()),
        worst=worst,
    )


def approximation_ratio(expectation: float, report: OracleReport, sense: str) -> float:
    """Achieved-over-optimal quality; range-normalized for minimization.

    Returns the raw ratio; reporting layers may clamp the minimization form
    to [0, 1].
    """
    if sense == MAXIMIZE:
        if report.optimum == 0:
            raise UndefinedRatioError("optimum is zero; ratio undefined")
        return expectation / report.optimum
    span = report.worst - report.optimum
    if span == 0:
        raise UndefinedRatioError("flat cost landscape; ratio undefined")
    return (report.worst - expectation) / span


# -- fixed instance catalog ----------------------------------------------------

_FARHI_SPEC = AnsatzSpec(
    initial_state="plus", mixer="transverse_field", phase="cost_diagonal"
)
_MAXBIS_SPEC = AnsatzSpec(
    initial_state="dicke",
    mixer="xy_ring",
    phase="cost_diagonal",
    simulation_mode="subspace",
)
_TSP_SPEC = AnsatzSpec(
    initial_state="fixed_permutation",
    mixer="tsp_simultaneous_swap",
    phase="tsp_g_diagonal",
    simulation_mode="subspace",
)

K3_EDGES = [(0, 1), (1, 2), (0, 2)]
K4_EDGES = [(u, v) for u in range(4) for v in range(u + 1, 4)]
PRISM3_EDGES = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
K33_EDGES = [(u, v + 3) for u in range(3) for v in range(3)]
Q3_EDGES = [
    (0, 1), (0, 2), (0, 4), (1, 3), (1, 5), (2, 3),
    (2, 6), (3, 7), (4, 5), (4, 6), (5, 7), (6, 7),
]
PETERSEN_EDGES = [
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
    (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
]
C4_EDGES = [(0, 1), (1, 2), (2, 3), (3, 0)]

# designated asymmetric instance; optimum 20 on tour 0->3->1->2->0, enumerated
# over all 24 tours and committed
TSP4_MATRIX = [
    [0.0, 3.0, 10.0, 7.0],
    [9.0, 0.0, 5.0, 8.0],
    [6.0, 12.0, 0.0, 4.0],
    [11.0, 2.0, 9.0, 0.0],
]


@dataclass(frozen=True)
class CatalogEntry:
    """A named problem with its committed enumeration optimum and default spec."""

    name: str
    kind: str
    problem: ProblemDefinition
    known_optimum: float
    default_spec: AnsatzSpec


def _maxcut(name, n, edges, optimum):
    return CatalogEntry(
        name, "maxcut", MaxCutProblem(graph_from_edges(n, edges)), optimum, _FARHI_SPEC
    )


def instance_catalog() -> dict[str, CatalogEntry]:
    """The fixed desk-scale instances used across checks and the CLI."""
    unit3 = TspInstance(3, np.ones((3, 3)) - np.eye(3))
    asym4 = TspInstance(4, np.array(TSP4_MATRIX))
    entries = [
        _maxcut("k3", 3, K3_EDGES, 2.0),
        _maxcut("k4", 4, K4_EDGES, 4.0),
        _maxcut("prism3", 6, PRISM3_EDGES, 7.0),
        _maxcut("k33", 6, K33_EDGES, 9.0),
        _maxcut("q3", 8, Q3_EDGES, 12.0),
        _maxcut("petersen", 10, PETERSEN_EDGES, 12.0),
        CatalogEntry(
            "c4_maxbis",
            "maxbis",
            MaxBisectionProblem(graph_from_edges(4, C4_EDGES)),
            4.0,
            _MAXBIS_SPEC,
        ),
        CatalogEntry("tsp3_unit", "tsp", TspProblem(unit3), 3.0, _TSP_SPEC),
        CatalogEntry("tsp4_asym", "tsp", TspProblem(asym4), 20.0, _TSP_SPEC),
    ]
    return {entry.name: entry for entry in entries}


def tsp_phase_direct(instance: TspInstance) -> np.ndarray:
    """Phase-function eigenvalues by direct triple-sum evaluation, per tour.

    Independent cross-check for the closed-form diagonal: each (i, u, v)
    monomial contributes d(u,v) times the product of one-hot signs (+1 when
    the city occupies the position, -1 otherwise).  Ordered to match
    permutation_basis.
    """
    n = instance.num_cities
    _, tours = permutation_basis(n)
    values = np.zeros(len(tours))
    for t, sigma in enumerate(tours):
        total = 0.0
        for i in range(n):
            ip = (i + 1) % n
            for u in range(n):
                zu = 1.0 if sigma[i] == u else -1.0
                for v in range(n):
                    zv = 1.0 if sigma[ip] == v else -1.0
                    total += instance.d[u, v] * zu * zv
        values[t] = total
    return values
