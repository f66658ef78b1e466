"""Problem definitions, encodings, cost diagonals, and feasibility predicates.

Three concrete problems: MaxCut (unconstrained), MaxBisection (Hamming-weight
n/2 cuts), and the traveling salesperson problem in a one-hot position/city
encoding on n^2 qubits.  Vertices, cities, and tour positions are 0-indexed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError
from .states import MAX_DENSE_QUBITS, DiagonalObservable, bits_to_index

MAXIMIZE = "maximize"
MINIMIZE = "minimize"


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph; each unordered edge stored once."""

    num_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for (u, v, w) in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u},{v}) has an out-of-range endpoint")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not math.isfinite(w):
                raise ValueError(f"edge ({u},{v}) has non-finite weight")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(key)

    @property
    def total_weight(self) -> float:
        return sum(w for (_, _, w) in self.edges)


def graph_from_edges(num_vertices, pairs) -> Graph:
    """Convenience: build a unit-weight graph from (u, v) pairs."""
    return Graph(num_vertices, tuple((u, v, 1.0) for (u, v) in pairs))


@dataclass(frozen=True, eq=False)
class TspInstance:
    """Complete weighted digraph on num_cities nodes; d may be asymmetric."""

    num_cities: int
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        object.__setattr__(self, "d", d)
        n = self.num_cities
        if d.shape != (n, n):
            raise ValueError(f"distance matrix must be {n}x{n}")
        if not np.all(np.isfinite(d)):
            raise ValueError("distance matrix has non-finite entries")
        if np.any(d < 0):
            raise ValueError("distance matrix has negative entries")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix diagonal must be zero")

    @property
    def total_distance(self) -> float:
        """Sum of d(u,v) over ordered pairs u != v (diagonal is zero)."""
        return float(self.d.sum())


def _as_index(z, num_qubits: int) -> int:
    if isinstance(z, str):
        if len(z) != num_qubits:
            raise ValueError(f"bitstring length {len(z)} != {num_qubits}")
        return bits_to_index(z)
    z = int(z)
    if not 0 <= z < (1 << num_qubits):
        raise ValueError(f"basis index {z} out of range for {num_qubits} qubits")
    return z


# -- MaxCut / MaxBisection --------------------------------------------------


def maxcut_cost(graph: Graph, z) -> float:
    """Total weight of edges cut by the partition encoded in z (bit v = side of v)."""
    k = _as_index(z, graph.num_vertices)
    total = 0.0
    for (u, v, w) in graph.edges:
        if ((k >> u) & 1) != ((k >> v) & 1):
            total += w
    return total


def maxcut_cost_array(graph: Graph, indices: np.ndarray) -> np.ndarray:
    k = np.asarray(indices, dtype=np.int64)
    total = np.zeros(len(k))
    for (u, v, w) in graph.edges:
        total += w * (((k >> u) & 1) != ((k >> v) & 1))
    return total


def maxbis_feasible(z, n: int) -> bool:
    """True iff the length-n bitstring has Hamming weight exactly n/2."""
    if n % 2:
        raise ValueError("maximum bisection needs an even number of vertices")
    k = _as_index(z, n)
    return k.bit_count() == n // 2


def hamming_weight_basis(num_qubits: int, weight: int) -> np.ndarray:
    """All indices of Hamming weight ``weight``, sorted ascending."""
    out = [
        sum(1 << j for j in comb)
        for comb in itertools.combinations(range(num_qubits), weight)
    ]
    return np.array(sorted(out), dtype=np.int64)


# -- TSP one-hot encoding ----------------------------------------------------


def tsp_encode(sigma, n: int) -> int:
    """One-hot encoding of a tour: bit (i*n + city) set when position i holds city."""
    sigma = tuple(int(c) for c in sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError(f"{sigma} is not a permutation of 0..{n - 1}")
    return sum(1 << (i * n + u) for i, u in enumerate(sigma))


def tsp_decode(z, n: int):
    """Inverse of tsp_encode; returns the tour tuple, or None when infeasible."""
    k = _as_index(z, n * n)
    block_mask = (1 << n) - 1
    sigma = []
    seen = 0
    for i in range(n):
        block = (k >> (i * n)) & block_mask
        if block.bit_count() != 1:
            return None
        u = block.bit_length() - 1
        if (seen >> u) & 1:
            return None
        seen |= 1 << u
        sigma.append(u)
    return tuple(sigma)


def tsp_cost(inst: TspInstance, sigma) -> float:
    """Total cycle cost sum_i d(sigma_i, sigma_{i+1}) with wraparound."""
    n = inst.num_cities
    sigma = tuple(int(c) for c in sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError(f"{sigma} is not a permutation of 0..{n - 1}")
    return float(sum(inst.d[sigma[i], sigma[(i + 1) % n]] for i in range(n)))


def tsp_phase_value(inst: TspInstance, sigma) -> float:
    """Phase-function value 4*C(sigma) + (n-4)*sum_{u!=v} d(u,v) for one tour."""
    n = inst.num_cities
    return 4.0 * tsp_cost(inst, sigma) + (n - 4) * inst.total_distance


def permutation_basis(n: int) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """All one-hot tour encodings sorted ascending, with the matching tours."""
    pairs = sorted(
        (tsp_encode(sigma, n), sigma) for sigma in itertools.permutations(range(n))
    )
    indices = np.array([k for (k, _) in pairs], dtype=np.int64)
    return indices, [s for (_, s) in pairs]


def tsp_phase_diagonal(inst: TspInstance) -> DiagonalObservable:
    """Phase-function eigenvalues over the permutation subspace basis.

    Ordered to match permutation_basis / TspProblem.feasible_basis (ascending
    by encoded integer value).
    """
    _, tours = permutation_basis(inst.num_cities)
    return DiagonalObservable([tsp_phase_value(inst, s) for s in tours])


# -- problem contract --------------------------------------------------------


class ProblemDefinition:
    """Abstract contract: qubit count, cost, feasibility, optimization sense."""

    num_qubits: int
    sense: str

    def cost(self, z) -> float:
        raise NotImplementedError

    def cost_array(self, indices: np.ndarray) -> np.ndarray:
        return np.array([self.cost(int(k)) for k in indices])

    def is_feasible(self, z) -> bool:
        raise NotImplementedError

    def feasible_basis(self) -> np.ndarray:
        """Feasible bitstrings as indices, distinct and sorted ascending."""
        raise NotImplementedError

    def feasible_count(self) -> int:
        raise NotImplementedError

    # Hamming weight shared by all feasible strings, or None. XY mixers and
    # Dicke initial states pair only with weight-constrained problems.
    constraint_weight: int | None = None


class MaxCutProblem(ProblemDefinition):
    """Unconstrained cut maximization; every bitstring is feasible."""

    sense = MAXIMIZE

    def __init__(self, graph: Graph):
        self.graph = graph
        self.num_qubits = graph.num_vertices

    def cost(self, z) -> float:
        return maxcut_cost(self.graph, z)

    def cost_array(self, indices):
        return maxcut_cost_array(self.graph, indices)

    def is_feasible(self, z) -> bool:
        _as_index(z, self.num_qubits)
        return True

    def feasible_basis(self) -> np.ndarray:
        return np.arange(1 << self.num_qubits, dtype=np.int64)

    def feasible_count(self) -> int:
        return 1 << self.num_qubits


class MaxBisectionProblem(ProblemDefinition):
    """Cut maximization restricted to equal-size partitions (weight n/2 strings)."""

    sense = MAXIMIZE

    def __init__(self, graph: Graph):
        if graph.num_vertices % 2:
            raise ValueError("maximum bisection needs an even number of vertices")
        self.graph = graph
        self.num_qubits = graph.num_vertices
        self.constraint_weight = graph.num_vertices // 2

    def cost(self, z) -> float:
        return maxcut_cost(self.graph, z)

    def cost_array(self, indices):
        return maxcut_cost_array(self.graph, indices)

    def is_feasible(self, z) -> bool:
        return maxbis_feasible(z, self.num_qubits)

    def feasible_basis(self) -> np.ndarray:
        return hamming_weight_basis(self.num_qubits, self.constraint_weight)

    def feasible_count(self) -> int:
        return math.comb(self.num_qubits, self.constraint_weight)


class TspProblem(ProblemDefinition):
    """Tour-cost minimization over one-hot permutation encodings on n^2 qubits."""

    sense = MINIMIZE

    def __init__(self, instance: TspInstance):
        self.instance = instance
        self.num_qubits = instance.num_cities ** 2

    def cost(self, z) -> float:
        sigma = tsp_decode(z, self.instance.num_cities)
        if sigma is None:
            raise ValueError("bitstring is not a valid tour encoding")
        return tsp_cost(self.instance, sigma)

    def is_feasible(self, z) -> bool:
        return tsp_decode(z, self.instance.num_cities) is not None

    def feasible_basis(self) -> np.ndarray:
        indices, _ = permutation_basis(self.instance.num_cities)
        return indices

    def feasible_count(self) -> int:
        return math.factorial(self.instance.num_cities)


def cost_diagonal(problem: ProblemDefinition, subspace: bool = False) -> DiagonalObservable:
    """Cost eigenvalues per basis state.

    Subspace form covers the feasible basis only.  Dense form covers all 2^q
    strings; infeasible entries get a sentinel one unit beyond the worst
    feasible cost so stray leakage is never rewarded.
    """
    basis = problem.feasible_basis()
    feasible_costs = problem.cost_array(basis)
    if subspace:
        return DiagonalObservable(feasible_costs)
    if problem.num_qubits > MAX_DENSE_QUBITS:
        raise ResourceLimitError(
            f"dense diagonal needs {problem.num_qubits} qubits > {MAX_DENSE_QUBITS}"
        )
    if problem.sense == MAXIMIZE:
        sentinel = feasible_costs.min() - 1.0
    else:
        sentinel = feasible_costs.max() + 1.0
    values = np.full(1 << problem.num_qubits, sentinel)
    values[basis] = feasible_costs
    return DiagonalObservable(values)


def tsp_phase_diagonal_dense(problem: TspProblem) -> DiagonalObservable:
    """Dense-mode phase-function diagonal; non-tour strings carry phase 0.

    Constrained runs never populate those entries, so their value is inert.
    """
    if problem.num_qubits > MAX_DENSE_QUBITS:
        raise ResourceLimitError("dense diagonal exceeds the qubit ceiling")
    values = np.zeros(1 << problem.num_qubits)
    indices, tours = permutation_basis(problem.instance.num_cities)
    values[indices] = [tsp_phase_value(problem.instance, s) for s in tours]
    return DiagonalObservable(values)
