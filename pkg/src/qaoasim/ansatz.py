"""Assembly and execution of the alternating-operator ansatz.

A run is: prepare the initial state, then apply ``depth`` rounds of
phase separator followed by mixer, each round consuming one (gamma, beta)
angle pair.  Mixers written as exponentials of non-commuting sums (the XY
mixers and the simultaneous order-swap mixer) are applied exactly through
symmetric eigendecomposition rather than Trotterized gate products; the
layered product form of the ring mixer is available separately as an
explicitly approximate alternate.

Two simulation modes are supported and must agree on feasible amplitudes:
``dense`` works on the full 2^q statevector, ``subspace`` on the enumerated
feasible basis only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ResourceLimitError
from .problems import (
    ProblemDefinition,
    TspProblem,
    cost_diagonal,
    tsp_phase_diagonal,
    tsp_phase_diagonal_dense,
    tsp_encode,
)
from .states import (
    DiagonalObservable,
    HermitianEvolution,
    Statevector,
    SubspaceState,
    apply_diagonal_phase,
    apply_rzz,
    apply_single_qubit,
    apply_xy,
    expectation_diagonal,
    new_basis_state,
    uniform_statevector,
    x_rotation,
)

INITIAL_STATES = ("plus", "dicke", "fixed_permutation", "permutation_superposition")
MIXERS = (
    "transverse_field",
    "xy_ring",
    "xy_clique",
    "grover",
    "tsp_simultaneous_swap",
    "tsp_partial_swap_product",
)
PHASES = ("cost_diagonal", "zz_gates", "tsp_g_diagonal")
SIMULATION_MODES = ("dense", "subspace")

CONSTRAINED_MIXERS = frozenset(MIXERS) - {"transverse_field"}

# exact dense application of sum-exponential mixers eigendecomposes one
# Hamming-weight class at a time; cap the register width (index bookkeeping)
# and the dimension of any class actually populated (eigh cost)
DENSE_EXACT_MIXER_MAX_QUBITS = 20
DENSE_CLASS_DIM_LIMIT = 4096

SUBSPACE_BASIS_LIMIT = 10 ** 6
TRANSITION_BASIS_LIMIT = 10 ** 4


@dataclass(frozen=True)
class Angles:
    """The 2p variational angles: gamma for phase separators, beta for mixers."""

    gamma: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if len(self.gamma) != len(self.beta):
            raise ValueError("gamma and beta must have equal length")
        if len(self.gamma) == 0:
            raise ValueError("at least one angle pair is required")
        if not all(math.isfinite(x) for x in self.gamma + self.beta):
            raise ValueError("angles must be finite")

    @property
    def p(self) -> int:
        return len(self.gamma)

    def as_vector(self) -> np.ndarray:
        return np.array(self.gamma + self.beta, dtype=float)

    @classmethod
    def from_vector(cls, x) -> "Angles":
        x = np.asarray(x, dtype=float)
        if x.size % 2:
            raise ValueError("angle vector length must be even")
        p = x.size // 2
        return cls(tuple(x[:p]), tuple(x[p:]))


@dataclass(frozen=True)
class AnsatzSpec:
    """Quantum parameter selection: initial state, mixer, phase separator, depth."""

    initial_state: str = "plus"
    mixer: str = "transverse_field"
    phase: str = "cost_diagonal"
    depth: int = 1
    simulation_mode: str = "dense"
    dicke_weight: int | None = None
    start_permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.initial_state not in INITIAL_STATES:
            raise ConfigurationError(f"unknown initial state {self.initial_state!r}")
        if self.mixer not in MIXERS:
            raise ConfigurationError(f"unknown mixer {self.mixer!r}")
        if self.phase not in PHASES:
            raise ConfigurationError(f"unknown phase separator {self.phase!r}")
        if self.simulation_mode not in SIMULATION_MODES:
            raise ConfigurationError(f"unknown simulation mode {self.simulation_mode!r}")
        if self.depth < 1:
            raise ConfigurationError("depth must be >= 1")
        if self.start_permutation is not None:
            object.__setattr__(
                self, "start_permutation", tuple(int(c) for c in self.start_permutation)
            )


def _validate_pairing(spec: AnsatzSpec, problem: ProblemDefinition) -> None:
    is_tsp = isinstance(problem, TspProblem)
    weight = problem.constraint_weight

    if spec.mixer == "transverse_field":
        if spec.simulation_mode != "dense":
            raise ConfigurationError("transverse_field mixer requires dense simulation")
        if spec.initial_state != "plus":
            raise ConfigurationError("transverse_field mixer pairs with the plus state")
    elif spec.mixer in ("xy_ring", "xy_clique"):
        if weight is None:
            raise ConfigurationError(
                f"{spec.mixer} mixer needs a Hamming-weight-constrained problem"
            )
        if spec.initial_state != "dicke":
            raise ConfigurationError(f"{spec.mixer} mixer pairs with a Dicke state")
    elif spec.mixer == "grover":
        if is_tsp:
            wanted = "permutation_superposition"
        elif weight is not None:
            wanted = "dicke"
        else:
            wanted = "plus"
        if spec.initial_state != wanted:
            raise ConfigurationError(
                f"grover mixer pairs with the feasible superposition ({wanted})"
            )
    else:  # tsp mixers
        if not is_tsp:
            raise ConfigurationError(f"{spec.mixer} mixer applies to TSP problems only")
        if spec.initial_state not in ("fixed_permutation", "permutation_superposition"):
            raise ConfigurationError(
                f"{spec.mixer} mixer pairs with a permutation initial state"
            )

    if spec.initial_state == "plus" and spec.simulation_mode != "dense":
        raise ConfigurationError("plus initial state requires dense simulation")
    if spec.initial_state == "dicke":
        if weight is None:
            raise ConfigurationError(
                "dicke initial state needs a Hamming-weight-constrained problem"
            )
        k = weight if spec.dicke_weight is None else spec.dicke_weight
        if k != weight:
            raise ConfigurationError(
                f"dicke weight {k} does not match the problem constraint ({weight})"
            )
    if spec.initial_state in ("fixed_permutation", "permutation_superposition") and not is_tsp:
        raise ConfigurationError("permutation initial states apply to TSP problems only")

    if spec.phase == "zz_gates":
        if not hasattr(problem, "graph"):
            raise ConfigurationError("zz_gates phase separator needs a graph problem")
        if spec.simulation_mode != "dense":
            raise ConfigurationError("zz_gates phase separator requires dense simulation")
    if spec.phase == "tsp_g_diagonal" and not is_tsp:
        raise ConfigurationError("tsp_g_diagonal phase separator applies to TSP only")

    if spec.simulation_mode == "subspace":
        if problem.feasible_count() > SUBSPACE_BASIS_LIMIT:
            raise ResourceLimitError(
                f"feasible basis of {problem.feasible_count()} states exceeds "
                f"the subspace limit {SUBSPACE_BASIS_LIMIT}"
            )


# -- mixer Hamiltonians over an explicit basis -------------------------------


def _positions(basis: np.ndarray, indices: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(basis, indices)
    if np.any(pos >= len(basis)) or np.any(basis[np.minimum(pos, len(basis) - 1)] != indices):
        raise ValueError("basis is not closed under the Hamiltonian's moves")
    return pos


def xy_bonds(num_qubits: int, kind: str) -> list[tuple[int, int]]:
    """Qubit pairs coupled by an XY mixer: a ring or the full clique."""
    if kind == "xy_ring":
        return [(i, (i + 1) % num_qubits) for i in range(num_qubits)]
    return [(i, j) for i in range(num_qubits) for j in range(i + 1, num_qubits)]


def xy_mixer_hamiltonian(num_qubits: int, bonds, basis: np.ndarray) -> np.ndarray:
    """sum over bonds of X_iX_j + Y_iY_j restricted to the given basis.

    Each bond contributes off-diagonal weight 2 between strings related by
    moving one set bit across the bond; Hamming weight is preserved, so any
    fixed-weight basis is closed.
    """
    basis = np.asarray(basis, dtype=np.int64)
    h = np.zeros((len(basis), len(basis)))
    for (i, j) in bonds:
        mask = (1 << i) | (1 << j)
        sel = (((basis >> i) & 1) != ((basis >> j) & 1)).nonzero()[0]
        cols = _positions(basis, basis[sel] ^ mask)
        np.add.at(h, (sel, cols), 2.0)
    return h


def tsp_swap_hamiltonian(num_cities: int, basis: np.ndarray) -> np.ndarray:
    """Simultaneous order-swap mixer Hamiltonian restricted to the given basis.

    Sum over positions i and unordered city pairs u<v of the partial-mixer
    term that exchanges cities u and v sitting at positions i and i+1 (with
    wraparound).  Defined through one-hot raising/lowering products, so it
    also acts consistently on non-tour strings of the same Hamming weight.
    """
    n = num_cities
    basis = np.asarray(basis, dtype=np.int64)
    h = np.zeros((len(basis), len(basis)))
    for rows, cols in _swap_pairs(n, basis):
        np.add.at(h, (rows, cols), 1.0)
        np.add.at(h, (cols, rows), 1.0)
    return h


def _swap_pairs(num_cities: int, basis: np.ndarray):
    """(source, partner) basis positions for each (i, u<v) partial mixer, in order.

    A source string has city-v one-hot bit at position i and city-u bit at
    position i+1, with the swapped-in bits clear; the partner is the string
    with all four bits flipped.
    """
    n = num_cities
    basis = np.asarray(basis, dtype=np.int64)
    for i in range(n):
        ip = (i + 1) % n
        for u in range(n):
            for v in range(u + 1, n):
                b_iu, b_iv = i * n + u, i * n + v
                b_ipu, b_ipv = ip * n + u, ip * n + v
                sel = (
                    (((basis >> b_iv) & 1) == 1)
                    & (((basis >> b_ipu) & 1) == 1)
                    & (((basis >> b_iu) & 1) == 0)
                    & (((basis >> b_ipv) & 1) == 0)
                ).nonzero()[0]
                if len(sel) == 0:
                    continue
                mask = (1 << b_iu) | (1 << b_iv) | (1 << b_ipu) | (1 << b_ipv)
                cols = _positions(basis, basis[sel] ^ mask)
                yield sel, cols


# -- mixer applicators --------------------------------------------------------


class _TransverseFieldMixer:
    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits

    def apply(self, state, beta: float) -> None:
        u = x_rotation(beta)
        for j in range(self.num_qubits):
            apply_single_qubit(state, j, u)


class _SubspaceEvolutionMixer:
    """Exact exp(-i beta H) on the feasible basis, eigendecomposed once."""

    def __init__(self, hamiltonian: np.ndarray):
        self.evolution = HermitianEvolution(hamiltonian)

    def apply(self, state, beta: float) -> None:
        state.amplitudes = self.evolution.apply(state.amplitudes, beta)


class _ClasswiseEvolutionMixer:
    """Exact dense exp(-i beta H) for Hamming-weight-preserving H.

    H splits over weight classes; each populated class is eigendecomposed
    lazily and cached, so constrained runs only ever pay for their own class.
    """

    def __init__(self, num_qubits: int, h_builder):
        if num_qubits > DENSE_EXACT_MIXER_MAX_QUBITS:
            raise ResourceLimitError(
                f"exact dense mixer limited to {DENSE_EXACT_MIXER_MAX_QUBITS} qubits; "
                "use subspace simulation"
            )
        weights = np.bitwise_count(np.arange(1 << num_qubits, dtype=np.uint64))
        self.class_indices = [
            np.nonzero(weights == w)[0].astype(np.int64) for w in range(num_qubits + 1)
        ]
        self.h_builder = h_builder
        self._evolutions: dict[int, HermitianEvolution] = {}

    def apply(self, state, beta: float) -> None:
        amps = state.amplitudes
        for w, idx in enumerate(self.class_indices):
            segment = amps[idx]
            if not np.any(segment != 0):
                continue
            evo = self._evolutions.get(w)
            if evo is None:
                if len(idx) > DENSE_CLASS_DIM_LIMIT:
                    raise ResourceLimitError(
                        f"populated weight-{w} class has {len(idx)} states "
                        f"(limit {DENSE_CLASS_DIM_LIMIT}); use subspace simulation"
                    )
                evo = HermitianEvolution(self.h_builder(idx))
                self._evolutions[w] = evo
            amps[idx] = evo.apply(segment, beta)


class _GroverMixer:
    def __init__(self, target_amplitudes: np.ndarray):
        self.target = target_amplitudes

    def apply(self, state, beta: float) -> None:
        overlap = np.vdot(self.target, state.amplitudes)
        state.amplitudes += (np.exp(-1j * beta) - 1.0) * overlap * self.target


class _SwapProductMixer:
    """Ordered product of the individual adjacent-swap partial mixers.

    Each factor is an exact 2-dimensional rotation between swap-related
    strings; factors are applied position-major, city pairs u<v inner.
    """

    def __init__(self, factors):
        self.factors = factors  # [(source positions, partner positions)]

    def apply(self, state, beta: float) -> None:
        c, s = math.cos(beta), math.sin(beta)
        amps = state.amplitudes
        for rows, cols in self.factors:
            a = amps[rows].copy()
            b = amps[cols]
            amps[rows] = c * a - 1j * s * b
            amps[cols] = -1j * s * a + c * b


def _uniform_target(problem: ProblemDefinition, subspace: bool, basis: np.ndarray):
    m = len(basis)
    if subspace:
        return np.full(m, m ** -0.5, dtype=complex)
    amps = np.zeros(1 << problem.num_qubits, dtype=complex)
    amps[basis] = m ** -0.5
    return amps


def build_mixer(spec: AnsatzSpec, problem: ProblemDefinition, subspace: bool):
    """Mixer applicator for the requested representation."""
    q = problem.num_qubits
    if spec.mixer == "transverse_field":
        return _TransverseFieldMixer(q)
    if spec.mixer == "grover":
        basis = problem.feasible_basis()
        return _GroverMixer(_uniform_target(problem, subspace, basis))
    if spec.mixer in ("xy_ring", "xy_clique"):
        bonds = xy_bonds(q, spec.mixer)
        if subspace:
            return _SubspaceEvolutionMixer(
                xy_mixer_hamiltonian(q, bonds, problem.feasible_basis())
            )
        return _ClasswiseEvolutionMixer(
            q, lambda idx: xy_mixer_hamiltonian(q, bonds, idx)
        )
    n = problem.instance.num_cities
    if spec.mixer == "tsp_simultaneous_swap":
        if subspace:
            return _SubspaceEvolutionMixer(
                tsp_swap_hamiltonian(n, problem.feasible_basis())
            )
        return _ClasswiseEvolutionMixer(q, lambda idx: tsp_swap_hamiltonian(n, idx))
    # tsp_partial_swap_product
    if subspace:
        basis = problem.feasible_basis()
        return _SwapProductMixer(list(_swap_pairs(n, basis)))
    if q > DENSE_EXACT_MIXER_MAX_QUBITS:
        raise ResourceLimitError(
            f"dense swap-product mixer limited to {DENSE_EXACT_MIXER_MAX_QUBITS} qubits"
        )
    all_indices = np.arange(1 << q, dtype=np.int64)
    factors = [
        (all_indices[rows], all_indices[cols]) for rows, cols in _swap_pairs(n, all_indices)
    ]
    return _SwapProductMixer(factors)


# -- phase separator applicators ----------------------------------------------


class _DiagonalPhase:
    def __init__(self, diag: DiagonalObservable):
        self.diag = diag

    def apply(self, state, gamma: float) -> None:
        apply_diagonal_phase(state, gamma, self.diag)


class _ZZGatePhase:
    """R_ZZ(2*gamma*w) per edge; the gate-level MaxCut separator."""

    def __init__(self, edges):
        self.edges = edges

    def apply(self, state, gamma: float) -> None:
        for (u, v, w) in self.edges:
            apply_rzz(state, u, v, 2.0 * gamma * w)


def build_phase(spec: AnsatzSpec, problem: ProblemDefinition, subspace: bool):
    if spec.phase == "zz_gates":
        return _ZZGatePhase(problem.graph.edges)
    if spec.phase == "tsp_g_diagonal":
        diag = (
            tsp_phase_diagonal(problem.instance)
            if subspace
            else tsp_phase_diagonal_dense(problem)
        )
        return _DiagonalPhase(diag)
    return _DiagonalPhase(cost_diagonal(problem, subspace=subspace))


# -- initial states -----------------------------------------------------------


def build_initial(spec: AnsatzSpec, problem: ProblemDefinition, subspace: bool):
    """Initial state per spec, amplitudes assigned directly (no gate synthesis)."""
    q = problem.num_qubits
    if spec.initial_state == "plus":
        return uniform_statevector(q)

    basis = problem.feasible_basis()
    if spec.initial_state in ("dicke", "permutation_superposition"):
        amps = np.full(len(basis), len(basis) ** -0.5, dtype=complex)
        if subspace:
            return SubspaceState(q, basis, amps)
        dense = np.zeros(1 << q, dtype=complex)
        dense[basis] = amps
        return Statevector(q, dense)

    # fixed_permutation
    n = problem.instance.num_cities
    sigma = spec.start_permutation or tuple(range(n))
    index = tsp_encode(sigma, n)
    if subspace:
        amps = np.zeros(len(basis), dtype=complex)
        amps[int(np.searchsorted(basis, index))] = 1.0
        return SubspaceState(q, basis, amps)
    return new_basis_state(q, index)


# -- assembled ansatz ----------------------------------------------------------


class Ansatz:
    """Pre-assembled ansatz: reusable across angle values during optimization."""

    def __init__(self, spec: AnsatzSpec, problem: ProblemDefinition):
        _validate_pairing(spec, problem)
        self.spec = spec
        self.problem = problem
        subspace = spec.simulation_mode == "subspace"
        self._template = build_initial(spec, problem, subspace)
        self._phase = build_phase(spec, problem, subspace)
        self._mixer = build_mixer(spec, problem, subspace)
        self.cost_diag = cost_diagonal(problem, subspace=subspace)

    def initial_state(self):
        return self._template.copy()

    def run(self, angles: Angles):
        if angles.p != self.spec.depth:
            raise ValueError(
                f"angles have depth {angles.p}, spec has depth {self.spec.depth}"
            )
        state = self.initial_state()
        for gamma, beta in zip(angles.gamma, angles.beta):
            self._phase.apply(state, gamma)
            self._mixer.apply(state, beta)
        return state

    def expectation(self, angles: Angles) -> float:
        return expectation_diagonal(self.run(angles), self.cost_diag)


def prepare_initial(spec: AnsatzSpec, problem: ProblemDefinition):
    """Fresh initial state for the spec/problem pairing."""
    _validate_pairing(spec, problem)
    return build_initial(spec, problem, spec.simulation_mode == "subspace")


def apply_phase_separator(state, problem: ProblemDefinition, phase_kind: str, gamma: float) -> None:
    """One-off phase separator application; representation inferred from state."""
    if phase_kind not in PHASES:
        raise ConfigurationError(f"unknown phase separator {phase_kind!r}")
    spec = AnsatzSpec(phase=phase_kind)
    build_phase(spec, problem, isinstance(state, SubspaceState)).apply(state, gamma)


def apply_mixer(state, spec: AnsatzSpec, problem: ProblemDefinition, beta: float) -> None:
    """One-off mixer application; representation inferred from state.

    Assembles the mixer from scratch each call; use Ansatz for repeated
    applications.
    """
    build_mixer(spec, problem, isinstance(state, SubspaceState)).apply(state, beta)


def run_ansatz(spec: AnsatzSpec, problem: ProblemDefinition, angles: Angles):
    """Prepare, then alternate phase separator and mixer for p rounds."""
    return Ansatz(spec, problem).run(angles)


def ansatz_expectation(spec: AnsatzSpec, problem: ProblemDefinition, angles: Angles) -> float:
    """Exact expectation of the problem cost over the ansatz output state."""
    return Ansatz(spec, problem).expectation(angles)


def apply_layered_xy_ring(state, beta: float) -> None:
    """Gate-level ring-mixer alternate: XY gates in even then odd bond layers.

    Trotterized product form; differs from the exact ring mixer at O(beta^2)
    but preserves Hamming weight exactly.
    """
    n = state.num_qubits
    bonds = [(i, (i + 1) % n) for i in range(n)]
    for parity in (0, 1):
        for (i, j) in bonds:
            if i % 2 == parity:
                apply_xy(state, i, j, beta)


def infeasible_leakage(state, problem: ProblemDefinition) -> float:
    """Probability mass outside the feasible subspace (0 for subspace states)."""
    if isinstance(state, SubspaceState):
        return 0.0
    feasible_mass = float(
        np.sum(np.abs(state.amplitudes[problem.feasible_basis()]) ** 2)
    )
    return state.norm_sq() - feasible_mass


def transition_condition_check(
    spec: AnsatzSpec, problem: ProblemDefinition, beta: float, r_max: int
) -> bool:
    """True iff every ordered feasible pair is connected by some mixer power r <= r_max.

    Builds the mixer unitary on the feasible basis and accumulates squared
    transition amplitudes over its first r_max powers (threshold 1e-12).
    """
    m = problem.feasible_count()
    if m > TRANSITION_BASIS_LIMIT:
        raise ResourceLimitError(
            f"transition check needs the full {m}-state basis (limit "
            f"{TRANSITION_BASIS_LIMIT})"
        )
    subspace = spec.mixer in CONSTRAINED_MIXERS
    mixer = build_mixer(spec, problem, subspace)
    basis = problem.feasible_basis()
    unitary = np.empty((m, m), dtype=complex)
    for j in range(m):
        if subspace:
            amps = np.zeros(m, dtype=complex)
            amps[j] = 1.0
            state = SubspaceState(problem.num_qubits, basis, amps)
        else:
            state = new_basis_state(problem.num_qubits, int(basis[j]))
        mixer.apply(state, beta)
        if subspace:
            unitary[:, j] = state.amplitudes
        else:
            unitary[:, j] = state.amplitudes[basis]
    power = np.eye(m, dtype=complex)
    reached = np.zeros((m, m), dtype=bool)
    for _ in range(max(r_max, 0)):
        power = unitary @ power
        reached |= np.abs(power) ** 2 > 1e-12
        if reached.all():
            return True
    return bool(reached.all())
