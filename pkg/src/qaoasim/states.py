"""Dense statevector and feasible-subspace state representations with gate kernels.

Conventions used throughout the package:

* Qubit ``j`` is bit ``j`` of the basis index, qubit 0 least significant.
* Bitstring text is written qubit-0-first: character ``t`` of the string is
  the value of qubit ``t``.  ``"011"`` therefore denotes index 6 on 3 qubits.
* All gate kernels update amplitudes in place via strided views, O(2^q) per
  one- or two-qubit gate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceLimitError

MAX_DENSE_QUBITS = 26  # 2^26 complex doubles = 1 GiB; larger requests fail fast

_VALIDATE = False


def set_validation(enabled: bool) -> None:
    """Toggle expensive argument checks (gate unitarity, target norm) globally."""
    global _VALIDATE
    _VALIDATE = bool(enabled)


def validation_enabled() -> bool:
    return _VALIDATE


def bits_to_index(bits: str) -> int:
    """Parse qubit-0-first bitstring text into a basis index."""
    k = 0
    for j, c in enumerate(bits):
        if c == "1":
            k |= 1 << j
        elif c != "0":
            raise ValueError(f"not a bitstring: {bits!r}")
    return k


def index_to_bits(index: int, num_qubits: int) -> str:
    """Format a basis index as qubit-0-first bitstring text."""
    return "".join("1" if (index >> j) & 1 else "0" for j in range(num_qubits))


@dataclass
class Statevector:
    """Complex amplitudes over all 2^q computational basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if len(self.amplitudes) != 1 << self.num_qubits:
            raise ValueError(
                f"amplitude array of length {len(self.amplitudes)} does not "
                f"match {self.num_qubits} qubits"
            )

    def copy(self) -> "Statevector":
        return Statevector(self.num_qubits, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))


@dataclass
class SubspaceState:
    """Complex amplitudes over an explicitly enumerated feasible basis.

    ``basis`` holds the feasible bitstrings as integer indices, distinct and
    sorted ascending; entry ``i`` of ``amplitudes`` belongs to ``basis[i]``.
    """

    num_qubits: int
    basis: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=np.int64)
        if len(self.basis) != len(self.amplitudes):
            raise ValueError("basis and amplitudes length mismatch")
        if len(self.basis) > 1 and not np.all(np.diff(self.basis) > 0):
            raise ValueError("subspace basis must be distinct and sorted ascending")

    def copy(self) -> "SubspaceState":
        return SubspaceState(self.num_qubits, self.basis, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))


@dataclass
class DiagonalObservable:
    """Real eigenvalues of a computational-basis-diagonal operator."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


# -- single-qubit gate matrices -------------------------------------------

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def x_rotation(beta: float) -> np.ndarray:
    """exp(-i beta X); the per-qubit factor of the transverse-field mixer."""
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _check_unitary(u: np.ndarray) -> None:
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12):
        raise ValueError("matrix is not unitary within 1e-12")


def new_basis_state(num_qubits: int, index) -> Statevector:
    """Statevector with amplitude 1 at ``index`` (int or bitstring text)."""
    if num_qubits > MAX_DENSE_QUBITS:
        raise ResourceLimitError(
            f"dense statevector limited to {MAX_DENSE_QUBITS} qubits, got {num_qubits}"
        )
    if isinstance(index, str):
        index = bits_to_index(index)
    if not 0 <= index < (1 << num_qubits):
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[index] = 1.0
    return Statevector(num_qubits, amps)


def uniform_statevector(num_qubits: int) -> Statevector:
    """|+>^q: uniform amplitudes 2^(-q/2) over all basis states."""
    if num_qubits > MAX_DENSE_QUBITS:
        raise ResourceLimitError(
            f"dense statevector limited to {MAX_DENSE_QUBITS} qubits, got {num_qubits}"
        )
    dim = 1 << num_qubits
    return Statevector(num_qubits, np.full(dim, dim ** -0.5, dtype=complex))


def _contiguous_amps(state: Statevector) -> np.ndarray:
    # reshape must stay a view for in-place kernels to take effect
    if not state.amplitudes.flags.c_contiguous:
        state.amplitudes = np.ascontiguousarray(state.amplitudes)
    return state.amplitudes


def apply_single_qubit(state: Statevector, qubit: int, u: np.ndarray) -> None:
    """Apply a 2x2 unitary to one qubit, in place."""
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    if _VALIDATE:
        _check_unitary(u)
    v = _contiguous_amps(state).reshape(-1, 2, 1 << qubit)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def _two_qubit_view(state: Statevector, q1: int, q2: int) -> np.ndarray:
    """5-d view with axes (high block, bit of max(q1,q2), middle, bit of min, low)."""
    hi, lo = max(q1, q2), min(q1, q2)
    return _contiguous_amps(state).reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)


def apply_rzz(state: Statevector, q1: int, q2: int, theta: float) -> None:
    """exp(-i theta/2 Z(x)Z) on a qubit pair, in place.

    Basis states with equal bits on the pair pick up exp(-i theta/2), unequal
    bits exp(+i theta/2).
    """
    if q1 == q2:
        raise ValueError("apply_rzz needs two distinct qubits")
    for q in (q1, q2):
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} out of range")
    v = _two_qubit_view(state, q1, q2)
    same = np.exp(-0.5j * theta)
    diff = np.exp(0.5j * theta)
    v[:, 0, :, 0, :] *= same
    v[:, 1, :, 1, :] *= same
    v[:, 0, :, 1, :] *= diff
    v[:, 1, :, 0, :] *= diff


def apply_xy(state: Statevector, q1: int, q2: int, beta: float) -> None:
    """exp(-i beta (XX+YY)) on a qubit pair, in place.

    Acts as identity on the |00>,|11> components and rotates the {|01>,|10>}
    span by [[cos 2b, -i sin 2b], [-i sin 2b, cos 2b]]; Hamming weight of
    every contributing basis state is preserved.
    """
    if q1 == q2:
        raise ValueError("apply_xy needs two distinct qubits")
    for q in (q1, q2):
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} out of range")
    v = _two_qubit_view(state, q1, q2)
    c, s = math.cos(2 * beta), math.sin(2 * beta)
    a01 = v[:, 0, :, 1, :].copy()
    a10 = v[:, 1, :, 0, :]
    v[:, 0, :, 1, :] = c * a01 - 1j * s * a10
    v[:, 1, :, 0, :] = -1j * s * a01 + c * a10


def apply_grover_mixer(state, beta: float, target) -> None:
    """exp(-i beta |t><t|) applied in place; |t> must have unit norm.

    Exact rank-1 closed form: psi += (exp(-i beta) - 1) <t|psi> |t>.
    Works on Statevector and SubspaceState alike (matching representations).
    """
    if len(target.amplitudes) != len(state.amplitudes):
        raise ValueError("state and target dimensions differ")
    if _VALIDATE:
        if abs(target.norm_sq() - 1.0) > 1e-10:
            raise ValueError("grover mixer target must have unit norm")
        if isinstance(state, SubspaceState) and not np.array_equal(
            state.basis, target.basis
        ):
            raise ValueError("state and target subspace bases differ")
    overlap = np.vdot(target.amplitudes, state.amplitudes)
    state.amplitudes += (np.exp(-1j * beta) - 1.0) * overlap * target.amplitudes


def apply_diagonal_phase(state, gamma: float, diag: DiagonalObservable) -> None:
    """Multiply amplitude k by exp(-i gamma diag[k]), in place."""
    if len(diag.values) != len(state.amplitudes):
        raise ValueError("diagonal length does not match state dimension")
    state.amplitudes *= np.exp(-1j * gamma * diag.values)


def expectation_diagonal(state, diag: DiagonalObservable) -> float:
    """<psi| D |psi> for a diagonal observable D."""
    if len(diag.values) != len(state.amplitudes):
        raise ValueError("diagonal length does not match state dimension")
    return float(np.abs(state.amplitudes) ** 2 @ diag.values)


def sample(state, shots: int, rng_seed) -> dict[str, int]:
    """Draw ``shots`` i.i.d. bitstrings with probability |amp|^2.

    Deterministic for a fixed seed.  Returns {bitstring text: count} with
    qubit-0-first strings.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.abs(state.amplitudes) ** 2
    probs /= probs.sum()
    rng = np.random.default_rng(rng_seed)
    draws = rng.choice(len(probs), size=shots, p=probs)
    positions, counts = np.unique(draws, return_counts=True)
    if isinstance(state, SubspaceState):
        indices = state.basis[positions]
    else:
        indices = positions
    q = state.num_qubits
    return {index_to_bits(int(k), q): int(c) for k, c in zip(indices, counts)}


class HermitianEvolution:
    """Applies exp(-i beta H) for a fixed real symmetric H and varying beta.

    The symmetric eigendecomposition is computed once and reused, which keeps
    the operator exactly unitary up to rounding for every beta.
    """

    def __init__(self, hamiltonian: np.ndarray):
        h = np.asarray(hamiltonian, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("hamiltonian must be a square matrix")
        if not np.allclose(h, h.T, atol=1e-10):
            raise ValueError("hamiltonian must be symmetric within 1e-10")
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(h)

    def apply(self, amplitudes: np.ndarray, beta: float) -> np.ndarray:
        w = self.eigenvectors.T.conj() @ amplitudes
        w *= np.exp(-1j * beta * self.eigenvalues)
        return self.eigenvectors @ w


def subspace_exponential_apply(
    state: SubspaceState, hamiltonian: np.ndarray, beta: float
) -> None:
    """state <- exp(-i beta H) state via eigendecomposition of symmetric H."""
    if np.shape(hamiltonian)[0] != len(state.amplitudes):
        raise ValueError("hamiltonian dimension does not match state")
    evo = HermitianEvolution(hamiltonian)
    state.amplitudes = evo.apply(state.amplitudes, beta)


def embed_dense(state: SubspaceState) -> Statevector:
    """Embed a subspace state into the full 2^q statevector (zeros elsewhere)."""
    if state.num_qubits > MAX_DENSE_QUBITS:
        raise ResourceLimitError(
            f"dense statevector limited to {MAX_DENSE_QUBITS} qubits"
        )
    amps = np.zeros(1 << state.num_qubits, dtype=complex)
    amps[state.basis] = state.amplitudes
    return Statevector(state.num_qubits, amps)


def restrict_to_basis(state: Statevector, basis: np.ndarray) -> np.ndarray:
    """Amplitudes of a dense state on the given basis indices (copy)."""
    return state.amplitudes[np.asarray(basis, dtype=np.int64)].copy()
