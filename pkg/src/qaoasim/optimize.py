"""Classical outer loop: derivative-free optimization of the 2p angles.

Maximization problems are minimized through negation so one optimizer code
path serves both senses.  Default strategy: a full 64-per-axis lattice seeds
a simplex refinement at depth 1; deeper ansaetze run multi-start simplex from
interpolated seeds plus uniform-random restarts.  Everything is deterministic
given the config seed.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .ansatz import Angles, Ansatz, AnsatzSpec
from .errors import ConfigurationError, ObjectiveError, ResourceLimitError
from .oracle import OracleReport, approximation_ratio
from .problems import MAXIMIZE, ProblemDefinition
from .states import SubspaceState, bits_to_index, expectation_diagonal, sample

METHODS = ("auto", "nelder_mead", "grid", "grid_then_nelder_mead")
GRID_POINT_BUDGET = 10 ** 6
_CONVERGENCE_WINDOW = 3


@dataclass
class OptimizerConfig:
    method: str = "auto"
    max_iter: int = 400
    tolerance: float = 1e-6
    restarts: int = 4
    grid_resolution: int = 64
    seed: int = 0
    evaluation_mode: str = "exact"  # "exact" | "sampled"
    shots: int = 1024

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown optimizer method {self.method!r}")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be >= 1")
        if self.tolerance <= 0:
            raise ConfigurationError("tolerance must be positive")
        if self.grid_resolution < 2:
            raise ConfigurationError("grid_resolution must be >= 2")
        if self.restarts < 0:
            raise ConfigurationError("restarts must be >= 0")
        if self.evaluation_mode not in ("exact", "sampled"):
            raise ConfigurationError(f"unknown evaluation mode {self.evaluation_mode!r}")
        if self.shots < 1:
            raise ConfigurationError("shots must be >= 1")


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool


@dataclass
class RunResult:
    """Outcome of one variational run."""

    best_angles: Angles
    best_expectation: float
    best_sample: tuple[str, float]
    sample_histogram: dict[str, int]
    approximation_ratio: float | None
    evaluations: int
    iterations: int
    converged: bool
    seed: int
    elapsed_ms: int


def _checked(objective):
    def wrapped(x):
        value = float(objective(x))
        if not math.isfinite(value):
            raise ObjectiveError(f"objective returned {value} at x={np.asarray(x)!r}")
        return value

    return wrapped


def nelder_mead(
    objective,
    x0,
    *,
    max_iter: int = 400,
    tolerance: float = 1e-6,
    initial_step: float = 0.25,
) -> MinimizeResult:
    """Minimize with the Nelder-Mead simplex method.

    Deterministic given x0.  Convergence: the relative improvement of the
    simplex's worst value stays below ``tolerance`` for 3 consecutive
    iterations (the worst vertex is what a simplex update targets, so a
    stalled worst value means the simplex has collapsed onto a minimum).
    """
    f = _checked(objective)
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    if dim < 1:
        raise ValueError("need at least one dimension")

    simplex = [x0.copy()]
    for i in range(dim):
        point = x0.copy()
        point[i] += initial_step
        simplex.append(point)
    values = [f(p) for p in simplex]
    evaluations = dim + 1

    order = np.argsort(values, kind="stable")
    simplex = [simplex[i] for i in order]
    values = [values[i] for i in order]

    iterations = 0
    stall_count = 0
    converged = False
    while iterations < max_iter:
        worst_before = values[-1]
        centroid = np.mean(simplex[:-1], axis=0)

        reflected = centroid + (centroid - simplex[-1])
        f_reflected = f(reflected)
        evaluations += 1
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_expanded = f(expanded)
            evaluations += 1
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
            else:
                contracted = centroid + 0.5 * (simplex[-1] - centroid)
            f_contracted = f(contracted)
            evaluations += 1
            if f_contracted < min(f_reflected, values[-1]):
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                best = simplex[0]
                for i in range(1, dim + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    values[i] = f(simplex[i])
                evaluations += dim

        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        iterations += 1

        improvement = worst_before - values[-1]
        if improvement / max(abs(worst_before), 1e-12) < tolerance:
            stall_count += 1
            if stall_count >= _CONVERGENCE_WINDOW:
                converged = True
                break
        else:
            stall_count = 0

    return MinimizeResult(
        x=simplex[0].copy(),
        fun=values[0],
        iterations=iterations,
        evaluations=evaluations,
        converged=converged,
    )


def grid_search(objective, bounds, resolution: int) -> MinimizeResult:
    """Evaluate the full lattice over half-open per-axis intervals.

    ``resolution`` points per axis; ties broken by the lowest lexicographic
    lattice index (strict-improvement scan order).
    """
    if resolution < 2:
        raise ValueError("grid resolution must be >= 2")
    bounds = list(bounds)
    total = resolution ** len(bounds)
    if total > GRID_POINT_BUDGET:
        raise ResourceLimitError(
            f"grid of {total} points exceeds the {GRID_POINT_BUDGET} budget"
        )
    f = _checked(objective)
    axes = [
        lo + (hi - lo) * np.arange(resolution) / resolution for (lo, hi) in bounds
    ]
    best_x, best_f = None, math.inf
    for combo in itertools.product(*axes):
        value = f(np.array(combo))
        if value < best_f:
            best_x, best_f = np.array(combo), value
    return MinimizeResult(
        x=best_x, fun=best_f, iterations=0, evaluations=total, converged=False
    )


def angle_bounds(p: int) -> list[tuple[float, float]]:
    """Default search box: gamma in [0, 2pi), beta in [0, pi), per layer.

    Exact periods for integer-valued cost diagonals; for non-integer weights
    the box is only a seeding heuristic and the simplex refinement is free to
    leave it.
    """
    return [(0.0, 2 * math.pi)] * p + [(0.0, math.pi)] * p


def interpolate_angles(angles: Angles, new_p: int) -> Angles:
    """Resample an angle schedule onto a longer one by linear interpolation."""
    old_pos = (np.arange(angles.p) + 0.5) / angles.p
    new_pos = (np.arange(new_p) + 0.5) / new_p
    return Angles(
        tuple(np.interp(new_pos, old_pos, angles.gamma)),
        tuple(np.interp(new_pos, old_pos, angles.beta)),
    )


def zero_padded_angles(angles: Angles) -> Angles:
    """Append one zero layer; reproduces the shallower ansatz exactly."""
    return Angles(angles.gamma + (0.0,), angles.beta + (0.0,))


class _Objective:
    """Scalar objective over the flat angle vector, minimization-framed.

    Exact mode evaluates the expectation directly; sampled mode measures
    ``shots`` times with a per-evaluation seed derived from (run seed,
    evaluation index) so runs are reproducible without frozen noise.
    """

    def __init__(self, ansatz: Ansatz, config: OptimizerConfig):
        self.ansatz = ansatz
        self.config = config
        self.sign = -1.0 if ansatz.problem.sense == MAXIMIZE else 1.0
        self.evaluation_index = 0
        template = ansatz.initial_state()
        self._basis = template.basis if isinstance(template, SubspaceState) else None

    def _cost_of_histogram(self, histogram: dict[str, int]) -> float:
        total, shots = 0.0, 0
        for bits, count in histogram.items():
            total += self._cost_of_bits(bits) * count
            shots += count
        return total / shots

    def _cost_of_bits(self, bits: str) -> float:
        index = bits_to_index(bits)
        if self._basis is not None:
            index = int(np.searchsorted(self._basis, index))
        return float(self.ansatz.cost_diag.values[index])

    def __call__(self, x) -> float:
        self.evaluation_index += 1
        angles = Angles.from_vector(x)
        if self.config.evaluation_mode == "exact":
            return self.sign * self.ansatz.expectation(angles)
        state = self.ansatz.run(angles)
        histogram = sample(
            state, self.config.shots, [self.config.seed, 1, self.evaluation_index]
        )
        return self.sign * self._cost_of_histogram(histogram)


def _resolve_method(method: str, p: int) -> str:
    if method != "auto":
        return method
    return "grid_then_nelder_mead" if p == 1 else "nelder_mead"


def vqa_loop(
    spec: AnsatzSpec,
    problem: ProblemDefinition,
    config: OptimizerConfig,
    initial_angles=None,
    oracle_report: OracleReport | None = None,
) -> RunResult:
    """Optimize the 2p angles against the ansatz expectation and report the run.

    ``initial_angles`` may be an Angles value or a list of them; each becomes
    a simplex starting point in addition to the method's own seeds.  When an
    oracle report is supplied the approximation ratio is filled in, otherwise
    it is None.
    """
    start_time = time.perf_counter()
    ansatz = Ansatz(spec, problem)
    p = spec.depth
    objective = _Objective(ansatz, config)
    method = _resolve_method(config.method, p)
    bounds = angle_bounds(p)

    seeds = []
    if initial_angles is not None:
        provided = (
            [initial_angles] if isinstance(initial_angles, Angles) else list(initial_angles)
        )
        for angles in provided:
            if angles.p != p:
                raise ConfigurationError(
                    f"seed angles have depth {angles.p}, expected {p}"
                )
            seeds.append(angles.as_vector())

    evaluations = 0
    iterations = 0
    starts: list[np.ndarray] = []
    grid_result = None
    if method in ("grid", "grid_then_nelder_mead"):
        grid_result = grid_search(objective, bounds, config.grid_resolution)
        evaluations += grid_result.evaluations
        if method == "grid_then_nelder_mead":
            starts.append(grid_result.x)
        starts.extend(seeds)
    else:
        starts.extend(seeds)
        rng = np.random.default_rng([config.seed, 0])
        lows = np.array([lo for (lo, _) in bounds])
        highs = np.array([hi for (_, hi) in bounds])
        for _ in range(config.restarts):
            starts.append(lows + (highs - lows) * rng.random(2 * p))

    best: MinimizeResult | None = None
    if method == "grid":
        best = grid_result
    else:
        if not starts:
            starts.append(np.zeros(2 * p))
        for x0 in starts:
            result = nelder_mead(
                objective, x0, max_iter=config.max_iter, tolerance=config.tolerance
            )
            evaluations += result.evaluations
            iterations += result.iterations
            if best is None or result.fun < best.fun:
                best = result

    best_angles = Angles.from_vector(best.x)
    final_state = ansatz.run(best_angles)
    expectation = expectation_diagonal(final_state, ansatz.cost_diag)
    histogram = sample(final_state, config.shots, [config.seed, 2])

    maximize = problem.sense == MAXIMIZE
    sample_costs = {bits: objective._cost_of_bits(bits) for bits in histogram}
    chooser = max if maximize else min
    best_bits = chooser(sorted(histogram), key=lambda b: sample_costs[b])
    ratio = None
    if oracle_report is not None:
        ratio = approximation_ratio(expectation, oracle_report, problem.sense)

    elapsed_ms = int(round((time.perf_counter() - start_time) * 1000))
    return RunResult(
        best_angles=best_angles,
        best_expectation=expectation,
        best_sample=(best_bits, sample_costs[best_bits]),
        sample_histogram=histogram,
        approximation_ratio=ratio,
        evaluations=evaluations,
        iterations=iterations,
        converged=best.converged,
        seed=config.seed,
        elapsed_ms=elapsed_ms,
    )


def depth_sweep(
    spec: AnsatzSpec,
    problem: ProblemDefinition,
    config: OptimizerConfig,
    p_max: int,
    oracle_report: OracleReport | None = None,
) -> list[RunResult]:
    """Run vqa_loop for p = 1..p_max with interpolation seeding.

    Each depth seeds from the previous best angles, both interpolated onto
    the longer schedule and zero-padded (the latter reproduces the shallower
    optimum exactly, making the sweep monotone up to optimizer tolerance).
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    results: list[RunResult] = []
    previous: Angles | None = None
    for p in range(1, p_max + 1):
        spec_p = replace(spec, depth=p)
        seeds = None
        if previous is not None:
            seeds = [interpolate_angles(previous, p), zero_padded_angles(previous)]
        result = vqa_loop(
            spec_p, problem, config, initial_angles=seeds, oracle_report=oracle_report
        )
        results.append(result)
        previous = result.best_angles
    return results


def monotone_expectations(results, sense: str, tol: float = 1e-9) -> bool:
    """True when best expectations never regress with depth (within tol)."""
    values = [r.best_expectation for r in results]
    if sense == MAXIMIZE:
        return all(b >= a - tol for a, b in zip(values, values[1:]))
    return all(b <= a + tol for a, b in zip(values, values[1:]))
