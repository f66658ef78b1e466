"""Command-line front end: parse problems, run experiments, emit JSON results.

Commands: ``solve`` (optimize angles and report), ``verify`` (mixer and
phase-separator property checks), ``sweep`` (depth sweep with interpolation
seeding), ``oracle`` (brute-force report).  All randomness flows from one
``--seed`` flag; repeated runs are byte-identical apart from ``elapsed_ms``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import replace

import numpy as np

from .ansatz import (
    AnsatzSpec,
    Ansatz,
    build_mixer,
    infeasible_leakage,
    transition_condition_check,
)
from .errors import ConfigurationError, ParseError, ResourceLimitError
from .optimize import (
    OptimizerConfig,
    RunResult,
    depth_sweep,
    monotone_expectations,
    vqa_loop,
)
from .oracle import brute_force, instance_catalog, tsp_phase_direct
from .problems import (
    MINIMIZE,
    Graph,
    MaxBisectionProblem,
    MaxCutProblem,
    TspInstance,
    TspProblem,
    tsp_phase_diagonal,
)
from .states import embed_dense

KINDS = ("maxcut", "maxbis", "tsp")

_KIND_DEFAULT_SPEC = {
    "maxcut": AnsatzSpec("plus", "transverse_field", "cost_diagonal"),
    "maxbis": AnsatzSpec("dicke", "xy_ring", "cost_diagonal", simulation_mode="subspace"),
    "tsp": AnsatzSpec(
        "fixed_permutation",
        "tsp_simultaneous_swap",
        "tsp_g_diagonal",
        simulation_mode="subspace",
    ),
}


# -- problem file formats -------------------------------------------------------


def _data_lines(path):
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield lineno, line


def parse_graph_file(path) -> Graph:
    """Read ``graph <n> <m>`` followed by m ``e <u> <v> [<w>]`` lines."""
    lines = _data_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty graph file") from None
    parts = header.split()
    if len(parts) != 3 or parts[0] != "graph":
        raise ParseError(f"expected 'graph <n> <m>', got {header!r}", line=lineno)
    try:
        n, m = int(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"bad vertex/edge counts in {header!r}", line=lineno) from None

    edges = []
    seen = set()
    for _ in range(m):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise ParseError(f"expected {m} edge lines, found {len(edges)}") from None
        parts = line.split()
        if parts[0] != "e" or len(parts) not in (3, 4):
            raise ParseError(f"expected 'e <u> <v> [<w>]', got {line!r}", line=lineno)
        try:
            u, v = int(parts[1]), int(parts[2])
            w = float(parts[3]) if len(parts) == 4 else 1.0
        except ValueError:
            raise ParseError(f"bad edge fields in {line!r}", line=lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"edge ({u},{v}) endpoint out of range 0..{n - 1}", line=lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", line=lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge ({u},{v})", line=lineno)
        seen.add(key)
        edges.append((u, v, w))
    for lineno, line in lines:
        raise ParseError(f"unexpected trailing line {line!r}", line=lineno)
    return Graph(n, tuple(edges))


def parse_tsp_file(path) -> TspInstance:
    """Read ``tsp <n>`` followed by an n-by-n matrix of nonnegative costs."""
    lines = _data_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty tsp file") from None
    parts = header.split()
    if len(parts) != 2 or parts[0] != "tsp":
        raise ParseError(f"expected 'tsp <n>', got {header!r}", line=lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"bad city count in {header!r}", line=lineno) from None

    rows = []
    for i in range(n):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise ParseError(f"expected {n} matrix rows, found {len(rows)}") from None
        parts = line.split()
        if len(parts) != n:
            raise ParseError(f"row has {len(parts)} entries, expected {n}", line=lineno)
        try:
            row = [float(x) for x in parts]
        except ValueError:
            raise ParseError(f"bad matrix entry in {line!r}", line=lineno) from None
        if row[i] != 0:
            raise ParseError(f"diagonal entry d({i},{i}) must be 0", line=lineno)
        if any(x < 0 for x in row):
            raise ParseError("negative cost entry", line=lineno)
        rows.append(row)
    for lineno, line in lines:
        raise ParseError(f"unexpected trailing line {line!r}", line=lineno)
    return TspInstance(n, np.array(rows))


def serialize_graph(graph: Graph) -> str:
    """Canonical text form re-accepted by parse_graph_file."""
    out = [f"graph {graph.num_vertices} {len(graph.edges)}"]
    for (u, v, w) in graph.edges:
        a, b = min(u, v), max(u, v)
        out.append(f"e {a} {b} {w!r}")
    return "\n".join(out) + "\n"


def serialize_tsp(inst: TspInstance) -> str:
    """Canonical text form re-accepted by parse_tsp_file."""
    out = [f"tsp {inst.num_cities}"]
    for row in inst.d:
        out.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(out) + "\n"


# -- argument handling -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common_flags(sub):
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--problem", help="path to a graph/tsp problem file")
    src.add_argument("--catalog", help="name of a built-in instance")
    sub.add_argument("--kind", choices=KINDS, help="problem kind (required with --problem)")
    sub.add_argument("--init", dest="init", help="initial state kind")
    sub.add_argument("--mixer", help="mixer kind")
    sub.add_argument("--phase", help="phase separator kind")
    sub.add_argument("-p", type=int, default=1, help="ansatz depth (p_max for sweep)")
    sub.add_argument("--method", default="auto", help="optimizer method")
    sub.add_argument("--max-iter", type=int, default=400, dest="max_iter")
    sub.add_argument("--tol", type=float, default=1e-6)
    sub.add_argument("--restarts", type=int, default=4)
    sub.add_argument("--grid", type=int, default=64, help="grid resolution per axis")
    sub.add_argument("--shots", type=int, default=None, help="sample the objective with this many shots")
    sub.add_argument("--exact", action="store_true", help="force exact expectation objective")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--oracle", action="store_true", help="run the brute-force oracle")
    sub.add_argument("--out", help="write JSON here (atomically) instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="qaoasim", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = subs.add_parser("solve", help="optimize angles and emit a JSON run report")
    _add_common_flags(solve)
    solve.add_argument(
        "--dump-problem",
        action="store_true",
        help="print the canonical problem text and exit (debug)",
    )
    solve.set_defaults(func=_cmd_solve)

    verify = subs.add_parser("verify", help="run mixer/phase property checks")
    _add_common_flags(verify)
    verify.add_argument("--beta", type=float, default=math.pi / 4, help="mixer angle for the transition check")
    verify.set_defaults(func=_cmd_verify)

    sweep = subs.add_parser("sweep", help="depth sweep p=1..p with interpolation seeding")
    _add_common_flags(sweep)
    sweep.set_defaults(func=_cmd_sweep)

    oracle = subs.add_parser("oracle", help="print the brute-force report as JSON")
    _add_common_flags(oracle)
    oracle.set_defaults(func=_cmd_oracle)

    return parser


def _load_problem(args):
    """Returns (name, kind, problem, catalog_entry_or_None)."""
    if args.catalog:
        catalog = instance_catalog()
        if args.catalog not in catalog:
            raise ConfigurationError(
                f"unknown catalog instance {args.catalog!r}; "
                f"available: {', '.join(sorted(catalog))}"
            )
        entry = catalog[args.catalog]
        if args.kind and args.kind != entry.kind:
            raise ConfigurationError(
                f"catalog instance {entry.name} is kind {entry.kind}, not {args.kind}"
            )
        return entry.name, entry.kind, entry.problem, entry
    if not args.kind:
        raise ConfigurationError("--kind is required with --problem")
    if args.kind == "tsp":
        problem = TspProblem(parse_tsp_file(args.problem))
    elif args.kind == "maxbis":
        problem = MaxBisectionProblem(parse_graph_file(args.problem))
    else:
        problem = MaxCutProblem(parse_graph_file(args.problem))
    return args.problem, args.kind, problem, None


def _build_spec(args, kind, entry) -> AnsatzSpec:
    base = entry.default_spec if entry is not None else _KIND_DEFAULT_SPEC[kind]
    init = args.init or base.initial_state
    mixer = args.mixer or base.mixer
    phase = args.phase or base.phase
    dense_needed = mixer == "transverse_field" or phase == "zz_gates" or init == "plus"
    mode = "dense" if dense_needed else "subspace"
    if args.p < 1:
        raise ConfigurationError("depth p must be >= 1")
    return AnsatzSpec(
        initial_state=init,
        mixer=mixer,
        phase=phase,
        depth=args.p,
        simulation_mode=mode,
    )


def _build_config(args) -> OptimizerConfig:
    sampled = args.shots is not None and not args.exact
    return OptimizerConfig(
        method=args.method,
        max_iter=args.max_iter,
        tolerance=args.tol,
        restarts=args.restarts,
        grid_resolution=args.grid,
        seed=args.seed,
        evaluation_mode="sampled" if sampled else "exact",
        shots=args.shots if args.shots is not None else 1024,
    )


# -- JSON emission -----------------------------------------------------------------


def _run_payload(name, kind, problem, spec, result: RunResult, report, sampled: bool):
    ratio = result.approximation_ratio
    if ratio is not None and problem.sense == MINIMIZE:
        ratio = min(max(ratio, 0.0), 1.0)  # clamped in reporting only
    payload = {
        "problem": name,
        "kind": kind,
        "num_qubits": problem.num_qubits,
        "p": spec.depth,
        "angles": {
            "gamma": list(result.best_angles.gamma),
            "beta": list(result.best_angles.beta),
        },
        "expectation": result.best_expectation,
        "best_sample": {
            "bitstring": result.best_sample[0],
            "cost": result.best_sample[1],
        },
    }
    if sampled:
        payload["histogram"] = result.sample_histogram
    payload["approximation_ratio"] = ratio
    if report is not None:
        payload["oracle_optimum"] = report.optimum
    payload["optimizer"] = {
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "converged": result.converged,
    }
    payload["seed"] = result.seed
    payload["elapsed_ms"] = result.elapsed_ms
    return payload


def _emit(payload, out_path) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out_path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, out_path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _usage_error(exc) -> int:
    print(f"qaoasim: error: {exc}", file=sys.stderr)
    return 1


def _runtime_error(exc) -> int:
    print(f"qaoasim: runtime error: {exc}", file=sys.stderr)
    return 2


# -- commands -----------------------------------------------------------------------


def _cmd_solve(args) -> int:
    try:
        name, kind, problem, entry = _load_problem(args)
        spec = _build_spec(args, kind, entry)
        config = _build_config(args)
    except (ParseError, ConfigurationError, ValueError, OSError) as exc:
        return _usage_error(exc)
    if args.dump_problem:
        if kind == "tsp":
            sys.stdout.write(serialize_tsp(problem.instance))
        else:
            sys.stdout.write(serialize_graph(problem.graph))
        return 0
    try:
        report = brute_force(problem) if args.oracle else None
        result = vqa_loop(spec, problem, config, oracle_report=report)
        sampled = config.evaluation_mode == "sampled"
        _emit(_run_payload(name, kind, problem, spec, result, report, sampled), args.out)
    except Exception as exc:
        return _runtime_error(exc)
    return 0


def _cmd_sweep(args) -> int:
    try:
        name, kind, problem, entry = _load_problem(args)
        if args.p < 1:
            raise ConfigurationError("sweep needs p >= 1")
        spec = replace(_build_spec(args, kind, entry), depth=1)
        config = _build_config(args)
    except (ParseError, ConfigurationError, ValueError, OSError) as exc:
        return _usage_error(exc)
    try:
        report = brute_force(problem) if args.oracle else None
        results = depth_sweep(spec, problem, config, args.p, oracle_report=report)
        sampled = config.evaluation_mode == "sampled"
        runs = []
        for p, result in enumerate(results, start=1):
            spec_p = replace(spec, depth=p)
            runs.append(
                _run_payload(name, kind, problem, spec_p, result, report, sampled)
            )
        payload = {"runs": runs, "monotone": monotone_expectations(results, problem.sense)}
        _emit(payload, args.out)
    except Exception as exc:
        return _runtime_error(exc)
    return 0


def _cmd_oracle(args) -> int:
    try:
        name, kind, problem, _ = _load_problem(args)
    except (ParseError, ConfigurationError, ValueError, OSError) as exc:
        return _usage_error(exc)
    try:
        report = brute_force(problem)
        payload = {
            "problem": name,
            "kind": kind,
            "optimum": report.optimum,
            "argopt": report.argopt,
            "feasible_count": report.feasible_count,
            "uniform_mean": report.uniform_mean,
            "worst": report.worst,
        }
        _emit(payload, args.out)
    except Exception as exc:
        return _runtime_error(exc)
    return 0


def _cmd_verify(args) -> int:
    try:
        name, kind, problem, entry = _load_problem(args)
        spec = _build_spec(args, kind, entry)
    except (ParseError, ConfigurationError, ValueError, OSError) as exc:
        return _usage_error(exc)

    if kind == "tsp":
        r_max = problem.instance.num_cities
    else:
        r_max = problem.graph.num_vertices

    rows = []
    try:
        ok = transition_condition_check(spec, problem, args.beta, r_max)
        rows.append((f"transition_condition (beta={args.beta:g}, r<={r_max})", ok, ""))

        leak = _max_dense_leakage(spec, problem)
        rows.append(("feasibility_leakage (16-point beta grid)", leak < 1e-12, f"max={leak:.2e}"))

        if kind == "tsp":
            direct = tsp_phase_direct(problem.instance)
            closed = tsp_phase_diagonal(problem.instance).values
            err = float(np.max(np.abs(direct - closed)))
            rows.append(("phase_identity (direct vs closed form)", err < 1e-9, f"max_err={err:.2e}"))
    except ResourceLimitError as exc:
        return _runtime_error(exc)
    except Exception as exc:
        return _runtime_error(exc)

    width = max(len(label) for (label, _, _) in rows)
    all_ok = True
    for label, ok, detail in rows:
        status = "PASS" if ok else "FAIL"
        line = f"{label:<{width}}  {status}"
        print(f"{line}  {detail}".rstrip())
        all_ok &= ok
    return 0 if all_ok else 1


def _max_dense_leakage(spec: AnsatzSpec, problem) -> float:
    """Worst infeasible leakage of one dense-mode mixer application over a beta grid."""
    from .ansatz import build_initial

    dense_spec = replace(spec, simulation_mode="dense")
    mixer = build_mixer(dense_spec, problem, subspace=False)
    initial = build_initial(dense_spec, problem, subspace=False)
    worst = 0.0
    for beta in np.linspace(0.0, math.pi, 16, endpoint=False):
        state = initial.copy()
        mixer.apply(state, beta)
        worst = max(worst, infeasible_leakage(state, problem))
    return worst


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
