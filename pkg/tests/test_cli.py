import json
import re

import numpy as np
import pytest

from qaoasim.cli import (
    main,
    parse_graph_file,
    parse_tsp_file,
    serialize_graph,
    serialize_tsp,
)
from qaoasim.errors import ParseError

K3_TEXT = """\
# complete graph on three vertices
graph 3 3
e 0 1
e 1 2
e 0 2
"""

TSP3_TEXT = """\
tsp 3
0 1 1
1 0 1
1 1 0
"""


@pytest.fixture
def k3_file(tmp_path):
    path = tmp_path / "k3.graph"
    path.write_text(K3_TEXT)
    return str(path)


@pytest.fixture
def tsp3_file(tmp_path):
    path = tmp_path / "unit3.tsp"
    path.write_text(TSP3_TEXT)
    return str(path)


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_elapsed(text: str) -> str:
    return re.sub(r'"elapsed_ms": \d+', '"elapsed_ms": X', text)


class TestGraphParsing:
    def test_k3(self, k3_file):
        graph = parse_graph_file(k3_file)
        assert graph.num_vertices == 3
        assert [w for (_, _, w) in graph.edges] == [1.0, 1.0, 1.0]

    def test_weighted_edge(self, tmp_path):
        path = tmp_path / "w.graph"
        path.write_text("graph 2 1\ne 0 1 2.5\n")
        assert parse_graph_file(str(path)).edges == ((0, 1, 2.5),)

    def test_index_out_of_range(self, tmp_path):
        path = tmp_path / "bad.graph"
        path.write_text("graph 2 1\ne 0 2\n")
        with pytest.raises(ParseError, match="out of range"):
            parse_graph_file(str(path))

    def test_duplicate_edge(self, tmp_path):
        path = tmp_path / "dup.graph"
        path.write_text("graph 3 2\ne 0 1\ne 1 0\n")
        with pytest.raises(ParseError, match="duplicate"):
            parse_graph_file(str(path))

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "mal.graph"
        path.write_text("graph 2 1\nedge 0 1\n")
        with pytest.raises(ParseError, match="line 2"):
            parse_graph_file(str(path))

    def test_round_trip(self, k3_file):
        graph = parse_graph_file(k3_file)
        text = serialize_graph(graph)
        reparsed = parse_graph_file_from_text(text)
        assert reparsed.edges == graph.edges


def parse_graph_file_from_text(text, tmp=None):
    import tempfile, os

    fd, path = tempfile.mkstemp(suffix=".graph")
    try:
        with os.fdopen(fd, "w") as h:
            h.write(text)
        return parse_graph_file(path)
    finally:
        os.unlink(path)


class TestTspParsing:
    def test_unit3(self, tsp3_file):
        inst = parse_tsp_file(tsp3_file)
        assert inst.num_cities == 3
        assert np.allclose(inst.d, np.ones((3, 3)) - np.eye(3))

    def test_asymmetric_accepted(self, tmp_path):
        path = tmp_path / "asym.tsp"
        path.write_text("tsp 2\n0 2\n3 0\n")
        inst = parse_tsp_file(str(path))
        assert inst.d[0, 1] == 2 and inst.d[1, 0] == 3

    def test_nonzero_diagonal_rejected(self, tmp_path):
        path = tmp_path / "diag.tsp"
        path.write_text("tsp 2\n1 2\n3 0\n")
        with pytest.raises(ParseError, match="diagonal"):
            parse_tsp_file(str(path))

    def test_wrong_row_count(self, tmp_path):
        path = tmp_path / "short.tsp"
        path.write_text("tsp 3\n0 1 1\n1 0 1\n")
        with pytest.raises(ParseError, match="expected 3 matrix rows"):
            parse_tsp_file(str(path))

    def test_round_trip(self, tsp3_file, tmp_path):
        inst = parse_tsp_file(tsp3_file)
        path = tmp_path / "echo.tsp"
        path.write_text(serialize_tsp(inst))
        again = parse_tsp_file(str(path))
        assert np.array_equal(inst.d, again.d)


class TestSolveCommand:
    def test_k4_oracle_ratio(self, capsys):
        code, out, err = run_cli(
            ["solve", "--catalog", "k4", "-p", "1", "--oracle", "--seed", "1"], capsys
        )
        assert code == 0, err
        payload = json.loads(out)
        assert payload["problem"] == "k4"
        assert payload["kind"] == "maxcut"
        assert payload["num_qubits"] == 4
        assert payload["approximation_ratio"] >= 0.6924
        assert payload["oracle_optimum"] == 4.0
        assert payload["optimizer"]["evaluations"] >= payload["optimizer"]["iterations"]
        assert "histogram" not in payload  # exact mode

    def test_field_schema_exact_mode(self, capsys):
        code, out, _ = run_cli(
            ["solve", "--catalog", "k3", "--oracle", "--seed", "0"], capsys
        )
        payload = json.loads(out)
        assert list(payload) == [
            "problem", "kind", "num_qubits", "p", "angles", "expectation",
            "best_sample", "approximation_ratio", "oracle_optimum", "optimizer",
            "seed", "elapsed_ms",
        ]
        assert list(payload["angles"]) == ["gamma", "beta"]
        assert list(payload["best_sample"]) == ["bitstring", "cost"]
        assert list(payload["optimizer"]) == ["iterations", "evaluations", "converged"]

    def test_histogram_present_in_sampled_mode(self, capsys):
        code, out, _ = run_cli(
            ["solve", "--catalog", "k3", "--shots", "128", "--seed", "0",
             "--method", "nelder_mead", "--max-iter", "20", "--restarts", "1"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert "histogram" in payload
        assert sum(payload["histogram"].values()) == 128

    def test_seed_determinism(self, capsys):
        args = ["solve", "--catalog", "k3", "--seed", "7", "--oracle"]
        _, out1, _ = run_cli(args, capsys)
        _, out2, _ = run_cli(args, capsys)
        assert strip_elapsed(out1) == strip_elapsed(out2)
        assert out1 != "" and json.loads(out1)["seed"] == 7

    def test_missing_problem_file(self, capsys):
        code, out, err = run_cli(
            ["solve", "--problem", "/nonexistent.graph", "--kind", "maxcut"], capsys
        )
        assert code == 1
        assert err != ""

    def test_unknown_catalog(self, capsys):
        code, _, err = run_cli(["solve", "--catalog", "k99"], capsys)
        assert code == 1
        assert "unknown catalog" in err

    def test_kind_required_with_file(self, k3_file, capsys):
        code, _, err = run_cli(["solve", "--problem", k3_file], capsys)
        assert code == 1
        assert "--kind" in err

    def test_out_file_written_atomically(self, k3_file, tmp_path, capsys):
        out_path = tmp_path / "run.json"
        code, out, _ = run_cli(
            ["solve", "--problem", k3_file, "--kind", "maxcut", "--seed", "2",
             "--out", str(out_path)],
            capsys,
        )
        assert code == 0
        assert out == ""
        payload = json.loads(out_path.read_text())
        assert payload["problem"] == k3_file
        assert not list(tmp_path.glob("*.tmp"))

    def test_dump_problem_round_trip(self, k3_file, tmp_path, capsys):
        code, out, _ = run_cli(
            ["solve", "--problem", k3_file, "--kind", "maxcut", "--dump-problem"],
            capsys,
        )
        assert code == 0
        echoed = tmp_path / "echo.graph"
        echoed.write_text(out)
        graph = parse_graph_file(str(echoed))
        assert graph.edges == parse_graph_file(k3_file).edges

    def test_maxbis_solve_subspace(self, capsys):
        code, out, _ = run_cli(
            ["solve", "--catalog", "c4_maxbis", "--seed", "4", "--oracle",
             "--method", "nelder_mead", "--max-iter", "150", "--restarts", "2"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["kind"] == "maxbis"
        assert payload["expectation"] > 8 / 3  # uniform mean over bisections
        assert payload["best_sample"]["bitstring"] in ("0101", "1010")

    def test_p_zero_usage_error(self, capsys):
        code, _, err = run_cli(["solve", "--catalog", "k3", "-p", "0"], capsys)
        assert code == 1

    def test_flat_landscape_ratio_is_runtime_error(self, capsys):
        # tsp3_unit has worst == optimum, so the oracle ratio is undefined
        code, _, err = run_cli(
            ["solve", "--catalog", "tsp3_unit", "--oracle", "--seed", "1",
             "--method", "nelder_mead", "--max-iter", "10", "--restarts", "1"],
            capsys,
        )
        assert code == 2
        assert "flat" in err


class TestVerifyCommand:
    def test_maxbis_all_pass(self, capsys):
        code, out, _ = run_cli(["verify", "--catalog", "c4_maxbis"], capsys)
        assert code == 0
        assert "FAIL" not in out
        assert "transition_condition" in out and "feasibility_leakage" in out

    def test_tsp_phase_identity(self, capsys):
        code, out, _ = run_cli(["verify", "--catalog", "tsp3_unit"], capsys)
        assert code == 0
        assert "phase_identity" in out
        assert "FAIL" not in out

    def test_zero_beta_fails_transition(self, capsys):
        code, out, _ = run_cli(
            ["verify", "--catalog", "k3", "--beta", "0"], capsys
        )
        assert code == 1
        assert "FAIL" in out


class TestSweepCommand:
    def test_k3_monotone(self, capsys):
        code, out, _ = run_cli(
            ["sweep", "--catalog", "k3", "-p", "3", "--seed", "5"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["monotone"] is True
        assert [run["p"] for run in payload["runs"]] == [1, 2, 3]

    def test_tsp_unit_flat(self, capsys):
        code, out, _ = run_cli(
            ["sweep", "--catalog", "tsp3_unit", "-p", "2", "--seed", "5",
             "--method", "nelder_mead", "--max-iter", "30", "--restarts", "1"],
            capsys,
        )
        payload = json.loads(out)
        for run in payload["runs"]:
            assert run["expectation"] == pytest.approx(3.0, abs=1e-9)

    def test_p_zero_rejected(self, capsys):
        code, _, err = run_cli(["sweep", "--catalog", "k3", "-p", "0"], capsys)
        assert code == 1


class TestOracleCommand:
    def test_k33(self, capsys):
        code, out, _ = run_cli(["oracle", "--catalog", "k33"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["optimum"] == 9.0
        assert payload["feasible_count"] == 64

    def test_file_problem(self, tsp3_file, capsys):
        code, out, _ = run_cli(
            ["oracle", "--problem", tsp3_file, "--kind", "tsp"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["optimum"] == 3.0
        assert payload["feasible_count"] == 6


class TestArgparseBehavior:
    def test_mutually_exclusive_sources(self, k3_file, capsys):
        code, _, err = run_cli(
            ["solve", "--problem", k3_file, "--catalog", "k3"], capsys
        )
        assert code == 1

    def test_missing_source(self, capsys):
        code, _, err = run_cli(["solve"], capsys)
        assert code == 1
