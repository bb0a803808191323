import json
import math

import numpy as np
import pytest

from densitycompat import matrixio
from densitycompat.cli import (
    EXIT_CONTRADICTION,
    EXIT_DEGENERATE,
    EXIT_INPUT,
    EXIT_OK,
    InputError,
    main,
    parse_angle,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


@pytest.fixture
def write(tmp_path):
    def _write(name, m):
        path = tmp_path / name
        matrixio.write_matrix(path, np.asarray(m, dtype=complex))
        return str(path)

    return _write


class TestParseAngle:
    @pytest.mark.parametrize(
        "text,value",
        [("pi/8", math.pi / 8), ("PI/4", math.pi / 4), ("3*pi/16", 3 * math.pi / 16), ("0.5*pi", math.pi / 2), ("0.3", 0.3), ("pi", math.pi)],
    )
    def test_forms(self, text, value):
        assert parse_angle(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["pi/0", "tau", "nan", "inf", ""])
    def test_rejects(self, text):
        with pytest.raises(InputError):
            parse_angle(text)


class TestCounterexample:
    def test_hadamard(self, capsys):
        code, rep = run_json(capsys, "counterexample")
        assert code == EXIT_OK
        assert rep["commute"] is False and rep["product_nonzero"] is True
        assert [o["outcome"] for o in rep["outcomes"]] == [0, 1]
        for o in rep["outcomes"]:
            assert o["commutator_norm"] == pytest.approx(math.sqrt(2) / 4, abs=1e-12)
            assert o["product_norm"] == pytest.approx(math.sqrt(5 / 8), abs=1e-12)
        assert rep["blind_direction"]["blind"] == pytest.approx([0, 1, 0], abs=1e-12)

    def test_emitted_matrices_round_trip(self, capsys):
        _, rep = run_json(capsys, "counterexample", "--outcome", "0")
        comm = matrixio.matrix_from_json(rep["outcomes"][0]["commutator"])
        assert np.allclose(comm, 0.25 * np.array([[0, 1], [-1, 0]]), atol=1e-15)
        bob = matrixio.matrix_from_json(rep["bob_state"])
        assert np.allclose(bob, np.diag([math.cos(math.pi / 8) ** 2, math.sin(math.pi / 8) ** 2]))

    def test_identity_commutes(self, capsys):
        code, rep = run_json(capsys, "counterexample", "--unitary", "identity")
        assert code == EXIT_OK and rep["commute"] is True and rep["blind_direction"] is None

    def test_sampled_outcome(self, capsys):
        _, rep = run_json(capsys, "counterexample", "--outcome", "sample", "--seed", "4")
        assert len(rep["outcomes"]) == 1

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "counterexample")
        assert code == EXIT_OK
        assert "first condition (commute): False" in out
        assert "second condition (non-zero product): True" in out

    def test_unitary_file(self, capsys, write):
        path = write("x.json", [[0, 1], [1, 0]])
        code, rep = run_json(capsys, "counterexample", "--unitary", path)
        assert code == EXIT_OK and rep["commute"] is True

    def test_scenario_file(self, capsys, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"theta": 0.3, "unitary": "hadamard", "seed": 2, "shots": 5}))
        _, rep = run_json(capsys, "counterexample", "--scenario", str(path))
        assert rep["theta"] == 0.3 and rep["seed"] == 2

    @pytest.mark.parametrize("theta", ["1.0", "-0.1", "abc"])
    def test_bad_theta(self, capsys, theta):
        code, rep = run_json(capsys, "counterexample", "--theta", theta)
        assert code == EXIT_INPUT and "error" in rep

    def test_impossible_outcome(self, capsys):
        code, _, err = run(capsys, "counterexample", "--theta", "0", "--unitary", "identity", "--outcome", "1")
        assert code == EXIT_INPUT and "error" in err


class TestCompat:
    def test_incompatible(self, capsys, write):
        a, b = write("a.json", np.diag([1, 0])), write("b.json", np.diag([0, 1]))
        code, rep = run_json(capsys, "compat", a, b)
        assert code == EXIT_CONTRADICTION and rep["verdict"] == "incompatible"
        assert rep["witness"]["alice_prob"] == pytest.approx(0, abs=1e-14)

    def test_compatible(self, capsys, write):
        a, b = write("a.json", np.eye(2) / 2), write("b.json", np.diag([0.2, 0.8]))
        code, rep = run_json(capsys, "compat", a, b)
        assert code == EXIT_OK and rep["verdict"] == "compatible" and rep["witness"] is None

    def test_marginal(self, capsys, write):
        a, b = write("a.json", np.diag([1 - 1e-9, 1e-9])), write("b.json", np.diag([1e-9, 1 - 1e-9]))
        code, rep = run_json(capsys, "compat", a, b, "--tol", "1e-9")
        assert code == EXIT_OK and rep["verdict"] == "marginal"

    def test_witness_command(self, capsys, write):
        a, b = write("a.json", np.diag([1, 0, 0])), write("b.json", np.diag([0, 0.5, 0.5]))
        code, rep = run_json(capsys, "witness", a, b)
        assert code == EXIT_CONTRADICTION
        p = matrixio.matrix_from_json(rep["witness"]["effects"][0])
        assert np.allclose(p, np.diag([0, 1, 1]), atol=1e-14)

    def test_invalid_density_names_invariant(self, capsys, write):
        a, b = write("a.json", np.diag([1.5, -0.5])), write("b.json", np.eye(2) / 2)
        code, rep = run_json(capsys, "compat", a, b)
        assert code == EXIT_INPUT and "psd" in rep["error"]

    def test_trace_violation(self, capsys, write):
        a, b = write("a.json", np.eye(2)), write("b.json", np.eye(2) / 2)
        code, rep = run_json(capsys, "compat", a, b)
        assert code == EXIT_INPUT and "trace" in rep["error"]

    def test_dimension_mismatch(self, capsys, write):
        a, b = write("a.json", np.eye(2) / 2), write("b.json", np.eye(3) / 3)
        assert run_json(capsys, "compat", a, b)[0] == EXIT_INPUT

    def test_malformed_file(self, capsys, tmp_path, write):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dim": 2, "entries": [[NaN, 0]]}')
        assert run_json(capsys, "compat", str(bad), write("b.json", np.eye(2) / 2))[0] == EXIT_INPUT
        assert run_json(capsys, "compat", str(tmp_path / "missing.json"), str(bad))[0] == EXIT_INPUT


class TestBloch:
    def test_hadamard(self, capsys):
        code, rep = run_json(capsys, "bloch")
        assert code == EXIT_OK and rep["blind"] == pytest.approx([0, 1, 0], abs=1e-12)
        assert rep["p"] == pytest.approx(0.5)

    def test_identity_degenerate(self, capsys):
        code, rep = run_json(capsys, "bloch", "--unitary", "identity")
        assert code == EXIT_DEGENERATE and rep["degenerate"] is True


class TestSimulate:
    def test_single_shot(self, capsys):
        code, rep = run_json(capsys, "simulate", "--shots", "1")
        assert code == EXIT_OK and rep["freq_up"] in (0.0, 1.0)

    def test_blind_direction(self, capsys):
        code, rep = run_json(capsys, "simulate", "--shots", "20000")
        assert code == EXIT_OK and rep["expected"] == pytest.approx(0.5, abs=1e-12) and rep["pass"]

    def test_explicit_direction(self, capsys):
        _, rep = run_json(capsys, "simulate", "--direction", "0,0,2", "--shots", "100")
        assert rep["direction"] == [0.0, 0.0, 1.0]

    def test_degenerate(self, capsys):
        code, _ = run_json(capsys, "simulate", "--unitary", "identity", "--shots", "10")
        assert code == EXIT_DEGENERATE

    @pytest.mark.parametrize("extra", [["--shots", "0"], ["--direction", "0,0,0"], ["--direction", "up"], ["--seed", "-3"], ["--tol", "-1"]])
    def test_bad_input(self, capsys, extra):
        assert run_json(capsys, "simulate", *extra)[0] == EXIT_INPUT


def test_usage_error(capsys):
    assert main(["nonsense"]) == EXIT_INPUT
    capsys.readouterr()
