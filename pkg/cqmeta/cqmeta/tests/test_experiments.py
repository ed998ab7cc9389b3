import json

import numpy as np
import pytest

from ..core import experiments as experiments_module
from ..core.experiments import *
from ..exceptions import SymmetryError
from ..models.data_models import Command, RunConfig, SweepGrid

EPSILON_STAR = 7.0 / 15.0


def _config(command, **kwargs):
    kwargs.setdefault("threads", 1)
    return RunConfig(command=command, **kwargs)


def _write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestExample:
    """Test cases for the example1 and figure1 commands"""

    @pytest.fixture(scope="class")
    def example(self):
        return ExperimentRunner(_config(Command.EXAMPLE1)).execute()

    def test_example1_values(self, example):
        payload, code = example
        assert code == EXIT_OK
        assert payload["hykl_passed"]
        assert payload["epsilon_star"] == pytest.approx(EPSILON_STAR, abs=1e-8)
        assert payload["alpha_mu0star"] == pytest.approx(EPSILON_STAR, abs=1e-6)
        assert payload["tight_spectrum_mu0star"] == pytest.approx(EPSILON_STAR, abs=1e-6)
        assert 0.4566 <= payload["alpha_avg_state"] <= 0.4576
        assert 0.4280 <= payload["tight_spectrum_avg_state"] <= 0.4290
        np.testing.assert_allclose(payload["mu0_star"].matrix, np.diag([0.75, 0.25]), atol=1e-8)
        np.testing.assert_allclose(payload["avg_state"].matrix, np.diag([0.7, 0.3]), atol=1e-12)

    def test_figure1_rows(self):
        payload, code = ExperimentRunner(_config(Command.FIGURE1, t_steps=13)).execute()
        assert code == EXIT_OK
        assert payload["columns"] == FIGURE1_COLUMNS
        rows = payload["rows"]
        ts = [row["t"] for row in rows]
        assert ts == sorted(ts)
        assert all(b - a > 1e-9 for a, b in zip(ts, ts[1:]))
        assert sum(1 for t in ts if abs(t - 8.0 / 15.0) < 1e-6) == 1
        assert ts[0] == 0.0
        assert ts[-1] == pytest.approx(FIGURE1_T_MAX)
        assert rows[0]["objective_mu0star"] == pytest.approx(0.0, abs=1e-12)
        assert max(row["objective_mu0star"] for row in rows) == pytest.approx(EPSILON_STAR, abs=1e-6)
        assert 0.4280 <= max(row["objective_mu0avg"] for row in rows) <= 0.4290


class TestBellSweep:
    """Test cases for the bell_sweep command"""

    @pytest.mark.parametrize("family, grid", [
        ("ideal", None),
        ("depolarizing", SweepGrid("p", 0.0, 0.9, 4)),
        ("erasure", SweepGrid("epsilon", 0.0, 1.0, 3)),
    ])
    def test_two_qubit_sweep(self, family, grid):
        params = grid.values() if grid is not None else [0.0]
        runner = ExperimentRunner(_config(Command.BELL_SWEEP, family=family, sweep=grid, threads=2))
        payload, code = runner.execute()
        assert code == EXIT_OK
        rows = payload["rows"]
        assert [(row["M"], row["param"]) for row in rows] == [(M, p) for M in (4, 6, 8, 16) for p in params]
        for row in rows:
            assert row["error"] == ""
            assert row["status"] in ("perfect", "quasi_perfect")
            assert row["max_deviation"] <= 1e-7
            assert row["pe_solver"] == pytest.approx(row["closed_form"], abs=1e-7)

    def test_ideal_four_codewords_are_perfect(self):
        runner = ExperimentRunner(_config(Command.BELL_SWEEP, m_values=[4]))
        row = runner.sweep_row(4, 0.0)
        assert row["status"] == "perfect"
        assert row["closed_form"] == pytest.approx(0.0)

    @pytest.mark.parametrize("family, n_qubits, M, param", [
        ("ideal", 3, 16, 0.0),
        ("depolarizing", 3, 8, 0.3),
        ("erasure", 3, 24, 0.5),
        ("depolarizing", 4, 32, 0.1),
    ])
    def test_more_qubits(self, family, n_qubits, M, param):
        runner = ExperimentRunner(_config(Command.BELL_SWEEP, family=family, n_qubits=n_qubits, m_values=[M]))
        row = runner.sweep_row(M, param)
        assert row["error"] == ""
        assert row["status"] in ("perfect", "quasi_perfect")
        assert row["max_deviation"] <= 1e-7

    def test_invalid_size_reported_per_row(self):
        runner = ExperimentRunner(_config(Command.BELL_SWEEP, m_values=[5]))
        payload, code = runner.execute()
        assert code == EXIT_INPUT
        assert payload["rows"][0]["error"]

    def test_rows_independent_of_thread_count(self):
        serial, _ = ExperimentRunner(_config(Command.BELL_SWEEP, family="erasure", m_values=[4, 8],
                                             sweep=SweepGrid("epsilon", 0.1, 0.3, 2))).execute()
        parallel, _ = ExperimentRunner(_config(Command.BELL_SWEEP, family="erasure", m_values=[4, 8],
                                               sweep=SweepGrid("epsilon", 0.1, 0.3, 2), threads=4)).execute()
        assert serial["rows"] == parallel["rows"]

    def test_linear_algebra_failure_reported_per_row(self, monkeypatch):
        def singular(*args, **kwargs):
            raise np.linalg.LinAlgError("Singular matrix")

        monkeypatch.setattr(experiments_module, "solve_code", singular)
        runner = ExperimentRunner(_config(Command.BELL_SWEEP, m_values=[4]))
        payload, code = runner.execute()
        assert code == EXIT_CONVERGENCE
        row = payload["rows"][0]
        assert row["status"] == "not_converged"
        assert "Singular" in row["error"]
        assert np.isnan(row["pe_solver"])


class TestDescriptorCommands:
    """Test cases for the certify and solve commands"""

    def test_certify_bell_code(self, tmp_path):
        channel = _write_json(tmp_path / "channel.json", {"kind": "depolarizing", "n_qubits": 2, "p": 0.3})
        code = _write_json(tmp_path / "code.json", {"kind": "bell", "M": 8})
        payload, exit_code = ExperimentRunner(_config(Command.CERTIFY, channel_path=channel,
                                                      code_path=code)).execute()
        assert exit_code == EXIT_OK
        assert payload["status"] == "quasi_perfect"
        assert payload["t_bar"] == pytest.approx(3.1)
        assert payload["pe_formula"] == pytest.approx(0.6125)

    def test_certify_orthogonal_states(self, tmp_path):
        channel = _write_json(tmp_path / "channel.json", {
            "kind": "pure",
            "amplitudes": {"a": [1, 0, 0, 0], "b": [0, 1, 0, 0], "c": [0, 0, 1, 0]},
        })
        code = _write_json(tmp_path / "code.json", {"kind": "explicit", "codewords": ["a", "b", "c"]})
        payload, exit_code = ExperimentRunner(_config(Command.CERTIFY, channel_path=channel,
                                                      code_path=code)).execute()
        assert exit_code == EXIT_NEGATIVE
        assert payload["status"] == "neither"
        assert "pe_formula" not in payload

    def test_certify_asymmetric_channel_skips_formula(self, tmp_path):
        channel = _write_json(tmp_path / "channel.json", {
            "kind": "pure",
            "amplitudes": {"a": [1, 0], "b": [0, 1]},
        })
        code = _write_json(tmp_path / "code.json", {"kind": "explicit", "codewords": ["a", "b"]})
        mu = _write_json(tmp_path / "mu.json", {"matrix": [[0.7, 0], [0, 0.3]]})
        payload, exit_code = ExperimentRunner(_config(Command.CERTIFY, channel_path=channel, code_path=code,
                                                      mu_spec=str(mu))).execute()
        assert exit_code in (EXIT_OK, EXIT_NEGATIVE)
        assert not payload["symmetric"]
        assert "pe_formula" not in payload

    def test_solve_problem_file(self, tmp_path):
        problem = _write_json(tmp_path / "problem.json", {
            "states": [[[1, 0], [0, 0]], [[0.5, 0.5], [0.5, 0.5]], [[0.5, -0.5], [-0.5, 0.5]], [[0.5, 0], [0, 0.5]]],
            "priors": [0.4, 0.2, 0.2, 0.2],
        })
        payload, exit_code = ExperimentRunner(_config(Command.SOLVE, problem_path=problem)).execute()
        assert exit_code == EXIT_OK
        assert payload["error_probability"] == pytest.approx(EPSILON_STAR, abs=1e-8)

    def test_run_writes_output(self, tmp_path):
        out = tmp_path / "result.json"
        channel = _write_json(tmp_path / "channel.json", {"kind": "pure", "n_qubits": 2})
        code = _write_json(tmp_path / "code.json", {"kind": "bell", "M": 4})
        exit_code = ExperimentRunner(_config(Command.CERTIFY, channel_path=channel, code_path=code,
                                             output_path=out)).run()
        assert exit_code == EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["schema"] == 1
        assert document["status"] == "perfect"


def test_command_line_exit_codes(tmp_path):
    from main import main

    assert main(["solve"]) == EXIT_INPUT
    assert main(["bell_sweep", "--m-values", "4,x"]) == EXIT_INPUT
    channel = _write_json(tmp_path / "channel.json", {"kind": "pure", "n_qubits": 2})
    code = _write_json(tmp_path / "code.json", {"kind": "bell", "M": 8})
    out = tmp_path / "certificate.csv"
    assert main(["certify", "--channel", str(channel), "--code", str(code),
                 "--format", "csv", "--out", str(out), "--threads", "1"]) == EXIT_OK
    header, row = out.read_text(encoding="utf-8").splitlines()
    assert "status" in header.split(",")
    assert "quasi_perfect" in row.split(",")

    mu = _write_json(tmp_path / "mu.json", [[0.7, 0], [0, 0.3]])
    asymmetric = _write_json(tmp_path / "asymmetric.json", {"kind": "pure", "amplitudes": {"a": [1, 0], "b": [0, 1]}})
    pair = _write_json(tmp_path / "pair.json", {"kind": "explicit", "codewords": ["a", "b"]})
    assert main(["certify", "--channel", str(asymmetric), "--code", str(pair), "--mu", str(mu),
                 "--format", "json", "--out", str(tmp_path / "out.json"), "--threads", "1"]) in (EXIT_OK, EXIT_NEGATIVE)


def test_command_line_maps_library_errors_to_input_code(monkeypatch):
    from main import main

    def broken(self):
        raise SymmetryError("channel is not symmetric")

    monkeypatch.setattr(ExperimentRunner, "execute", broken)
    assert main(["example1"]) == EXIT_INPUT
