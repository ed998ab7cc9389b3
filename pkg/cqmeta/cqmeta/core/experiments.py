"""
Command bodies of the command line front end.

ExperimentRunner turns a RunConfig into a result payload: the four-state
qubit example, the tight-spectrum curves, Bell code sweeps, code
certification and the optimal-POVM solver.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Tuple
import logging
import math

import numpy as np

from ..exceptions import CqMetaError
from ..models.data_models import (
    CertificateStatus, Command, DensityOperator, InputDistribution, MaryProblem, RunConfig,
)
from ..utils.descriptors import DescriptorLoader
from ..utils.serialization import ResultWriter
from .binary_test import cluster_sorted
from .channel import meta_converse, solve_code
from .closed_forms import BellFamily, bell_error_probability, bell_mu0, bell_setup
from .mary_test import (
    average_state, mu0_star, solve_optimal_povm, spectrum_thresholds, theorem1_value,
    tight_spectrum_argmax, tight_spectrum_objective,
)
from .quasi_perfect import certify, qp_error_probability

FIGURE1_T_MAX = 1.2
DEFAULT_PARAMS = (0.0, 0.1, 0.3, 0.5, 0.9)

SWEEP_COLUMNS = [
    "family", "n_qubits", "M", "param", "pe_solver", "pe_formula", "meta_converse",
    "closed_form", "status", "max_deviation", "error",
]
FIGURE1_COLUMNS = ["t", "objective_mu0star", "objective_mu0avg"]

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3


def example1_problem() -> MaryProblem:
    """Four qubit states with priors 2/5, 1/5, 1/5, 1/5."""
    states = [
        np.diag([1.0, 0.0]),
        0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]),
        0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]]),
        0.5 * np.eye(2),
    ]
    return MaryProblem(tuple(DensityOperator.from_matrix(s) for s in states), (0.4, 0.2, 0.2, 0.2))


class ExperimentRunner:
    """Runs one command of the command line front end."""

    def __init__(self, config: RunConfig, loader: Optional[DescriptorLoader] = None,
                 writer: Optional[ResultWriter] = None):
        config.validate()
        self.config = config
        self.loader = loader or DescriptorLoader()
        self.writer = writer or ResultWriter()
        self.logger = logging.getLogger(self.__class__.__name__)

    def run_example1(self) -> Tuple[Dict[str, Any], int]:
        """
        Solve the example problem and evaluate the binary-test bounds.

        Returns:
            (payload, exit code)
        """
        problem = example1_problem()
        povm, report, iterations = solve_optimal_povm(problem, self.config.tolerance, self.config.max_iter)
        star, c0 = mu0_star(problem, povm)
        avg = average_state(problem)
        t_star, tight_star = tight_spectrum_argmax(problem, star)
        t_avg, tight_avg = tight_spectrum_argmax(problem, avg)
        payload = {
            "command": Command.EXAMPLE1,
            "epsilon_star": 1.0 - c0,
            "hykl_passed": report.passed,
            "max_residual": report.max_residual,
            "iterations": iterations,
            "c0": c0,
            "mu0_star": star,
            "lambda": report.lambda_op,
            "povm": [element.matrix for element in povm.elements],
            "alpha_mu0star": theorem1_value(problem, star),
            "tight_spectrum_mu0star": tight_star,
            "t_mu0star": t_star,
            "avg_state": avg,
            "alpha_avg_state": theorem1_value(problem, avg),
            "tight_spectrum_avg_state": tight_avg,
            "t_avg_state": t_avg,
        }
        return payload, EXIT_OK if report.passed else EXIT_CONVERGENCE

    def run_figure1(self) -> Tuple[Dict[str, Any], int]:
        """Tight-spectrum objective curves for mu0* and the average state."""
        problem = example1_problem()
        povm, report, _ = solve_optimal_povm(problem, self.config.tolerance, self.config.max_iter)
        star, _ = mu0_star(problem, povm)
        avg = average_state(problem)
        grid = {float(t) for t in np.linspace(0.0, FIGURE1_T_MAX, self.config.t_steps)}
        for mu0 in (star, avg):
            grid.update(t for t in spectrum_thresholds(problem, mu0) if 0.0 <= t <= FIGURE1_T_MAX)
        rows = [
            {
                "t": t,
                "objective_mu0star": tight_spectrum_objective(problem, star, t),
                "objective_mu0avg": tight_spectrum_objective(problem, avg, t),
            }
            for t in cluster_sorted(grid)
        ]
        payload = {"command": Command.FIGURE1, "columns": FIGURE1_COLUMNS, "rows": rows}
        return payload, EXIT_OK if report.passed else EXIT_CONVERGENCE

    def _sweep_params(self) -> List[float]:
        if self.config.sweep is not None:
            return self.config.sweep.values()
        if BellFamily(self.config.family) is BellFamily.IDEAL:
            return [0.0]
        return list(DEFAULT_PARAMS)

    def sweep_row(self, M: int, param: float) -> Dict[str, Any]:
        """Every error value of one Bell code, plus its certificate status."""
        family = BellFamily(self.config.family)
        n_qubits = self.config.n_qubits
        row: Dict[str, Any] = {"family": family.value, "n_qubits": n_qubits, "M": M, "param": param}
        try:
            channel, code = bell_setup(family, n_qubits, M, param)
            mu0 = bell_mu0(family, n_qubits, param)
            result = solve_code(channel, code, self.config.tolerance, self.config.max_iter)
            certificate = certify(channel, code, mu0)
            values = {
                "pe_solver": result.error_probability,
                "pe_formula": qp_error_probability(channel, code, certificate.t_bar, mu0),
                "meta_converse": meta_converse(channel, InputDistribution.from_code(code), mu0, M),
                "closed_form": bell_error_probability(family, n_qubits, M, param),
            }
            row.update(values)
            row["status"] = certificate.status.value if result.converged else "not_converged"
            row["max_deviation"] = max(values.values()) - min(values.values())
            row["error"] = ""
        except CqMetaError as e:
            self._fail_row(row, e, "")
        except np.linalg.LinAlgError as e:
            self._fail_row(row, e, "not_converged")
        return row

    def _fail_row(self, row: Dict[str, Any], error: Exception, status: str) -> None:
        self.logger.warning(f"Sweep row M={row['M']}, param={row['param']} failed: {error}")
        row.update({column: math.nan for column in SWEEP_COLUMNS if column not in row})
        row["status"] = status
        row["error"] = str(error) or error.__class__.__name__

    def run_bell_sweep(self) -> Tuple[Dict[str, Any], int]:
        """
        Rows for every (M, param) pair, computed concurrently.

        Rows come back in grid order whatever the thread count.
        """
        tasks = [(M, param) for M in self.config.m_values for param in self._sweep_params()]
        self.logger.info(f"Sweeping {len(tasks)} Bell codes on {self.config.threads} threads")
        with ThreadPoolExecutor(max_workers=self.config.threads) as executor:
            rows = list(executor.map(lambda task: self.sweep_row(*task), tasks))
        payload = {"command": Command.BELL_SWEEP, "columns": SWEEP_COLUMNS, "rows": rows}
        if any(row["error"] and row["status"] != "not_converged" for row in rows):
            return payload, EXIT_INPUT
        if any(row["status"] == "not_converged" for row in rows):
            return payload, EXIT_CONVERGENCE
        if any(row["status"] == CertificateStatus.NEITHER.value for row in rows):
            return payload, EXIT_NEGATIVE
        return payload, EXIT_OK

    def run_certify(self) -> Tuple[Dict[str, Any], int]:
        channel, code = self.loader.load_channel_and_code(self.config.channel_path, self.config.code_path)
        mu = self.loader.resolve_mu(self.config.mu_spec, channel, code)
        certificate = certify(channel, code, mu)
        payload: Dict[str, Any] = {"command": Command.CERTIFY, "M": code.size, "kind": channel.kind}
        payload.update(certificate.to_dict())
        if certificate.is_quasi_perfect and certificate.symmetric:
            payload["pe_formula"] = qp_error_probability(channel, code, certificate.t_bar, mu)
        elif not certificate.symmetric:
            self.logger.warning("Channel is not symmetric for this mu; the error formula is not reported")
        return payload, EXIT_OK if certificate.is_quasi_perfect else EXIT_NEGATIVE

    def run_solve(self) -> Tuple[Dict[str, Any], int]:
        problem = self.loader.load_problem(self.config.problem_path)
        povm, report, iterations = solve_optimal_povm(problem, self.config.tolerance, self.config.max_iter)
        payload: Dict[str, Any] = {
            "command": Command.SOLVE,
            "error_probability": 1.0 - report.lambda_op.trace(),
            "hykl_passed": report.passed,
            "max_residual": report.max_residual,
            "iterations": iterations,
            "povm": [element.matrix for element in povm.elements],
            "lambda": report.lambda_op,
        }
        return payload, EXIT_OK if report.passed else EXIT_CONVERGENCE

    def execute(self) -> Tuple[Dict[str, Any], int]:
        """Run the configured command without writing anything."""
        handlers = {
            Command.EXAMPLE1: self.run_example1,
            Command.FIGURE1: self.run_figure1,
            Command.BELL_SWEEP: self.run_bell_sweep,
            Command.CERTIFY: self.run_certify,
            Command.SOLVE: self.run_solve,
        }
        self.logger.info(f"Running {self.config.command.value}")
        payload, code = handlers[self.config.command]()
        self.logger.info(f"{self.config.command.value} finished with exit code {code}")
        return payload, code

    def run(self) -> int:
        """Execute the command, write its result and return the exit code."""
        payload, code = self.execute()
        self.writer.write(payload, self.config.output_format, self.config.output_path)
        return code
