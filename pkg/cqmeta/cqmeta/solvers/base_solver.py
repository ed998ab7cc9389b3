"""
Base solver interface for iterative minimum-error POVM solvers.
"""

from abc import ABC, abstractmethod
from typing import List, Optional, Tuple
import logging

import numpy as np

from ..exceptions import ConvergenceError, ParameterError
from ..models.data_models import HyklReport, MaryProblem, Povm, SolverResult
from ..core.mary_test import hykl_residuals, success_probability


class BaseSolver(ABC):
    """Abstract base class for POVM solvers certified by the HYKL conditions."""

    check_interval = 25
    improvement_tol = 1e-9
    stall_tol = 1e-16
    stall_patience = 200
    polish_ratio = 1e-4
    polish_budget = 500

    def __init__(self, tol: float = 1e-8, max_iter: int = 20000, strict: bool = False):
        if tol <= 0:
            raise ParameterError(f"tol must be positive, got {tol}")
        if max_iter < 1:
            raise ParameterError(f"max_iter must be at least 1, got {max_iter}")
        self.tol = tol
        self.max_iter = max_iter
        self.strict = strict
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def initial_elements(self, problem: MaryProblem) -> List[np.ndarray]:
        """
        Starting point of the iteration.

        Args:
            problem: the M-ary problem

        Returns:
            List of M element matrices summing to identity
        """
        pass

    @abstractmethod
    def step(self, problem: MaryProblem, elements: List[np.ndarray]) -> List[np.ndarray]:
        """
        One update of the measurement.

        Args:
            problem: the M-ary problem
            elements: current element matrices

        Returns:
            Updated element matrices summing to identity
        """
        pass

    def refine(self, problem: MaryProblem, elements: List[np.ndarray]) -> Optional[List[np.ndarray]]:
        """
        Optional rounding of an iterate onto a certifiable POVM.

        Returns:
            Refined elements, or None if no refinement applies
        """
        return None

    def _try_refine(self, problem: MaryProblem, elements: List[np.ndarray],
                    report: HyklReport) -> Tuple[List[np.ndarray], HyklReport]:
        refined = self.refine(problem, elements)
        if refined is None:
            return elements, report
        refined_report = hykl_residuals(problem, refined, self.tol)
        if refined_report.passed and refined_report.max_residual < report.max_residual:
            return refined, refined_report
        return elements, report

    def solve(self, problem: MaryProblem) -> SolverResult:
        """
        Iterate until the HYKL residuals fall below tol * polish_ratio.

        Once the certificate passes at `tol`, at most `polish_budget` further
        iterations are spent tightening the residuals, so that quantities
        derived from the measurement (Lambda, mu0*) are accurate well below tol.

        Args:
            problem: the M-ary problem

        Returns:
            SolverResult with the final POVM and its report
        """
        elements = self.initial_elements(problem)
        error = 1.0 - success_probability(problem, elements)
        stalled = 0
        iterations = 0
        polish_left = self.polish_budget
        target = self.tol * self.polish_ratio
        report = hykl_residuals(problem, elements, self.tol)

        while report.max_residual > target and iterations < self.max_iter:
            if report.passed:
                if polish_left == 0:
                    break
                polish_left -= 1
            elements = self.step(problem, elements)
            iterations += 1
            new_error = 1.0 - success_probability(problem, elements)
            improvement = error - new_error
            error = new_error
            stalled = stalled + 1 if abs(improvement) <= self.stall_tol else 0

            if improvement <= self.improvement_tol or iterations % self.check_interval == 0:
                report = hykl_residuals(problem, elements, self.tol)
                elements, report = self._try_refine(problem, elements, report)
                error = 1.0 - success_probability(problem, elements)
                self.logger.debug(f"iteration {iterations}: error {error:.15g}, "
                                  f"max residual {report.max_residual:.3e}")
            if stalled >= self.stall_patience:
                self.logger.debug(f"Stopping after {iterations} iterations without progress")
                break

        report = hykl_residuals(problem, elements, self.tol)
        if report.max_residual > target:
            elements, report = self._try_refine(problem, elements, report)
            error = 1.0 - success_probability(problem, elements)
        if not report.passed:
            message = (f"Solver stopped after {iterations} iterations with HYKL residual "
                       f"{report.max_residual:.3e} > {self.tol:.1e}")
            if self.strict:
                raise ConvergenceError(message)
            self.logger.warning(message)
        povm = Povm.from_matrices(elements)
        return SolverResult(povm, report, iterations, min(max(error, 0.0), 1.0))
