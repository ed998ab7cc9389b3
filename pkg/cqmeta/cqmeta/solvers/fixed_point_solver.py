"""
Fixed-point iteration for the minimum-error measurement.

With R_i = p_i tau_i and S = sum_j R_j Pi_j R_j, every step maps
Pi_i -> S^{-1/2} R_i Pi_i R_i S^{-1/2}. The inverse square root is taken on
supp(S); the missing identity I - sum_i Pi_i is handed to the element with the
largest overlap tr(R_i .).
"""

from typing import List, Optional

import numpy as np
import scipy.linalg

from ..core.hermitian import psd_power
from ..core.mary_test import hykl_residuals
from ..models.data_models import MaryProblem
from .base_solver import BaseSolver

REFINE_LEVELS = (1e-3, 1e-5, 1e-7, 1e-9, 1e-11)


def _hermitize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


class FixedPointSolver(BaseSolver):
    """Multiplicative fixed-point solver started from Pi_i = I / M."""

    def initial_elements(self, problem: MaryProblem) -> List[np.ndarray]:
        identity = np.eye(problem.dim, dtype=complex)
        return [identity / problem.size for _ in range(problem.size)]

    def step(self, problem: MaryProblem, elements: List[np.ndarray]) -> List[np.ndarray]:
        weighted = problem.weighted_states()
        s = _hermitize(sum(r @ e @ r for r, e in zip(weighted, elements)))
        inv_sqrt = psd_power(s, -0.5)
        updated = [_hermitize(inv_sqrt @ r @ e @ r @ inv_sqrt) for r, e in zip(weighted, elements)]
        deficit = _hermitize(np.eye(problem.dim) - sum(updated))
        if np.linalg.norm(deficit) > 1e-14:
            overlaps = [float(np.real(np.sum(r * deficit.T))) for r in weighted]
            updated[int(np.argmax(overlaps))] += deficit
        return updated

    def refine(self, problem: MaryProblem, elements: List[np.ndarray]) -> Optional[List[np.ndarray]]:
        """
        Restrict every element to the near-kernel of Lambda - R_i and renormalize.

        Optimal elements live in the kernel of Lambda - R_i, so a converging
        iterate rounds onto an exactly stationary measurement once the kernel
        threshold separates it from the rest of the spectrum. Every threshold in
        REFINE_LEVELS is tried; the candidate with the smallest HYKL residual wins.
        """
        weighted = problem.weighted_states()
        raw = sum(r @ e for r, e in zip(weighted, elements))
        lam = _hermitize(raw)
        scale = max(float(np.max(np.abs(np.linalg.eigvalsh(lam)))), 1e-300)
        identity = np.eye(problem.dim)
        best, best_residual = None, np.inf

        for level in REFINE_LEVELS:
            rounded = []
            for r, e in zip(weighted, elements):
                values, vectors = scipy.linalg.eigh(lam - r)
                kernel = vectors[:, values <= level * scale]
                if kernel.shape[1] == 0:
                    rounded.append(np.zeros_like(e))
                    continue
                q = kernel @ kernel.conj().T
                rounded.append(_hermitize(q @ e @ q))
            total = _hermitize(sum(rounded))
            if np.min(np.linalg.eigvalsh(total)) <= 1e-12:
                continue
            inv_sqrt = psd_power(total, -0.5)
            candidate = [_hermitize(inv_sqrt @ e @ inv_sqrt) for e in rounded]
            if np.linalg.norm(sum(candidate) - identity) > 1e-10:
                continue
            residual = hykl_residuals(problem, candidate, self.tol).max_residual
            if residual < best_residual:
                best, best_residual = candidate, residual
        return best
