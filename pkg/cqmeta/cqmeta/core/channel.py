"""
Classical-quantum channels and codes.

Channel constructors (pure-state, depolarizing, erasure), the Bell codes, the
block operators PW and P (x) mu, the exact error probability of a code and the
meta-converse bound.
"""

from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from ..exceptions import DimensionMismatch, ParameterError
from ..models.data_models import (
    Channel, Code, DensityOperator, InputDistribution, Label, MaryProblem, Povm,
    SolverResult,
)
from .binary_test import alpha_beta, pencil_breakpoints
from .hermitian import BlockSpectrum, ProjectorMode, block_diag
from .mary_test import HYKL_TOL, hykl_residuals

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10


def pure_state_channel(amplitude_table: Mapping[Label, Sequence[complex]]) -> Channel:
    """Channel x -> |phi_x><phi_x| from a table of unit vectors."""
    vectors: Dict[Label, np.ndarray] = {}
    for label, amplitudes in amplitude_table.items():
        vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1.0) > NORM_TOL:
            raise ParameterError(f"Amplitudes of input {label!r} have norm {norm:.12g}, expected 1")
        vectors[label] = vector
    dims = {vector.size for vector in vectors.values()}
    if len(dims) != 1:
        raise DimensionMismatch(f"Amplitude vectors have different lengths {sorted(dims)}")
    outputs = {label: DensityOperator.pure(vector) for label, vector in vectors.items()}
    return Channel(outputs, kind="pure", source_vectors=vectors)


def _bell_pair(family: int, phase: float) -> np.ndarray:
    vector = np.zeros(4, dtype=complex)
    first, second = (0, 3) if family == 0 else (1, 2)
    vector[first] = 1.0
    vector[second] = np.exp(1j * phase)
    return vector / math.sqrt(2.0)


def bell_code_n(n_qubits: int, M: int) -> Tuple[Channel, Code]:
    """
    N-qubit Bell code with M = 2^(N-1) K codewords.

    Codeword m = 1 + 2k + 2Kl carries (|00> + e^{i phi_k}|11>)/sqrt(2) (x) |l> and
    m = 2 + 2k + 2Kl carries (|01> + e^{i phi_k}|10>)/sqrt(2) (x) |l>, with
    phi_k = 2 pi k / K and l ranging over the (N-2)-qubit computational basis.
    """
    if n_qubits < 2:
        raise ParameterError(f"Bell codes need at least 2 qubits, got {n_qubits}")
    block = 2 ** (n_qubits - 1)
    if M < 2 ** n_qubits or M % block:
        raise ParameterError(f"M must be a multiple of {block} and at least {2 ** n_qubits}, got {M}")
    K = M // block
    tail_dim = 2 ** (n_qubits - 2)
    table: Dict[Label, np.ndarray] = {}
    for l in range(tail_dim):
        tail = np.zeros(tail_dim, dtype=complex)
        tail[l] = 1.0
        for k in range(K):
            phase = 2.0 * math.pi * k / K
            table[1 + 2 * k + 2 * K * l] = np.kron(_bell_pair(0, phase), tail)
            table[2 + 2 * k + 2 * K * l] = np.kron(_bell_pair(1, phase), tail)
    channel = pure_state_channel(table)
    return channel, Code(tuple(range(1, M + 1)))


def bell_code(M: int) -> Tuple[Channel, Code]:
    """Two-qubit Bell code with M >= 4 codewords, M even."""
    if M < 4 or M % 2:
        raise ParameterError(f"The two-qubit Bell code needs an even M >= 4, got {M}")
    return bell_code_n(2, M)


def depolarize(channel: Channel, p: float) -> Channel:
    """W_x -> p I/d + (1 - p) W_x."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"Depolarizing probability must lie in [0, 1], got {p}")
    d = channel.output_dim
    outputs = {
        x: DensityOperator.from_matrix(p * np.eye(d) / d + (1.0 - p) * w.matrix)
        for x, w in channel.outputs.items()
    }
    return Channel(outputs, kind="depolarizing", noise=p, source_vectors=channel.source_vectors)


def erase(channel: Channel, epsilon: float) -> Channel:
    """W_x -> diag((1 - eps) W_x, eps) on the output space extended by an erasure flag."""
    if not 0.0 <= epsilon <= 1.0:
        raise ParameterError(f"Erasure probability must lie in [0, 1], got {epsilon}")
    flag = np.array([[epsilon]], dtype=complex)
    outputs = {
        x: DensityOperator(block_diag([(1.0 - epsilon) * w.matrix, flag]).entries)
        for x, w in channel.outputs.items()
    }
    return Channel(outputs, kind="erasure", noise=epsilon, source_vectors=channel.source_vectors)


def phase_shift_code(channel: Channel, code: Code, index: int, phase: float) -> Tuple[Channel, Code]:
    """
    Replace codeword `index` by a copy whose upper half amplitudes gain a phase.

    For Bell-type vectors this shifts phi_k of that codeword only.
    """
    if not 0 <= index < code.size:
        raise ParameterError(f"Codeword index {index} out of range for M={code.size}")
    label = code.codewords[index]
    if label not in channel.source_vectors:
        raise ParameterError(f"Codeword {label!r} has no amplitude vector to perturb")
    vector = channel.source_vectors[label].copy()
    vector[vector.size // 2:] *= np.exp(1j * phase)
    table = dict(channel.source_vectors)
    new_label = f"{label}+{phase:g}"
    table[new_label] = vector
    shifted = pure_state_channel(table)
    codewords = list(code.codewords)
    codewords[index] = new_label
    return shifted, Code(tuple(codewords))


def _block_operator(blocks: List[np.ndarray]) -> DensityOperator:
    return DensityOperator(block_diag(blocks))


def _layout(P: InputDistribution, channel: Channel) -> List[Tuple[Label, float]]:
    layout = P.block_layout()
    missing = [x for x, _ in layout if x not in channel.outputs]
    if missing:
        raise ParameterError(f"Inputs {missing!r} of the distribution are not channel inputs")
    return layout


def pw_operator(P: InputDistribution, channel: Channel) -> DensityOperator:
    """PW = sum_x P(x) |x><x| (x) W_x, as a direct sum over supp(P)."""
    return _block_operator([w * channel.output(x).matrix for x, w in _layout(P, channel)])


def p_tensor_mu(P: InputDistribution, mu: DensityOperator, channel: Optional[Channel] = None) -> DensityOperator:
    """P (x) mu = sum_x P(x) |x><x| (x) mu, with the same block layout as PW."""
    layout = _layout(P, channel) if channel is not None else P.block_layout()
    return _block_operator([w * mu.matrix for _, w in layout])


def output_average(channel: Channel, P: InputDistribution) -> DensityOperator:
    """State sum_x P(x) W_x induced at the channel output."""
    return DensityOperator.from_matrix(sum(w * channel.output(x).matrix for x, w in _layout(P, channel)))


def code_problem(channel: Channel, code: Code) -> MaryProblem:
    """Equiprobable M-ary problem {W_{x_m}} of a code."""
    code.check_alphabet(channel)
    return MaryProblem.uniform([channel.output(x) for x in code.codewords])


def solve_code(channel: Channel, code: Code, tol: float = HYKL_TOL, max_iter: int = 20000,
               strict: bool = False) -> SolverResult:
    """Optimal decoder of a code together with its HYKL report."""
    code.check_alphabet(channel)
    if code.size == 1:
        identity = np.eye(channel.output_dim, dtype=complex)
        single = MaryProblem((channel.output(code.codewords[0]),) * 2, (1.0, 0.0))
        report = hykl_residuals(single, [identity, np.zeros_like(identity)], tol)
        return SolverResult(Povm.from_matrices([identity]), report, 0, 0.0)
    from ..solvers.fixed_point_solver import FixedPointSolver

    return FixedPointSolver(tol=tol, max_iter=max_iter, strict=strict).solve(code_problem(channel, code))


def pe_of_code(channel: Channel, code: Code, tol: float = HYKL_TOL, max_iter: int = 20000,
               strict: bool = False) -> Tuple[float, Povm]:
    """
    Minimum error probability of a code under ML decoding.

    Non-convergence is logged and the best iterate returned, unless `strict`
    asks for ConvergenceError.
    """
    result = solve_code(channel, code, tol, max_iter, strict)
    if not result.converged:
        logger.warning(f"Decoder for M={code.size} is not certified optimal")
    return result.error_probability, result.povm


def meta_converse(channel: Channel, P: InputDistribution, mu: DensityOperator, M: int) -> float:
    """alpha_{1/M}(PW || P (x) mu), a lower bound on the error of any size-M code."""
    if M < 1:
        raise ParameterError(f"Code size must be positive, got {M}")
    if mu.dim != channel.output_dim:
        raise DimensionMismatch(f"mu has dimension {mu.dim}, channel outputs {channel.output_dim}")
    return alpha_beta(pw_operator(P, channel), p_tensor_mu(P, mu, channel), 1.0 / M)[0]


def meta_converse_min(channel: Channel, candidate_ps: Sequence[InputDistribution],
                      candidate_mus: Sequence[DensityOperator], M: int,
                      include_output_average: bool = True) -> float:
    """
    min over candidate P of max over candidate mu of the meta-converse.

    With `include_output_average` the output state induced by each P joins
    the mu candidates.
    """
    if not candidate_ps:
        raise ParameterError("At least one candidate input distribution is required")
    best = math.inf
    for P in candidate_ps:
        mus = list(candidate_mus)
        if include_output_average:
            mus.append(output_average(channel, P))
        if not mus:
            raise ParameterError("At least one candidate auxiliary state is required")
        best = min(best, max(meta_converse(channel, P, mu, M) for mu in mus))
    return best


def lemma4_decompose(channel: Channel, P: InputDistribution, mu: DensityOperator,
                     beta_total: float) -> Tuple[float, Dict[Label, float]]:
    """
    Split the joint test of PW against P (x) mu into per-input tests.

    Returns:
        (sum_x P(x) alpha'_x, map x -> beta'_x) where each block of the optimal
        joint test is a test of W_x against mu
    """
    if not 0.0 <= beta_total <= 1.0:
        raise ParameterError(f"beta_total must lie in [0, 1], got {beta_total}")
    rho0, rho1 = pw_operator(P, channel), p_tensor_mu(P, mu, channel)
    _, test = alpha_beta(rho0, rho1, beta_total)
    operator = test.operator
    value = 0.0
    betas: Dict[Label, float] = {}
    start = 0
    for (x, weight), size in zip(P.block_layout(), rho0.block_sizes):
        block = operator[start:start + size, start:start + size]
        alpha_x = 1.0 - float(np.real(np.sum(channel.output(x).matrix * block.T)))
        beta_x = float(np.real(np.sum(mu.matrix * block.T)))
        value += weight * alpha_x
        betas[x] = betas.get(x, 0.0) + weight / P.weights[x] * beta_x
        start += size
    return value, betas


def tight_hn_value(channel: Channel, code: Code, mu0: DensityOperator,
                   t_grid: Sequence[float] = ()) -> float:
    """max over t >= 0 of (1/M) sum_x tr(W_x {W_x - t mu0 <= 0}) - t/M."""
    code.check_alphabet(channel)
    M = code.size
    grid = {0.0}
    grid.update(float(t) for t in t_grid if t >= 0)
    for x in set(code.codewords):
        grid.update(pencil_breakpoints(channel.output(x), mu0))
    best = -math.inf
    for t in sorted(grid):
        total = 0.0
        for x in code.codewords:
            w = channel.output(x).matrix
            total += BlockSpectrum(w - t * mu0.matrix).overlap(w, ProjectorMode.NONPOS)
        best = max(best, (total - t) / M)
    return best
