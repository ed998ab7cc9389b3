"""
Perfect and quasi-perfect codes for symmetric classical-quantum channels.

For a channel {W_x}, an auxiliary state mu and a threshold t the projectors
E_x(t, mu) = {W_x - t mu >= 0} and E•_x(t, mu) = {W_x - t mu > 0} drive the
functionals F_x = tr(W_x E_x) and G_x = tr(mu E_x) (and their open variants).
A code is perfect when its closed projectors tile the output space and
quasi-perfect when its open projectors are orthogonal while the closed ones
still cover it; both then meet the meta-converse with equality.
"""

from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import scipy.linalg

from ..exceptions import ParameterError, PartitionUnavailable, SymmetryError
from ..models.data_models import (
    CertificateStatus, Channel, Code, DensityOperator, IndexPartition, InputDistribution,
    Label, Povm, Projector, QpCertificate, SymmetryReport,
)
from .binary_test import alpha_beta, pencil_breakpoints
from .channel import meta_converse, pe_of_code
from .hermitian import BlockSpectrum, ProjectorMode, min_eigenvalue

logger = logging.getLogger(__name__)

QP_TOL = 1e-9
BREAKPOINT_FLOOR = 1e-12
THEOREM_TOL = 1e-7


class EMode(str, Enum):
    CLOSED = "closed"
    OPEN = "open"
    EPS_RELAXED = "eps_relaxed"


def _test_spectrum(channel: Channel, x: Label, t: float, mu: DensityOperator) -> BlockSpectrum:
    return BlockSpectrum(channel.output(x).matrix - t * mu.matrix)


def _projector_matrix(spectrum: BlockSpectrum, mode: EMode, eps: float = 0.0) -> np.ndarray:
    if mode is EMode.CLOSED:
        return spectrum.projector_matrix(ProjectorMode.NONNEG)
    if mode is EMode.OPEN:
        return spectrum.projector_matrix(ProjectorMode.STRICT_POS)
    return spectrum.projector_matrix(ProjectorMode.NONNEG, shift=eps)


def e_projector(channel: Channel, x: Label, t: float, mu: DensityOperator,
                mode: EMode = EMode.CLOSED, eps: float = 0.0) -> Projector:
    """
    {W_x - t mu >= 0}, {W_x - t mu > 0} or {W_x - t mu >= -eps I}.

    Args:
        channel: classical-quantum channel
        x: channel input
        t: threshold
        mu: auxiliary state on the output space
        mode: closed, open or eps_relaxed
        eps: relaxation for eps_relaxed

    Returns:
        Projector on the output space
    """
    mode = EMode(mode)
    if mode is EMode.EPS_RELAXED and eps < 0:
        raise ParameterError(f"eps must be non-negative, got {eps}")
    return Projector.from_matrix(_projector_matrix(_test_spectrum(channel, x, t, mu), mode, eps))


def _functional(channel: Channel, x: Label, t: float, mu: DensityOperator, against: np.ndarray,
                mode: ProjectorMode) -> float:
    return _test_spectrum(channel, x, t, mu).overlap(against, mode)


def f_value(channel: Channel, x: Label, t: float, mu: DensityOperator) -> float:
    """F_x(t, mu) = tr(W_x E_x(t, mu))."""
    return _functional(channel, x, t, mu, channel.output(x).matrix, ProjectorMode.NONNEG)


def g_value(channel: Channel, x: Label, t: float, mu: DensityOperator) -> float:
    """G_x(t, mu) = tr(mu E_x(t, mu))."""
    return _functional(channel, x, t, mu, mu.matrix, ProjectorMode.NONNEG)


def f_open(channel: Channel, x: Label, t: float, mu: DensityOperator) -> float:
    return _functional(channel, x, t, mu, channel.output(x).matrix, ProjectorMode.STRICT_POS)


def g_open(channel: Channel, x: Label, t: float, mu: DensityOperator) -> float:
    return _functional(channel, x, t, mu, mu.matrix, ProjectorMode.STRICT_POS)


def _breakpoints(channel: Channel, labels: Sequence[Label], mu: DensityOperator) -> List[float]:
    values = set()
    for x in dict.fromkeys(labels):
        values.update(pencil_breakpoints(channel.output(x), mu))
    return sorted(values)


def symmetry_check(channel: Channel, mu: DensityOperator,
                   extra_t_samples: Sequence[float] = ()) -> SymmetryReport:
    """
    Compare F_x(t, mu) and G_x(t, mu) across the whole input alphabet.

    F_x is constant between consecutive breakpoints of the pencils (W_x, mu),
    so the breakpoints, their midpoints and one point outside each end cover
    every constancy interval.
    """
    if mu.dim != channel.output_dim:
        raise ParameterError(f"mu has dimension {mu.dim}, channel outputs {channel.output_dim}")
    alphabet = channel.input_alphabet
    breakpoints = _breakpoints(channel, alphabet, mu)
    samples = set(breakpoints)
    samples.update(0.5 * (a + b) for a, b in zip(breakpoints, breakpoints[1:]))
    if breakpoints:
        samples.update((breakpoints[0] - 1.0, breakpoints[-1] + 1.0))
    samples.add(-1.0)
    samples.update(float(t) for t in extra_t_samples)

    f_table: Dict[Tuple[Label, float], float] = {}
    f_dev = g_dev = 0.0
    for t in sorted(samples):
        fs, gs = [], []
        for x in alphabet:
            spectrum = _test_spectrum(channel, x, t, mu)
            f = spectrum.overlap(channel.output(x).matrix, ProjectorMode.NONNEG)
            f_table[(x, t)] = f
            fs.append(f)
            gs.append(spectrum.overlap(mu.matrix, ProjectorMode.NONNEG))
        f_dev = max(f_dev, max(fs) - min(fs))
        g_dev = max(g_dev, max(gs) - min(gs))

    logger.debug(f"Symmetry check on {len(samples)} thresholds: F deviation {f_dev:.3e}, "
                 f"G deviation {g_dev:.3e}")
    return SymmetryReport(mu, tuple(breakpoints), f_table, f_dev, g_dev, f_dev <= QP_TOL, QP_TOL)


def _open_projectors(channel: Channel, code: Code, t: float, mu: DensityOperator) -> List[np.ndarray]:
    cache = {x: _projector_matrix(_test_spectrum(channel, x, t, mu), EMode.OPEN)
             for x in dict.fromkeys(code.codewords)}
    return [cache[x] for x in code.codewords]


def _closed_projectors(channel: Channel, code: Code, t: float, mu: DensityOperator) -> List[np.ndarray]:
    cache = {x: _projector_matrix(_test_spectrum(channel, x, t, mu), EMode.CLOSED)
             for x in dict.fromkeys(code.codewords)}
    return [cache[x] for x in code.codewords]


def _max_pair_overlap(projectors: Sequence[np.ndarray]) -> float:
    """max over pairs of positions of ||P_m P_n||_F."""
    return max((float(np.linalg.norm(a @ b)) for a, b in combinations(projectors, 2)), default=0.0)


def packing_radius(channel: Channel, code: Code, mu: DensityOperator) -> float:
    """
    Smallest t > 0 at which the open projectors of the codewords are orthogonal.

    The open projectors only change at pencil breakpoints, so the strictly
    positive breakpoints are scanned in increasing order.

    Returns:
        The packing radius, or +inf when no breakpoint separates the codewords
    """
    code.check_alphabet(channel)
    if mu.dim != channel.output_dim:
        raise ParameterError(f"mu has dimension {mu.dim}, channel outputs {channel.output_dim}")
    candidates = [t for t in _breakpoints(channel, code.codewords, mu) if t > BREAKPOINT_FLOOR]
    for t in candidates:
        if _max_pair_overlap(_open_projectors(channel, code, t, mu)) <= QP_TOL:
            return t
    logger.warning(f"Open projectors of the M={code.size} code never become orthogonal "
                   f"over {len(candidates)} breakpoints")
    return math.inf


def _shifted_operators(channel: Channel, code: Code, t_bar: float, mu: DensityOperator) -> List[np.ndarray]:
    return [channel.output(x).matrix - t_bar * mu.matrix for x in code.codewords]


def _covering_gap(operators: Sequence[np.ndarray]) -> float:
    spectra = [BlockSpectrum(a) for a in operators]
    candidates = {0.0}
    for spectrum in spectra:
        tol = spectrum.default_zero_tol()
        candidates.update(-float(v) for v in spectrum.eigenvalues() if v < -tol)
    for eps in sorted(candidates):
        total = sum(s.projector_matrix(ProjectorMode.NONNEG, shift=eps) for s in spectra)
        if min_eigenvalue(total) >= 1.0 - QP_TOL:
            return eps
    return max(candidates)


def _eigen_tol(operator: np.ndarray) -> float:
    return QP_TOL * max(1.0, float(np.linalg.norm(operator, 2)))


def _residual_partition(operators: Sequence[np.ndarray], opens: Sequence[np.ndarray],
                        gap: float) -> IndexPartition:
    """
    Greedy joint eigenbasis of the complement of the open projectors.

    Each round picks, over all codeword positions, the residual eigenvector of
    the compressed W_x - t mu with the smallest eps = -eigenvalue that is also
    an eigenvector of the full operator.
    """
    dim = operators[0].shape[0]
    basis = scipy.linalg.null_space(sum(opens) if opens else np.zeros((dim, dim)), rcond=QP_TOL)
    tolerances = [_eigen_tol(a) for a in operators]
    vectors: List[np.ndarray] = []
    completed = True

    while basis.shape[1] > 0:
        best: Optional[Tuple[float, np.ndarray, np.ndarray]] = None
        for a, tol in zip(operators, tolerances):
            compressed = basis.conj().T @ a @ basis
            values, coeffs = scipy.linalg.eigh((compressed + compressed.conj().T) / 2)
            for value, coeff in zip(values, coeffs.T):
                vector = basis @ coeff
                if np.linalg.norm(a @ vector - value * vector) > tol:
                    continue
                eps = max(-float(value), 0.0)
                if best is None or eps < best[0] - BREAKPOINT_FLOOR:
                    best = (eps, vector, coeff)
        if best is None:
            completed = False
            break
        _, vector, coeff = best
        vectors.append(vector / np.linalg.norm(vector))
        basis = basis @ scipy.linalg.null_space(coeff.conj()[None, :])

    eps_values: Dict[Tuple[int, int], float] = {}
    assignment: Dict[int, int] = {}
    for i, vector in enumerate(vectors):
        for m, (a, tol) in enumerate(zip(operators, tolerances)):
            value = float(np.real(np.vdot(vector, a @ vector)))
            if np.linalg.norm(a @ vector - value * vector) <= tol:
                eps_values[(i, m)] = max(-value, 0.0)
        smallest = min(v for (j, _), v in eps_values.items() if j == i)
        assignment[i] = min(m for (j, m), v in eps_values.items()
                            if j == i and v <= smallest + BREAKPOINT_FLOOR)

    basis_projectors = tuple(Projector.from_vectors(v[:, None]) for v in vectors)
    largest = max((min(v for (j, _), v in eps_values.items() if j == i) for i in range(len(vectors))),
                  default=0.0)
    available = completed and abs(largest - gap) <= QP_TOL
    if not available:
        logger.warning(f"No common residual eigenbasis: {len(vectors)} joint eigenvectors found, "
                       f"largest eps {largest:.6g} against gap {gap:.6g}")
    return IndexPartition(basis_projectors, assignment, eps_values, available)


def optimality_gap(channel: Channel, code: Code, mu: DensityOperator,
                   t_bar: float) -> Tuple[float, IndexPartition]:
    """
    Smallest eps >= 0 with sum_x {W_x - t_bar mu >= -eps I} >= I, and the residual partition.

    Args:
        channel: classical-quantum channel
        code: codebook
        mu: auxiliary state
        t_bar: packing radius of the code for mu

    Returns:
        (gap, IndexPartition); the partition is flagged unavailable when no
        joint residual eigenbasis realizes the gap
    """
    code.check_alphabet(channel)
    if math.isinf(t_bar):
        return math.inf, IndexPartition((), {}, {}, available=False)
    operators = _shifted_operators(channel, code, t_bar, mu)
    gap = _covering_gap(operators)
    opens = _open_projectors(channel, code, t_bar, mu)
    return gap, _residual_partition(operators, opens, gap)


def _open_averages(channel: Channel, code: Code, t: float, mu: DensityOperator) -> Tuple[float, float, float, float]:
    fs = [f_open(channel, x, t, mu) for x in code.codewords]
    gs = [g_open(channel, x, t, mu) for x in code.codewords]
    return float(np.mean(fs)), float(np.mean(gs)), max(fs) - min(fs), max(gs) - min(gs)


def certify(channel: Channel, code: Code, mu: DensityOperator) -> QpCertificate:
    """
    Classify a code as perfect, quasi-perfect or neither with respect to mu.

    Returns:
        QpCertificate at the packing radius of the code
    """
    code.check_alphabet(channel)
    symmetry = symmetry_check(channel, mu)
    if not symmetry.symmetric:
        logger.warning(f"Channel is not symmetric with respect to mu "
                       f"(F deviation {symmetry.max_deviation:.3e}); optimality claims are withheld")

    t_bar = packing_radius(channel, code, mu)
    if math.isinf(t_bar):
        return QpCertificate(t_bar, mu, math.inf, -math.inf, math.inf, CertificateStatus.NEITHER,
                             symmetry.symmetric, False)

    opens = _open_projectors(channel, code, t_bar, mu)
    closed = _closed_projectors(channel, code, t_bar, mu)
    total = sum(closed)
    covering = min_eigenvalue(total) - 1.0
    gap, partition = optimality_gap(channel, code, mu, t_bar)

    tiles = np.linalg.norm(total - np.eye(channel.output_dim)) <= QP_TOL
    if _max_pair_overlap(closed) <= QP_TOL and tiles:
        status = CertificateStatus.PERFECT
    elif gap <= QP_TOL and covering >= -QP_TOL:
        status = CertificateStatus.QUASI_PERFECT
    else:
        status = CertificateStatus.NEITHER

    f_avg, g_avg, _, _ = _open_averages(channel, code, t_bar, mu)
    logger.info(f"M={code.size} code: {status.value} at t_bar={t_bar:.12g}, gap {gap:.3e}")
    return QpCertificate(t_bar, mu, _max_pair_overlap(opens), covering, gap, status,
                         symmetry.symmetric, partition.available, f_avg, g_avg)


def qp_error_probability(channel: Channel, code: Code, t: float, mu: DensityOperator) -> float:
    """
    1 - F•(t, mu) + t (G•(t, mu) - 1/M).

    The exact error probability of a code that is perfect or quasi-perfect
    with parameters (t, mu), and a strict lower bound for any other code.
    """
    code.check_alphabet(channel)
    f_avg, g_avg, f_dev, g_dev = _open_averages(channel, code, t, mu)
    if f_dev > QP_TOL or g_dev > QP_TOL:
        raise SymmetryError(f"Open functionals differ across codewords (F by {f_dev:.3e}, G by {g_dev:.3e})")
    return 1.0 - f_avg + t * (g_avg - 1.0 / code.size)


def qp_error_bound(channel: Channel, code: Code, mu: DensityOperator) -> Tuple[float, bool]:
    """
    Error formula at the packing radius, with a flag telling whether it is exact.

    Returns:
        (value, is_exact); is_exact holds for perfect and quasi-perfect codes
    """
    certificate = certify(channel, code, mu)
    if math.isinf(certificate.t_bar):
        raise ParameterError("The packing radius is infinite for this auxiliary state")
    value = qp_error_probability(channel, code, certificate.t_bar, mu)
    return value, certificate.is_quasi_perfect


def general_code_error(channel: Channel, code: Code, mu: DensityOperator) -> float:
    """
    1 - F•(t_bar, mu) + t_bar (G•(t_bar, mu) - 1/M) + (1/M) sum_i eps_i.

    F• and G• are averaged over the codewords, which keeps the expression
    exact for any code with a residual partition.
    """
    t_bar = packing_radius(channel, code, mu)
    _, partition = optimality_gap(channel, code, mu, t_bar)
    if not partition.available:
        raise PartitionUnavailable("No common residual eigenbasis; use solve_optimal_povm for this code")
    f_avg, g_avg, _, _ = _open_averages(channel, code, t_bar, mu)
    M = code.size
    return 1.0 - f_avg + t_bar * (g_avg - 1.0 / M) + partition.total_eps / M


def qp_decoder(channel: Channel, code: Code, t_bar: float, mu: DensityOperator) -> Povm:
    """
    Decoder Pi_m = E•_{x_m}(t_bar, mu) plus the residual basis vectors assigned to position m.

    Raises:
        PartitionUnavailable: no joint residual eigenbasis exists
    """
    code.check_alphabet(channel)
    opens = _open_projectors(channel, code, t_bar, mu)
    if _max_pair_overlap(opens) > QP_TOL:
        raise ParameterError(f"Open projectors are not orthogonal at t={t_bar:.12g}")
    _, partition = optimality_gap(channel, code, mu, t_bar)
    if not partition.available:
        raise PartitionUnavailable("No common residual eigenbasis; use solve_optimal_povm for this code")
    elements = [p.copy() for p in opens]
    for i, m in partition.assignment.items():
        elements[m] = elements[m] + partition.residual_basis[i].matrix
    return Povm.from_matrices(elements)


def theorem4_verify(channel: Channel, code: Code, t: float, mu: DensityOperator,
                    tol: float = THEOREM_TOL) -> Tuple[float, float, bool]:
    """
    Check that a quasi-perfect code meets the meta-converse with equality.

    Compares the exact error probability, alpha_{1/M}(W_x || mu) for every
    distinct codeword, the meta-converse for the code's input distribution and
    the quasi-perfect error formula at t.

    Returns:
        (pe, meta-converse bound, equal)
    """
    M = code.size
    pe, _ = pe_of_code(channel, code)
    bound = meta_converse(channel, InputDistribution.from_code(code), mu, M)
    values = [pe, bound]
    values.extend(alpha_beta(channel.output(x), mu, 1.0 / M)[0] for x in dict.fromkeys(code.codewords))
    try:
        values.append(qp_error_probability(channel, code, t, mu))
    except SymmetryError as e:
        logger.warning(f"Skipping the quasi-perfect formula: {e}")
    equal = max(values) - min(values) <= tol
    logger.debug(f"pe={pe:.12g}, meta-converse={bound:.12g}, spread {max(values) - min(values):.3e}")
    return pe, bound, equal
