"""
Hermitian operator algebra: spectral decompositions, eigenspace projectors,
trace forms and tensor / direct-sum composition.

Block-diagonal operators (built by block_diag) are diagonalized block by block,
so direct sums of many small blocks never pay for a dense eigensolve of the
full space.
"""

from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import scipy.linalg

from ..exceptions import DimensionMismatch, InvariantViolation, ParameterError
from ..models.data_models import (
    DensityOperator, HermitianOperator, Projector, SpectralDecomposition,
)

logger = logging.getLogger(__name__)

ZERO_TOL_REL = 1e-10
ZERO_TOL_FLOOR = 1e-14
CLUSTER_TOL_REL = 1e-9
TRACE_IMAG_TOL = 1e-10

OperatorLike = Union[HermitianOperator, DensityOperator, Projector, np.ndarray]


class ProjectorMode(str, Enum):
    STRICT_POS = "strict_pos"
    NONNEG = "nonneg"
    NONPOS = "nonpos"
    STRICT_NEG = "strict_neg"
    NULL = "null"


def as_matrix(op: OperatorLike) -> np.ndarray:
    if isinstance(op, np.ndarray):
        return op
    return op.matrix


def as_hermitian(op: OperatorLike) -> HermitianOperator:
    if isinstance(op, HermitianOperator):
        return op
    if isinstance(op, (DensityOperator, Projector)):
        return op.base
    return HermitianOperator(np.asarray(op, dtype=complex))


def _block_sizes(op: OperatorLike) -> Tuple[int, ...]:
    if isinstance(op, np.ndarray):
        return ()
    return op.block_sizes


def common_block_sizes(*ops: OperatorLike) -> Tuple[int, ...]:
    """Block layout shared by all operands, or () when they disagree."""
    sizes = {_block_sizes(op) for op in ops}
    return sizes.pop() if len(sizes) == 1 else ()


def zero_tolerance(spectral_norm: float) -> float:
    """Eigenvalues within this distance of zero count as zero."""
    return max(ZERO_TOL_REL * spectral_norm, ZERO_TOL_FLOOR)


def _mask(values: np.ndarray, mode: ProjectorMode, zero_tol: float) -> np.ndarray:
    if mode is ProjectorMode.STRICT_POS:
        return values > zero_tol
    if mode is ProjectorMode.NONNEG:
        return values > -zero_tol
    if mode is ProjectorMode.NONPOS:
        return values <= zero_tol
    if mode is ProjectorMode.STRICT_NEG:
        return values <= -zero_tol
    return (values > -zero_tol) & (values <= zero_tol)


class BlockSpectrum:
    """
    Eigen-decomposition of a Hermitian matrix computed block by block.

    Every block is diagonalized once; projectors and trace overlaps for any
    eigenspace mode are then read off the stored eigenpairs.
    """

    def __init__(self, matrix: np.ndarray, block_sizes: Sequence[int] = ()):
        self.dim = matrix.shape[0]
        self.block_sizes = tuple(block_sizes)
        self.blocks: List[Tuple[int, int, np.ndarray, np.ndarray]] = []
        start = 0
        for size in (self.block_sizes or (self.dim,)):
            stop = start + size
            values, vectors = scipy.linalg.eigh(matrix[start:stop, start:stop])
            self.blocks.append((start, stop, values, vectors))
            start = stop
        self.norm = max(float(np.max(np.abs(values))) for _, _, values, _ in self.blocks)

    @classmethod
    def of(cls, op: OperatorLike) -> "BlockSpectrum":
        return cls(as_matrix(op), _block_sizes(op))

    def default_zero_tol(self) -> float:
        return zero_tolerance(self.norm)

    def eigenvalues(self) -> np.ndarray:
        """All eigenvalues in descending order."""
        values = np.concatenate([values for _, _, values, _ in self.blocks])
        return np.sort(values)[::-1]

    def min_eigenvalue(self) -> float:
        return min(float(values[0]) for _, _, values, _ in self.blocks)

    def projector_matrix(self, mode: ProjectorMode, zero_tol: Optional[float] = None,
                         shift: float = 0.0) -> np.ndarray:
        """Projector onto the eigenspace selected by `mode` after adding `shift` to every eigenvalue."""
        mode = ProjectorMode(mode)
        tol = self.default_zero_tol() if zero_tol is None else zero_tol
        result = np.zeros((self.dim, self.dim), dtype=complex)
        for start, stop, values, vectors in self.blocks:
            selected = vectors[:, _mask(values + shift, mode, tol)]
            if selected.shape[1]:
                result[start:stop, start:stop] = selected @ selected.conj().T
        return result

    def projector(self, mode: ProjectorMode, zero_tol: Optional[float] = None,
                  shift: float = 0.0) -> Projector:
        return Projector.from_matrix(self.projector_matrix(mode, zero_tol, shift), self.block_sizes)

    def overlap(self, rho: np.ndarray, mode: ProjectorMode, zero_tol: Optional[float] = None) -> float:
        """tr(rho P) for the eigenspace projector P selected by `mode`."""
        mode = ProjectorMode(mode)
        tol = self.default_zero_tol() if zero_tol is None else zero_tol
        total = 0.0
        for start, stop, values, vectors in self.blocks:
            selected = vectors[:, _mask(values, mode, tol)]
            if selected.shape[1]:
                block = rho[start:stop, start:stop]
                total += float(np.real(np.sum(selected.conj() * (block @ selected))))
        return total

    def eigenpairs(self) -> Iterator[Tuple[float, np.ndarray]]:
        """Yield (eigenvalue, eigenvector embedded in the full space)."""
        for start, stop, values, vectors in self.blocks:
            for k, value in enumerate(values):
                vector = np.zeros(self.dim, dtype=complex)
                vector[start:stop] = vectors[:, k]
                yield float(value), vector


def spectral_decompose(A: OperatorLike, cluster_tol: Optional[float] = None) -> SpectralDecomposition:
    """
    Spectral decomposition A = sum_i lambda_i E_i with clustered eigenvalues.

    Args:
        A: Hermitian operator
        cluster_tol: eigenvalues closer than this to the first value of a cluster
            are merged (default 1e-9 times the spectral norm)

    Returns:
        SpectralDecomposition with descending eigenvalues
    """
    operator = as_hermitian(A)
    spectrum = BlockSpectrum.of(operator)
    if cluster_tol is None:
        cluster_tol = max(CLUSTER_TOL_REL * spectrum.norm, ZERO_TOL_FLOOR)
    if cluster_tol <= 0:
        raise ParameterError(f"cluster_tol must be positive, got {cluster_tol}")

    pairs = sorted(spectrum.eigenpairs(), key=lambda pair: -pair[0])
    clusters: List[List[Tuple[float, np.ndarray]]] = []
    for value, vector in pairs:
        if clusters and clusters[-1][0][0] - value <= cluster_tol:
            clusters[-1].append((value, vector))
        else:
            clusters.append([(value, vector)])

    eigenvalues, projectors, multiplicities, bases = [], [], [], []
    for cluster in clusters:
        vectors = np.column_stack([vector for _, vector in cluster])
        eigenvalues.append(float(np.mean([value for value, _ in cluster])))
        projectors.append(Projector.from_vectors(vectors, operator.block_sizes))
        multiplicities.append(len(cluster))
        bases.append(vectors)

    logger.debug(f"Spectral decomposition: {len(clusters)} clusters in dimension {operator.dim}")
    return SpectralDecomposition(tuple(eigenvalues), tuple(projectors), tuple(multiplicities), tuple(bases))


def eigenspace_projector(A: OperatorLike, mode: Union[ProjectorMode, str],
                         zero_tol: Optional[float] = None) -> Projector:
    """
    Projector {A > 0}, {A >= 0}, {A <= 0} or {A < 0}.

    Args:
        A: Hermitian operator
        mode: one of strict_pos, nonneg, nonpos, strict_neg
        zero_tol: eigenvalue zero tolerance (default 1e-10 times the spectral norm, floor 1e-14)

    Returns:
        Projector onto the selected eigenspace
    """
    mode = ProjectorMode(mode)
    if zero_tol is not None and zero_tol < 0:
        raise ParameterError(f"zero_tol must be non-negative, got {zero_tol}")
    return BlockSpectrum.of(as_hermitian(A)).projector(mode, zero_tol)


def trace_pair(A: OperatorLike, B: OperatorLike) -> float:
    """Re tr(A B); the imaginary residue must vanish."""
    a, b = as_matrix(A), as_matrix(B)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Cannot pair operators of shapes {a.shape} and {b.shape}")
    value = complex(np.sum(a * b.T))
    scale = max(1.0, float(np.linalg.norm(a)) * float(np.linalg.norm(b)))
    if abs(value.imag) > TRACE_IMAG_TOL * scale:
        raise InvariantViolation(f"tr(AB) has imaginary part {value.imag:.3e}")
    return value.real


def tensor(A: OperatorLike, B: OperatorLike) -> HermitianOperator:
    """Kronecker product A (x) B."""
    return HermitianOperator.hermitize(np.kron(as_matrix(A), as_matrix(B)))


def block_diag(operators: Sequence[OperatorLike]) -> HermitianOperator:
    """Direct sum of operators; the result remembers its block layout."""
    if not operators:
        raise ParameterError("block_diag needs at least one operator")
    sizes: List[int] = []
    for op in operators:
        sizes.extend(_block_sizes(op) or (as_matrix(op).shape[0],))
    matrix = scipy.linalg.block_diag(*[as_matrix(op) for op in operators])
    return HermitianOperator.hermitize(matrix, sizes)


def min_eigenvalue(A: OperatorLike) -> float:
    return BlockSpectrum.of(A).min_eigenvalue()


def psd_power(matrix: np.ndarray, power: float, rel_tol: float = 1e-12) -> np.ndarray:
    """
    Power of a positive semidefinite matrix restricted to its support.

    Negative powers act as pseudo-inverses: the kernel maps to zero.
    """
    values, vectors = scipy.linalg.eigh(matrix)
    top = max(float(np.max(values)), 0.0)
    support = values > max(rel_tol * top, ZERO_TOL_FLOOR)
    scaled = np.zeros_like(values)
    scaled[support] = values[support] ** power
    return (vectors * scaled) @ vectors.conj().T


def support_split(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (support eigenvalues, support basis, kernel basis) of a PSD matrix."""
    values, vectors = scipy.linalg.eigh(matrix)
    tol = zero_tolerance(float(np.max(np.abs(values))))
    support = values > tol
    return values[support], vectors[:, support], vectors[:, ~support]
