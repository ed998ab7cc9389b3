"""
Data models for cqmeta.

The data models are implemented as dataclasses and cover the three layers of
the library:

Operators:
    HermitianOperator wraps a complex Hermitian matrix together with an optional
    direct-sum block layout. DensityOperator and Projector wrap a
    HermitianOperator and enforce their extra invariants on construction.
    SpectralDecomposition stores the clustered eigen-structure of an operator.

Hypothesis testing:
    NpTest and TradeoffPoint describe binary Neyman-Pearson tests and their
    error pairs. MaryProblem, Povm, HyklReport and SolverResult cover Bayesian
    M-ary discrimination.

Channel coding:
    Channel, Code and InputDistribution model a classical-quantum channel and
    its codebooks. SymmetryReport, QpCertificate and IndexPartition hold the
    outcome of the quasi-perfect code analysis.

RunConfig and SweepGrid carry the command line configuration.

Operator models are immutable: matrices are copied and flagged read-only when
the dataclass is built, so instances can be shared freely across threads.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple
import math
import os

import numpy as np
from typing_extensions import Literal

from ..exceptions import DimensionMismatch, InvariantViolation, ParameterError

# Tolerances shared by the whole package
HERMITIAN_TOL = 1e-12
DENSITY_TOL = 1e-10
PROJECTOR_TOL = 1e-10
PRIOR_TOL = 1e-12
POVM_PSD_TOL = 1e-10
POVM_SUM_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-9

Label = Hashable
OutputFormat = Literal["csv", "json"]


def label_key(label: Label) -> Tuple[int, Any]:
    """Sort key giving a canonical order over mixed integer and string labels."""
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        return (0, int(label))
    return (1, str(label))


def _frozen_matrix(matrix: np.ndarray) -> np.ndarray:
    frozen = np.array(matrix, dtype=complex)
    frozen.setflags(write=False)
    return frozen


def _unwrap(operand: Any) -> Any:
    if isinstance(operand, (DensityOperator, Projector)):
        return operand.base
    return operand


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Complex Hermitian matrix with an optional direct-sum block layout."""
    entries: np.ndarray
    block_sizes: Tuple[int, ...] = ()

    def __post_init__(self):
        matrix = np.array(self.entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise InvariantViolation(f"Expected a non-empty square matrix, got shape {matrix.shape}")
        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        if deviation > HERMITIAN_TOL:
            raise InvariantViolation(f"Matrix is not Hermitian (max deviation {deviation:.3e})")
        sizes = tuple(int(size) for size in self.block_sizes)
        if sizes and (sum(sizes) != matrix.shape[0] or min(sizes) < 1):
            raise InvariantViolation(f"Block sizes {sizes} do not tile dimension {matrix.shape[0]}")
        object.__setattr__(self, "entries", _frozen_matrix(matrix))
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def hermitize(cls, matrix: Any, block_sizes: Sequence[int] = ()) -> "HermitianOperator":
        """Build an operator from an almost Hermitian matrix by symmetrizing it."""
        matrix = np.asarray(matrix, dtype=complex)
        return cls((matrix + matrix.conj().T) / 2, tuple(block_sizes))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=complex))

    @property
    def matrix(self) -> np.ndarray:
        return self.entries

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def block_ranges(self) -> List[Tuple[int, int]]:
        """Return the (start, stop) index range of every diagonal block."""
        if not self.block_sizes:
            return [(0, self.dim)]
        ranges = []
        start = 0
        for size in self.block_sizes:
            ranges.append((start, start + size))
            start += size
        return ranges

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def _combine(self, other: Any, sign: float) -> "HermitianOperator":
        other = _unwrap(other)
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"Cannot combine operators of dims {self.dim} and {other.dim}")
        sizes = self.block_sizes if self.block_sizes == other.block_sizes else ()
        return HermitianOperator.hermitize(self.entries + sign * other.entries, sizes)

    def __add__(self, other: Any) -> "HermitianOperator":
        return self._combine(other, 1.0)

    def __sub__(self, other: Any) -> "HermitianOperator":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        if not isinstance(scalar, (int, float, np.floating, np.integer)):
            return NotImplemented
        return HermitianOperator(self.entries * float(scalar), self.block_sizes)

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianOperator":
        return self * -1.0


class _OperatorView:
    """Shared accessors for the models that wrap a HermitianOperator."""
    base: HermitianOperator

    @property
    def matrix(self) -> np.ndarray:
        return self.base.entries

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return self.base.block_sizes

    def block_ranges(self) -> List[Tuple[int, int]]:
        return self.base.block_ranges()

    def trace(self) -> float:
        return self.base.trace()

    def __add__(self, other: Any) -> HermitianOperator:
        return self.base + other

    def __sub__(self, other: Any) -> HermitianOperator:
        return self.base - other

    def __mul__(self, scalar: float) -> HermitianOperator:
        return self.base * scalar

    __rmul__ = __mul__


def _coerce_base(value: Any) -> HermitianOperator:
    if isinstance(value, HermitianOperator):
        return value
    if isinstance(value, (DensityOperator, Projector)):
        return value.base
    return HermitianOperator(np.asarray(value, dtype=complex))


def _block_eigenvalues(base: HermitianOperator) -> np.ndarray:
    values = [np.linalg.eigvalsh(base.entries[a:b, a:b]) for a, b in base.block_ranges()]
    return np.concatenate(values)


@dataclass(frozen=True, eq=False)
class DensityOperator(_OperatorView):
    """Positive semidefinite unit-trace operator (a quantum state)."""
    base: HermitianOperator

    def __post_init__(self):
        base = _coerce_base(self.base)
        object.__setattr__(self, "base", base)
        smallest = float(np.min(_block_eigenvalues(base)))
        if smallest < -DENSITY_TOL:
            raise InvariantViolation(f"Density operator has negative eigenvalue {smallest:.3e}")
        trace = base.trace()
        if abs(trace - 1.0) > DENSITY_TOL:
            raise InvariantViolation(f"Density operator has trace {trace:.12g}, expected 1")

    @classmethod
    def from_matrix(cls, matrix: Any, block_sizes: Sequence[int] = ()) -> "DensityOperator":
        return cls(HermitianOperator.hermitize(matrix, block_sizes))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(HermitianOperator(np.eye(dim, dtype=complex) / dim))

    @classmethod
    def pure(cls, vector: Any) -> "DensityOperator":
        """Rank-one state |v><v| of a unit vector."""
        vector = np.asarray(vector, dtype=complex).reshape(-1)
        return cls.from_matrix(np.outer(vector, vector.conj()))


@dataclass(frozen=True, eq=False)
class Projector(_OperatorView):
    """Orthogonal projector: Hermitian and idempotent."""
    base: HermitianOperator

    def __post_init__(self):
        base = _coerce_base(self.base)
        object.__setattr__(self, "base", base)
        matrix = base.entries
        residual = float(np.linalg.norm(matrix @ matrix - matrix))
        if residual > PROJECTOR_TOL:
            raise InvariantViolation(f"Operator is not idempotent (residual {residual:.3e})")

    @classmethod
    def from_matrix(cls, matrix: Any, block_sizes: Sequence[int] = ()) -> "Projector":
        return cls(HermitianOperator.hermitize(matrix, block_sizes))

    @classmethod
    def from_vectors(cls, vectors: np.ndarray, block_sizes: Sequence[int] = ()) -> "Projector":
        """Projector onto the span of orthonormal columns."""
        vectors = np.asarray(vectors, dtype=complex)
        return cls.from_matrix(vectors @ vectors.conj().T, block_sizes)

    @classmethod
    def identity(cls, dim: int) -> "Projector":
        return cls(HermitianOperator.identity(dim))

    @property
    def rank(self) -> int:
        return int(round(self.trace()))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Clustered spectral decomposition A = sum_i lambda_i E_i."""
    eigenvalues: Tuple[float, ...]
    eigenprojectors: Tuple[Projector, ...]
    multiplicities: Tuple[int, ...]
    eigenvectors: Tuple[np.ndarray, ...] = field(default=(), repr=False)

    def reconstruct(self) -> np.ndarray:
        """Rebuild the operator from its eigenvalues and eigenprojectors."""
        dim = self.eigenprojectors[0].dim
        total = np.zeros((dim, dim), dtype=complex)
        for value, projector in zip(self.eigenvalues, self.eigenprojectors):
            total += value * projector.matrix
        return total


@dataclass(frozen=True, eq=False)
class NpTest:
    """Neyman-Pearson test {rho0 - t rho1 > 0} + theta * {rho0 - t rho1 = 0}."""
    t: float
    strict_projector: Projector
    null_projector: Projector
    theta_weight: float = 0.0

    def __post_init__(self):
        theta = float(self.theta_weight)
        if theta < -1e-12 or theta > 1 + 1e-12:
            raise InvariantViolation(f"theta_weight must lie in [0, 1], got {theta}")
        object.__setattr__(self, "theta_weight", min(max(theta, 0.0), 1.0))
        overlap = float(np.linalg.norm(self.strict_projector.matrix @ self.null_projector.matrix))
        if overlap > ORTHOGONALITY_TOL:
            raise InvariantViolation(f"Strict and null projectors overlap (norm {overlap:.3e})")

    @property
    def operator(self) -> np.ndarray:
        """The test operator 0 <= T <= I."""
        return self.strict_projector.matrix + self.theta_weight * self.null_projector.matrix


@dataclass(frozen=True)
class TradeoffPoint:
    """Type-I error alpha and type-II error beta of a binary test."""
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = float(getattr(self, name))
            if value < -1e-9 or value > 1 + 1e-9:
                raise InvariantViolation(f"{name} must lie in [0, 1], got {value}")
            object.__setattr__(self, name, min(max(value, 0.0), 1.0))


@dataclass(frozen=True, eq=False)
class MaryProblem:
    """M states with prior probabilities, all on a common space."""
    states: Tuple[DensityOperator, ...]
    priors: Tuple[float, ...]

    def __post_init__(self):
        states = tuple(self.states)
        priors = tuple(float(p) for p in self.priors)
        if len(states) < 2:
            raise InvariantViolation(f"An M-ary problem needs M >= 2 states, got {len(states)}")
        if len(states) != len(priors):
            raise DimensionMismatch(f"{len(states)} states but {len(priors)} priors")
        if any(p < 0 for p in priors):
            raise InvariantViolation("Priors must be non-negative")
        if abs(sum(priors) - 1.0) > PRIOR_TOL:
            raise InvariantViolation(f"Priors sum to {sum(priors):.15g}, expected 1")
        dims = {state.dim for state in states}
        if len(dims) != 1:
            raise DimensionMismatch(f"States live on different dimensions {sorted(dims)}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    @classmethod
    def uniform(cls, states: Sequence[DensityOperator]) -> "MaryProblem":
        return cls(tuple(states), tuple(1.0 / len(states) for _ in states))

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def weighted_states(self) -> List[np.ndarray]:
        """Matrices p_i tau_i."""
        return [p * state.matrix for p, state in zip(self.priors, self.states)]


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement {Pi_1, ..., Pi_M}: positive elements summing to identity."""
    elements: Tuple[HermitianOperator, ...]

    def __post_init__(self):
        elements = tuple(_coerce_base(element) for element in self.elements)
        if not elements:
            raise InvariantViolation("A POVM needs at least one element")
        dims = {element.dim for element in elements}
        if len(dims) != 1:
            raise DimensionMismatch(f"POVM elements have different dimensions {sorted(dims)}")
        for index, element in enumerate(elements):
            smallest = float(np.min(np.linalg.eigvalsh(element.matrix)))
            if smallest < -POVM_PSD_TOL:
                raise InvariantViolation(f"POVM element {index} has negative eigenvalue {smallest:.3e}")
        dim = dims.pop()
        total = sum(element.matrix for element in elements)
        residual = float(np.linalg.norm(total - np.eye(dim)))
        if residual > POVM_SUM_TOL:
            raise InvariantViolation(f"POVM elements do not sum to identity (residual {residual:.3e})")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def from_matrices(cls, matrices: Sequence[Any]) -> "Povm":
        return cls(tuple(HermitianOperator.hermitize(m) for m in matrices))

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def matrices(self) -> List[np.ndarray]:
        return [element.matrix for element in self.elements]


@dataclass(frozen=True, eq=False)
class HyklReport:
    """Residuals of the Holevo-Yuen-Kennedy-Lax optimality conditions."""
    lambda_op: HermitianOperator
    self_adjoint_residual: float
    stationarity_residuals: Tuple[float, ...]
    psd_residuals: Tuple[float, ...]
    tolerance: float
    passed: bool

    def __post_init__(self):
        expected = self.max_residual <= self.tolerance
        if bool(self.passed) != expected:
            raise InvariantViolation("HYKL report 'passed' flag disagrees with its residuals")

    @property
    def max_residual(self) -> float:
        return max((self.self_adjoint_residual,) + tuple(self.stationarity_residuals)
                   + tuple(self.psd_residuals))


@dataclass(frozen=True, eq=False)
class SolverResult:
    """Outcome of an iterative POVM solver."""
    povm: Povm
    report: HyklReport
    iterations: int
    error_probability: float

    @property
    def converged(self) -> bool:
        return self.report.passed


@dataclass(frozen=True, eq=False)
class Channel:
    """Classical-quantum channel x -> W_x on a finite input alphabet."""
    outputs: Mapping[Label, DensityOperator]
    kind: str = "pure"
    noise: float = 0.0
    source_vectors: Mapping[Label, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        outputs = dict(self.outputs)
        if not outputs:
            raise InvariantViolation("A channel needs a non-empty input alphabet")
        dims = {state.dim for state in outputs.values()}
        if len(dims) != 1:
            raise DimensionMismatch(f"Channel outputs have different dimensions {sorted(dims)}")
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "source_vectors", dict(self.source_vectors))

    @property
    def output_dim(self) -> int:
        return next(iter(self.outputs.values())).dim

    @property
    def input_alphabet(self) -> Tuple[Label, ...]:
        return tuple(sorted(self.outputs, key=label_key))

    def output(self, label: Label) -> DensityOperator:
        try:
            return self.outputs[label]
        except KeyError:
            raise ParameterError(f"Input {label!r} is not in the channel alphabet") from None


@dataclass(frozen=True)
class Code:
    """Ordered list of codewords; duplicates are allowed."""
    codewords: Tuple[Label, ...]

    def __post_init__(self):
        codewords = tuple(self.codewords)
        if len(codewords) < 1:
            raise InvariantViolation("A code needs at least one codeword")
        object.__setattr__(self, "codewords", codewords)

    @property
    def size(self) -> int:
        return len(self.codewords)

    def check_alphabet(self, channel: Channel) -> None:
        missing = [x for x in self.codewords if x not in channel.outputs]
        if missing:
            raise ParameterError(f"Codewords {missing!r} are not channel inputs")


@dataclass(frozen=True, eq=False)
class InputDistribution:
    """Distribution over channel inputs; `slots` keeps one block per codeword."""
    weights: Mapping[Label, float]
    slots: Tuple[Label, ...] = ()

    def __post_init__(self):
        weights = {x: float(w) for x, w in dict(self.weights).items()}
        if any(w < 0 for w in weights.values()):
            raise InvariantViolation("Input weights must be non-negative")
        if abs(sum(weights.values()) - 1.0) > PRIOR_TOL:
            raise InvariantViolation(f"Input weights sum to {sum(weights.values()):.15g}, expected 1")
        slots = tuple(sorted(self.slots, key=label_key))
        if slots and set(slots) != {x for x, w in weights.items() if w > 0}:
            raise InvariantViolation("Slots must cover exactly the support of the distribution")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "slots", slots)

    @classmethod
    def from_code(cls, code: Code) -> "InputDistribution":
        """Uniform distribution P_C induced by a codebook."""
        weights: Dict[Label, float] = {}
        for x in code.codewords:
            weights[x] = weights.get(x, 0.0) + 1.0 / code.size
        return cls(weights, code.codewords)

    @classmethod
    def uniform(cls, labels: Sequence[Label]) -> "InputDistribution":
        labels = list(dict.fromkeys(labels))
        return cls({x: 1.0 / len(labels) for x in labels})

    @property
    def support(self) -> Tuple[Label, ...]:
        return tuple(sorted((x for x, w in self.weights.items() if w > 0), key=label_key))

    def block_layout(self) -> List[Tuple[Label, float]]:
        """(label, weight) for every diagonal block of PW, in canonical order."""
        if not self.slots:
            return [(x, self.weights[x]) for x in self.support]
        counts: Dict[Label, int] = {}
        for x in self.slots:
            counts[x] = counts.get(x, 0) + 1
        return [(x, self.weights[x] / counts[x]) for x in self.slots]


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    """Cross-input comparison of F_x(t, mu) and G_x(t, mu) on sampled thresholds."""
    mu: DensityOperator
    t_breakpoints: Tuple[float, ...]
    f_table: Dict[Tuple[Label, float], float]
    max_deviation: float
    g_max_deviation: float
    symmetric: bool
    tolerance: float = 1e-9

    def __post_init__(self):
        if bool(self.symmetric) != (self.max_deviation <= self.tolerance):
            raise InvariantViolation("Symmetry flag disagrees with the measured deviation")


class CertificateStatus(str, Enum):
    PERFECT = "perfect"
    QUASI_PERFECT = "quasi_perfect"
    NEITHER = "neither"


@dataclass(frozen=True, eq=False)
class IndexPartition:
    """Residual eigenbasis and its assignment to codeword positions."""
    residual_basis: Tuple[Projector, ...]
    assignment: Dict[int, int]
    eps_values: Dict[Tuple[int, int], float]
    available: bool = True

    def eps_min(self, index: int) -> float:
        """epsilon_i = min over codewords of epsilon_i(x)."""
        return min(value for (i, _), value in self.eps_values.items() if i == index)

    @property
    def total_eps(self) -> float:
        return float(sum(self.eps_min(i) for i in range(len(self.residual_basis))))


@dataclass(frozen=True, eq=False)
class QpCertificate:
    """Packing radius, residuals and optimality gap of a code for a given mu."""
    t_bar: float
    mu: DensityOperator
    orthogonality_residual: float
    covering_margin: float
    gap: float
    status: CertificateStatus
    symmetric: bool = True
    partition_available: bool = False
    f_open: float = float("nan")
    g_open: float = float("nan")

    def __post_init__(self):
        status = CertificateStatus(self.status)
        object.__setattr__(self, "status", status)
        if status is CertificateStatus.QUASI_PERFECT:
            if self.gap > 1e-9 or self.covering_margin < -1e-9:
                raise InvariantViolation("Quasi-perfect status requires zero gap and covering")
        if status is CertificateStatus.PERFECT and abs(self.covering_margin) > 1e-9:
            raise InvariantViolation("Perfect status requires closed projectors summing to identity")

    @property
    def is_quasi_perfect(self) -> bool:
        """True for perfect and quasi-perfect codes."""
        return self.status is not CertificateStatus.NEITHER

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "t_bar": self.t_bar,
            "gap": self.gap,
            "orthogonality_residual": self.orthogonality_residual,
            "covering_margin": self.covering_margin,
            "symmetric": self.symmetric,
            "partition_available": self.partition_available,
            "f_open": self.f_open,
            "g_open": self.g_open,
            "mu": self.mu.matrix,
        }


class Command(str, Enum):
    EXAMPLE1 = "example1"
    FIGURE1 = "figure1"
    BELL_SWEEP = "bell_sweep"
    CERTIFY = "certify"
    SOLVE = "solve"


@dataclass(frozen=True)
class SweepGrid:
    """Evenly spaced parameter grid name:start:stop:steps."""
    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ParameterError(f"Grid needs at least one step, got {self.steps}")

    @classmethod
    def parse(cls, text: str) -> "SweepGrid":
        parts = text.split(":")
        if len(parts) != 4:
            raise ParameterError(f"Grid must look like name:start:stop:steps, got {text!r}")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as e:
            raise ParameterError(f"Invalid grid {text!r}: {e}") from e

    def values(self) -> List[float]:
        if self.steps == 1:
            return [self.start]
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


def default_threads() -> int:
    """Worker count from CQMETA_THREADS, falling back to the CPU count."""
    raw = os.environ.get("CQMETA_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ParameterError(f"CQMETA_THREADS must be an integer, got {raw!r}") from None
        if value < 1:
            raise ParameterError(f"CQMETA_THREADS must be positive, got {value}")
        return value
    return os.cpu_count() or 1


@dataclass
class RunConfig:
    """Configuration of one command line run."""
    command: Command
    channel_path: Optional[Path] = None
    code_path: Optional[Path] = None
    problem_path: Optional[Path] = None
    mu_spec: str = "maximally_mixed"
    sweep: Optional[SweepGrid] = None
    output_path: Optional[Path] = None
    output_format: OutputFormat = "json"
    tolerance: float = 1e-8
    max_iter: int = 20000
    threads: int = field(default_factory=default_threads)
    family: str = "ideal"
    n_qubits: int = 2
    m_values: List[int] = field(default_factory=lambda: [4, 6, 8, 16])
    t_steps: int = 121

    def validate(self) -> None:
        self.command = Command(self.command)
        if self.output_format not in ("csv", "json"):
            raise ParameterError(f"Unknown output format {self.output_format!r}")
        if not self.tolerance > 0 or math.isinf(self.tolerance):
            raise ParameterError(f"Tolerance must be positive, got {self.tolerance}")
        if self.max_iter < 1:
            raise ParameterError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.threads < 1:
            raise ParameterError(f"threads must be at least 1, got {self.threads}")
        if self.command is Command.FIGURE1 and self.t_steps < 2:
            raise ParameterError(f"figure1 needs at least 2 t steps, got {self.t_steps}")
        if self.command is Command.CERTIFY and (self.channel_path is None or self.code_path is None):
            raise ParameterError("certify needs --channel and --code")
        if self.command is Command.SOLVE and self.problem_path is None:
            raise ParameterError("solve needs --problem")
        for path in (self.channel_path, self.code_path, self.problem_path):
            if path is not None and not Path(path).is_file():
                raise ParameterError(f"Input file {path} is not readable")
        if self.output_path is not None:
            parent = Path(self.output_path).resolve().parent
            if not parent.is_dir():
                raise ParameterError(f"Output directory {parent} does not exist")
