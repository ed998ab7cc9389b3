"""
Closed-form values for N-qubit Bell codes over the ideal, depolarizing and
erasure channels: error probability, optimal auxiliary state, optimal decoder,
Lambda operator and packing radius.
"""

from enum import Enum
from typing import Tuple, Union

import numpy as np

from ..exceptions import ParameterError
from ..models.data_models import Channel, Code, DensityOperator, HermitianOperator, Povm
from .channel import bell_code_n, depolarize, erase
from .hermitian import block_diag


class BellFamily(str, Enum):
    IDEAL = "ideal"
    DEPOLARIZING = "depolarizing"
    ERASURE = "erasure"


FamilyLike = Union[BellFamily, str]


def _check(family: FamilyLike, n_qubits: int, param: float) -> BellFamily:
    family = BellFamily(family)
    if n_qubits < 2:
        raise ParameterError(f"Bell codes need at least 2 qubits, got {n_qubits}")
    if family is not BellFamily.IDEAL and not 0.0 <= param <= 1.0:
        raise ParameterError(f"{family.value} parameter must lie in [0, 1], got {param}")
    return family


def _check_size(n_qubits: int, M: int) -> None:
    block = 2 ** (n_qubits - 1)
    if M < 2 ** n_qubits or M % block:
        raise ParameterError(f"M must be a multiple of {block} and at least {2 ** n_qubits}, got {M}")


def bell_setup(family: FamilyLike, n_qubits: int, M: int, param: float = 0.0) -> Tuple[Channel, Code]:
    """Channel and Bell code of the given family."""
    family = _check(family, n_qubits, param)
    channel, code = bell_code_n(n_qubits, M)
    if family is BellFamily.DEPOLARIZING:
        channel = depolarize(channel, param)
    elif family is BellFamily.ERASURE:
        channel = erase(channel, param)
    return channel, code


def bell_packing_radius(family: FamilyLike, n_qubits: int, param: float = 0.0) -> float:
    """M c0: 2^N, 2^N (1 - p) + p or 2^N (1 - eps) + eps."""
    family = _check(family, n_qubits, param)
    d = 2 ** n_qubits
    if family is BellFamily.IDEAL:
        return float(d)
    return d * (1.0 - param) + param


def bell_error_probability(family: FamilyLike, n_qubits: int, M: int, param: float = 0.0) -> float:
    _check_size(n_qubits, M)
    return 1.0 - bell_packing_radius(family, n_qubits, param) / M


def bell_mu0(family: FamilyLike, n_qubits: int, param: float = 0.0) -> DensityOperator:
    """Auxiliary state achieving the meta-converse for the family."""
    family = _check(family, n_qubits, param)
    d = 2 ** n_qubits
    if family is not BellFamily.ERASURE:
        return DensityOperator.maximally_mixed(d)
    radius = bell_packing_radius(family, n_qubits, param)
    blocks = [(1.0 - param) * np.eye(d) / radius, np.array([[param / radius]])]
    return DensityOperator(block_diag(blocks))


def bell_decoder(family: FamilyLike, n_qubits: int, M: int, param: float = 0.0) -> Povm:
    """
    Optimal decoder of the Bell code.

    (2^N / M)|phi_i><phi_i| for the ideal and depolarizing channels,
    (1/M) diag(2^N |phi_i><phi_i|, 1) for the erasure channel.
    """
    family = _check(family, n_qubits, param)
    channel, code = bell_code_n(n_qubits, M)
    d = 2 ** n_qubits
    elements = []
    for x in code.codewords:
        vector = channel.source_vectors[x]
        pure = np.outer(vector, vector.conj())
        if family is BellFamily.ERASURE:
            elements.append(block_diag([d * pure / M, np.array([[1.0 / M]])]).matrix)
        else:
            elements.append(d * pure / M)
    return Povm.from_matrices(elements)


def bell_lambda(family: FamilyLike, n_qubits: int, M: int, param: float = 0.0) -> HermitianOperator:
    """Lambda = c0 mu0 with c0 = 1 - Pe."""
    c0 = 1.0 - bell_error_probability(family, n_qubits, M, param)
    return bell_mu0(family, n_qubits, param).base * c0
