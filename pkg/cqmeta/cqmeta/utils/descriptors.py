"""
Loading of JSON channel, code, problem and auxiliary-state descriptors.

Channel descriptor:
    {"kind": "pure" | "depolarizing" | "erasure",
     "amplitudes": {"label": [a0, a1, ...], ...},   # explicit pure states
     "n_qubits": N,                                  # or a Bell-code alphabet
     "p": 0.1, "epsilon": 0.2}                       # noise of the kind

Code descriptor:
    {"kind": "bell", "M": 8} or {"kind": "explicit", "codewords": ["a", "b", ...]}

Problem descriptor:
    {"states": [matrix, ...], "priors": [p1, ...]}

Complex numbers are written either as plain reals or as [re, im] pairs.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union
import json
import logging
import math

import numpy as np

from ..exceptions import DescriptorError, ParameterError
from ..models.data_models import Channel, Code, DensityOperator, InputDistribution, MaryProblem
from ..core.channel import bell_code_n, depolarize, erase, output_average, pure_state_channel
from ..core.closed_forms import BellFamily, bell_mu0

PathLike = Union[str, Path]

CHANNEL_KINDS = ("pure", "depolarizing", "erasure")


class DescriptorLoader:
    """Parses descriptor files into channels, codes, problems and states."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def load_json(self, path: PathLike) -> Any:
        """
        Read a JSON file.

        Raises:
            DescriptorError: the file is not valid JSON (with its line number)
        """
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise DescriptorError(e.msg, str(path), e.lineno) from e

    def _field(self, data: Dict[str, Any], key: str, path: PathLike) -> Any:
        if not isinstance(data, dict):
            raise DescriptorError("Expected a JSON object at the top level", str(path))
        if key not in data:
            raise DescriptorError(f"Missing key {key!r}", str(path))
        return data[key]

    def parse_scalar(self, raw: Any, where: str, path: Optional[PathLike] = None) -> complex:
        """A real number or an [re, im] pair."""
        if isinstance(raw, bool):
            raise DescriptorError(f"Expected a number at {where}, got {raw!r}", _str(path))
        if isinstance(raw, (int, float)):
            return complex(raw)
        if (isinstance(raw, list) and len(raw) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)):
            return complex(raw[0], raw[1])
        raise DescriptorError(f"Expected a number or [re, im] pair at {where}, got {raw!r}", _str(path))

    def parse_vector(self, raw: Any, where: str, path: Optional[PathLike] = None) -> np.ndarray:
        if not isinstance(raw, list) or not raw:
            raise DescriptorError(f"Expected a non-empty list at {where}", _str(path))
        return np.array([self.parse_scalar(v, f"{where}[{i}]", path) for i, v in enumerate(raw)])

    def parse_matrix(self, raw: Any, where: str, path: Optional[PathLike] = None) -> np.ndarray:
        """A square matrix given as a list of rows."""
        if not isinstance(raw, list) or not raw:
            raise DescriptorError(f"Expected a list of rows at {where}", _str(path))
        rows = [self.parse_vector(row, f"{where}[{i}]", path) for i, row in enumerate(raw)]
        if any(row.size != len(rows) for row in rows):
            raise DescriptorError(f"Matrix at {where} is not square", _str(path))
        return np.vstack(rows)

    def _noise(self, data: Dict[str, Any], kind: str, path: PathLike) -> float:
        key = "p" if kind == "depolarizing" else "epsilon"
        value = self._field(data, key, path)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DescriptorError(f"{key!r} must be a number, got {value!r}", str(path))
        return float(value)

    def _apply_noise(self, channel: Channel, kind: str, noise: float) -> Channel:
        if kind == "depolarizing":
            return depolarize(channel, noise)
        if kind == "erasure":
            return erase(channel, noise)
        return channel

    def load_channel_and_code(self, channel_path: PathLike, code_path: PathLike) -> Tuple[Channel, Code]:
        """
        Build a channel and a code from their descriptors.

        A channel descriptor without amplitudes describes the Bell alphabet of
        `n_qubits` qubits and has to be paired with a Bell code descriptor.
        """
        channel_data = self.load_json(channel_path)
        code_data = self.load_json(code_path)
        kind = self._field(channel_data, "kind", channel_path)
        if kind not in CHANNEL_KINDS:
            raise DescriptorError(f"Unknown channel kind {kind!r}", str(channel_path))
        noise = self._noise(channel_data, kind, channel_path) if kind != "pure" else 0.0
        code_kind = self._field(code_data, "kind", code_path)

        if "amplitudes" in channel_data:
            table = self._field(channel_data, "amplitudes", channel_path)
            if not isinstance(table, dict) or not table:
                raise DescriptorError("'amplitudes' must map labels to vectors", str(channel_path))
            vectors = {str(label): self.parse_vector(raw, f"amplitudes.{label}", channel_path)
                       for label, raw in table.items()}
            channel = pure_state_channel(vectors)
            if code_kind != "explicit":
                raise DescriptorError("A channel with explicit amplitudes needs an explicit code", str(code_path))
            codewords = self._field(code_data, "codewords", code_path)
            if not isinstance(codewords, list) or not codewords:
                raise DescriptorError("'codewords' must be a non-empty list", str(code_path))
            code = Code(tuple(str(c) for c in codewords))
        else:
            n_qubits = self._field(channel_data, "n_qubits", channel_path)
            if code_kind != "bell":
                raise DescriptorError("A Bell channel descriptor needs a Bell code descriptor", str(code_path))
            M = self._field(code_data, "M", code_path)
            if not isinstance(n_qubits, int) or not isinstance(M, int):
                raise DescriptorError("'n_qubits' and 'M' must be integers", str(code_path))
            channel, code = bell_code_n(n_qubits, M)

        code.check_alphabet(channel)
        channel = self._apply_noise(channel, kind, noise)
        self.logger.info(f"Loaded {kind} channel of output dimension {channel.output_dim} "
                         f"and a code of size {code.size}")
        return channel, code

    def load_problem(self, path: PathLike) -> MaryProblem:
        """M-ary problem from {"states": [...], "priors": [...]}."""
        data = self.load_json(path)
        states_raw = self._field(data, "states", path)
        priors_raw = self._field(data, "priors", path)
        if not isinstance(states_raw, list) or not isinstance(priors_raw, list):
            raise DescriptorError("'states' and 'priors' must be lists", str(path))
        states = [DensityOperator.from_matrix(self.parse_matrix(raw, f"states[{i}]", path))
                  for i, raw in enumerate(states_raw)]
        priors = []
        for i, raw in enumerate(priors_raw):
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise DescriptorError(f"Prior {i} must be a real number, got {raw!r}", str(path))
            priors.append(float(raw))
        return MaryProblem(tuple(states), tuple(priors))

    def resolve_mu(self, spec: str, channel: Channel, code: Code) -> DensityOperator:
        """
        Auxiliary state from a keyword or a JSON matrix file.

        Args:
            spec: maximally_mixed, output_average, closed_form or a path
            channel: channel the state lives on
            code: code whose input distribution defines output_average

        Returns:
            DensityOperator on the channel output space
        """
        if spec == "maximally_mixed":
            return DensityOperator.maximally_mixed(channel.output_dim)
        if spec == "output_average":
            return output_average(channel, InputDistribution.from_code(code))
        if spec == "closed_form":
            return self._closed_form_mu(channel)
        data = self.load_json(spec)
        raw = data.get("matrix") if isinstance(data, dict) else data
        mu = DensityOperator.from_matrix(self.parse_matrix(raw, "matrix", spec))
        if mu.dim != channel.output_dim:
            raise ParameterError(f"mu from {spec} has dimension {mu.dim}, channel outputs {channel.output_dim}")
        return mu

    def _closed_form_mu(self, channel: Channel) -> DensityOperator:
        family = {"pure": BellFamily.IDEAL, "depolarizing": BellFamily.DEPOLARIZING,
                  "erasure": BellFamily.ERASURE}[channel.kind]
        dim = channel.output_dim - (1 if family is BellFamily.ERASURE else 0)
        n_qubits = int(round(math.log2(dim)))
        if 2 ** n_qubits != dim or n_qubits < 2:
            raise ParameterError(f"closed_form mu needs an N-qubit Bell channel, output dimension is {dim}")
        return bell_mu0(family, n_qubits, channel.noise)


def _str(path: Optional[PathLike]) -> Optional[str]:
    return None if path is None else str(path)
