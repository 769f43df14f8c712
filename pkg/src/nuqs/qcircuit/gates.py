"""Two-qubit gates and circuits

Conventions used everywhere in :mod:`nuqs.qcircuit`:

- qubit 0 is the most significant bit, so a gate on qubit 0 acts as ``kron(G, I)``
  and basis state ``|q0 q1>`` has index ``2 * q0 + q1``
- ``Rz(t) = diag(e^{-it/2}, e^{it/2})``, ``Ry(t) = [[c, -s], [s, c]]`` with
  ``c = cos(t/2)``, ``s = sin(t/2)``, ``Rx(t) = exp(-i t X / 2)`` and
  ``Phase(t) = diag(1, e^{it})``
- gates are listed in time order, the unitary of ``[g1, g2]`` is ``G2 @ G1``
"""

__all__ = [
    "GateKind",
    "Gate",
    "Circuit",
    "circuit_unitary",
    "apply_circuit",
    "single_qubit_matrix",
    "ANGLE_ATOL",
]

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from nuqs.utils.exceptions import DomainError

# config logger
logger = logging.getLogger(__name__)

ANGLE_ATOL = 1e-12
"""Rotations with a smaller angle are dropped by :meth:`Circuit.simplify`"""

_TWO_PI = 2.0 * math.pi


class GateKind(Enum):
    """Supported gates; values are the tokens of the text format"""

    RX = "Rx"
    RY = "Ry"
    RZ = "Rz"
    PHASE = "Phase"
    CNOT = "CNOT"

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RX, GateKind.RY, GateKind.RZ)


def single_qubit_matrix(kind: GateKind, angle: float) -> np.ndarray:
    """2x2 matrix of a parametrized single-qubit gate"""
    half = angle / 2.0
    c, s = math.cos(half), math.sin(half)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array(
            [[complex(c, -s), 0.0], [0.0, complex(c, s)]], dtype=complex
        )
    if kind is GateKind.PHASE:
        return np.array(
            [[1.0, 0.0], [0.0, complex(math.cos(angle), math.sin(angle))]],
            dtype=complex,
        )
    raise DomainError(f"'{kind.value}' is not a single-qubit gate.")


_CNOT_01 = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CNOT_10 = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)


@dataclass(frozen=True)
class Gate:
    """A gate on ``target``; CNOTs also carry ``control``, the others an ``angle``"""

    kind: GateKind
    target: int
    control: Optional[int] = None
    angle: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        if self.target not in (0, 1):
            raise DomainError(f"Target qubit must be 0 or 1, got {self.target}.")
        if self.kind is GateKind.CNOT:
            if self.control not in (0, 1) or self.control == self.target:
                raise DomainError(
                    f"CNOT needs a control distinct from target {self.target}, "
                    f"got {self.control}."
                )
            if self.angle is not None:
                raise DomainError("CNOT takes no angle.")
        else:
            if self.control is not None:
                raise DomainError(f"'{self.kind.value}' takes no control qubit.")
            if self.angle is None or not math.isfinite(self.angle):
                raise DomainError(f"'{self.kind.value}' needs a finite angle.")
            object.__setattr__(self, "angle", float(self.angle))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CNOT, target=target, control=control)

    @classmethod
    def rx(cls, target: int, angle: float) -> "Gate":
        return cls(GateKind.RX, target=target, angle=angle)

    @classmethod
    def ry(cls, target: int, angle: float) -> "Gate":
        return cls(GateKind.RY, target=target, angle=angle)

    @classmethod
    def rz(cls, target: int, angle: float) -> "Gate":
        return cls(GateKind.RZ, target=target, angle=angle)

    @classmethod
    def phase(cls, target: int, angle: float) -> "Gate":
        return cls(GateKind.PHASE, target=target, angle=angle)

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.kind is GateKind.CNOT:
            return (self.control, self.target)
        return (self.target,)

    def local_matrix(self) -> np.ndarray:
        """2x2 matrix of a single-qubit gate"""
        return single_qubit_matrix(self.kind, self.angle)

    def matrix(self) -> np.ndarray:
        """4x4 matrix on both qubits"""
        if self.kind is GateKind.CNOT:
            return (_CNOT_01 if self.control == 0 else _CNOT_10).copy()
        local = self.local_matrix()
        if self.target == 0:
            return np.kron(local, np.eye(2))
        return np.kron(np.eye(2), local)

    def inverse(self) -> "Gate":
        if self.kind is GateKind.CNOT:
            return self
        return Gate(self.kind, target=self.target, angle=-self.angle)

    def dumps(self) -> str:
        if self.kind is GateKind.CNOT:
            return f"{self.kind.value} {self.target} {self.control}"
        return f"{self.kind.value} {self.target} {self.angle!r}"

    @classmethod
    def loads(cls, line: str) -> "Gate":
        """Parses one ``KIND target [control] [angle]`` line"""
        tokens = line.split()
        try:
            kind = GateKind(tokens[0])
            target = int(tokens[1])
            if kind is GateKind.CNOT:
                (control,) = (int(t) for t in tokens[2:])
                return cls(kind, target=target, control=control)
            (angle,) = (float(t) for t in tokens[2:])
        except (IndexError, ValueError) as error:
            raise DomainError(f"Malformed gate line '{line}'.") from error
        return cls(kind, target=target, angle=angle)


@dataclass(frozen=True)
class Circuit:
    """Ordered gates on two qubits plus a global phase (radians)"""

    gates: tuple[Gate, ...] = field(default_factory=tuple)
    global_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        """``self`` followed by ``other``"""
        return Circuit(
            gates=self.gates + other.gates,
            global_phase=self.global_phase + other.global_phase,
        )

    @property
    def cnot_count(self) -> int:
        return sum(g.kind is GateKind.CNOT for g in self.gates)

    @property
    def rotation_count(self) -> int:
        return sum(g.kind is not GateKind.CNOT for g in self.gates)

    def unitary(self) -> np.ndarray:
        return circuit_unitary(self)

    def inverse(self) -> "Circuit":
        """Circuit whose unitary is the adjoint of this one"""
        return Circuit(
            gates=tuple(g.inverse() for g in reversed(self.gates)),
            global_phase=-self.global_phase,
        )

    def simplify(self) -> "Circuit":
        """Merges and cancels gates without changing the unitary

        Adjacent rotations of the same kind on the same qubit are merged (gates on
        the other qubit in between do not count), rotation angles are wrapped into
        ``(-pi, pi]`` with the sign flip moved into the global phase, negligible
        rotations are dropped and adjacent identical CNOTs cancel. Repeats until
        nothing changes.
        """
        gates = list(self.gates)
        global_phase = self.global_phase
        # each pass removes a gate, only rewraps merged angles or changes nothing
        for _ in range(len(gates) + 2):
            merged, global_phase = _simplify_pass(gates, global_phase)
            if merged == gates:
                break
            gates = merged
        return Circuit(gates=tuple(gates), global_phase=global_phase)

    def dumps(self) -> str:
        """Text form, one gate per line, preceded by a ``# global_phase`` line"""
        lines = [f"# global_phase {self.global_phase!r}"]
        lines.extend(g.dumps() for g in self.gates)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Circuit":
        """Inverse of :meth:`dumps`; blank lines and other comments are ignored"""
        gates: list[Gate] = []
        global_phase = 0.0
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                tokens = line[1:].split()
                if len(tokens) == 2 and tokens[0] == "global_phase":
                    global_phase = float(tokens[1])
                continue
            gates.append(Gate.loads(line))
        return cls(gates=tuple(gates), global_phase=global_phase)


def _wrap(angle: float) -> tuple[float, int]:
    """Wraps ``angle`` into ``(-pi, pi]``, returning the number of ``2 pi`` removed

    Results within :data:`ANGLE_ATOL` of either end snap to ``pi`` exactly so that
    wrapping a wrapped angle is a no-op.
    """
    wrapped = math.remainder(angle, _TWO_PI)
    if abs(abs(wrapped) - math.pi) < ANGLE_ATOL:
        wrapped = math.pi
    return wrapped, round((angle - wrapped) / _TWO_PI)


def _simplify_pass(gates: list[Gate], global_phase: float) -> tuple[list[Gate], float]:
    out: list[Gate] = []
    for gate in gates:
        if gate.kind is not GateKind.CNOT:
            angle, turns = _wrap(gate.angle)
            if gate.kind.is_rotation and turns % 2:
                # R(t + 2 pi) = -R(t)
                global_phase += math.pi
            if abs(angle) < ANGLE_ATOL:
                continue
            gate = Gate(gate.kind, target=gate.target, angle=angle)

        # last gate sharing a qubit with this one
        previous = None
        for index in range(len(out) - 1, -1, -1):
            if set(out[index].qubits) & set(gate.qubits):
                previous = index
                break
        if previous is not None:
            last = out[previous]
            if gate.kind is GateKind.CNOT and last == gate:
                del out[previous]
                continue
            if (
                gate.kind is not GateKind.CNOT
                and last.kind is gate.kind
                and last.target == gate.target
            ):
                out[previous] = Gate(
                    gate.kind, target=gate.target, angle=last.angle + gate.angle
                )
                continue
        out.append(gate)
    return out, global_phase


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """4x4 unitary of a circuit, global phase included"""
    u = np.eye(4, dtype=complex) * np.exp(1j * circuit.global_phase)
    for gate in circuit.gates:
        u = gate.matrix() @ u
    return u


def apply_circuit(circuit: Circuit, state: Iterable[complex]) -> np.ndarray:
    """Applies a circuit to a 4-component state gate by gate

    The state is handled as a ``(q0, q1)`` tensor, so no 4x4 matrix is formed.

    Args:
        circuit (Circuit): Gates to apply
        state (Iterable[complex]): Amplitudes of ``|00>, |01>, |10>, |11>``

    Raises:
        DomainError: If ``state`` does not have 4 components

    Returns:
        np.ndarray: the output state
    """
    psi = np.array(state, dtype=complex)
    if psi.shape != (4,):
        raise DomainError(f"Expected a 4-component state, got shape {psi.shape}.")
    psi = psi.reshape(2, 2)
    for gate in circuit.gates:
        if gate.kind is GateKind.CNOT:
            psi = psi.copy()
            if gate.control == 0:
                psi[1, :] = psi[1, ::-1]
            else:
                psi[:, 1] = psi[::-1, 1]
        elif gate.target == 0:
            psi = gate.local_matrix() @ psi
        else:
            psi = psi @ gate.local_matrix().T
    return psi.reshape(4) * np.exp(1j * circuit.global_phase)
