"""Three-flavor oscillation on two qubits

Flavors are mapped to basis states ``e -> |00>``, ``mu -> |01>``, ``tau -> |10>`` and the
decoupled sterile state ``chi -> |11>``. The mixing matrix is embedded in a 4x4 unitary
``U4`` and the evolution ``U4 M4 U4^dagger`` is run either as a matrix product or as a
synthesized circuit: ``synth(U4)^dagger``, two single-qubit phase gates, ``synth(U4)``.
"""

__all__ = [
    "PhiPolicy",
    "Pmns4",
    "PhaseMatrix4",
    "embed_pmns",
    "phase_matrix4",
    "pipeline_unitary",
    "pipeline_circuit",
    "pipeline_state",
    "run_pipeline",
]

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from nuqs.oscillation.constant import ApproxForm, Backend, MatterMode
from nuqs.oscillation.functional import (
    Baseline,
    FlavorLike,
    OscParams,
    PmnsMatrix,
    build_pmns,
    flavor_index,
    oscillation_phase,
)
from nuqs.oscillation.matter import (
    MatterContext,
    approx_effective_params,
    exact_diagonalize,
    matter_hamiltonian,
)
from nuqs.qcircuit.gates import Circuit, Gate, apply_circuit
from nuqs.qcircuit.synthesis import synthesize
from nuqs.utils.exceptions import DomainError

# config logger
logger = logging.getLogger(__name__)

PhiPolicy = Union[Literal["sum", "zero"], float]
"""Phase of the sterile basis state: ``"sum"`` (``phi21 + phi31``), ``"zero"`` or a
fixed angle in radians
"""

_EMBEDDING_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class Pmns4:
    """4x4 unitary with the mixing matrix in the top-left block and 1 at ``(3, 3)``"""

    u4: np.ndarray

    @property
    def dagger(self) -> np.ndarray:
        return self.u4.conj().T


@dataclass(frozen=True)
class PhaseMatrix4:
    """``diag(1, e^{-i phi21}, e^{-i phi31}, e^{-i phi_ab})``"""

    phi21: float
    phi31: float
    phi_ab: float

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(-1j * np.array([0.0, self.phi21, self.phi31, self.phi_ab])))

    @property
    def is_product(self) -> bool:
        """Whether the matrix factorizes into single-qubit phase gates"""
        return self.factorization_residual() <= 1e-12

    def factorization_residual(self) -> float:
        """``max |M4 - diag(1, e^{-i phi31}) x diag(1, e^{-i phi21})|``"""
        product = np.kron(
            np.diag([1.0, np.exp(-1j * self.phi31)]),
            np.diag([1.0, np.exp(-1j * self.phi21)]),
        )
        return float(np.max(np.abs(self.matrix() - product)))

    def gates(self) -> Circuit:
        """``Phase(-phi31)`` on qubit 0 and ``Phase(-phi21)`` on qubit 1

        Raises:
            DomainError: If the matrix is not a product of single-qubit phases
        """
        if not self.is_product:
            raise DomainError(
                "Only phi_ab = phi21 + phi31 factorizes into single-qubit phase gates."
            )
        return Circuit(gates=(Gate.phase(0, -self.phi31), Gate.phase(1, -self.phi21)))


def embed_pmns(u: Union[PmnsMatrix, np.ndarray]) -> Pmns4:
    """Embeds a 3x3 unitary into the two-qubit space with a decoupled sterile state

    Raises:
        DomainError: If ``u`` is not a 3x3 unitary
    """
    u = np.asarray(u.u if isinstance(u, PmnsMatrix) else u, dtype=complex)
    if u.shape != (3, 3):
        raise DomainError(f"Expected a 3x3 matrix, got shape {u.shape}.")
    residual = float(np.max(np.abs(u @ u.conj().T - np.eye(3))))
    if residual > _EMBEDDING_ATOL:
        raise DomainError(f"Mixing matrix is not unitary (residual {residual:.3e}).")
    u4 = np.eye(4, dtype=complex)
    u4[:3, :3] = u
    return Pmns4(u4=u4)


def _phase_matrix(phi21: float, phi31: float, phi_ab_policy: PhiPolicy) -> PhaseMatrix4:
    if isinstance(phi_ab_policy, str) and phi_ab_policy == "sum":
        phi_ab = phi21 + phi31
    elif isinstance(phi_ab_policy, str) and phi_ab_policy == "zero":
        phi_ab = 0.0
    elif isinstance(phi_ab_policy, (int, float)) and not isinstance(phi_ab_policy, bool):
        phi_ab = float(phi_ab_policy)
    else:
        raise DomainError(f"Unknown phi_ab policy '{phi_ab_policy}'.")
    return PhaseMatrix4(phi21=phi21, phi31=phi31, phi_ab=phi_ab)


def phase_matrix4(
    params: OscParams, baseline: Baseline, phi_ab_policy: PhiPolicy = "sum"
) -> PhaseMatrix4:
    """Mass-basis evolution extended to the sterile state

    Args:
        params (OscParams): Mixing parameters, only the splittings are used
        baseline (Baseline): Distance and energy
        phi_ab_policy (PhiPolicy, optional): See :data:`PhiPolicy`. Defaults to
            ``"sum"``, which makes the matrix a product of two phase gates.

    Raises:
        DomainError: For an unknown policy
    """
    return _phase_matrix(
        oscillation_phase(params.dm2_21, baseline),
        oscillation_phase(params.dm2_31, baseline),
        phi_ab_policy,
    )


def _mixing_and_phases(
    params: OscParams,
    baseline: Baseline,
    matter: Optional[MatterContext],
    mode: Union[MatterMode, str],
    form: Union[ApproxForm, str],
    phi_ab_policy: PhiPolicy,
) -> tuple[Pmns4, PhaseMatrix4]:
    if matter is None:
        return embed_pmns(build_pmns(params)), phase_matrix4(
            params, baseline, phi_ab_policy
        )
    if matter.E != baseline.E:
        raise DomainError(
            f"Matter energy {matter.E} GeV differs from baseline energy {baseline.E} GeV."
        )
    if MatterMode.from_name(mode) is MatterMode.APPROX:
        effective = approx_effective_params(params, matter, form=form).to_osc_params()
        return embed_pmns(build_pmns(effective)), phase_matrix4(
            effective, baseline, phi_ab_policy
        )
    # exact: the eigenbasis plays the mixing matrix, eigenvalue gaps the splittings
    spectrum = exact_diagonalize(matter_hamiltonian(params, matter))
    dm2_21, dm2_31 = spectrum.splittings(matter.E)
    return embed_pmns(spectrum.mixing), _phase_matrix(
        oscillation_phase(dm2_21, baseline),
        oscillation_phase(dm2_31, baseline),
        phi_ab_policy,
    )


def pipeline_unitary(
    params: OscParams,
    baseline: Baseline,
    matter: Optional[MatterContext] = None,
    phi_ab_policy: PhiPolicy = "sum",
    mode: Union[MatterMode, str] = MatterMode.APPROX,
    form: Union[ApproxForm, str] = ApproxForm.CORRECTED,
) -> np.ndarray:
    """``U4 M4 U4^dagger``

    With ``matter``, ``mode`` selects the closed-form effective parameters
    (``approx``) or the eigen-decomposition of the matter Hamiltonian (``exact``).
    """
    u4, m4 = _mixing_and_phases(params, baseline, matter, mode, form, phi_ab_policy)
    return u4.u4 @ m4.matrix() @ u4.dagger


def pipeline_circuit(
    params: OscParams,
    baseline: Baseline,
    matter: Optional[MatterContext] = None,
    phi_ab_policy: PhiPolicy = "sum",
    mode: Union[MatterMode, str] = MatterMode.APPROX,
    form: Union[ApproxForm, str] = ApproxForm.CORRECTED,
) -> Circuit:
    """Gate-level evolution: ``synth(U4)^dagger``, phase gates, ``synth(U4)``

    When the policy does not factorize the phase matrix, it is synthesized as a
    generic two-qubit unitary instead of two phase gates.
    """
    u4, phases = _mixing_and_phases(
        params, baseline, matter, mode, form, phi_ab_policy
    )
    mixing = synthesize(u4.u4)
    middle = phases.gates() if phases.is_product else synthesize(phases.matrix())
    circuit = mixing.inverse() + middle + mixing
    logger.debug(
        f"pipeline circuit: {circuit.cnot_count} CNOTs, "
        f"{circuit.rotation_count} single-qubit gates"
    )
    return circuit


def pipeline_state(
    params: OscParams,
    baseline: Baseline,
    initial: FlavorLike,
    backend: Union[Backend, str] = Backend.MATRIX4,
    matter: Optional[MatterContext] = None,
    phi_ab_policy: PhiPolicy = "sum",
    mode: Union[MatterMode, str] = MatterMode.APPROX,
    form: Union[ApproxForm, str] = ApproxForm.CORRECTED,
) -> np.ndarray:
    """Two-qubit state after the evolution, starting from a flavor basis state

    Args:
        params (OscParams): Vacuum mixing parameters
        baseline (Baseline): Distance and energy
        initial (FlavorLike): One of ``e``, ``mu`` or ``tau``
        backend (Union[Backend, str], optional): ``matrix4`` multiplies 4x4 matrices,
            ``circuit`` applies the synthesized gates one by one.
            Defaults to ``matrix4``.
        matter (Optional[MatterContext], optional): Constant-density matter; its
            energy must equal ``baseline.E``. Defaults to None (vacuum).
        phi_ab_policy (PhiPolicy, optional): See :data:`PhiPolicy`
        mode (Union[MatterMode, str], optional): Matter treatment, see
            :func:`pipeline_unitary`. Defaults to ``approx``.
        form (Union[ApproxForm, str], optional): See
            :func:`nuqs.oscillation.matter.approx_effective_params`

    Raises:
        DomainError: If ``initial`` is sterile or ``backend`` is ``closed-form``

    Returns:
        np.ndarray: 4 complex amplitudes over ``|00>, |01>, |10>, |11>``
    """
    backend = Backend.from_name(backend)
    state = np.zeros(4, dtype=complex)
    state[flavor_index(initial)] = 1.0
    if backend is Backend.MATRIX4:
        unitary = pipeline_unitary(
            params, baseline, matter, phi_ab_policy, mode, form
        )
        return unitary @ state
    if backend is Backend.CIRCUIT:
        circuit = pipeline_circuit(params, baseline, matter, phi_ab_policy, mode, form)
        return apply_circuit(circuit, state)
    raise DomainError(f"Backend '{backend.name}' does not run the two-qubit pipeline.")


def run_pipeline(
    params: OscParams,
    baseline: Baseline,
    initial: FlavorLike,
    backend: Union[Backend, str] = Backend.MATRIX4,
    matter: Optional[MatterContext] = None,
    phi_ab_policy: PhiPolicy = "sum",
    mode: Union[MatterMode, str] = MatterMode.APPROX,
    form: Union[ApproxForm, str] = ApproxForm.CORRECTED,
) -> np.ndarray:
    """Probabilities of ``e, mu, tau, chi`` after the evolution

    See :func:`pipeline_state` for the arguments.

    Returns:
        np.ndarray: 4 probabilities; the sterile one stays below ``1e-12``
    """
    state = pipeline_state(
        params, baseline, initial, backend, matter, phi_ab_policy, mode, form
    )
    return np.abs(state) ** 2
