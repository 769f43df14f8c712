"""Vacuum three-flavor oscillations

Two independent evaluation paths are provided and must agree: the closed-form double
sum over mass states (:func:`probability_closed_form`) and propagation of the flavor
basis vector through ``U M U^dagger`` (:func:`probability_via_propagation`).
"""

__all__ = [
    "OscParams",
    "PmnsMatrix",
    "Baseline",
    "flavor_index",
    "oscillation_phase",
    "build_pmns",
    "vacuum_phase_matrix",
    "evolution_operator",
    "propagate",
    "as_probability",
    "probability_closed_form",
    "probability_via_propagation",
    "probability_matrix",
    "cp_asymmetry",
    "cp_conjugate_asymmetry",
]

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from nuqs.oscillation.constant import (
    DEFAULT_MIXING_DEG,
    DEFAULT_SPLITTINGS_EV2,
    IMAGINARY_RESIDUAL_ATOL,
    OSC_PHASE_FACTOR,
    PROBABILITY_ATOL,
    Flavor,
)
from nuqs.utils.exceptions import DomainError, NumericalValidationError

# config logger
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OscParams:
    """Mixing angles, Dirac phase (radians) and mass splittings (eV^2)

    Both mass orderings are allowed, i.e. ``dm2_31`` may be negative.
    """

    theta12: float
    theta13: float
    theta23: float
    delta: float
    dm2_21: float
    dm2_31: float

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not math.isfinite(value):
                raise DomainError(f"'{field.name}' must be finite, got {value}.")

    @property
    def dm2_32(self) -> float:
        return self.dm2_31 - self.dm2_21

    @property
    def dm2_ee(self) -> float:
        """Electron-flavor weighted atmospheric splitting

        ``dm2_31 * cos^2(theta12) + dm2_32 * sin^2(theta12)``
        """
        return (
            self.dm2_31 * math.cos(self.theta12) ** 2
            + self.dm2_32 * math.sin(self.theta12) ** 2
        )

    @classmethod
    def from_degrees(
        cls,
        theta12: float,
        theta13: float,
        theta23: float,
        delta: float,
        dm2_21: float,
        dm2_31: float,
    ) -> "OscParams":
        """Builds parameters from angles and phase given in degrees"""
        return cls(
            theta12=math.radians(theta12),
            theta13=math.radians(theta13),
            theta23=math.radians(theta23),
            delta=math.radians(delta),
            dm2_21=dm2_21,
            dm2_31=dm2_31,
        )

    @classmethod
    def defaults(cls) -> "OscParams":
        """Global-fit values used by every shipped scenario

        See :data:`nuqs.oscillation.constant.DEFAULT_MIXING_DEG` and
        :data:`nuqs.oscillation.constant.DEFAULT_SPLITTINGS_EV2`.
        """
        return cls.from_degrees(**DEFAULT_MIXING_DEG, **DEFAULT_SPLITTINGS_EV2)

    def with_delta(self, delta: float) -> "OscParams":
        """Copy with a different CP phase (radians)"""
        return dataclasses.replace(self, delta=delta)


@dataclass(frozen=True, eq=False)
class PmnsMatrix:
    """Unitary 3x3 lepton mixing matrix ``u[alpha, i]`` (flavor row, mass column)"""

    u: np.ndarray

    @property
    def dagger(self) -> np.ndarray:
        return self.u.conj().T

    def unitarity_residual(self) -> float:
        """``max |U U^dagger - I|``"""
        return float(np.max(np.abs(self.u @ self.dagger - np.eye(self.u.shape[0]))))

    def conjugate(self) -> "PmnsMatrix":
        """Mixing matrix seen by antineutrinos"""
        return PmnsMatrix(u=self.u.conj())


@dataclass(frozen=True)
class Baseline:
    """Propagation distance ``L`` in km and energy ``E`` in GeV"""

    L: float
    E: float

    def __post_init__(self):
        if not (math.isfinite(self.E) and self.E > 0):
            raise DomainError(f"Energy must be positive, got E={self.E} GeV.")
        if not (math.isfinite(self.L) and self.L >= 0):
            raise DomainError(f"Baseline must be non-negative, got L={self.L} km.")

    @property
    def L_over_E(self) -> float:
        return self.L / self.E

    @classmethod
    def from_l_over_e(cls, l_over_e: float, energy: float = 1.0) -> "Baseline":
        """Baseline reaching ``l_over_e`` (km/GeV) at ``energy`` (GeV)"""
        return cls(L=l_over_e * energy, E=energy)


FlavorLike = Union[Flavor, str, int]


def flavor_index(flavor: FlavorLike, allow_sterile: bool = False) -> int:
    """Row index of a flavor in the flavor basis

    Args:
        flavor (FlavorLike): A :class:`nuqs.oscillation.constant.Flavor`, its name
            (e.g. ``"mu"``) or its index
        allow_sterile (bool, optional): Whether ``chi`` is accepted, which is only
            meaningful in the two-qubit embedding. Defaults to False.

    Raises:
        DomainError: If ``flavor`` is unknown or sterile where it is not allowed
    """
    try:
        if isinstance(flavor, Flavor):
            member = flavor
        elif isinstance(flavor, (int, np.integer)):
            member = Flavor(int(flavor))
        else:
            member = Flavor.from_name(flavor)
    except ValueError as error:
        raise DomainError(str(error)) from error
    if member is Flavor.CHI and not allow_sterile:
        raise DomainError(
            "The sterile state 'chi' only exists in the two-qubit embedding."
        )
    return member.value


def oscillation_phase(dm2: float, baseline: Baseline) -> float:
    """Phase ``2 * 1.27 * dm2 * L / E`` accumulated by a splitting ``dm2`` (eV^2)"""
    return 2.0 * OSC_PHASE_FACTOR * dm2 * baseline.L / baseline.E


def build_pmns(params: OscParams, antineutrino: bool = False) -> PmnsMatrix:
    """Builds the mixing matrix ``R23 @ U13(delta) @ R12``

    Entries are written out in closed form rather than multiplying the three
    rotation factors.

    Args:
        params (OscParams): Mixing parameters
        antineutrino (bool, optional): If True, returns the complex conjugate which
            is what antineutrinos propagate with (same as ``delta -> -delta``).
            Defaults to False.

    Returns:
        PmnsMatrix: unitary to ``1e-12``
    """
    s12, c12 = math.sin(params.theta12), math.cos(params.theta12)
    s13, c13 = math.sin(params.theta13), math.cos(params.theta13)
    s23, c23 = math.sin(params.theta23), math.cos(params.theta23)
    e_pos = complex(math.cos(params.delta), math.sin(params.delta))
    e_neg = e_pos.conjugate()

    u = np.array(
        [
            [c12 * c13, s12 * c13, s13 * e_neg],
            [
                -s12 * c23 - c12 * s23 * s13 * e_pos,
                c12 * c23 - s12 * s23 * s13 * e_pos,
                s23 * c13,
            ],
            [
                s12 * s23 - c12 * c23 * s13 * e_pos,
                -c12 * s23 - s12 * c23 * s13 * e_pos,
                c23 * c13,
            ],
        ],
        dtype=complex,
    )
    if antineutrino:
        u = u.conj()
    return PmnsMatrix(u=u)


def _mass_phases(params: OscParams, baseline: Baseline) -> np.ndarray:
    return np.array(
        [
            0.0,
            oscillation_phase(params.dm2_21, baseline),
            oscillation_phase(params.dm2_31, baseline),
        ]
    )


def vacuum_phase_matrix(params: OscParams, baseline: Baseline) -> np.ndarray:
    """Diagonal evolution in the mass basis ``diag(1, e^{-i phi21}, e^{-i phi31})``

    Args:
        params (OscParams): Mixing parameters, only the splittings are used
        baseline (Baseline): Distance and energy

    Returns:
        np.ndarray: 3x3 complex diagonal matrix
    """
    return np.diag(np.exp(-1j * _mass_phases(params, baseline)))


def evolution_operator(
    params: OscParams, baseline: Baseline, antineutrino: bool = False
) -> np.ndarray:
    """Flavor-basis evolution ``S = U M U^dagger``; ``S[beta, alpha]`` is the amplitude
    of ``alpha -> beta``
    """
    u = build_pmns(params, antineutrino=antineutrino).u
    return u @ vacuum_phase_matrix(params, baseline) @ u.conj().T


def propagate(
    params: OscParams,
    baseline: Baseline,
    initial: FlavorLike,
    antineutrino: bool = False,
) -> np.ndarray:
    """Flavor amplitudes at distance ``baseline.L`` of a neutrino born as ``initial``

    Args:
        params (OscParams): Mixing parameters
        baseline (Baseline): Distance and energy
        initial (FlavorLike): One of ``e``, ``mu`` or ``tau``
        antineutrino (bool, optional): Propagate an antineutrino. Defaults to False.

    Returns:
        np.ndarray: complex vector of 3 amplitudes with unit norm
    """
    alpha = flavor_index(initial)
    return evolution_operator(params, baseline, antineutrino=antineutrino)[:, alpha]


def as_probability(value: complex, what: str = "probability") -> float:
    """Takes a computed probability as a real number in ``[0, 1]``

    Args:
        value (complex): Raw value that may carry round-off
        what (str, optional): Label used in error messages

    Raises:
        NumericalValidationError: If the imaginary residual or the excursion
            outside ``[0, 1]`` exceeds
            :data:`nuqs.oscillation.constant.PROBABILITY_ATOL`

    Returns:
        float: clamped value
    """
    value = complex(value)
    if abs(value.imag) > IMAGINARY_RESIDUAL_ATOL:
        raise NumericalValidationError(
            f"{what} has an imaginary residual of {value.imag:.3e}."
        )
    real = value.real
    if real < -PROBABILITY_ATOL or real > 1.0 + PROBABILITY_ATOL:
        raise NumericalValidationError(f"{what} = {real!r} lies outside [0, 1].")
    return min(max(real, 0.0), 1.0)


def probability_closed_form(
    params: OscParams,
    baseline: Baseline,
    alpha: FlavorLike,
    beta: FlavorLike,
    antineutrino: bool = False,
) -> float:
    """Oscillation probability by the double sum over mass states

    ``sum_ij conj(U[a,i]) U[b,i] U[a,j] conj(U[b,j]) exp(-i (phi_i - phi_j))`` where
    ``phi_i`` is the phase of mass state ``i`` relative to state 1.

    Args:
        params (OscParams): Mixing parameters
        baseline (Baseline): Distance and energy
        alpha (FlavorLike): Initial flavor
        beta (FlavorLike): Detected flavor
        antineutrino (bool, optional): Antineutrino channel. Defaults to False.

    Returns:
        float: probability in ``[0, 1]``
    """
    a, b = flavor_index(alpha), flavor_index(beta)
    u = build_pmns(params, antineutrino=antineutrino).u
    phases = _mass_phases(params, baseline)

    w = u[a, :].conj() * u[b, :]
    terms = np.outer(w, w.conj()) * np.exp(
        -1j * (phases[:, np.newaxis] - phases[np.newaxis, :])
    )
    return as_probability(np.sum(terms), f"P({Flavor(a).name}->{Flavor(b).name})")


def probability_via_propagation(
    params: OscParams,
    baseline: Baseline,
    alpha: FlavorLike,
    beta: FlavorLike,
    antineutrino: bool = False,
) -> float:
    """Oscillation probability as ``|<beta| U M U^dagger |alpha>|^2``

    See :func:`probability_closed_form` for the arguments.
    """
    b = flavor_index(beta)
    amplitudes = propagate(params, baseline, alpha, antineutrino=antineutrino)
    return as_probability(abs(amplitudes[b]) ** 2)


def probability_matrix(
    params: OscParams, baseline: Baseline, antineutrino: bool = False
) -> np.ndarray:
    """All nine probabilities at once, ``P[alpha, beta]``; rows sum to one"""
    s = evolution_operator(params, baseline, antineutrino=antineutrino)
    return np.clip((np.abs(s) ** 2).T, 0.0, 1.0)


def cp_asymmetry(
    params: OscParams,
    baseline: Baseline,
    alpha: FlavorLike,
    beta: FlavorLike,
    deltas: tuple[float, float] = (math.pi / 2, -math.pi / 2),
) -> float:
    """Change of ``P(alpha -> beta)`` between two CP phases

    Returns ``P(deltas[0]) - P(deltas[1])``, by default the maximal-violation pair
    ``pi/2`` and ``-pi/2``.
    """
    first, second = deltas
    return probability_closed_form(
        params.with_delta(first), baseline, alpha, beta
    ) - probability_closed_form(params.with_delta(second), baseline, alpha, beta)


def cp_conjugate_asymmetry(
    params: OscParams, baseline: Baseline, alpha: FlavorLike, beta: FlavorLike
) -> float:
    """Neutrino minus antineutrino probability of the same channel"""
    return probability_closed_form(
        params, baseline, alpha, beta
    ) - probability_closed_form(params, baseline, alpha, beta, antineutrino=True)
