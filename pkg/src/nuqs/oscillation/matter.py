"""Oscillations in constant-density matter

The effective flavor Hamiltonian is carried in eV^2/GeV,
``H = [U diag(0, dm2_21, dm2_31) U^dagger + diag(a, 0, 0)] / (2E)``, where ``a`` (eV^2)
is the charged-current term selected by
:class:`nuqs.oscillation.constant.PotentialConvention`. Two treatments exist:

- ``exact``: numerical diagonalization (:func:`exact_diagonalize`) and evolution with
  ``exp(-i H L)`` using the same phase conversion as the vacuum code
- ``approx``: closed-form effective angles and splittings
  (:func:`approx_effective_params`) fed back to the vacuum machinery
"""

__all__ = [
    "MatterContext",
    "EffectiveParams",
    "MatterSpectrum",
    "matter_hamiltonian",
    "exact_diagonalize",
    "approx_effective_params",
    "resonance_energy",
    "matter_amplitudes",
    "matter_probability",
]

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from nuqs.oscillation.constant import (
    EV_PER_GEV,
    HERMITIAN_ATOL,
    OSC_PHASE_FACTOR,
    ApproxForm,
    MatterMode,
    MatterQuality,
    PotentialConvention,
)
from nuqs.oscillation.functional import (
    Baseline,
    FlavorLike,
    OscParams,
    as_probability,
    build_pmns,
    flavor_index,
    propagate,
)
from nuqs.utils.exceptions import DomainError

# config logger
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatterContext:
    """Beam energy ``E`` (GeV) and constant matter potential ``V`` (eV)"""

    E: float
    V: float
    convention: PotentialConvention = PotentialConvention.OPERATIONAL

    def __post_init__(self):
        if not (math.isfinite(self.E) and self.E > 0):
            raise DomainError(f"Energy must be positive, got E={self.E} GeV.")
        if not (math.isfinite(self.V) and self.V >= 0):
            raise DomainError(f"Matter potential must be non-negative, got V={self.V}.")
        object.__setattr__(
            self, "convention", PotentialConvention.from_name(self.convention)
        )

    @property
    def a(self) -> float:
        """Charged-current term in eV^2

        ``V * E`` with ``E`` in GeV for the operational convention, ``2 * E * V`` with
        ``E`` in eV for the literal one.
        """
        if self.convention is PotentialConvention.LITERAL:
            return 2.0 * self.E * EV_PER_GEV * self.V
        return self.V * self.E


@dataclass(frozen=True)
class EffectiveParams:
    """Matter-modified mixing parameters plus the intermediates that produced them

    Note:
        ``theta23_t`` and ``delta_t`` always equal their vacuum values.
    """

    theta12_t: float
    theta13_t: float
    theta23_t: float
    delta_t: float
    dm2_21_t: float
    dm2_31_t: float
    eps1: float
    eps2: float
    dm2_ee: float
    phi13: float
    quality: MatterQuality = MatterQuality.OK

    def to_osc_params(self) -> OscParams:
        """Effective parameters in the shape the vacuum functions take"""
        return OscParams(
            theta12=self.theta12_t,
            theta13=self.theta13_t,
            theta23=self.theta23_t,
            delta=self.delta_t,
            dm2_21=self.dm2_21_t,
            dm2_31=self.dm2_31_t,
        )


@dataclass(frozen=True, eq=False)
class MatterSpectrum:
    """Eigen-decomposition ``H = W diag(eigenvalues) W^dagger``

    ``eigenvalues`` are ascending (eV^2/GeV); each column of ``mixing`` has its largest
    component real and positive.
    """

    eigenvalues: np.ndarray
    mixing: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.mixing * self.eigenvalues) @ self.mixing.conj().T

    def splittings(self, energy: float) -> np.ndarray:
        """``(dm2_21, dm2_31)`` in eV^2 of the matter eigenstates at ``energy`` (GeV)"""
        return 2.0 * energy * (self.eigenvalues[1:] - self.eigenvalues[0])


def matter_hamiltonian(params: OscParams, ctx: MatterContext) -> np.ndarray:
    """Effective flavor Hamiltonian in eV^2/GeV

    Args:
        params (OscParams): Vacuum mixing parameters
        ctx (MatterContext): Energy and potential

    Returns:
        np.ndarray: 3x3 Hermitian matrix with trace ``(dm2_21 + dm2_31 + a) / 2E``
    """
    u = build_pmns(params).u
    h = (u * np.array([0.0, params.dm2_21, params.dm2_31])) @ u.conj().T
    h[0, 0] += ctx.a
    h = h / (2.0 * ctx.E)
    return (h + h.conj().T) / 2.0


def exact_diagonalize(hamiltonian: np.ndarray) -> MatterSpectrum:
    """Diagonalizes a Hermitian matrix with a deterministic eigenvector phase

    Args:
        hamiltonian (np.ndarray): square Hermitian matrix

    Raises:
        DomainError: If ``hamiltonian`` is not square or its Hermitian residual
            exceeds :data:`nuqs.oscillation.constant.HERMITIAN_ATOL`

    Returns:
        MatterSpectrum: ascending eigenvalues and phase-fixed eigenvectors
    """
    h = np.asarray(hamiltonian, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {h.shape}.")
    residual = float(np.max(np.abs(h - h.conj().T)))
    if residual > HERMITIAN_ATOL:
        raise DomainError(f"Matrix is not Hermitian (residual {residual:.3e}).")

    eigenvalues, mixing = np.linalg.eigh(h)
    pivots = np.argmax(np.abs(mixing), axis=0)
    pivot_values = mixing[pivots, np.arange(mixing.shape[1])]
    mixing = mixing * (pivot_values.conj() / np.abs(pivot_values))
    return MatterSpectrum(eigenvalues=eigenvalues, mixing=mixing)


def approx_effective_params(
    params: OscParams,
    ctx: MatterContext,
    form: Union[ApproxForm, str] = ApproxForm.CORRECTED,
) -> EffectiveParams:
    """Closed-form matter-modified angles and splittings

    The reactor sector is solved first, ``theta13_t`` and the rotation
    ``psi = theta13_t - theta13`` then feed the solar sector. ``theta23`` and ``delta``
    are untouched.

    Args:
        params (OscParams): Vacuum mixing parameters
        ctx (MatterContext): Energy and potential
        form (Union[ApproxForm, str], optional): ``corrected`` reduces exactly to vacuum
            at zero potential and tracks the exact spectrum; ``verbatim`` keeps the
            printed expressions that use ``phi13`` in place of ``psi``.
            Defaults to :attr:`ApproxForm.CORRECTED`.

    Raises:
        DomainError: If ``dm2_21`` or ``dm2_ee`` vanish

    Returns:
        EffectiveParams: with ``quality`` set to ``resonance-crossed`` once
        ``a >= |dm2_ee|``
    """
    form = ApproxForm.from_name(form)
    a = ctx.a
    dm2_21 = params.dm2_21
    dm2_ee = params.dm2_ee
    if dm2_21 == 0.0 or dm2_ee == 0.0:
        raise DomainError(
            "Closed-form matter parameters need non-zero dm2_21 and dm2_ee."
        )

    # reactor sector
    eps2 = a / dm2_ee
    cos_13 = math.cos(2.0 * params.theta13) - eps2
    sin_13 = math.sin(2.0 * params.theta13)
    theta13_t = 0.5 * math.atan2(sin_13, cos_13)
    phi13 = theta13_t

    # solar sector
    cos_12 = math.cos(2.0 * params.theta12)
    sin_12 = math.sin(2.0 * params.theta12)
    if form is ApproxForm.CORRECTED:
        psi = phi13 - params.theta13
        eps1 = (a * math.cos(phi13) ** 2 + dm2_ee * math.sin(psi) ** 2) / dm2_21
        splitting_off = sin_12 * math.cos(psi)
        angle_off = splitting_off
    else:
        eps1 = (
            a * math.cos(phi13 + params.theta13) ** 2 + dm2_ee * math.sin(phi13) ** 2
        ) / dm2_21
        splitting_off = sin_12 * math.cos(2.0 * phi13)
        angle_off = sin_12 * math.sin(2.0 * phi13)
    dm2_21_t = dm2_21 * math.hypot(cos_12 - eps1, splitting_off)
    theta12_t = 0.5 * math.atan2(angle_off, cos_12 - eps1)

    dm2_31_t = (
        0.75 * dm2_ee * math.hypot(cos_13, sin_13)
        + 0.25 * (dm2_ee + a)
        + 0.5 * (dm2_21_t - dm2_21 * cos_12)
    )

    quality = MatterQuality.OK
    if a > 0 and a >= abs(dm2_ee):
        quality = MatterQuality.RESONANCE_CROSSED
        logger.warning(
            f"a = {a:.3e} eV^2 crosses the atmospheric resonance "
            f"(|dm2_ee| = {abs(dm2_ee):.3e} eV^2); closed-form parameters are unreliable."
        )

    return EffectiveParams(
        theta12_t=theta12_t,
        theta13_t=theta13_t,
        theta23_t=params.theta23,
        delta_t=params.delta,
        dm2_21_t=dm2_21_t,
        dm2_31_t=dm2_31_t,
        eps1=eps1,
        eps2=eps2,
        dm2_ee=dm2_ee,
        phi13=phi13,
        quality=quality,
    )


def resonance_energy(
    params: OscParams,
    V: float,
    convention: Union[PotentialConvention, str] = PotentialConvention.OPERATIONAL,
) -> float:
    """Energy (GeV) at which ``a = dm2_ee * cos(2 theta13)``

    Raises:
        DomainError: If ``V`` is not positive or the ordering has no resonance for
            neutrinos (``dm2_ee < 0``)
    """
    convention = PotentialConvention.from_name(convention)
    if not V > 0:
        raise DomainError(f"Resonance needs a positive potential, got V={V}.")
    target = params.dm2_ee * math.cos(2.0 * params.theta13)
    if target <= 0:
        raise DomainError("No neutrino resonance for this mass ordering.")
    if convention is PotentialConvention.LITERAL:
        return target / (2.0 * EV_PER_GEV * V)
    return target / V


def matter_amplitudes(
    params: OscParams,
    ctx: MatterContext,
    baseline_L: float,
    initial: FlavorLike,
    mode: Union[MatterMode, str] = MatterMode.APPROX,
    form: Union[ApproxForm, str] = ApproxForm.CORRECTED,
) -> np.ndarray:
    """Flavor amplitudes after ``baseline_L`` km of constant-density matter

    Args:
        params (OscParams): Vacuum mixing parameters
        ctx (MatterContext): Energy and potential
        baseline_L (float): Distance in km
        initial (FlavorLike): One of ``e``, ``mu`` or ``tau``
        mode (Union[MatterMode, str], optional): ``approx`` reuses the vacuum
            machinery with :func:`approx_effective_params`, ``exact`` evolves with the
            spectrum of :func:`matter_hamiltonian`. Defaults to ``approx``.
        form (Union[ApproxForm, str], optional): See :func:`approx_effective_params`

    Returns:
        np.ndarray: 3 complex amplitudes with unit norm
    """
    mode = MatterMode.from_name(mode)
    baseline = Baseline(L=baseline_L, E=ctx.E)
    if mode is MatterMode.APPROX:
        effective = approx_effective_params(params, ctx, form=form)
        return propagate(effective.to_osc_params(), baseline, initial)

    alpha = flavor_index(initial)
    spectrum = exact_diagonalize(matter_hamiltonian(params, ctx))
    # H carries eV^2/GeV, so 2E * lambda is the splitting the vacuum phase expects
    phases = 2.0 * OSC_PHASE_FACTOR * (2.0 * ctx.E * spectrum.eigenvalues) * (
        baseline.L / baseline.E
    )
    w = spectrum.mixing
    evolution = (w * np.exp(-1j * phases)) @ w.conj().T
    return evolution[:, alpha]


def matter_probability(
    params: OscParams,
    ctx: MatterContext,
    baseline_L: float,
    alpha: FlavorLike,
    beta: FlavorLike,
    mode: Union[MatterMode, str] = MatterMode.APPROX,
    form: Union[ApproxForm, str] = ApproxForm.CORRECTED,
) -> float:
    """Probability ``P(alpha -> beta)`` in matter

    See :func:`matter_amplitudes` for the arguments.
    """
    b = flavor_index(beta)
    amplitudes = matter_amplitudes(
        params, ctx, baseline_L, alpha, mode=mode, form=form
    )
    return as_probability(abs(amplitudes[b]) ** 2)
