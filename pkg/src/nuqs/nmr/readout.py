"""Emulated NMR readout of the two-qubit flavor register

The register starts in a pseudo-pure state (PPS) ``(1 - eta)/4 I + eta |00><00|``. After
the evolution, two acquisitions are taken: ``YI`` applies ``Ry(pi/2)`` to qubit 0 and
``IY`` to qubit 1, both with ``Ry(pi/2) = [[1, -1], [1, 1]] / sqrt(2)``. The absorption
(real) parts of four elements of the mapped states are the line intensities, and

- ``Re rho1[0, 2] = (rho[0, 0] - rho[2, 2]) / 2``, ``Re rho1[1, 3] = (rho[1, 1] - rho[3, 3]) / 2``
- ``Re rho2[0, 1] = (rho[0, 0] - rho[1, 1]) / 2``, ``Re rho2[2, 3] = (rho[2, 2] - rho[3, 3]) / 2``

hold for any Hermitian unit-trace ``rho``; the imaginary coherences cancel in the real
part. Together with the unit trace these give the flavor populations directly. With the
opposite sign convention of ``Ry(pi/2)`` the differences change sign.
"""

__all__ = [
    "DENSITY_ATOL",
    "AcquisitionPulse",
    "DensityMatrix",
    "PpsParams",
    "SpectralReadout",
    "ReadoutResult",
    "pure_state",
    "pps_state",
    "evolved_pps",
    "fidelity",
    "acquisition_map",
    "spectral_readout",
    "noisy_readout",
    "extract_probabilities",
    "pps_debias",
    "propagated_sigma",
]

import logging
import math
from dataclasses import dataclass
from enum import auto
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from nuqs.oscillation.constant import CustomNamingEnum
from nuqs.utils.exceptions import DomainError

# config logger
logger = logging.getLogger(__name__)

DENSITY_ATOL = 1e-12
"""Tolerance on Hermiticity and unit trace of a density matrix"""

PSD_ATOL = 1e-10
"""Most negative eigenvalue accepted in a density matrix"""

# eigenvalues below this are treated as zero when taking matrix square roots
_SQRT_CUTOFF = 1e-13

_RY_HALF_PI = np.array([[1.0, -1.0], [1.0, 1.0]], dtype=complex) / math.sqrt(2.0)


class AcquisitionPulse(CustomNamingEnum):
    """Read pulses; ``YI`` rotates qubit 0, ``IY`` qubit 1"""

    YI = auto()
    IY = auto()


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """4x4 Hermitian, unit-trace, positive semidefinite matrix

    Raises:
        DomainError: If any of the properties is violated beyond :data:`DENSITY_ATOL`
            (:data:`PSD_ATOL` for positivity)
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise DomainError(f"Expected a 4x4 density matrix, got shape {rho.shape}.")
        hermitian = float(np.max(np.abs(rho - rho.conj().T)))
        if hermitian > DENSITY_ATOL:
            raise DomainError(f"Density matrix is not Hermitian ({hermitian:.3e}).")
        trace = np.trace(rho)
        if abs(trace - 1.0) > DENSITY_ATOL:
            raise DomainError(f"Density matrix has trace {trace:.12g}, not 1.")
        smallest = float(np.min(np.linalg.eigvalsh(rho)))
        if smallest < -PSD_ATOL:
            raise DomainError(
                f"Density matrix is not positive semidefinite (eigenvalue {smallest:.3e})."
            )
        object.__setattr__(self, "rho", rho)

    @property
    def populations(self) -> np.ndarray:
        return self.rho.diagonal().real.copy()


@dataclass(frozen=True)
class PpsParams:
    """Polarization ``eta`` of the pseudo-pure state, ``0 < eta <= 1``"""

    eta: float = 1e-5

    def __post_init__(self):
        if not (math.isfinite(self.eta) and 0.0 < self.eta <= 1.0):
            raise DomainError(f"Polarization must lie in (0, 1], got eta={self.eta}.")


@dataclass(frozen=True)
class SpectralReadout:
    """Absorption-mode line intensities of the two acquisitions

    ``r1_*`` come from the ``YI`` acquisition, ``r2_*`` from ``IY``. ``sigma`` is the
    standard deviation of the noise added to each of them.
    """

    r1_13: float
    r1_24: float
    r2_12: float
    r2_34: float
    sigma: float = 0.0


@dataclass(frozen=True)
class ReadoutResult:
    """Recovered flavor populations ``(P_e, P_mu, P_tau)``

    ``raw`` may leave ``[0, 1]`` under noise; :attr:`clamped` does not.
    """

    raw: np.ndarray

    @property
    def clamped(self) -> np.ndarray:
        return np.clip(self.raw, 0.0, 1.0)


def _as_eta(pps: Union[PpsParams, float]) -> float:
    return pps.eta if isinstance(pps, PpsParams) else PpsParams(eta=pps).eta


def pure_state(psi: Iterable[complex]) -> DensityMatrix:
    """``|psi><psi|`` of a 4-component state, normalized"""
    psi = np.array(psi, dtype=complex)
    if psi.shape != (4,):
        raise DomainError(f"Expected a 4-component state, got shape {psi.shape}.")
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise DomainError("Cannot build a density matrix from a zero vector.")
    psi = psi / norm
    return DensityMatrix(rho=np.outer(psi, psi.conj()))


def evolved_pps(psi: Iterable[complex], pps: Union[PpsParams, float]) -> DensityMatrix:
    """``(1 - eta)/4 I + eta |psi><psi|``, the PPS after a unitary taking ``|00>`` to
    ``psi``
    """
    eta = _as_eta(pps)
    pure = pure_state(psi).rho
    return DensityMatrix(rho=(1.0 - eta) / 4.0 * np.eye(4) + eta * pure)


def pps_state(pps: Union[PpsParams, float] = PpsParams()) -> DensityMatrix:
    """Pseudo-pure ``|00>`` state; ``rho[0, 0] = (1 + 3 eta) / 4``"""
    return evolved_pps([1.0, 0.0, 0.0, 0.0], pps)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(rho)
    values = np.where(values > _SQRT_CUTOFF, values, 0.0)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def fidelity(rho_th: DensityMatrix, rho_exp: DensityMatrix) -> float:
    """Uhlmann-Jozsa fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))^2``

    Computed as the squared nuclear norm of ``sqrt(a) sqrt(b)``, which is the same
    quantity and symmetric in its arguments.

    Args:
        rho_th (DensityMatrix): Expected state
        rho_exp (DensityMatrix): Measured state

    Returns:
        float: fidelity in ``[0, 1]``
    """
    if not isinstance(rho_th, DensityMatrix):
        rho_th = DensityMatrix(rho=rho_th)
    if not isinstance(rho_exp, DensityMatrix):
        rho_exp = DensityMatrix(rho=rho_exp)
    product = _psd_sqrt(rho_th.rho) @ _psd_sqrt(rho_exp.rho)
    value = float(np.sum(np.linalg.svd(product, compute_uv=False))) ** 2
    return min(max(value, 0.0), 1.0)


def acquisition_map(
    rho: DensityMatrix, pulse: Union[AcquisitionPulse, str]
) -> DensityMatrix:
    """State after the ``YI`` or ``IY`` read pulse"""
    pulse = AcquisitionPulse.from_name(pulse)
    if pulse is AcquisitionPulse.YI:
        rotation = np.kron(_RY_HALF_PI, np.eye(2))
    else:
        rotation = np.kron(np.eye(2), _RY_HALF_PI)
    mapped = rotation @ rho.rho @ rotation.conj().T
    return DensityMatrix(rho=(mapped + mapped.conj().T) / 2.0)


def spectral_readout(rho: DensityMatrix) -> SpectralReadout:
    """Noiseless line intensities of ``rho``"""
    first = acquisition_map(rho, AcquisitionPulse.YI).rho
    second = acquisition_map(rho, AcquisitionPulse.IY).rho
    return SpectralReadout(
        r1_13=float(first[0, 2].real),
        r1_24=float(first[1, 3].real),
        r2_12=float(second[0, 1].real),
        r2_34=float(second[2, 3].real),
    )


def noisy_readout(
    rho: DensityMatrix,
    sigma: float,
    seed: Optional[Union[int, Sequence[int]]] = None,
) -> SpectralReadout:
    """Line intensities with independent Gaussian noise of standard deviation ``sigma``

    Args:
        rho (DensityMatrix): State being read
        sigma (float): Noise level, ``>= 0``
        seed (Optional[Union[int, Sequence[int]]], optional): Seed of the private
            :func:`numpy.random.default_rng` generator; equal seeds give equal
            readouts. Defaults to None.

    Raises:
        DomainError: If ``sigma`` is negative
    """
    if not (math.isfinite(sigma) and sigma >= 0.0):
        raise DomainError(f"Noise level must be non-negative, got sigma={sigma}.")
    exact = spectral_readout(rho)
    if sigma == 0.0:
        return exact
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=4)
    return SpectralReadout(
        r1_13=exact.r1_13 + float(noise[0]),
        r1_24=exact.r1_24 + float(noise[1]),
        r2_12=exact.r2_12 + float(noise[2]),
        r2_34=exact.r2_34 + float(noise[3]),
        sigma=sigma,
    )


def extract_probabilities(readout: SpectralReadout) -> ReadoutResult:
    """Flavor populations ``rho[0, 0], rho[1, 1], rho[2, 2]`` from line intensities"""
    first = readout.r1_13 + readout.r1_24
    return ReadoutResult(
        raw=np.array(
            [
                (1.0 + 2.0 * first + 4.0 * readout.r2_12) / 4.0,
                (1.0 + 2.0 * first - 4.0 * readout.r2_12) / 4.0,
                (1.0 - 2.0 * first + 4.0 * readout.r2_34) / 4.0,
            ]
        )
    )


def pps_debias(
    probabilities: Union[ReadoutResult, np.ndarray], pps: Union[PpsParams, float]
) -> np.ndarray:
    """Pure-state probabilities from populations of an evolved PPS

    ``P = (rho_ii - (1 - eta)/4) / eta``
    """
    eta = _as_eta(pps)
    raw = probabilities.raw if isinstance(probabilities, ReadoutResult) else probabilities
    return (np.asarray(raw, dtype=float) - (1.0 - eta) / 4.0) / eta


def propagated_sigma(sigma: float) -> float:
    """Standard deviation of each recovered population for line noise ``sigma``

    Each population is ``1/4 + (r + r')/2 +- r''``, so the deviation is
    ``sigma * sqrt(1/4 + 1/4 + 1)``.
    """
    return sigma * math.sqrt(1.5)
