import math

import numpy as np
import pytest

from nuqs.nmr.readout import (
    AcquisitionPulse,
    DensityMatrix,
    PpsParams,
    ReadoutResult,
    acquisition_map,
    evolved_pps,
    extract_probabilities,
    fidelity,
    noisy_readout,
    pps_debias,
    pps_state,
    propagated_sigma,
    pure_state,
    spectral_readout,
)
from nuqs.oscillation.functional import Baseline
from nuqs.qcircuit.pipeline import pipeline_state
from nuqs.utils.exceptions import DomainError


def _random_density(rng: np.random.Generator) -> DensityMatrix:
    rank = int(rng.integers(1, 5))
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2.0
    return DensityMatrix(rho=rho / np.trace(rho).real)


def _random_state(rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    return psi / np.linalg.norm(psi)


def test_readout_identity(rng, draws):
    for _ in range(draws):
        rho = _random_density(rng)
        recovered = extract_probabilities(spectral_readout(rho)).raw
        assert np.max(np.abs(recovered - rho.populations[:3])) <= 1e-12


def test_acquisition_lines(rng):
    rho = _random_density(rng)
    r = rho.rho
    first = acquisition_map(rho, "yi").rho
    second = acquisition_map(rho, AcquisitionPulse.IY).rho
    assert first[0, 2].real == pytest.approx((r[0, 0] - r[2, 2]).real / 2, abs=1e-14)
    assert first[1, 3].real == pytest.approx((r[1, 1] - r[3, 3]).real / 2, abs=1e-14)
    assert second[0, 1].real == pytest.approx((r[0, 0] - r[1, 1]).real / 2, abs=1e-14)
    assert second[2, 3].real == pytest.approx((r[2, 2] - r[3, 3]).real / 2, abs=1e-14)


def test_fidelity_of_identical_states(rng):
    for _ in range(100):
        rho = _random_density(rng)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)


def test_fidelity_of_pure_states(rng):
    for _ in range(100):
        psi, phi = _random_state(rng), _random_state(rng)
        expected = abs(np.vdot(psi, phi)) ** 2
        assert fidelity(pure_state(psi), pure_state(phi)) == pytest.approx(
            expected, abs=1e-10
        )


def test_fidelity_is_symmetric_and_bounded(rng):
    a, b = _random_density(rng), _random_density(rng)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-12)
    assert 0.0 <= fidelity(a, b) <= 1.0
    assert fidelity(a.rho, b.rho) == fidelity(a, b)



def test_fidelity_detects_small_perturbation(rng):
    for _ in range(20):
        rho = 0.8 * _random_density(rng).rho + 0.05 * np.eye(4)
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        delta = (g + g.conj().T) / 2.0
        delta -= np.trace(delta) / 4.0 * np.eye(4)
        delta *= 1e-3 / np.linalg.norm(delta)
        value = fidelity(DensityMatrix(rho=rho), DensityMatrix(rho=rho + delta))
        assert value < 1.0 - 1e-8


@pytest.mark.parametrize("eta", [1.0, 0.3, 1e-5])
def test_fidelity_of_pps_with_ground_state(eta):
    ground = pure_state([1.0, 0.0, 0.0, 0.0])
    expected = (1 + 3 * eta) / 4
    assert fidelity(ground, pps_state(eta)) == pytest.approx(expected, abs=1e-12)


def test_acquisition_map_is_unitary(rng):
    mixed = DensityMatrix(rho=np.eye(4) / 4.0)
    for pulse in AcquisitionPulse:
        mapped = acquisition_map(mixed, pulse).rho
        assert np.max(np.abs(mapped - np.eye(4) / 4.0)) < 1e-15
        for _ in range(20):
            rho = _random_density(rng)
            assert np.allclose(
                np.linalg.eigvalsh(acquisition_map(rho, pulse).rho),
                np.linalg.eigvalsh(rho.rho),
                rtol=0.0,
                atol=1e-12,
            )


def test_pps_state():
    eta = 1e-5
    rho = pps_state(PpsParams(eta=eta))
    assert rho.rho[0, 0].real == pytest.approx((1 + 3 * eta) / 4, abs=1e-15)
    assert rho.rho[1, 1].real == pytest.approx((1 - eta) / 4, abs=1e-15)


@pytest.mark.parametrize("eta, atol", [(1.0, 1e-12), (0.3, 1e-12), (1e-5, 1e-9)])
def test_pps_debias_recovers_pure_probabilities(rng, eta, atol):
    psi = _random_state(rng)
    readout = extract_probabilities(spectral_readout(evolved_pps(psi, eta)))
    expected = np.abs(psi[:3]) ** 2
    assert np.max(np.abs(pps_debias(readout, eta) - expected)) <= atol


def test_zero_evolution_reads_electron_flavor(params):
    state = pipeline_state(params, Baseline(L=0.0, E=1.0), "e")
    readout = extract_probabilities(spectral_readout(evolved_pps(state, 1.0)))
    assert np.allclose(readout.raw, [1.0, 0.0, 0.0], atol=1e-12)


def test_noise_is_seeded(rng):
    rho = _random_density(rng)
    first = noisy_readout(rho, 0.01, seed=[7, 3])
    again = noisy_readout(rho, 0.01, seed=[7, 3])
    other = noisy_readout(rho, 0.01, seed=[7, 4])
    assert first == again
    assert first != other
    assert first.sigma == 0.01
    assert noisy_readout(rho, 0.0, seed=1) == spectral_readout(rho)
    with pytest.raises(DomainError):
        noisy_readout(rho, -0.1)


def test_noise_propagation(rng):
    rho = _random_density(rng)
    sigma = 0.01
    samples = np.array(
        [
            extract_probabilities(noisy_readout(rho, sigma, seed=[11, i])).raw
            for i in range(4000)
        ]
    )
    expected = propagated_sigma(sigma)
    assert expected == pytest.approx(sigma * math.sqrt(1.5))
    assert np.allclose(samples.std(axis=0), expected, rtol=0.1)
    assert np.allclose(samples.mean(axis=0), rho.populations[:3], atol=5 * expected / 60)


def test_clamped_result():
    result = ReadoutResult(raw=np.array([1.02, -0.01, 0.4]))
    assert np.array_equal(result.clamped, [1.0, 0.0, 0.4])


def test_density_matrix_validation():
    with pytest.raises(DomainError):
        DensityMatrix(rho=np.diag([1.5, -0.5, 0.0, 0.0]))
    with pytest.raises(DomainError):
        DensityMatrix(rho=np.eye(4) / 2.0)
    with pytest.raises(DomainError):
        DensityMatrix(rho=np.eye(3) / 3.0)
    rho = np.eye(4, dtype=complex) / 4.0
    rho[0, 1] = 0.1
    with pytest.raises(DomainError):
        DensityMatrix(rho=rho)
    with pytest.raises(DomainError):
        PpsParams(eta=0.0)
    with pytest.raises(DomainError):
        pure_state(np.zeros(4))
