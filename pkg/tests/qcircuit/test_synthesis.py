import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

from nuqs.oscillation.functional import Baseline, OscParams, build_pmns
from nuqs.qcircuit.pipeline import embed_pmns, pipeline_unitary
from nuqs.qcircuit.synthesis import (
    cnot_count,
    interaction_coefficients,
    makhlin_invariants,
    phase_aligned_distance,
    synthesize,
    to_special_unitary,
)
from nuqs.utils.exceptions import DomainError

# globals
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _core(a: float, b: float, c: float) -> np.ndarray:
    return expm(1j * (a * np.kron(X, X) + b * np.kron(Y, Y) + c * np.kron(Z, Z)))


def _local(rng) -> np.ndarray:
    return np.kron(
        unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng)
    )


def test_special_unitary(rng):
    u = unitary_group.rvs(4, random_state=rng)
    su, phase = to_special_unitary(u)
    assert np.linalg.det(su) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(su * np.exp(1j * phase), u, atol=1e-14)
    with pytest.raises(DomainError):
        to_special_unitary(2.0 * np.eye(4))
    with pytest.raises(DomainError):
        to_special_unitary(np.eye(3))


@pytest.mark.parametrize(
    "u, expected",
    [
        (np.eye(4), (0.0, 0.0, 0.0)),
        (CNOT, (math.pi / 4, 0.0, 0.0)),
        (SWAP, (math.pi / 4, math.pi / 4, math.pi / 4)),
    ],
)
def test_interaction_coefficients_of_known_gates(u, expected):
    assert np.allclose(interaction_coefficients(u), expected, atol=1e-9)


def test_interaction_coefficients_are_local_invariants(rng):
    core = _core(0.6, 0.35, -0.1)
    dressed = _local(rng) @ core @ _local(rng)
    assert np.allclose(
        interaction_coefficients(dressed), interaction_coefficients(core), atol=1e-8
    )
    a, b, c = interaction_coefficients(core)
    assert math.pi / 4 >= a >= b >= abs(c)

    g1, g2 = makhlin_invariants(core)
    h1, h2 = makhlin_invariants(dressed)
    assert abs(g1 - h1) < 1e-10
    assert g2 == pytest.approx(h2, abs=1e-10)


def test_cnot_count_classes(rng):
    assert cnot_count(_local(rng)) == 0
    assert cnot_count(_local(rng) @ CNOT @ _local(rng)) == 1
    assert cnot_count(_local(rng) @ _core(0.4, 0.2, 0.0) @ _local(rng)) == 2
    assert cnot_count(_local(rng) @ _core(0.4, 0.2, 0.1) @ _local(rng)) == 3
    assert cnot_count(SWAP) == 3


@pytest.mark.parametrize("count", [0, 1, 2, 3])
def test_synthesis_uses_minimal_cnots(rng, count):
    targets = {
        0: _local(rng),
        1: _local(rng) @ CNOT @ _local(rng),
        2: _local(rng) @ _core(0.5, 0.3, 0.0) @ _local(rng),
        3: _local(rng) @ _core(0.5, 0.3, 0.2) @ _local(rng),
    }
    u = targets[count]
    circuit = synthesize(u)
    assert circuit.cnot_count == count
    assert np.max(np.abs(circuit.unitary() - u)) <= 1e-9


def test_haar_random_targets(rng, draws):
    for _ in range(draws):
        u = unitary_group.rvs(4, random_state=rng)
        circuit = synthesize(u)
        assert circuit.cnot_count <= 3
        assert phase_aligned_distance(u, circuit.unitary()) <= 1e-9
        # the global phase is exact, not only up to alignment
        assert np.max(np.abs(circuit.unitary() - u)) <= 1e-9


def test_pipeline_unitaries(params, rng, random_params):
    targets = [
        embed_pmns(build_pmns(params)).u4,
        pipeline_unitary(params, Baseline.from_l_over_e(500.0)),
    ]
    for _ in range(20):
        drawn, baseline = random_params(rng)
        targets.append(pipeline_unitary(drawn, baseline))
    for u in targets:
        circuit = synthesize(u)
        assert circuit.cnot_count <= 3
        assert phase_aligned_distance(u, circuit.unitary()) <= 1e-9


def test_degenerate_mixing():
    params = OscParams(
        theta12=0.0, theta13=0.0, theta23=0.0, delta=0.0, dm2_21=7e-5, dm2_31=2.5e-3
    )
    u4 = embed_pmns(build_pmns(params)).u4
    circuit = synthesize(u4)
    assert circuit.cnot_count == 0
    assert np.allclose(circuit.unitary(), np.eye(4), atol=1e-9)


def test_phase_aligned_distance(rng):
    u = unitary_group.rvs(4, random_state=rng)
    assert phase_aligned_distance(u, np.exp(0.9j) * u) < 1e-14
    assert phase_aligned_distance(u, np.eye(4)) > 1e-3


def test_phase_aligned_distance_bounds_best_phase(rng):
    phases = np.exp(1j * np.linspace(-math.pi, math.pi, 2001))
    for _ in range(10):
        u = unitary_group.rvs(4, random_state=rng)
        w = unitary_group.rvs(4, random_state=rng)
        best = min(np.max(np.abs(u - p * w)) for p in phases)
        assert phase_aligned_distance(u, w) >= best - 2e-3
