"""Synthesis of arbitrary two-qubit unitaries into CNOTs and single-qubit rotations

Every ``U`` in ``U(4)`` is written as ``e^{i g} (A1 x B1) N(a, b, c) (A2 x B2)`` with
``N(a, b, c) = exp(i (a XX + b YY + c ZZ))``. The canonical coefficients decide how many
CNOTs are needed (0 to 3); a CNOT core locally equivalent to ``N`` is built for that
count, the outer local factors are recovered in the magic basis where they become real
orthogonal matrices, and each local factor is emitted as ``Rz Ry Rz``.
"""

__all__ = [
    "MAGIC_BASIS",
    "SYNTHESIS_ATOL",
    "to_special_unitary",
    "makhlin_invariants",
    "interaction_coefficients",
    "cnot_count",
    "phase_aligned_distance",
    "synthesize",
]

import logging
import math

import numpy as np

from nuqs.qcircuit.gates import Circuit, Gate, circuit_unitary
from nuqs.utils.exceptions import DomainError, SynthesisError

# config logger
logger = logging.getLogger(__name__)

MAGIC_BASIS = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / math.sqrt(2.0)
"""Columns form the magic (Bell-like) basis; local gates are real orthogonal in it"""

SYNTHESIS_ATOL = 1e-9
"""Largest phase-aligned entry-wise deviation accepted from :func:`synthesize`"""

UNITARY_ATOL = 1e-8
"""Largest ``|U U^dagger - I|`` entry accepted as a synthesis target"""

COEFFICIENT_ATOL = 1e-8
"""Tolerance of the CNOT-count classification on the canonical coefficients"""

_QUARTER_PI = math.pi / 4.0
_HALF_PI = math.pi / 2.0
_SPECTRUM_ATOL = 1e-6
# weights of Re + w * Im; any generic values separate distinct eigenvalues
_MIXING_WEIGHTS = (0.5772156649015329, 1.618033988749895, 2.718281828459045, 0.3183098861837907)


def to_special_unitary(u: np.ndarray) -> tuple[np.ndarray, float]:
    """Splits ``u = e^{i phase} su`` with ``det(su) = 1``

    Raises:
        DomainError: If ``u`` is not a 4x4 unitary

    Returns:
        tuple[np.ndarray, float]: ``su`` and ``phase``
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise DomainError(f"Expected a 4x4 matrix, got shape {u.shape}.")
    residual = float(np.max(np.abs(u @ u.conj().T - np.eye(4))))
    if residual > UNITARY_ATOL:
        raise DomainError(f"Matrix is not unitary (residual {residual:.3e}).")
    phase = float(np.angle(np.linalg.det(u))) / 4.0
    return u * np.exp(-1j * phase), phase


def _to_magic(su: np.ndarray) -> np.ndarray:
    return MAGIC_BASIS.conj().T @ su @ MAGIC_BASIS


def _from_magic(m: np.ndarray) -> np.ndarray:
    return MAGIC_BASIS @ m @ MAGIC_BASIS.conj().T


def _gamma(su: np.ndarray) -> np.ndarray:
    m = _to_magic(su)
    return m @ m.T


def makhlin_invariants(u: np.ndarray) -> tuple[complex, float]:
    """Local invariants ``(G1, G2)``; equal for locally equivalent gates"""
    su, _ = to_special_unitary(u)
    m = _to_magic(su)
    m = m.T @ m
    trace = np.trace(m)
    g1 = complex(trace**2 / 16.0)
    g2 = float(np.real((trace**2 - np.trace(m @ m)) / 4.0))
    return g1, g2


def _canonical(k: list[float]) -> tuple[float, float, float]:
    reduced = []
    for x in k:
        x = x - _HALF_PI * round(x / _HALF_PI)
        if x <= -_QUARTER_PI + COEFFICIENT_ATOL:
            x += _HALF_PI
        reduced.append(x)
    a, b, c = sorted(reduced, key=abs, reverse=True)
    if a < 0:
        a, c = -a, -c
    if b < 0:
        b, c = -b, -c
    if abs(a - _QUARTER_PI) < COEFFICIENT_ATOL and c < 0:
        c = -c
    return a, b, c


def interaction_coefficients(u: np.ndarray) -> tuple[float, float, float]:
    """Canonical ``(a, b, c)`` of ``N(a, b, c)`` locally equivalent to ``u``

    The triple satisfies ``pi/4 >= a >= b >= |c|`` and ``c >= 0`` when ``a = pi/4``.
    E.g. identity gives ``(0, 0, 0)``, CNOT ``(pi/4, 0, 0)`` and SWAP
    ``(pi/4, pi/4, pi/4)``.

    Args:
        u (np.ndarray): 4x4 unitary

    Returns:
        tuple[float, float, float]: canonical coefficients in radians
    """
    su, _ = to_special_unitary(u)
    half_angles = np.sort(np.angle(np.linalg.eigvals(_gamma(su))) / 2.0)[::-1]
    # eigen-phases of the magic-basis core must sum to zero
    excess = int(round(float(np.sum(half_angles)) / math.pi))
    if excess > 0:
        half_angles[:excess] -= math.pi
    elif excess < 0:
        half_angles[excess:] += math.pi
    l0, l1, l2, _ = half_angles
    return _canonical([(l0 + l2) / 2.0, (l1 + l2) / 2.0, (l0 + l1) / 2.0])


def cnot_count(u: np.ndarray) -> int:
    """Minimum number of CNOTs needed to implement ``u``"""
    a, b, c = interaction_coefficients(u)
    if max(abs(a), abs(b), abs(c)) < COEFFICIENT_ATOL:
        return 0
    if (
        abs(a - _QUARTER_PI) < COEFFICIENT_ATOL
        and abs(b) < COEFFICIENT_ATOL
        and abs(c) < COEFFICIENT_ATOL
    ):
        return 1
    if abs(c) < COEFFICIENT_ATOL:
        return 2
    return 3


def phase_aligned_distance(u: np.ndarray, w: np.ndarray) -> float:
    """``max |u - e^{i t} w|`` with ``t`` aligned on the trace overlap

    The trace-overlap phase is not in general the minimizer over ``t``, so the
    result is an upper bound on the phase-minimized distance. A pass under a
    tolerance is therefore conservative.
    """
    overlap = np.trace(w.conj().T @ u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(u - phase * w)))


def _real_eigenbasis(m: np.ndarray) -> np.ndarray:
    """Real orthogonal ``p`` with ``det(p) = 1`` and ``p.T @ m @ p`` diagonal

    ``m`` is complex symmetric and unitary, so its real and imaginary parts are
    commuting real symmetric matrices that share an eigenbasis.
    """
    best, best_residual = None, math.inf
    for weight in _MIXING_WEIGHTS:
        _, p = np.linalg.eigh(m.real + weight * m.imag)
        d = p.T @ m @ p
        residual = float(np.max(np.abs(d - np.diag(np.diag(d)))))
        if residual < best_residual:
            best, best_residual = p, residual
        if residual < 1e-13:
            break
    if best_residual > 1e-7:
        raise SynthesisError(
            f"No common real eigenbasis found (residual {best_residual:.3e})."
        )
    if np.linalg.det(best) < 0:
        best = best.copy()
        best[:, 0] = -best[:, 0]
    return best


def _match(target: np.ndarray, candidate: np.ndarray) -> tuple[list[int], float]:
    unused = list(range(len(candidate)))
    order = []
    for value in target:
        j = min(unused, key=lambda k: abs(candidate[k] - value))
        unused.remove(j)
        order.append(j)
    return order, float(np.max(np.abs(candidate[order] - target)))


def _local_equivalence(
    su: np.ndarray, core: np.ndarray
) -> tuple[np.ndarray, np.ndarray, complex]:
    """Finds local ``k1, k2`` with ``su = k1 @ (w * core) @ k2``, ``w`` in ``{1, i}``

    Raises:
        SynthesisError: If ``su`` and ``core`` are not locally equivalent
    """
    m_target = _to_magic(su)
    gamma_target = m_target @ m_target.T
    p = _real_eigenbasis(gamma_target)
    spectrum_target = np.diag(p.T @ gamma_target @ p)

    mismatch = math.inf
    for w in (1.0, 1j):
        m_core = w * _to_magic(core)
        gamma_core = m_core @ m_core.T
        q = _real_eigenbasis(gamma_core)
        order, mismatch = _match(spectrum_target, np.diag(q.T @ gamma_core @ q))
        if mismatch > _SPECTRUM_ATOL:
            continue
        q = q[:, order]
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        g = p @ q.T
        h = m_core.conj().T @ g.T @ m_target
        return _from_magic(g), _from_magic(h), w
    raise SynthesisError(
        f"Core is not locally equivalent to the target (spectral mismatch {mismatch:.3e})."
    )


def _factor_tensor(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Splits a local 4x4 gate into ``kron(a, b)``"""
    blocks = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
    norms = np.linalg.norm(blocks, axis=(2, 3))
    i, j = np.unravel_index(np.argmax(norms), norms.shape)
    b = blocks[i, j] / np.sqrt(np.linalg.det(blocks[i, j]))
    a = np.einsum("kl,ijkl->ij", b.conj(), blocks) / 2.0
    residual = float(np.max(np.abs(np.kron(a, b) - k)))
    if residual > 1e-7:
        raise SynthesisError(f"Gate is not a tensor product (residual {residual:.3e}).")
    return a, b


def _zyz_gates(w: np.ndarray, qubit: int) -> list[Gate]:
    """``Rz(lam), Ry(theta), Rz(phi)`` in time order implementing ``w`` up to phase"""
    su = w / np.sqrt(np.linalg.det(w))
    cos_part, sin_part = abs(su[0, 0]), abs(su[1, 0])
    theta = 2.0 * math.atan2(sin_part, cos_part)
    plus = 2.0 * float(np.angle(su[1, 1])) if cos_part > 1e-14 else 0.0
    minus = 2.0 * float(np.angle(su[1, 0])) if sin_part > 1e-14 else 0.0
    phi, lam = (plus + minus) / 2.0, (plus - minus) / 2.0
    return [Gate.rz(qubit, lam), Gate.ry(qubit, theta), Gate.rz(qubit, phi)]


def _local_gates(k: np.ndarray) -> list[Gate]:
    a, b = _factor_tensor(k)
    return _zyz_gates(a, 0) + _zyz_gates(b, 1)


def _core_gates(count: int, coefficients: tuple[float, float, float]) -> list[Gate]:
    """CNOT cores locally equivalent to ``N(a, b, c)``"""
    a, b, c = coefficients
    if count == 1:
        return [Gate.cnot(0, 1)]
    if count == 2:
        # CNOT01 (Rx(t) x Rz(f)) CNOT01 = exp(-i (t XX + f ZZ) / 2)
        return [
            Gate.cnot(0, 1),
            Gate.rx(0, -2.0 * a),
            Gate.rz(1, -2.0 * b),
            Gate.cnot(0, 1),
        ]
    # equivalent to SWAP exp(-i (t2 XX - t3 YY - t1 ZZ) / 2) up to locals
    return [
        Gate.cnot(1, 0),
        Gate.rz(0, _HALF_PI - 2.0 * c),
        Gate.ry(1, 2.0 * a - _HALF_PI),
        Gate.cnot(0, 1),
        Gate.ry(1, _HALF_PI - 2.0 * b),
        Gate.cnot(1, 0),
    ]


def _synthesize_with(
    su: np.ndarray, count: int, coefficients: tuple[float, float, float]
) -> list[Gate]:
    if count == 0:
        return _local_gates(su)
    a, b, c = coefficients
    error = None
    # the sign of c depends on which of N and its adjoint the spectrum is read as
    for candidate in ((a, b, c), (a, b, -c)):
        core_gates = _core_gates(count, candidate)
        core, _ = to_special_unitary(circuit_unitary(Circuit(gates=core_gates)))
        try:
            k1, k2, _ = _local_equivalence(su, core)
            return _local_gates(k2) + core_gates + _local_gates(k1)
        except SynthesisError as e:
            error = e
    raise error


def synthesize(u: np.ndarray, atol: float = SYNTHESIS_ATOL) -> Circuit:
    """Decomposes a two-qubit unitary into at most 3 CNOTs and single-qubit rotations

    Args:
        u (np.ndarray): 4x4 unitary target
        atol (float, optional): Largest accepted entry-wise deviation after aligning
            global phases. Defaults to :data:`SYNTHESIS_ATOL`.

    Raises:
        DomainError: If ``u`` is not a 4x4 unitary
        SynthesisError: If no decomposition reaches ``atol``

    Returns:
        Circuit: simplified circuit whose unitary, global phase included, equals ``u``
    """
    u = np.asarray(u, dtype=complex)
    su, _ = to_special_unitary(u)
    coefficients = interaction_coefficients(su)
    count = cnot_count(su)

    gates, error = None, None
    for attempt in range(count, 4):
        try:
            gates = _synthesize_with(su, attempt, coefficients)
            break
        except SynthesisError as e:
            logger.debug(f"{attempt}-CNOT synthesis failed: {e}")
            error = e
    if gates is None:
        raise SynthesisError(f"Could not synthesize unitary: {error}")

    w = circuit_unitary(Circuit(gates=gates))
    global_phase = float(np.angle(np.trace(w.conj().T @ u)))
    circuit = Circuit(gates=gates, global_phase=global_phase).simplify()

    deviation = float(np.max(np.abs(circuit_unitary(circuit) - u)))
    logger.debug(
        f"coefficients={coefficients}, cnots={circuit.cnot_count}, "
        f"deviation={deviation:.3e}"
    )
    if deviation > atol:
        raise SynthesisError(
            f"Synthesized circuit deviates by {deviation:.3e} (> {atol:.1e})."
        )
    return circuit
