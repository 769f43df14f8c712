__all__ = [
    "NuqsError",
    "DomainError",
    "SynthesisError",
    "ConfigError",
    "NumericalValidationError",
]


class NuqsError(Exception):
    """Base class of every error raised on purpose by :mod:`nuqs`"""


class DomainError(NuqsError, ValueError):
    """Input outside the domain of a numerical operation

    E.g. a non-positive energy, a non-Hermitian "Hamiltonian", a non-unitary target
    for synthesis or a sterile flavor passed to a three-flavor routine.
    """


class SynthesisError(DomainError):
    """A two-qubit decomposition could not reach its reconstruction tolerance"""


class ConfigError(NuqsError, ValueError):
    """Invalid scenario configuration (file, ``--set`` overrides or field values)"""


class NumericalValidationError(NuqsError, ArithmeticError):
    """A computed quantity violated an invariant it must satisfy

    Raised e.g. when a noiseless record breaks probability conservation or a
    probability is negative beyond the clamping tolerance.
    """
