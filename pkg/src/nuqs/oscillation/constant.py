__all__ = [
    "OSC_PHASE_FACTOR",
    "EV_PER_GEV",
    "UNITARITY_ATOL",
    "PROBABILITY_ATOL",
    "IMAGINARY_RESIDUAL_ATOL",
    "HERMITIAN_ATOL",
    "DEFAULT_MIXING_DEG",
    "DEFAULT_SPLITTINGS_EV2",
    "DUNE_BASELINE_KM",
    "DUNE_ALT_BASELINE_KM",
    "DEFAULT_MATTER_ENERGY_GEV",
    "DEFAULT_POTENTIALS_EV",
    # Enums shared all over the place
    "CustomNamingEnum",
    "Flavor",
    "MatterMode",
    "PotentialConvention",
    "ApproxForm",
    "MatterQuality",
    "Backend",
]

from enum import Enum, auto
from types import DynamicClassAttribute

# CONSTANTS
OSC_PHASE_FACTOR = 1.27
"""Unit conversion of the oscillation phase

The phase accumulated by the pair of mass states ``(i, j)`` is
``2 * OSC_PHASE_FACTOR * dm2_ij * L / E`` with ``dm2`` in eV^2, ``L`` in km and
``E`` in GeV. Every phase in the package is built from this single constant.
"""

EV_PER_GEV = 1.0e9
"""Number of electron-volts in a giga-electron-volt"""

UNITARITY_ATOL = 1.0e-12
"""Absolute tolerance on ``U @ U^dagger - I`` for freshly built mixing matrices"""

PROBABILITY_ATOL = 1.0e-9
"""Largest excursion outside ``[0, 1]`` that is silently clamped"""

IMAGINARY_RESIDUAL_ATOL = 1.0e-9
"""Largest imaginary residual tolerated when a probability sum is taken as real"""

HERMITIAN_ATOL = 1.0e-10
"""Largest ``|H - H^dagger|`` entry accepted by the eigen-solver"""

# DEFAULTS
DEFAULT_MIXING_DEG = {
    "theta12": 33.45,
    "theta13": 8.62,
    "theta23": 42.1,
    "delta": 0.0,
}
"""Default mixing angles and Dirac phase in degrees (normal ordering global fit)"""

DEFAULT_SPLITTINGS_EV2 = {
    "dm2_21": 7.42e-5,
    "dm2_31": 2.510e-3,
}
"""Default mass-squared splittings in eV^2"""

DUNE_BASELINE_KM = 1285.0
"""Fermilab to SURF baseline in km used by the long-baseline scenarios

Note:
    Some long-baseline studies quote 1298 km instead, see
    :data:`DUNE_ALT_BASELINE_KM`. Both are accepted through ``baseline_km``.
"""

DUNE_ALT_BASELINE_KM = 1298.0
"""Alternative long-baseline distance in km"""

DEFAULT_MATTER_ENERGY_GEV = 0.5
"""Fixed beam energy of the matter L/E sweep"""

DEFAULT_POTENTIALS_EV = (0.0, 5.0e-5, 1.0e-4)
"""Matter potentials of the matter L/E sweep"""


class CustomNamingEnum(Enum):
    """Extends base :class:`enum.Enum` to support custom naming for members

    Note:
        Class attribute :attr:`name` has been overridden to return the name
        used in configuration files and output records rather than the ``Enum``
        naming convention of Python. For instance, ``CLOSED_FORM`` -> ``closed-form``.

    Note:
        Classes that subclass this, for values of their members should use :class:`enum.auto`
        to demonstrate that chosen value is not domain-specific. Otherwise, any explicit
        value given to members is a domain-specific value (e.g. a row index of the
        mixing matrix) and should not be modified. E.g. compare values in :class:`Flavor`
        and :class:`Backend`.
    """

    @DynamicClassAttribute
    def name(self):
        _name = super(CustomNamingEnum, self).name
        _name: str = _name.lower()
        # convert FOO_BAR to foo-bar (config convention)
        return _name.replace("_", "-")

    @classmethod
    def get_member_names(cls) -> list[str]:
        _member_names_: list[str] = []
        for mem_name in cls._member_names_:
            _member_names_.append(cls._member_map_[mem_name].name)
        return _member_names_

    @classmethod
    def from_name(cls, name: str):
        """Looks up a member by its custom name (e.g. ``"closed-form"``)

        Args:
            name (str): Custom name of the member; case insensitive, ``_`` and ``-``
                are interchangeable

        Raises:
            ValueError: If ``name`` does not belong to any member
        """
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for member in cls:
            if member.name == key:
                return member
        raise ValueError(
            f"'{name}' is not a valid {cls.__name__}; "
            f"choose one of {cls.get_member_names()}."
        )


class Flavor(CustomNamingEnum):
    """Neutrino flavors

    Values are the row indices of the flavor basis. ``CHI`` is the fourth basis state
    that appears only after embedding the mixing matrix into two qubits.
    """

    E = 0
    MU = 1
    TAU = 2
    CHI = 3


class MatterMode(CustomNamingEnum):
    """Treatment of the matter potential

    ``EXACT`` diagonalizes the effective Hamiltonian numerically, ``APPROX`` uses the
    closed-form effective parameters.
    """

    EXACT = auto()
    APPROX = auto()


class PotentialConvention(CustomNamingEnum):
    """How the matter potential ``V`` in eV enters the Hamiltonian

    ``OPERATIONAL`` adds ``a = V * E`` (eV^2 with ``E`` in GeV) to the ``ee`` entry of
    ``2E * H``; this reproduces the published matter curves. ``LITERAL`` uses the
    dimensionally consistent ``a = 2 * E[eV] * V``.
    """

    OPERATIONAL = auto()
    LITERAL = auto()


class ApproxForm(CustomNamingEnum):
    """Reading of the closed-form matter effective parameters

    ``CORRECTED`` reduces exactly to vacuum at zero potential. ``VERBATIM`` reproduces
    the formulas as printed, which do not.
    """

    CORRECTED = auto()
    VERBATIM = auto()


class MatterQuality(CustomNamingEnum):
    """Validity flag attached to closed-form effective parameters"""

    OK = auto()
    RESONANCE_CROSSED = auto()


class Backend(CustomNamingEnum):
    """How oscillation probabilities are evaluated"""

    CLOSED_FORM = auto()
    MATRIX4 = auto()
    CIRCUIT = auto()
