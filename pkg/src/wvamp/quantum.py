"""Closed-form weak values of arm-1 photon number in an imbalanced Mach-Zehnder.

All expressions are first order in the imbalance ``delta`` (defined by
``sqrt(2) * delta = t - r``).  They are still evaluated for larger ``delta``
but a :class:`FirstOrderWarning` is issued once ``delta`` exceeds
:data:`FIRST_ORDER_LIMIT`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .errors import DegeneratePostSelection, DomainError

SQRT2 = math.sqrt(2.0)

# O(delta) corrections exceed ~10% of the 1/(2 delta) term beyond this.
FIRST_ORDER_LIMIT = 0.2


class FirstOrderWarning(UserWarning):
    """A first-order formula was evaluated outside ``delta << 1``."""


class BSMode(str, enum.Enum):
    FIRST_ORDER = "first_order"
    EXACT_UNITARY = "exact_unitary"

    @classmethod
    def parse(cls, value: "BSMode | str") -> "BSMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"first": cls.FIRST_ORDER, "firstorder": cls.FIRST_ORDER,
                   "exact": cls.EXACT_UNITARY, "exactunitary": cls.EXACT_UNITARY,
                   "unitary": cls.EXACT_UNITARY}
        if key in aliases:
            return aliases[key]
        return cls(key)


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not (delta > 0.0) or not math.isfinite(delta):
        raise DomainError(f"imbalance delta must be > 0, got {delta!r}")
    return delta


def first_order_valid(delta: float) -> bool:
    return 0.0 < delta <= FIRST_ORDER_LIMIT


def _flag(delta: float, what: str) -> None:
    if delta > FIRST_ORDER_LIMIT:
        warnings.warn(f"{what}: delta={delta:g} is outside the first-order regime "
                      f"(delta <= {FIRST_ORDER_LIMIT})", FirstOrderWarning, stacklevel=3)


def bs_coefficients(delta: float, mode: BSMode | str = BSMode.FIRST_ORDER) -> tuple[float, float]:
    """Transmissivity and reflectivity ``(t, r)`` of the final beamsplitter.

    Both modes satisfy ``t - r = sqrt(2) * delta``.  ``FIRST_ORDER`` uses
    ``t = (1 + delta)/sqrt(2)``, ``r = (1 - delta)/sqrt(2)``; ``EXACT_UNITARY``
    additionally enforces ``t**2 + r**2 = 1`` with ``t >= |r|``.
    """
    delta = _check_delta(delta)
    if delta > 1.0:
        raise DomainError(f"imbalance delta must be <= 1, got {delta!r}")
    mode = BSMode.parse(mode)
    if mode is BSMode.FIRST_ORDER:
        return (1.0 + delta) / SQRT2, (1.0 - delta) / SQRT2
    s = SQRT2 * delta
    t = 0.5 * (s + math.sqrt(max(0.0, 2.0 - s * s)))
    return t, t - s


@dataclass(frozen=True)
class InterferometerParams:
    delta: float
    bs_mode: BSMode = BSMode.FIRST_ORDER
    eta: float = 1.0
    t: float = field(init=False)
    r: float = field(init=False)

    def __post_init__(self):
        mode = BSMode.parse(self.bs_mode)
        object.__setattr__(self, "bs_mode", mode)
        # eta = 0 (dead detector) is allowed; it only matters for click sampling
        if not (0.0 <= self.eta <= 1.0):
            raise DomainError(f"detector efficiency eta must lie in [0, 1], got {self.eta!r}")
        t, r = bs_coefficients(self.delta, mode)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)

    def with_eta(self, eta: float) -> "InterferometerParams":
        return InterferometerParams(self.delta, self.bs_mode, eta)


@dataclass(frozen=True)
class CoherentAmplitude:
    alpha: float

    def __post_init__(self):
        if not (self.alpha >= 0.0) or not math.isfinite(self.alpha * self.alpha):
            raise DomainError(f"coherent amplitude must be real, finite and >= 0, got {self.alpha!r}")

    @property
    def photons(self) -> float:
        return self.alpha * self.alpha


def weak_value_fock(delta: float) -> float:
    """Weak value of arm-1 photon number for a single-photon input."""
    delta = _check_delta(delta)
    _flag(delta, "weak_value_fock")
    return 0.5 + 0.5 / delta


def weak_value_coherent(alpha: float, delta: float) -> float:
    """Weak value of arm-1 photon number for coherent input, post-selected on a dark-port click."""
    delta = _check_delta(delta)
    n = CoherentAmplitude(alpha).photons
    if n == 0.0:
        raise DegeneratePostSelection("alpha = 0: dark-port amplitude alpha*delta vanishes")
    _flag(delta, "weak_value_coherent")
    return 0.5 * n + 0.5 + 0.5 / delta


def mean_photons_arm1(alpha: float) -> float:
    return 0.5 * CoherentAmplitude(alpha).photons


def quantum_shift(delta: float) -> float:
    """Post-selected minus unconditioned arm-1 photon number, first order in delta.

    Independent of alpha at this order.
    """
    delta = _check_delta(delta)
    _flag(delta, "quantum_shift")
    return 0.5 + 0.5 / delta


def quantum_shift_exact(delta: float, mode: BSMode | str = BSMode.EXACT_UNITARY) -> float:
    # t/(t - r): the all-orders coherent-state shift, also the single-photon weak value.
    t, r = bs_coefficients(delta, mode)
    if t == r:
        raise DegeneratePostSelection("t == r: balanced interferometer")
    return t / (t - r)


def arm2_weak_value_fock(delta: float) -> float:
    delta = _check_delta(delta)
    _flag(delta, "arm2_weak_value_fock")
    return 1.0 - (0.5 + 0.5 / delta)


def is_anomalous(alpha: float, delta: float) -> bool:
    """True when the arm-2 weak value can go negative: ``|alpha|^2 + 1 <= 1/delta``."""
    n = CoherentAmplitude(alpha).photons
    delta = _check_delta(delta)
    return n + 1.0 <= 1.0 / delta
