"""Stochastic-optics model of the post-selected interferometer.

The arm-1 field ``E1`` is a real Gaussian variable around ``E0/sqrt(2)``; a
square-law detector at the dark port clicks with probability proportional to
``(t E1 - r E2)**2``.  Conditioning on a click biases ``E1`` upward, and the
resulting shift of ``<E1**2>`` is compared against the quantum weak value.

Units are chosen so ``E**2`` is a photon number; vacuum fluctuations then
correspond to ``sigma = 1/2``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DegeneratePostSelection, DomainError, NumericalError
from .quantum import SQRT2, InterferometerParams, first_order_valid

VACUUM_SIGMA = 0.5
WINDOW = 12.0  # quadrature half-width in units of sigma
QUAD_TOL = 1e-10

VALID_BELOW = 0.05
BROKEN_FROM = 0.5


class ValidityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class NoisePrior:
    """Gaussian field fluctuations; ``mean_E1`` defaults to ``E0/sqrt(2)``."""

    E0: float
    sigma: float = VACUUM_SIGMA
    sigma2: float = 0.0
    mean_E1: float | None = None

    def __post_init__(self):
        if not (self.E0 >= 0.0):
            raise DomainError(f"E0 must be >= 0, got {self.E0!r}")
        if not (self.sigma >= 0.0) or not (self.sigma2 >= 0.0):
            raise DomainError("fluctuation widths must be >= 0")
        if self.mean_E1 is None:
            object.__setattr__(self, "mean_E1", self.E0 / SQRT2)

    @property
    def mean_E2(self) -> float:
        return self.E0 / SQRT2

    @property
    def balanced_split(self) -> bool:
        return self.mean_E1 == self.E0 / SQRT2

    @property
    def second_moment(self) -> float:
        """Unconditioned ``<E1**2>``."""
        return self.mean_E1 ** 2 + self.sigma ** 2


class Regime(str, enum.Enum):
    VALID = "valid"
    MARGINAL = "marginal"
    BROKEN = "broken"


@dataclass(frozen=True)
class ValidityReport:
    ratio: float
    regime: Regime
    first_order: bool = True  # delta small enough for the O(delta) expansions

    @property
    def trusted(self) -> bool:
        """True when the leading-order shift formulas can be taken at face value."""
        return self.regime is Regime.VALID and self.first_order

    @classmethod
    def from_ratio(cls, ratio: float, first_order: bool = True) -> "ValidityReport":
        if ratio < VALID_BELOW:
            regime = Regime.VALID
        elif ratio < BROKEN_FROM:
            regime = Regime.MARGINAL
        else:
            regime = Regime.BROKEN
        return cls(ratio, regime, first_order)


def validity_ratio(sigma: float, delta: float, E0: float) -> float:
    """``(sigma / (delta E0))**2``: share of dark-port clicks owed to fluctuations."""
    if delta <= 0 or E0 <= 0:
        raise DomainError("validity ratio needs delta > 0 and E0 > 0")
    return (sigma / (delta * E0)) ** 2


def validity(params: InterferometerParams, prior: NoisePrior) -> ValidityReport:
    return ValidityReport.from_ratio(validity_ratio(prior.sigma, params.delta, prior.E0),
                                     first_order_valid(params.delta))


def _need_sigma(prior):
    if not prior.sigma > 0:
        raise DomainError("density needs sigma > 0")


def prior_pdf(E1, prior: NoisePrior):
    _need_sigma(prior)
    z = (np.asarray(E1, dtype=float) - prior.mean_E1) / prior.sigma
    return np.exp(-0.5 * z * z) / (prior.sigma * math.sqrt(2.0 * math.pi))


def dark_field(E1, params: InterferometerParams, prior: NoisePrior):
    """Dark-port field ``t E1 - r E2`` with ``E2`` at its mean."""
    return params.t * np.asarray(E1, dtype=float) - params.r * prior.mean_E2


def click_likelihood(E1, params: InterferometerParams, prior: NoisePrior):
    """Click probability ``min(1, eta (t E1 - r E0/sqrt2)**2)``."""
    return np.minimum(1.0, params.eta * dark_field(E1, params, prior) ** 2)


def likelihood_zero(params: InterferometerParams, prior: NoisePrior) -> float:
    """Arm-1 field at which the dark port is exactly dark."""
    return params.r / params.t * prior.mean_E2


def click_normalizer(params: InterferometerParams, prior: NoisePrior) -> float:
    """``<(t E1 - r E2)**2>`` over the prior (``P(click)/eta`` without clamping)."""
    c = params.t * prior.mean_E1 - params.r * prior.mean_E2
    return c * c + (params.t * prior.sigma) ** 2 + (params.r * prior.sigma2) ** 2


def max_click_probability(params: InterferometerParams, prior: NoisePrior,
                          halfwidth: float = WINDOW) -> float:
    """Largest unclamped ``eta q(E1)`` over ``mean +/- halfwidth*sigma``.

    The quadratic is convex, so the maximum sits on a window edge.
    """
    edges = prior.mean_E1 + np.array([-halfwidth, halfwidth]) * prior.sigma
    return float(params.eta * np.max(dark_field(edges, params, prior) ** 2))


def clamp_inactive(params: InterferometerParams, prior: NoisePrior, halfwidth: float = WINDOW) -> bool:
    return max_click_probability(params, prior, halfwidth) <= 1.0


# Posterior.  eta cancels under Bayes normalization and is dropped; the arm-2
# fluctuation (if any) is integrated out analytically, adding r^2 sigma2^2.

def _quadratic(E1, params, prior):
    return dark_field(E1, params, prior) ** 2 + (params.r * prior.sigma2) ** 2


def _quad(f, a, b, tol, points=None, what="integral"):
    val, err, info, *msg = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=400,
                                          points=points, full_output=1)
    # quad appends a message only when it gave up early
    if msg and err > 10 * max(tol, tol * abs(val)):
        raise NumericalError(f"quadrature for {what} did not converge: {msg[0]}",
                             {"value": val, "abserr": err, "tol": tol, "neval": info["neval"]})
    return val


def posterior_normalizer(params: InterferometerParams, prior: NoisePrior) -> float:
    """Normalizer of ``q(E1) P(E1)``.

    Closed form ``E0^2 delta^2 + sigma^2 t^2 (+ r^2 sigma2^2)`` when the arm-1
    mean sits at ``E0/sqrt2``; otherwise integrated numerically.
    """
    _need_sigma(prior)
    if prior.balanced_split:
        z = (prior.E0 * params.delta) ** 2 + (prior.sigma * params.t) ** 2 + (params.r * prior.sigma2) ** 2
    else:
        lo, hi = prior.mean_E1 - WINDOW * prior.sigma, prior.mean_E1 + WINDOW * prior.sigma
        z0 = likelihood_zero(params, prior)
        pts = [z0] if lo < z0 < hi else None
        z = _quad(lambda e: float(_quadratic(e, params, prior) * prior_pdf(e, prior)), lo, hi,
                  QUAD_TOL, pts, "posterior normalizer")
    if not z > 0:
        raise DegeneratePostSelection(f"posterior normalizer {z!r} is not positive")
    return z


def posterior_pdf(E1, params: InterferometerParams, prior: NoisePrior):
    """Arm-1 field density conditioned on a dark-port click."""
    z = posterior_normalizer(params, prior)
    return _quadratic(E1, params, prior) * prior_pdf(E1, prior) / z


def posterior_cdf(E1, params: InterferometerParams, prior: NoisePrior):
    # (a u + c)^2 + s^2 against a standard normal in u, integrated analytically
    _need_sigma(prior)
    u = (np.asarray(E1, dtype=float) - prior.mean_E1) / prior.sigma
    a = params.t * prior.sigma
    c = params.t * prior.mean_E1 - params.r * prior.mean_E2
    s2 = (params.r * prior.sigma2) ** 2
    Phi, phi = special.ndtr(u), np.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)
    num = a * a * (Phi - u * phi) - 2 * a * c * phi + (c * c + s2) * Phi
    return num / (a * a + c * c + s2)


def gaussian_approx_shift(params: InterferometerParams, prior: NoisePrior) -> float:
    """Mean displacement ``2 t sigma^2 / (E0 delta)`` of the shifted-Gaussian posterior."""
    if prior.E0 <= 0:
        raise DomainError("E0 must be > 0")
    return 2.0 * params.t * prior.sigma ** 2 / (prior.E0 * params.delta)


def posterior_gaussian_approx(E1, params: InterferometerParams, prior: NoisePrior,
                              normalized: bool = True):
    """Shifted-Gaussian approximation to the posterior, valid for ``sigma << delta E0``.

    Returns ``(density, ValidityReport)``.  With ``normalized=False`` the
    density is ``exp(-x^2/2sigma^2 + 2 t x/(E0 delta)) / (sigma sqrt(2 pi))``,
    ``x = E1 - <E1>``, i.e. before the square is completed and renormalized.
    """
    report = validity(params, prior)
    if report.regime is Regime.BROKEN:
        warnings.warn(f"shifted-Gaussian posterior used at validity ratio {report.ratio:.3g}",
                      ValidityWarning, stacklevel=2)
    shift = gaussian_approx_shift(params, prior)
    x = np.asarray(E1, dtype=float) - prior.mean_E1
    if normalized:
        z = (x - shift) / prior.sigma
        dens = np.exp(-0.5 * z * z) / (prior.sigma * math.sqrt(2 * math.pi))
    else:
        k = 2.0 * params.t / (prior.E0 * params.delta)
        dens = np.exp(-0.5 * (x / prior.sigma) ** 2 + k * x) / (prior.sigma * math.sqrt(2 * math.pi))
    return dens, report


# Intensity shifts D_I = <E1^2 | click> - <E1^2>.

def _check_shift_inputs(params, prior):
    if prior.E0 <= 0:
        raise DomainError("E0 must be > 0")
    if not prior.balanced_split:
        raise DomainError("closed-form shift assumes <E1> = E0/sqrt(2); use intensity_shift_quadrature")


@dataclass(frozen=True)
class ShiftTerms:
    """Pieces of the closed form ``lead * (1 + B) / (1 + A)``."""

    lead: float  # 4 sigma^2 t / (sqrt2 delta)
    A: float  # t^2 sigma^2 / (E0 delta)^2  (+ r^2 sigma2^2 / (E0 delta)^2)
    B: float  # 2 t^2 sigma^4 / (E0 delta)^2 / lead

    @property
    def value(self) -> float:
        if self.lead == 0.0:
            return 0.0
        return self.lead * (1.0 + self.B) / (1.0 + self.A)


def shift_terms(params: InterferometerParams, prior: NoisePrior, sigma2: float | None = None) -> ShiftTerms:
    _check_shift_inputs(params, prior)
    t, r, d = params.t, params.r, params.delta
    s, s2 = prior.sigma, (prior.sigma2 if sigma2 is None else sigma2)
    ed2 = (prior.E0 * d) ** 2
    lead = 4.0 * s * s * t / (SQRT2 * d)
    tail = 2.0 * t * t * s ** 4 / ed2
    A = (t * t * s * s + r * r * s2 * s2) / ed2
    return ShiftTerms(lead=lead, A=A, B=tail / lead if lead else 0.0)


def intensity_shift_exact(params: InterferometerParams, prior: NoisePrior) -> float:
    """Closed-form shift with arm 2 held at its mean (``sigma2`` ignored)."""
    return shift_terms(params, prior, sigma2=0.0).value


def intensity_shift_two_arm(params: InterferometerParams, prior: NoisePrior) -> float:
    """Closed-form shift with arm 2 also fluctuating with width ``prior.sigma2``."""
    return shift_terms(params, prior).value


def intensity_shift_approx(params: InterferometerParams, prior: NoisePrior) -> float:
    """Leading-order shift ``2 sigma^2 (1 + delta) / delta``; see :func:`validity` for trust."""
    d = params.delta
    if d <= 0:
        raise DomainError("delta must be > 0")
    return 2.0 * prior.sigma ** 2 * (1.0 + d) / d


def intensity_shift_vacuum(delta: float) -> float:
    """Leading-order shift at vacuum-level fluctuations, ``(1 + 1/delta)/2``."""
    if not delta > 0:
        raise DomainError(f"delta must be > 0, got {delta!r}")
    return 0.5 + 0.5 / delta


@dataclass(frozen=True)
class PosteriorMoments:
    mean: float  # <E1 | click>
    shift: float  # <E1^2 | click> - <E1^2>
    normalizer: float


def posterior_moments(params: InterferometerParams, prior: NoisePrior,
                      tol: float = QUAD_TOL) -> PosteriorMoments:
    """Post-selected moments of ``E1`` by adaptive quadrature over ``+/-12 sigma``.

    Works for any ``delta`` and validity ratio, with either arm-1 mean, and
    with arm-2 fluctuations.  Integrals are taken in ``u = (E1 - <E1>)/sigma``
    and ``E1^2 - <E1>^2 = 2 <E1> sigma u + sigma^2 u^2`` so nothing of size
    ``<E1>^2`` is ever subtracted.
    """
    if prior.sigma == 0.0:
        return PosteriorMoments(prior.mean_E1, 0.0, (params.t * prior.mean_E1 - params.r * prior.mean_E2) ** 2)
    mu, sig = prior.mean_E1, prior.sigma
    a = params.t * sig
    c = params.t * mu - params.r * prior.mean_E2
    s2 = (params.r * prior.sigma2) ** 2
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def phi(u):
        return norm * math.exp(-0.5 * u * u)

    def q(u):
        return (a * u + c) ** 2 + s2

    pts = [-c / a] if a and abs(c / a) < WINDOW else None
    lo, hi = -WINDOW, WINDOW
    # scale the absolute tolerance to the size of each integrand
    scale = c * c + a * a + s2
    z = _quad(lambda u: q(u) * phi(u), lo, hi, tol * scale, pts, "normalizer") if scale else 0.0
    if not z > 0:
        raise DegeneratePostSelection("dark port never clicks: normalizer vanishes")
    m1 = _quad(lambda u: q(u) * phi(u) * u, lo, hi, tol * scale, pts, "first moment") / z
    m2 = _quad(lambda u: q(u) * phi(u) * u * u, lo, hi, tol * scale, pts, "second moment") / z
    p1 = _quad(lambda u: phi(u) * u, lo, hi, tol, None, "prior first moment")
    p2 = _quad(lambda u: phi(u) * u * u, lo, hi, tol, None, "prior second moment")
    shift = 2.0 * mu * sig * (m1 - p1) + sig * sig * (m2 - p2)
    return PosteriorMoments(mu + sig * m1, shift, z)


def intensity_shift_quadrature(params: InterferometerParams, prior: NoisePrior,
                               tol: float = QUAD_TOL) -> float:
    """Numerical ``int P(E1|click) E1^2 - int P(E1) E1^2`` from the unapproximated posterior."""
    if not params.delta > 0:
        raise DomainError("delta must be > 0")
    return posterior_moments(params, prior, tol).shift


def posterior_mean(params: InterferometerParams, prior: NoisePrior) -> float:
    return posterior_moments(params, prior).mean
