"""Trial-level Monte Carlo of the post-selected interferometer.

Each trial draws one arm-1 field from the Gaussian prior and then a Bernoulli
click with probability ``min(1, eta (t E1 - r E2)**2)``.  The post-selected
intensity shift is estimated either from the clicked trials (rejection) or by
weighting every trial with its click probability.

Reproducibility: trials are grouped in fixed chunks of :data:`CHUNK`; trial
``i`` lives in chunk ``i // CHUNK`` whose stream is seeded by
``SeedSequence(seed, spawn_key=(i // CHUNK,))``.  Chunk partial sums are
reduced in chunk order, so results do not depend on the number of workers.
"""

from __future__ import annotations

import enum
import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegeneratePostSelection, DomainError, StatisticsError, WvampError
from .quantum import InterferometerParams
from .stochastic import WINDOW, NoisePrior, click_normalizer, max_click_probability

CHUNK = 1 << 16
MIN_ACCEPTED = 100
WORKERS_ENV = "WVAMP_WORKERS"
CLICK_CEILING = 0.25


class Estimator(str, enum.Enum):
    REJECTION = "rejection"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class ShiftEstimate:
    value: float
    stderr: float
    n_trials: int
    n_accepted: int
    method: Estimator
    seed: int
    eta: float
    degenerate: bool = False
    notes: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d


@dataclass(frozen=True)
class GridPoint:
    """One sweep point; ``key`` alone fixes its random substream."""

    key: int
    params: InterferometerParams
    prior: NoisePrior


@dataclass(frozen=True)
class FailedPoint:
    key: int
    error: str
    message: str


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    n = int(raw)
    if n < 1:
        raise DomainError(f"{WORKERS_ENV} must be >= 1, got {raw!r}")
    return n


def default_eta(params: InterferometerParams, prior: NoisePrior) -> float:
    """Largest efficiency keeping the mean click rate <= 25%, eta <= 0.9, and
    the click probability below 1 across ``<E1> +/- 12 sigma``.

    The last condition keeps the saturation clamp out of play so the sampled
    likelihood is exactly the quadratic one.
    """
    eta = 0.9
    z = click_normalizer(params, prior)
    if z > 0:
        eta = min(eta, CLICK_CEILING / z)
    q_max = max_click_probability(params.with_eta(1.0), prior, WINDOW)
    if q_max > 0:
        eta = min(eta, 1.0 / q_max)
    return eta


def resolve_eta(params: InterferometerParams, prior: NoisePrior, eta: float | None = None) -> float:
    if eta is not None:
        if not 0.0 <= eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {eta!r}")
        return float(eta)
    return default_eta(params, prior)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def derive_seed(seed: int, key: int) -> int:
    """64-bit seed for sweep point ``key``, independent of the point's position."""
    h = hashlib.blake2b(f"{_check_seed(seed)}:{int(key)}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def run_trial(rng: np.random.Generator, params: InterferometerParams, prior: NoisePrior,
              eta: float | None = None) -> tuple[float, bool]:
    """One experimental run: draw ``E1`` then decide whether the dark port clicks."""
    eta = resolve_eta(params, prior, eta)
    e1 = prior.mean_E1 + prior.sigma * rng.standard_normal()
    p = min(1.0, eta * (params.t * e1 - params.r * prior.mean_E2) ** 2)
    return e1, bool(rng.random() < p)


# Per-chunk sufficient statistics.  y = E1^2 - <E1^2> written in the centered
# variable x = E1 - <E1> as 2<E1>x + x^2 - sigma^2, so sigma = 0 gives y = 0.
_FIELDS = ("n", "acc", "acc_y", "acc_yy", "y", "yy", "w", "ww", "wy", "wyy", "wwy", "wwyy")


def _chunk_sums(seed, chunk, size, params, prior, eta):
    rng = chunk_rng(seed, chunk)
    x = prior.sigma * rng.standard_normal(size)
    u = rng.random(size)
    mu = prior.mean_E1
    w = np.minimum(1.0, eta * (params.t * (mu + x) - params.r * prior.mean_E2) ** 2)
    y = 2.0 * mu * x + x * x - prior.sigma ** 2
    hit = u < w
    ya = y[hit]
    wy = w * y
    return np.array([
        size, np.count_nonzero(hit), ya.sum(), (ya * ya).sum(),
        y.sum(), (y * y).sum(), w.sum(), (w * w).sum(),
        wy.sum(), (wy * y).sum(), (w * wy).sum(), (wy * wy).sum(),
    ])


def simulate(params: InterferometerParams, prior: NoisePrior, n_trials: int, seed: int,
             eta: float | None = None, workers: int | None = None) -> dict:
    """Run ``n_trials`` trials and return the reduced sufficient statistics."""
    seed = _check_seed(seed)
    if n_trials < 1:
        raise DomainError("n_trials must be >= 1")
    eta = resolve_eta(params, prior, eta)
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    sizes = [min(CHUNK, n_trials - k * CHUNK) for k in range(math.ceil(n_trials / CHUNK))]

    def job(k):
        return _chunk_sums(seed, k, sizes[k], params, prior, eta)

    if workers == 1 or len(sizes) == 1:
        parts = [job(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    total = np.zeros(len(_FIELDS))
    for p in parts:  # fixed chunk order
        total += p
    out = dict(zip(_FIELDS, total.tolist()))
    out["n"], out["acc"] = int(out["n"]), int(out["acc"])
    out["eta"] = eta
    return out


def _expected_accepted(params, prior, n_trials, eta):
    return n_trials * min(1.0, eta * click_normalizer(params, prior))


def estimate_shift_rejection(params: InterferometerParams, prior: NoisePrior, n_trials: int,
                             seed: int, eta: float | None = None,
                             workers: int | None = None) -> ShiftEstimate:
    """Mean of ``E1^2`` over clicked trials minus the known prior ``<E1^2>``.

    The prior moment is exact, so the stderr is the clicked-sample standard
    error alone.
    """
    eta = resolve_eta(params, prior, eta)
    expected = _expected_accepted(params, prior, n_trials, eta)
    if expected < MIN_ACCEPTED:
        raise StatisticsError(f"expected only {expected:.1f} clicks in {n_trials} trials", int(expected))
    s = simulate(params, prior, n_trials, seed, eta, workers)
    k = s["acc"]
    if k < 2:
        raise StatisticsError(f"only {k} clicks recorded", k)
    mean = s["acc_y"] / k
    var = max(0.0, (s["acc_yy"] - k * mean * mean) / (k - 1))
    stderr = math.sqrt(var / k)
    return ShiftEstimate(mean, stderr, s["n"], k, Estimator.REJECTION, seed, eta,
                         degenerate=stderr == 0.0,
                         notes={"prior_moment": "analytic", "click_rate": k / s["n"]})


def estimate_shift_weighted(params: InterferometerParams, prior: NoisePrior, n_trials: int,
                            seed: int, eta: float | None = None,
                            workers: int | None = None) -> ShiftEstimate:
    """Click-probability-weighted mean of ``E1^2`` minus its unweighted sample mean.

    A ratio estimator (bias O(1/n)); stderr is the delta-method standard
    deviation of its influence function.  ``eta`` cancels unless the clamp at
    probability 1 engages.
    """
    if n_trials < 10_000:
        raise StatisticsError("weighted estimator needs n_trials >= 1e4", 0)
    eta = resolve_eta(params, prior, eta)
    s = simulate(params, prior, n_trials, seed, eta, workers)
    n = s["n"]
    if s["w"] <= 0.0:
        raise DegeneratePostSelection("all click weights vanish")
    wbar, ybar = s["w"] / n, s["y"] / n
    m = s["wy"] / s["w"]
    value = m - ybar
    # influence function a_i = w_i (y_i - m)/wbar - y_i, variance from raw moments
    e_wd2 = (s["wwyy"] - 2 * m * s["wwy"] + m * m * s["ww"]) / n
    e_ywd = (s["wyy"] - m * s["wy"]) / n
    e_a2 = e_wd2 / wbar ** 2 - 2 * e_ywd / wbar + s["yy"] / n
    e_a = -ybar  # E[w (y - m)] = 0 by definition of m
    var = max(0.0, e_a2 - e_a * e_a) * n / (n - 1)
    stderr = math.sqrt(var / n)
    return ShiftEstimate(value, stderr, n, s["acc"], Estimator.WEIGHTED, seed, eta,
                         degenerate=stderr == 0.0,
                         notes={"prior_moment": "empirical", "mean_weight": wbar})


ESTIMATORS = {
    Estimator.REJECTION: estimate_shift_rejection,
    Estimator.WEIGHTED: estimate_shift_weighted,
}


def estimate_shift(params, prior, n_trials, seed, estimator=Estimator.REJECTION, eta=None, workers=None):
    return ESTIMATORS[Estimator(estimator)](params, prior, n_trials, seed, eta=eta, workers=workers)


def sweep_mc(grid, n_trials: int, seed: int, estimator: Estimator | str = Estimator.REJECTION,
             workers: int | None = None) -> list:
    """Estimate every grid point; failures become :class:`FailedPoint` entries."""
    out = []
    for point in grid:
        try:
            out.append(estimate_shift(point.params, point.prior, n_trials,
                                      derive_seed(seed, point.key), estimator, workers=workers))
        except WvampError as exc:
            out.append(FailedPoint(point.key, type(exc).__name__, str(exc)))
    return out
