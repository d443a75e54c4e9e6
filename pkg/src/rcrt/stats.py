"""Success-probability bounds and the Monte Carlo engine.

Randomness comes from a counter-based Philox stream keyed by the master
seed. Trial ``t`` always reads the same counter block, so results do not
depend on chunking or on how many workers run the trials.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.random import Generator, Philox
from scipy import special

from .codec import decode_full_batch, decode_layered_batch, fold_batch
from .exceptions import ConfigurationError, DomainError
from .flat import ModuliSet
from .layered import LayeredDesign

__all__ = [
    "PRIOR_KINDS",
    "NOISE_KINDS",
    "SignalPrior",
    "NoiseModel",
    "SuccessEstimate",
    "MonteCarloResult",
    "interval_mass",
    "noise_pass_prob",
    "residue_pass_prob",
    "success_lower_bound",
    "monte_carlo",
    "rrse",
]

PRIOR_KINDS = ("uniform", "rayleigh", "exponential", "folded-gaussian")
NOISE_KINDS = ("gaussian", "uniform")

# open interval for inverse-CDF transforms
_U_EPS = 2.0**-53


@dataclass(frozen=True)
class SignalPrior:
    """Amplitude prior. ``param`` is the upper end for uniform, beta for
    rayleigh, lambda for exponential and theta for folded-gaussian."""

    kind: str
    param: float
    low: float = 0.0

    def __post_init__(self):
        if self.kind not in PRIOR_KINDS:
            raise DomainError(f"unknown prior {self.kind!r}; expected one of {PRIOR_KINDS}")
        if not self.param > 0:
            raise DomainError(f"prior parameter must be positive, got {self.param}")
        if self.kind == "uniform" and not 0 <= self.low < self.param:
            raise DomainError(f"uniform prior needs 0 <= low < high, got [{self.low}, {self.param})")

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        p = self.param
        if self.kind == "uniform":
            return np.clip((x - self.low) / (p - self.low), 0.0, 1.0)
        if self.kind == "rayleigh":
            return -np.expm1(-(x**2) / (2 * p * p))
        if self.kind == "exponential":
            return -np.expm1(-x / p)
        return special.erf(x / (math.sqrt(2) * p))

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        p = self.param
        if self.kind == "uniform":
            return self.low + u * (p - self.low)
        if self.kind == "rayleigh":
            return p * np.sqrt(-2 * np.log1p(-u))
        if self.kind == "exponential":
            return -p * np.log1p(-u)
        return math.sqrt(2) * p * special.erfinv(u)

    def mass(self, a, b) -> float:
        return interval_mass(self, a, b)


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean residue noise: ``gaussian`` with std ``param`` or
    ``uniform`` on ``[-param, param]``."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise DomainError(f"unknown noise {self.kind!r}; expected one of {NOISE_KINDS}")
        if not self.param >= 0:
            raise DomainError(f"noise parameter must be non-negative, got {self.param}")

    @property
    def noiseless(self) -> bool:
        return self.param == 0

    def from_uniform(self, u):
        u = np.asarray(u, dtype=float)
        if self.noiseless:
            return np.zeros_like(u)
        if self.kind == "gaussian":
            return self.param * special.ndtri(np.clip(u, _U_EPS, 1 - _U_EPS))
        return self.param * (2 * u - 1)

    def sample(self, rng, size):
        return self.from_uniform(rng.random(size))


def interval_mass(prior: SignalPrior, a, b) -> float:
    """Prior probability of ``[a, b)``; ``b`` may be ``inf``."""
    a, b = float(a), float(b)
    if a < 0:
        raise DomainError("interval must start at a non-negative point")
    if a > b:
        raise DomainError(f"empty interval [{a}, {b})")
    if a == b:
        return 0.0
    p = prior.param
    if prior.kind == "uniform":
        lo, hi = max(a, prior.low), min(b, p)
        return max(0.0, hi - lo) / (p - prior.low)
    if prior.kind == "rayleigh":
        return math.exp(-(a * a) / (2 * p * p)) - math.exp(-(b * b) / (2 * p * p))
    if prior.kind == "exponential":
        return math.exp(-a / p) - math.exp(-b / p)
    s = math.sqrt(2) * p
    return math.erf(b / s) - math.erf(a / s)


def noise_pass_prob(noise: NoiseModel, tau) -> float:
    """P(|e1 - e2| < 2 tau) for independent residue errors.

    This is the event that keeps a layer with per-residue tolerance tau
    decodable. Gaussian errors give ``erf(tau / sigma)``; uniform errors
    give the triangular form ``2 tau / eps - tau^2 / eps^2`` below eps.
    """
    tau = float(tau)
    if tau <= 0:
        raise DomainError("tau must be positive")
    if noise.noiseless:
        return 1.0
    p = noise.param
    if noise.kind == "gaussian":
        return math.erf(tau / p)
    if tau >= p:
        return 1.0
    return 2 * tau / p - tau * tau / (p * p)


def residue_pass_prob(noise: NoiseModel, tau) -> float:
    """P(|e| < tau) for a single residue error."""
    tau = float(tau)
    if tau <= 0:
        raise DomainError("tau must be positive")
    if noise.noiseless:
        return 1.0
    p = noise.param
    if noise.kind == "gaussian":
        return math.erf(tau / (math.sqrt(2) * p))
    return min(1.0, tau / p)


@dataclass(frozen=True)
class SuccessEstimate:
    breakpoints: tuple[float, ...]
    per_layer_mass: tuple[float, ...]
    per_layer_pass: tuple[float, ...]

    @property
    def eta(self) -> float:
        return float(sum(a * b for a, b in zip(self.per_layer_mass, self.per_layer_pass)))

    @property
    def in_range_mass(self) -> float:
        return float(sum(self.per_layer_mass))


def success_lower_bound(design, prior: SignalPrior, noise: NoiseModel, protocol="layered", low=0.0) -> SuccessEstimate:
    """Layer masses times difference-event pass probabilities.

    With the flat protocol every x is decoded at the full layer, so the
    bound collapses to a single term.
    """
    if isinstance(design, ModuliSet):
        if protocol == "layered":
            raise ConfigurationError("layered protocol needs a two-moduli layered design")
        return SuccessEstimate(
            (float(design.full_range),),
            (interval_mass(prior, low, float(design.full_range)),),
            (noise_pass_prob(noise, design.full_tolerance),),
        )
    P = [float(p) for p in design.breakpoints]
    if protocol == "flat":
        return SuccessEstimate(
            (P[-1],), (interval_mass(prior, low, P[-1]),), (noise_pass_prob(noise, design.tolerances[-1]),)
        )
    if protocol != "layered":
        raise DomainError(f"unknown protocol {protocol!r}")
    masses, passes = [], []
    start = float(low)
    for p, tau in zip(P, design.tolerances):
        lo = min(max(start, low), p)
        masses.append(interval_mass(prior, lo, p))
        passes.append(noise_pass_prob(noise, tau))
        start = p
    return SuccessEstimate(tuple(P), tuple(masses), tuple(passes))


def rrse(x, xhat) -> float:
    """sqrt(sum (x - xhat)^2 / sum x^2)."""
    x = np.asarray(x, dtype=float)
    xhat = np.asarray(xhat, dtype=float)
    num = float(np.sum((x - xhat) ** 2))
    den = float(np.sum(x**2))
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return math.sqrt(num / den)


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    successes: int
    rejections: int
    sq_error: float
    sq_signal: float

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    @property
    def rrse(self) -> float:
        if self.sq_signal == 0:
            return 0.0 if self.sq_error == 0 else math.inf
        return math.sqrt(self.sq_error / self.sq_signal)

    @property
    def std_error(self) -> float:
        p = self.success_rate
        return math.sqrt(p * (1 - p) / self.trials)


def _chunk(design, prior, noise, seed, start, count, protocol, low, upper):
    L = len(design.gammas)
    blocks = -(-(2 + L) // 4)
    u = Generator(Philox(key=seed, counter=start * blocks)).random((count, 4 * blocks))
    lo_cdf, hi_cdf = float(prior.cdf(low)), float(prior.cdf(upper))
    x = prior.ppf(lo_cdf + u[:, 0] * (1 - lo_cdf))
    out = x >= upper
    # inverse CDF truncated to [low, upper) stands in for repeated rejection
    x[out] = prior.ppf(lo_cdf + u[out, 1] * (hi_cdf - lo_cdf))
    x = np.clip(x, low, np.nextafter(upper, 0))
    r, n = fold_batch(x, design)
    r = r + noise.from_uniform(u[:, 2 : 2 + L])
    if protocol == "layered":
        layers = np.searchsorted(np.array([float(p) for p in design.breakpoints]), x, side="right") + 1
        f, xhat = decode_layered_batch(design, r, layers)
    elif isinstance(design, LayeredDesign) and L == 2:
        f, xhat = decode_layered_batch(design, r)
    else:
        f, xhat = decode_full_batch(design, r)
    ok = np.all(f == n, axis=1)
    return int(ok.sum()), int(out.sum()), float(np.sum((x - xhat) ** 2)), float(np.sum(x**2))


def monte_carlo(
    design,
    prior: SignalPrior,
    noise: NoiseModel,
    trials: int,
    master_seed: int,
    protocol: str = "layered",
    low: float = 0.0,
    chunk: int = 8192,
    n_jobs: int = 1,
) -> MonteCarloResult:
    """Sample x from the prior on ``[low, P_{K+1})``, fold, perturb, decode.

    Out-of-range prior draws are redrawn from the truncated prior and
    counted in ``rejections``. The layered protocol decodes at the layer
    holding the true x; the flat protocol always uses the full range.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if protocol not in ("layered", "flat"):
        raise DomainError(f"unknown protocol {protocol!r}")
    if protocol == "layered" and not isinstance(design, LayeredDesign):
        raise ConfigurationError("layered protocol needs a layered design")
    upper = float(design.full_range)
    if not 0 <= low < upper:
        raise DomainError(f"lower limit {low} outside [0, {upper})")
    if prior.cdf(upper) - prior.cdf(low) <= 0:
        raise ConfigurationError("prior puts no mass on the decodable range")
    starts = range(0, trials, chunk)

    def run(s):
        return _chunk(design, prior, noise, int(master_seed), s, min(chunk, trials - s), protocol, float(low), upper)

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return MonteCarloResult(
        trials,
        sum(p[0] for p in parts),
        sum(p[1] for p in parts),
        math.fsum(p[2] for p in parts),
        math.fsum(p[3] for p in parts),
    )
