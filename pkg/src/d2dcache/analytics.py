"""Closed-form service success probabilities.

For a request of an object of size z (bits), cached with marginal b at
transmitters of density lambda_t, the probability that at least one
transmitter delivers the whole file within its lifespan is

    1 - exp(-pi * lambda_t * b * (P/N)^(2/alpha) * E[H^(2/alpha)] * I_T)

where I_T = E[(2^(z/(W*T)) - 1)^(-2/alpha)] is a moment over the lifespan
law T. The factor decomposes the PPP void probability of the random
coverage disc: (P/N)^(2/alpha) * E[H^(2/alpha)] * I_T is the mean squared
coverage radius up to the factor pi * lambda_t.

Total success averages the per-object probability over the request
popularity; expected success additionally averages over random file sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel import FadingLaw, RadioParams, fading_moment
from .content import ContentCatalogue, SizeLaw
from .mobility import ExponentialLifespan, FixedLifespan, LifespanLaw
from .placement import PlacementPolicy

_LN2 = math.log(2.0)
# Beyond this value of z/(W*tau) the power (2^x - 1)^(-2/alpha) underflows
# for every alpha of interest; treated as exactly zero.
_X_CUTOFF = 1024.0


@dataclass(frozen=True)
class MetricEstimate:
    """A probability estimate with its standard error and sample count.

    Closed-form values carry standard_error 0 and sample_count 0.
    """

    value: float
    standard_error: float = 0.0
    sample_count: int = 0

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability out of range: {self.value}")
        if self.standard_error < 0:
            raise ValueError("standard error must be nonnegative")


@dataclass(frozen=True)
class AnalyticInputs:
    """Everything the closed forms need: network, link, content, placement."""

    density: float
    radio: RadioParams
    fading: FadingLaw
    lifespan: LifespanLaw
    policy: PlacementPolicy
    catalogue: ContentCatalogue

    def __post_init__(self):
        if self.density < 0 or not math.isfinite(self.density):
            raise ValueError("density must be finite and nonnegative")
        if self.policy.b.size != self.catalogue.F:
            raise ValueError("placement policy and catalogue disagree on F")


def _threshold_power(x, alpha: float):
    """(2^x - 1)^(-2/alpha), evaluated stably for x in (0, inf).

    Written as exp(-(2/alpha) * (x*ln2 + log1p(-2^(-x)))) so neither the
    huge values near x = 0 nor the tiny ones at large x lose precision.
    """
    x = np.asarray(x, dtype=float)
    log2x = x * _LN2
    with np.errstate(divide="ignore", over="ignore"):
        log_thr = log2x + np.log1p(-np.exp(-np.minimum(log2x, 745.0)))
        out = np.exp(-(2.0 / alpha) * log_thr)
    return np.where(x > _X_CUTOFF, 0.0, out)


def lifespan_moment_fixed(z: float, tau: float, bandwidth: float, alpha: float):
    """I_T for a deterministic lifespan: (2^(z/(W*tau)) - 1)^(-2/alpha).

    Returns 0 when z/(W*tau) exceeds the underflow cutoff. Accepts array z.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0) or tau <= 0:
        raise ValueError("z and tau must be positive")
    result = _threshold_power(z / (bandwidth * tau), alpha)
    return float(result) if result.ndim == 0 else result


def lifespan_moment_exponential(z: float, tau: float, bandwidth: float, alpha: float) -> float:
    """I_T for an exponential lifespan with mean tau.

    Evaluates int_0^inf e^(-t) (2^(x0/t) - 1)^(-2/alpha) dt with
    x0 = z/(W*tau), by adaptive quadrature to relative tolerance 1e-8.
    The finite piece is split at the integrand's rise (around the ridge
    t ~ sqrt(x0)) and the tail is handled by the infinite-interval
    transform of the quadrature routine.
    """
    if z <= 0 or tau <= 0:
        raise ValueError("z and tau must be positive")
    x0 = z / (bandwidth * tau)

    def f(t):
        return math.exp(-t) * float(_threshold_power(x0 / t, alpha))

    # Below x0 / cutoff the integrand is identically zero by the underflow
    # guard; above ~log(1/eps) the e^(-t) factor has died off.
    lo = x0 / _X_CUTOFF
    t_ridge = math.sqrt(2.0 * _LN2 * x0 / alpha)
    mid = max(50.0, 4.0 * t_ridge, 2.0 * lo)
    pts = sorted({min(max(p, lo * 1.001), mid * 0.999) for p in (t_ridge, x0, 1.0)})
    head, head_err, info = integrate.quad(
        f, lo, mid, points=pts, epsabs=0.0, epsrel=1e-9, limit=400, full_output=True
    )[:3]
    tail, tail_err = integrate.quad(f, mid, np.inf, epsabs=0.0, epsrel=1e-9, limit=400)
    value = head + tail
    abserr = head_err + tail_err
    if not math.isfinite(value) or (value > 0 and abserr > 1e-8 * value):
        raise ArithmeticError(
            f"lifespan moment quadrature failed after {info['last']} subintervals: "
            f"value={value}, abserr={abserr} (z={z}, tau={tau})"
        )
    return value


def lifespan_moment(law: LifespanLaw, z, bandwidth: float, alpha: float):
    """I_T under either lifespan law; z may be an array."""
    if isinstance(law, FixedLifespan):
        return lifespan_moment_fixed(z, law.mean, bandwidth, alpha)
    if isinstance(law, ExponentialLifespan):
        z = np.asarray(z, dtype=float)
        if z.ndim == 0:
            return lifespan_moment_exponential(float(z), law.mean, bandwidth, alpha)
        return np.array([lifespan_moment_exponential(v, law.mean, bandwidth, alpha) for v in z])
    raise TypeError(f"unknown lifespan law {law!r}")


def _coefficient(inputs: AnalyticInputs) -> float:
    """pi * lambda_t * (P/N)^(2/alpha) * E[H^(2/alpha)] (marginal excluded)."""
    alpha = inputs.radio.pathloss_exponent
    snr_gain = (inputs.radio.power / inputs.radio.noise) ** (2.0 / alpha)
    return math.pi * inputs.density * snr_gain * fading_moment(inputs.fading, alpha)


def _clamp(p: float) -> float:
    return min(max(p, 0.0), 1.0)


def per_object_success(inputs: AnalyticInputs, j: int) -> MetricEstimate:
    """Probability the request for object j (0-based) is served."""
    b_j = inputs.policy.b[j]
    if b_j == 0.0:
        return MetricEstimate(value=0.0)
    it = lifespan_moment(
        inputs.lifespan, inputs.catalogue.sizes[j], inputs.radio.bandwidth, inputs.radio.pathloss_exponent
    )
    exponent = _coefficient(inputs) * b_j * float(it)
    return MetricEstimate(value=_clamp(-math.expm1(-exponent)))


def total_success(inputs: AnalyticInputs) -> MetricEstimate:
    """Popularity-averaged service success probability of the catalogue."""
    a = inputs.catalogue.popularity.a
    b = inputs.policy.b
    cached = b > 0
    success = 0.0
    if np.any(cached):
        its = np.atleast_1d(
            lifespan_moment(
                inputs.lifespan,
                inputs.catalogue.sizes[cached],
                inputs.radio.bandwidth,
                inputs.radio.pathloss_exponent,
            )
        )
        # success mass summed directly (a_j * -expm1(-exponent_j)) rather
        # than 1 - failure mass: exact when nothing is cached and free of
        # cancellation when every term is small
        success = float(np.sum(a[cached] * -np.expm1(-_coefficient(inputs) * b[cached] * its)))
    return MetricEstimate(value=_clamp(success))


def expected_success(
    inputs: AnalyticInputs,
    size_law: SizeLaw,
    mc_samples: int = 100_000,
    rng: np.random.Generator | None = None,
) -> MetricEstimate:
    """Service success averaged over both popularity and random file sizes.

    Sizes enter only through I_T, so the expectation over the size law is
    estimated by Monte Carlo with one set of draws shared across all
    objects (common random numbers); the catalogue's realized sizes are
    ignored. The returned standard error reflects the size sampling only.
    """
    if mc_samples < 1000:
        raise ValueError("mc_samples must be at least 1000")
    rng = np.random.default_rng() if rng is None else rng
    a = inputs.catalogue.popularity.a
    b = inputs.policy.b
    cached = b > 0
    z = np.asarray(size_law.inverse_cdf(rng.random(mc_samples)), dtype=float)
    its = np.atleast_1d(
        lifespan_moment(inputs.lifespan, z, inputs.radio.bandwidth, inputs.radio.pathloss_exponent)
    )
    # per-draw failure mass of the cached objects: rows = objects, cols = draws
    coeffs = _coefficient(inputs) * b[cached]
    per_draw = a[cached] @ np.exp(-np.outer(coeffs, its))
    failure = float(a[~cached].sum()) + float(per_draw.mean())
    stderr = float(per_draw.std(ddof=1) / math.sqrt(mc_samples))
    return MetricEstimate(value=_clamp(1.0 - failure), standard_error=stderr, sample_count=mc_samples)


def coverage_radius_scale(inputs: AnalyticInputs) -> float:
    """Radius scale (meters) below which service is plausible.

    (P/N)^(1/alpha) * sqrt(E[H^(2/alpha)] * max I_T) over cached objects:
    the square root of the mean squared coverage radius entering the void
    probability, maximized over the objects that can actually be served.
    Observation windows should be an order of magnitude wider than this.
    """
    alpha = inputs.radio.pathloss_exponent
    cached = inputs.policy.b > 0
    if not np.any(cached):
        return 0.0
    its = np.atleast_1d(
        lifespan_moment(
            inputs.lifespan,
            inputs.catalogue.sizes[cached],
            inputs.radio.bandwidth,
            alpha,
        )
    )
    gain = (inputs.radio.power / inputs.radio.noise) ** (1.0 / alpha)
    return gain * math.sqrt(fading_moment(inputs.fading, alpha) * float(its.max()))
