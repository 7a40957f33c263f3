"""Radio link model: fading laws, SNR, Shannon rate and fading moments.

The link budget is intentionally minimal: a transmit power, a receiver
noise power, a power-law path loss and a multiplicative fading variable H.
Everything downstream (simulation and closed forms) consumes only the
quantities defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn, i0e


@dataclass(frozen=True)
class RadioParams:
    """Static radio parameters of every link.

    power and noise must be expressed in the same units; only their ratio
    enters the SNR. bandwidth is in Hz and pathloss_exponent must exceed 2
    for the planar coverage integrals to converge.
    """

    power: float
    noise: float
    bandwidth: float
    pathloss_exponent: float

    def __post_init__(self):
        if self.power <= 0:
            raise ValueError("power must be positive")
        if self.noise <= 0:
            raise ValueError("noise must be positive")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.pathloss_exponent <= 2:
            raise ValueError("pathloss_exponent must exceed 2")


@dataclass(frozen=True)
class ExponentialFading:
    rate: float = 1.0

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be positive")


@dataclass(frozen=True)
class LogNormalFading:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class WeibullFading:
    scale: float = 1.0
    shape: float = 1.0

    def __post_init__(self):
        if self.scale <= 0 or self.shape <= 0:
            raise ValueError("scale and shape must be positive")


@dataclass(frozen=True)
class NakagamiFading:
    m: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.m <= 0 or self.omega <= 0:
            raise ValueError("m and omega must be positive")


@dataclass(frozen=True)
class RiceFading:
    nu: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.nu < 0 or self.sigma <= 0:
            raise ValueError("nu must be nonnegative and sigma positive")


FadingLaw = ExponentialFading | LogNormalFading | WeibullFading | NakagamiFading | RiceFading


def sample_fading(law: FadingLaw, rng: np.random.Generator | None = None, size=None):
    """Draw fading values from the given law (scalar or array of `size`)."""
    rng = np.random.default_rng() if rng is None else rng
    if isinstance(law, ExponentialFading):
        return rng.exponential(1.0 / law.rate, size=size)
    if isinstance(law, LogNormalFading):
        return rng.lognormal(law.mu, law.sigma, size=size)
    if isinstance(law, WeibullFading):
        return law.scale * rng.weibull(law.shape, size=size)
    if isinstance(law, NakagamiFading):
        return np.sqrt(rng.gamma(law.m, law.omega / law.m, size=size))
    if isinstance(law, RiceFading):
        z1 = rng.standard_normal(size)
        z2 = rng.standard_normal(size)
        return np.hypot(law.nu + law.sigma * z1, law.sigma * z2)
    raise TypeError(f"unknown fading law {law!r}")


def snr(params: RadioParams, h, r):
    """Signal-to-noise ratio power * h * r^(-alpha) / noise.

    r is the transmitter-receiver distance in meters and must be positive;
    the power-law path loss is singular at r = 0.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be positive (path loss singular at 0)")
    return params.power * np.asarray(h) * r ** (-params.pathloss_exponent) / params.noise


def rate(params: RadioParams, snr_value):
    """Shannon rate bandwidth * log2(1 + snr) in bits/second."""
    snr_value = np.asarray(snr_value, dtype=float)
    if np.any(snr_value < 0):
        raise ValueError("snr must be nonnegative")
    return params.bandwidth * np.log2(1.0 + snr_value)


def _density(law: FadingLaw):
    """Probability density of the law, as a vectorized callable."""
    if isinstance(law, NakagamiFading):
        m, om = law.m, law.omega
        lognorm = m * math.log(m / om) - math.lgamma(m)

        def pdf(h):
            return 2.0 * np.exp(lognorm + (2 * m - 1) * np.log(h) - m * h * h / om)

        return pdf
    if isinstance(law, RiceFading):
        nu, sig = law.nu, law.sigma
        s2 = sig * sig

        def pdf(h):
            # i0e carries the e^{-x} factor, which cancels the cross term of
            # the Gaussian exponent and keeps the product finite for large h.
            return (h / s2) * i0e(h * nu / s2) * np.exp(-((h - nu) ** 2) / (2 * s2))

        return pdf
    raise TypeError(f"no numerical density registered for {law!r}")


def _numerical_moment(law: FadingLaw, order: float) -> float:
    """E[H^order] by adaptive quadrature over (0, inf).

    Uses the substitution h = u / (1 - u) to map the half line onto (0, 1).
    """
    pdf = _density(law)

    def integrand(u):
        h = u / (1.0 - u)
        return h ** order * pdf(h) / (1.0 - u) ** 2

    value, abserr = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-9, limit=300)
    if not math.isfinite(value) or abserr > max(1e-8 * abs(value), 1e-12):
        raise ArithmeticError(
            f"fading moment quadrature did not converge for {law!r}: "
            f"value={value}, abserr={abserr}"
        )
    return value


def fading_moment(law: FadingLaw, alpha: float) -> float:
    """The moment E[H^(2/alpha)] of the fading variable.

    Exponential, log-normal and Weibull laws use exact closed forms; the
    Nakagami and Rice moments are computed numerically from their densities.
    """
    if alpha <= 2:
        raise ValueError("alpha must exceed 2")
    q = 2.0 / alpha
    if isinstance(law, ExponentialFading):
        return law.rate ** (-q) * gamma_fn(q + 1.0)
    if isinstance(law, LogNormalFading):
        return math.exp(q * law.mu + 0.5 * q * q * law.sigma**2)
    if isinstance(law, WeibullFading):
        return law.scale**q * gamma_fn(1.0 + q / law.shape)
    if isinstance(law, (NakagamiFading, RiceFading)):
        return _numerical_moment(law, q)
    raise TypeError(f"unknown fading law {law!r}")
