"""Content catalogue: Zipf popularity and file-size distributions.

Sizes are always in bits. Each size law exposes its inverse CDF so that
catalogue sampling and the size-expectation Monte Carlo can share one
uniform stream (common random numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gamma as gamma_fn, ndtr, ndtri

ORDERING_MODES = ("independent", "increasing_with_popularity_index", "decreasing_with_popularity_index")

_U_EPS = 1e-15  # keeps inverse CDFs strictly inside the law's support


@dataclass(frozen=True)
class PopularityLaw:
    """Zipf request probabilities a_j = j^(-gamma) / A over F objects."""

    F: int
    gamma: float
    a: np.ndarray

    def __post_init__(self):
        if abs(float(np.sum(self.a)) - 1.0) > 1e-12:
            raise ValueError("popularity vector must sum to 1")
        if np.any(np.diff(self.a) > 0):
            raise ValueError("popularity vector must be nonincreasing")


def zipf_popularity(F: int, gamma: float) -> PopularityLaw:
    """Build the Zipf popularity vector for a catalogue of F objects."""
    if F < 2:
        raise ValueError("catalogue needs at least two objects")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    ranks = np.arange(1, F + 1, dtype=float)
    weights = ranks ** (-gamma)
    a = weights / weights.sum()
    return PopularityLaw(F=F, gamma=gamma, a=a)


def _clip_unit(u):
    return np.clip(u, _U_EPS, 1.0 - _U_EPS)


@dataclass(frozen=True)
class UniformSize:
    z_min: float
    z_max: float

    def __post_init__(self):
        # z_min == z_max is allowed: a point mass at a single size
        if not 0 < self.z_min <= self.z_max:
            raise ValueError("need 0 < z_min <= z_max")

    def inverse_cdf(self, u):
        return self.z_min + (self.z_max - self.z_min) * np.asarray(u, dtype=float)


@dataclass(frozen=True)
class ExponentialSize:
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    def inverse_cdf(self, u):
        return -np.log1p(-_clip_unit(u)) / self.rate


@dataclass(frozen=True)
class ParetoSize:
    shape: float
    scale: float

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("shape and scale must be positive")

    def inverse_cdf(self, u):
        return self.scale * (1.0 - _clip_unit(u)) ** (-1.0 / self.shape)


@dataclass(frozen=True)
class WeibullSize:
    scale: float
    shape: float

    def __post_init__(self):
        if self.scale <= 0 or self.shape <= 0:
            raise ValueError("scale and shape must be positive")

    def inverse_cdf(self, u):
        return self.scale * (-np.log1p(-_clip_unit(u))) ** (1.0 / self.shape)


@dataclass(frozen=True)
class LogNormalSize:
    """Log-normal size law, optionally clamped to [z_min, z_max] by rejection."""

    mu: float
    sigma: float
    z_min: float | None = None
    z_max: float | None = None

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.truncated and not 0 < self.z_min < self.z_max:
            raise ValueError("need 0 < z_min < z_max when truncating")

    @property
    def truncated(self) -> bool:
        return self.z_min is not None or self.z_max is not None

    def inverse_cdf(self, u):
        if self.truncated:
            raise ValueError("truncated log-normal has no simple inverse CDF; use sample_sizes")
        return np.exp(self.mu + self.sigma * ndtri(_clip_unit(u)))


SizeLaw = UniformSize | ExponentialSize | ParetoSize | WeibullSize | LogNormalSize


def sample_sizes(law: SizeLaw, F: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw F i.i.d. sizes via the law's inverse CDF (rejection if truncated)."""
    rng = np.random.default_rng() if rng is None else rng
    if isinstance(law, LogNormalSize) and law.truncated:
        lo = law.z_min if law.z_min is not None else 0.0
        hi = law.z_max if law.z_max is not None else math.inf
        out = np.empty(F)
        filled = 0
        while filled < F:
            z = np.exp(law.mu + law.sigma * rng.standard_normal(F))
            z = z[(z >= lo) & (z <= hi)]
            take = min(F - filled, z.size)
            out[filled : filled + take] = z[:take]
            filled += take
        return out
    return law.inverse_cdf(rng.random(F))


def mean_size(law: SizeLaw) -> float:
    """Analytic mean of the size law in bits."""
    if isinstance(law, UniformSize):
        return 0.5 * (law.z_min + law.z_max)
    if isinstance(law, ExponentialSize):
        return 1.0 / law.rate
    if isinstance(law, ParetoSize):
        if law.shape <= 1:
            raise ValueError(f"Pareto mean is infinite for shape <= 1 (got {law.shape})")
        return law.scale * law.shape / (law.shape - 1.0)
    if isinstance(law, WeibullSize):
        return law.scale * gamma_fn(1.0 + 1.0 / law.shape)
    if isinstance(law, LogNormalSize):
        full = math.exp(law.mu + 0.5 * law.sigma**2)
        if not law.truncated:
            return full
        lo = law.z_min if law.z_min is not None else 0.0
        hi = law.z_max if law.z_max is not None else math.inf
        lo_t = (math.log(lo) - law.mu) / law.sigma if lo > 0 else -math.inf
        hi_t = (math.log(hi) - law.mu) / law.sigma if math.isfinite(hi) else math.inf
        mass = ndtr(hi_t) - ndtr(lo_t)
        shifted = ndtr(hi_t - law.sigma) - ndtr(lo_t - law.sigma)
        return full * shifted / mass
    raise TypeError(f"unknown size law {law!r}")


@dataclass(frozen=True)
class ContentCatalogue:
    """F objects with fixed popularity and one realized size per object.

    Object j (0-based internally) has request probability popularity.a[j]
    and size sizes[j] bits. ordering_mode records how sizes relate to the
    popularity rank.
    """

    popularity: PopularityLaw
    sizes: np.ndarray
    ordering_mode: str = "independent"

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=float)
        object.__setattr__(self, "sizes", sizes)
        if sizes.shape != (self.popularity.F,):
            raise ValueError("need exactly one size per object")
        if np.any(sizes <= 0):
            raise ValueError("sizes must be positive")
        if self.ordering_mode not in ORDERING_MODES:
            raise ValueError(f"unknown ordering mode {self.ordering_mode!r}")
        if self.ordering_mode == "increasing_with_popularity_index" and np.any(np.diff(sizes) < 0):
            raise ValueError("sizes must be nondecreasing in popularity rank")
        if self.ordering_mode == "decreasing_with_popularity_index" and np.any(np.diff(sizes) > 0):
            raise ValueError("sizes must be nonincreasing in popularity rank")

    @property
    def F(self) -> int:
        return self.popularity.F

    def to_csv(self, path) -> None:
        """Write (index, popularity, size_bits) rows; index is the 1-based rank."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("index,popularity,size_bits\n")
            for j in range(self.F):
                fh.write(f"{j + 1},{float(self.popularity.a[j])!r},{float(self.sizes[j])!r}\n")


def apply_ordering(catalogue: ContentCatalogue, mode: str) -> ContentCatalogue:
    """Permute the catalogue's size multiset against the popularity ranks.

    increasing_with_popularity_index sorts sizes ascending (most popular
    object gets the smallest file), decreasing sorts descending, and
    independent keeps the sampled order.
    """
    if mode not in ORDERING_MODES:
        raise ValueError(f"unknown ordering mode {mode!r}")
    if mode == "independent":
        sizes = catalogue.sizes
    elif mode == "increasing_with_popularity_index":
        sizes = np.sort(catalogue.sizes)
    else:
        sizes = np.sort(catalogue.sizes)[::-1]
    return replace(catalogue, sizes=sizes.copy(), ordering_mode=mode)
