"""Cache-aided device-to-device network simulator and closed-form evaluator.

The package estimates the probability that a typical receiver's content
request is served by a nearby transmitter that (a) caches the object and
(b) can deliver the whole file over a noise-limited link before moving
away — once by Monte Carlo over sampled transmitter fields and once from
a closed form, so each route checks the other.
"""

from .analytics import (
    AnalyticInputs,
    MetricEstimate,
    coverage_radius_scale,
    expected_success,
    lifespan_moment,
    lifespan_moment_exponential,
    lifespan_moment_fixed,
    per_object_success,
    total_success,
)
from .channel import (
    ExponentialFading,
    LogNormalFading,
    NakagamiFading,
    RadioParams,
    RiceFading,
    WeibullFading,
    fading_moment,
    rate,
    sample_fading,
    snr,
)
from .content import (
    ContentCatalogue,
    ExponentialSize,
    LogNormalSize,
    ParetoSize,
    PopularityLaw,
    UniformSize,
    WeibullSize,
    apply_ordering,
    mean_size,
    sample_sizes,
    zipf_popularity,
)
from .content import ORDERING_MODES
from .experiments import (
    ConfigError,
    ExperimentPreset,
    PRESET_NAMES,
    ResultRow,
    build_preset,
    emit_results,
    load_config,
    run_preset,
)
from .geometry import PointField, Window, sample_ppp
from .mobility import ExponentialLifespan, FixedLifespan, sample_lifespan
from .placement import CacheInventory, PlacementPolicy, popularity_weighted_marginals, sample_inventory
from .simulator import (
    SimulationConfig,
    ServiceOutcome,
    estimate_per_object_success,
    estimate_total_success,
    required_half_width,
    run_iteration,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticInputs",
    "CacheInventory",
    "ConfigError",
    "ContentCatalogue",
    "ExperimentPreset",
    "ExponentialFading",
    "ExponentialLifespan",
    "ExponentialSize",
    "FixedLifespan",
    "LogNormalFading",
    "LogNormalSize",
    "MetricEstimate",
    "NakagamiFading",
    "ORDERING_MODES",
    "PRESET_NAMES",
    "ParetoSize",
    "PlacementPolicy",
    "PointField",
    "PopularityLaw",
    "RadioParams",
    "ResultRow",
    "RiceFading",
    "ServiceOutcome",
    "SimulationConfig",
    "UniformSize",
    "WeibullFading",
    "WeibullSize",
    "Window",
    "apply_ordering",
    "build_preset",
    "coverage_radius_scale",
    "emit_results",
    "estimate_per_object_success",
    "estimate_total_success",
    "expected_success",
    "fading_moment",
    "lifespan_moment",
    "lifespan_moment_exponential",
    "lifespan_moment_fixed",
    "load_config",
    "mean_size",
    "per_object_success",
    "popularity_weighted_marginals",
    "rate",
    "required_half_width",
    "run_iteration",
    "run_preset",
    "sample_fading",
    "sample_inventory",
    "sample_lifespan",
    "sample_ppp",
    "sample_sizes",
    "snr",
    "total_success",
    "zipf_popularity",
]
