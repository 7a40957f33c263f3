import math
from dataclasses import replace

import numpy as np
import pytest

from d2dcache import (
    AnalyticInputs,
    ContentCatalogue,
    ExponentialFading,
    ExponentialLifespan,
    FixedLifespan,
    MetricEstimate,
    RadioParams,
    UniformSize,
    coverage_radius_scale,
    expected_success,
    lifespan_moment,
    lifespan_moment_exponential,
    lifespan_moment_fixed,
    per_object_success,
    popularity_weighted_marginals,
    total_success,
    zipf_popularity,
)

W = 5e6
ALPHA = 4.0


def rng_for(tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((95, tag)))


def make_inputs(
    density=2.5e-3,
    power=0.5,
    noise=1e-11 * 5e6,
    bandwidth=W,
    alpha=ALPHA,
    F=100,
    gamma=0.78,
    K=5,
    sizes=None,
    lifespan=None,
):
    pop = zipf_popularity(F, gamma)
    if sizes is None:
        sizes = np.full(F, 1e9)
    catalogue = ContentCatalogue(popularity=pop, sizes=np.asarray(sizes, dtype=float))
    return AnalyticInputs(
        density=density,
        radio=RadioParams(power=power, noise=noise, bandwidth=bandwidth, pathloss_exponent=alpha),
        fading=ExponentialFading(),
        lifespan=lifespan if lifespan is not None else ExponentialLifespan(1000.0),
        policy=popularity_weighted_marginals(pop, K),
        catalogue=catalogue,
    )


# ------------------------------------------------------- lifespan moments


def test_fixed_moment_reference_point():
    # z/(W*tau) = 0.2 at alpha=4 gives (2^0.2 - 1)^(-1/2)
    value = lifespan_moment_fixed(0.2 * W * 50.0, 50.0, W, 4.0)
    assert value == pytest.approx((2.0 ** 0.2 - 1.0) ** -0.5, rel=1e-12)
    assert value == pytest.approx(2.59327, abs=1e-5)


def test_fixed_moment_unit_threshold():
    # z = W*tau makes the rate threshold exactly 1 bit/s/Hz, so the moment is 1
    assert lifespan_moment_fixed(W * 100.0, 100.0, W, 4.0) == 1.0
    assert lifespan_moment_fixed(W * 100.0, 100.0, W, 3.0) == 1.0


def test_fixed_moment_underflows_to_zero_for_huge_files():
    assert lifespan_moment_fixed(2000.0 * W * 100.0, 100.0, W, 4.0) == 0.0


def test_fixed_moment_accepts_arrays():
    z = np.array([0.2, 1.0, 2000.0]) * W * 100.0
    out = lifespan_moment_fixed(z, 100.0, W, 4.0)
    np.testing.assert_allclose(out, [(2.0 ** 0.2 - 1.0) ** -0.5, 1.0, 0.0], rtol=1e-12)


def test_moment_rejects_nonpositive_inputs():
    with pytest.raises(ValueError):
        lifespan_moment_fixed(-1.0, 100.0, W, 4.0)
    with pytest.raises(ValueError):
        lifespan_moment_fixed(1e9, 0.0, W, 4.0)
    with pytest.raises(ValueError):
        lifespan_moment_exponential(0.0, 100.0, W, 4.0)
    with pytest.raises(ValueError):
        lifespan_moment_exponential(1e9, -1.0, W, 4.0)


def test_exponential_moment_increases_with_mean_lifespan():
    values = [lifespan_moment_exponential(1e9, tau, W, 4.0) for tau in (10.0, 100.0, 1000.0)]
    assert values[0] < values[1] < values[2]
    assert all(v > 0 for v in values)


def test_exponential_moment_lower_bound():
    # conditioning on the lifespan exceeding its mean: the integrand is
    # nondecreasing in t, so the moment is at least e^(-1) times the value
    # at t = 1 (which is the fixed-lifespan moment at the same mean)
    for z, tau in ((1e9, 100.0), (1e7, 10.0), (5e8, 1000.0)):
        exp_val = lifespan_moment_exponential(z, tau, W, 4.0)
        fix_val = lifespan_moment_fixed(z, tau, W, 4.0)
        assert exp_val >= math.exp(-1.0) * fix_val


def test_exponential_moment_against_monte_carlo():
    # independent oracle: draw the lifespan scale t ~ Exp(1) and average the
    # fixed-lifespan formula at effective threshold x0/t
    for z, tau in ((1e9, 1000.0), (1e7, 100.0), (5e8, 40.0)):
        quad_value = lifespan_moment_exponential(z, tau, W, 4.0)
        t = rng_for(0).exponential(1.0, size=1_000_000)
        draws = np.asarray(lifespan_moment_fixed(z / t, tau, W, 4.0))
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - quad_value) < 3 * se, (z, tau)


def test_moment_dispatcher_matches_specialized_forms():
    z = 1e9
    assert lifespan_moment(FixedLifespan(100.0), z, W, 4.0) == lifespan_moment_fixed(z, 100.0, W, 4.0)
    assert lifespan_moment(ExponentialLifespan(100.0), z, W, 4.0) == pytest.approx(
        lifespan_moment_exponential(z, 100.0, W, 4.0), rel=1e-12
    )


# ------------------------------------------------------- success metrics


def test_metric_estimate_validation():
    MetricEstimate(value=0.5, standard_error=0.01, sample_count=10)
    with pytest.raises(ValueError):
        MetricEstimate(value=-0.1)
    with pytest.raises(ValueError):
        MetricEstimate(value=1.1)
    with pytest.raises(ValueError):
        MetricEstimate(value=0.5, standard_error=-1.0)


def test_inputs_validation():
    good = make_inputs()
    with pytest.raises(ValueError):
        replace(good, density=-1.0)
    with pytest.raises(ValueError):
        replace(good, density=float("nan"))
    other_policy = popularity_weighted_marginals(zipf_popularity(50, 0.78), 5)
    with pytest.raises(ValueError):
        replace(good, policy=other_policy)


def test_uncached_object_never_served():
    inputs = make_inputs()
    for j in (10, 50, 99):
        est = per_object_success(inputs, j)
        assert est.value == 0.0


def test_per_object_success_saturates_with_density():
    values = [per_object_success(make_inputs(density=d), 0).value for d in (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)]
    assert all(v1 < v2 for v1, v2 in zip(values, values[1:]))
    assert per_object_success(make_inputs(density=10.0), 0).value == 1.0


def test_total_success_zero_with_empty_caches():
    inputs = make_inputs()
    empty = replace(inputs.policy, b=np.zeros(100))
    assert total_success(replace(inputs, policy=empty)).value == 0.0


def test_total_success_bounded_by_cached_popularity_mass():
    for tau in (10.0, 100.0, 1000.0, 1e7):
        inputs = make_inputs(lifespan=ExponentialLifespan(tau))
        cached_mass = inputs.catalogue.popularity.a[inputs.policy.b > 0].sum()
        assert total_success(inputs).value <= cached_mass + 1e-12


def test_total_success_approaches_cached_mass_for_long_lifespans():
    inputs = make_inputs(lifespan=FixedLifespan(1e12))
    cached_mass = inputs.catalogue.popularity.a[inputs.policy.b > 0].sum()
    assert total_success(inputs).value == pytest.approx(cached_mass, abs=1e-9)


def test_smaller_files_on_popular_objects_win():
    # matching the smallest files to the most popular objects beats the
    # reverse assignment at every lifespan
    sizes = np.sort(rng_for(1).exponential(1e9, size=100))
    for tau in (100.0, 400.0, 1000.0):
        increasing = make_inputs(sizes=sizes, lifespan=ExponentialLifespan(tau))
        decreasing = make_inputs(sizes=sizes[::-1], lifespan=ExponentialLifespan(tau))
        assert total_success(decreasing).value < total_success(increasing).value


def _engineered_base(rng):
    # threshold x = z/(W*tau) in [0.01, 10]; P/N = (2^x - 1) * 10^u with
    # u ~ U[1, 4] keeps the link budget in the regime where success is
    # monotone in every parameter, including the pathloss exponent
    x = 10.0 ** rng.uniform(-2.0, 1.0)
    u = rng.uniform(1.0, 4.0)
    tau = 10.0 ** rng.uniform(1.0, 3.0)
    noise = 1e-11 * W
    power = (2.0 ** x - 1.0) * 10.0 ** u * noise
    z = x * W * tau
    return make_inputs(
        density=10.0 ** rng.uniform(-4.0, -2.0),
        power=power,
        noise=noise,
        F=20,
        K=3,
        sizes=np.full(20, z),
        lifespan=FixedLifespan(tau),
    )


def test_success_monotone_in_every_parameter():
    rng = rng_for(2)
    for _ in range(10):
        inputs = _engineered_base(rng)
        base = total_success(inputs).value
        tau = inputs.lifespan.mean

        def val(**changes):
            lifespan = changes.pop("lifespan", inputs.lifespan)
            catalogue = changes.pop("catalogue", inputs.catalogue)
            radio = replace(inputs.radio, **changes) if changes else inputs.radio
            return total_success(
                replace(inputs, radio=radio, lifespan=lifespan, catalogue=catalogue)
            ).value

        assert total_success(replace(inputs, density=inputs.density * 2)).value >= base
        assert val(power=inputs.radio.power * 2) >= base
        assert val(bandwidth=inputs.radio.bandwidth * 2) >= base
        assert val(lifespan=FixedLifespan(tau * 2)) >= base
        assert val(noise=inputs.radio.noise * 2) <= base
        assert val(pathloss_exponent=inputs.radio.pathloss_exponent + 0.5) <= base
        bigger = replace(inputs.catalogue, sizes=inputs.catalogue.sizes * 2)
        assert val(catalogue=bigger) <= base


def test_scaled_down_marginals_reduce_success():
    inputs = make_inputs()
    halved = replace(inputs, policy=replace(inputs.policy, b=inputs.policy.b * 0.5))
    assert total_success(halved).value < total_success(inputs).value


# ------------------------------------------------------- size-law average


def test_expected_success_with_point_mass_matches_total():
    inputs = make_inputs(lifespan=FixedLifespan(1000.0))
    point = UniformSize(1e9, 1e9)
    est = expected_success(inputs, point, mc_samples=2000, rng=rng_for(3))
    assert est.value == pytest.approx(total_success(inputs).value, abs=1e-12)
    assert est.standard_error == pytest.approx(0.0, abs=1e-15)


def test_expected_success_requires_enough_samples():
    inputs = make_inputs(lifespan=FixedLifespan(1000.0))
    with pytest.raises(ValueError):
        expected_success(inputs, UniformSize(1e8, 1e9), mc_samples=999)


def test_expected_success_deterministic_given_stream():
    inputs = make_inputs(lifespan=FixedLifespan(1000.0))
    law = UniformSize(5e7, 2e9)
    first = expected_success(inputs, law, mc_samples=5000, rng=rng_for(4))
    second = expected_success(inputs, law, mc_samples=5000, rng=rng_for(4))
    assert first.value == second.value
    assert first.standard_error == second.standard_error
    assert first.sample_count == 5000


def test_expected_success_tracks_direct_average():
    # independent oracle: average total_success over catalogues with sizes
    # resampled from the law (same uniforms via inverse transform)
    inputs = make_inputs(lifespan=FixedLifespan(1000.0))
    law = UniformSize(5e7, 2e9)
    est = expected_success(inputs, law, mc_samples=4000, rng=rng_for(5))
    u = rng_for(5).random(4000)
    direct = []
    for ui in u[:400]:
        sizes = np.full(100, float(law.inverse_cdf(ui)))
        direct.append(total_success(replace(inputs, catalogue=replace(inputs.catalogue, sizes=sizes))).value)
    direct = np.asarray(direct)
    se = direct.std(ddof=1) / math.sqrt(direct.size)
    assert abs(est.value - direct.mean()) < 3 * math.hypot(se, est.standard_error)


# ------------------------------------------------------- coverage scale


def test_coverage_scale_behaviour():
    inputs = make_inputs(lifespan=FixedLifespan(1000.0))
    scale = coverage_radius_scale(inputs)
    assert scale > 0
    louder = replace(inputs, radio=replace(inputs.radio, power=inputs.radio.power * 16))
    assert coverage_radius_scale(louder) == pytest.approx(scale * 2.0, rel=1e-9)
    empty = replace(inputs, policy=replace(inputs.policy, b=np.zeros(100)))
    assert coverage_radius_scale(empty) == 0.0
