import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikeanomaly.encode import (
    AdaptiveEncoder,
    GrfEncoder,
    grf_centers,
    normalized_rate,
    rate_logistic,
)
from spikeanomaly.errors import ConfigError, InputDomainError
from spikeanomaly.stats import CumulativeTracker, EwmaTracker, WindowedTracker

TANH_1 = 0.7615941559557649  # mpmath, 30 digits


def primed(tracker_cls=CumulativeTracker, xs=(1.0, 3.0), **kw):
    enc = AdaptiveEncoder(tracker_cls(**kw) if kw else tracker_cls(), warmup=0)
    for x in xs:
        enc.tracker.update(x)
    return enc


class TestAdaptiveRate:
    def test_rate_zero_at_mean(self):
        enc = primed()
        assert enc.rate(enc.tracker.mean).rate == 0.0

    def test_one_standard_deviation(self):
        enc = primed()
        t = enc.tracker
        assert enc.rate(t.mean + t.std_dev).rate == pytest.approx(TANH_1, abs=1e-15)

    def test_even_about_mean(self):
        enc = primed(xs=(0.3, 2.0, -1.1, 4.4))
        m = enc.tracker.mean
        for d in (0.01, 0.7, 3.0, 50.0):
            assert enc.rate(m + d).rate == pytest.approx(enc.rate(m - d).rate, abs=1e-12)

    def test_absolute_rate(self):
        enc = AdaptiveEncoder(CumulativeTracker(), rho_max=0.5, warmup=0)
        enc.tracker.update(0.0)
        enc.tracker.update(2.0)
        s = enc.rate(enc.tracker.mean + enc.tracker.std_dev)
        assert s.absolute == pytest.approx(0.5 * TANH_1)

    def test_saturated_rate_stays_below_one(self):
        enc = primed(xs=(1.0, 1.0, 1.0))
        s = enc.rate(1e300)
        assert s.rate < 1.0
        assert s.absolute < enc.rho_max

    def test_update_then_encode(self):
        enc = AdaptiveEncoder(EwmaTracker(0.5), warmup=0)
        enc.observe(0.0)
        s = enc.observe(2.0)
        # tracker now holds mean 1, sd 1 (includes the value being encoded)
        assert s.rate == pytest.approx(TANH_1)

    def test_warmup_emits_zero(self):
        enc = AdaptiveEncoder(CumulativeTracker(), warmup=3)
        rates = [enc.observe(x).rate for x in (0, 10, -10, 50)]
        assert rates[:3] == [0, 0, 0]
        assert rates[3] > 0

    @pytest.mark.parametrize("tracker,expected", [
        (CumulativeTracker(), 10),
        (WindowedTracker(25), 25),
        (EwmaTracker(0.013), 77),
    ])
    def test_default_warmup(self, tracker, expected):
        assert AdaptiveEncoder(tracker).warmup == expected

    def test_constant_prefix_uses_sd_floor(self):
        enc = AdaptiveEncoder(CumulativeTracker(), warmup=0)
        for _ in range(5):
            assert enc.observe(7.0).rate == 0.0

    def test_non_finite(self):
        enc = primed()
        with pytest.raises(InputDomainError):
            enc.rate(math.nan)

    def test_bad_config(self):
        with pytest.raises(ConfigError):
            AdaptiveEncoder(CumulativeTracker(), rho_max=0)
        with pytest.raises(ConfigError):
            AdaptiveEncoder(CumulativeTracker(), epsilon_sd=0)


class TestLogistic:
    def test_zero(self):
        assert rate_logistic(0.0) == 0.0

    def test_two(self):
        assert rate_logistic(2.0) == pytest.approx(TANH_1, abs=1e-15)

    @given(st.floats(-700, 700))
    def test_half_angle_identity(self, x):
        assert abs(rate_logistic(x) - abs(math.tanh(x / 2))) < 1e-12


@settings(max_examples=300)
@given(st.floats(-1e6, 1e6), st.floats(1e-6, 1e6), st.floats(0, 1e3), st.floats(0, 1e3))
def test_monotone_in_distance(mean, sd, d1, d2):
    lo, hi = sorted((d1, d2))
    assert normalized_rate(mean + lo, mean, sd) <= normalized_rate(mean + hi, mean, sd)


def test_adapts_after_level_shift():
    c, delta, alpha = 10.0, 5.0, 0.01
    rng = np.random.default_rng(0)
    enc = AdaptiveEncoder(EwmaTracker(alpha))
    xs = list(c + rng.normal(0, 0.1, 1000))
    for x in xs:
        enc.observe(x)
    sd_before = enc.tracker.std_dev
    assert delta >= 10 * sd_before
    rates = [enc.observe(c + delta).rate for _ in range(600)]
    assert rates[0] > 0.99
    # once the first post-step samples have inflated the variance, the
    # rate only falls
    peak = int(np.argmax(rates))
    tail = rates[peak:]
    assert all(b <= a for a, b in zip(tail, tail[1:]))
    assert min(i for i, r in enumerate(rates) if r < 0.5) < 500


class TestGrf:
    def test_seven_neurons(self):
        centers, sigma = grf_centers(7, 0.0, 10.0, 1.5)
        assert centers[0] == pytest.approx(-1.0, abs=1e-12)
        assert centers[1] == pytest.approx(1.0, abs=1e-12)
        assert centers[6] == pytest.approx(11.0, abs=1e-12)
        assert sigma == pytest.approx(4 / 3, abs=1e-12)

    def test_three_neurons(self):
        centers, _ = grf_centers(3, 2.0, 6.0, 1.0)
        assert centers == pytest.approx([0.0, 4.0, 8.0])

    def test_even_spacing(self):
        centers, _ = grf_centers(9, -3.0, 4.0, 2.0)
        gaps = np.diff(centers)
        assert gaps == pytest.approx(np.full(8, 7.0 / 7))

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_too_few_neurons(self, n):
        with pytest.raises(ConfigError):
            grf_centers(n, 0, 1, 1)

    def test_bad_range(self):
        with pytest.raises(ConfigError):
            grf_centers(5, 1, 1, 1)

    def test_latency_zero_at_center(self):
        enc = GrfEncoder(7, 0, 10, 1.5)
        lat = enc.latencies(enc.centers[3])[3]
        assert lat.latency == 0.0
        assert lat.fires

    def test_far_value_silent(self):
        enc = GrfEncoder(7, 0, 10, 1.5, theta_latency=0.99)
        assert not any(l.fires for l in enc.latencies(1e6))

    def test_equidistant_tie(self):
        enc = GrfEncoder(7, 0, 10, 1.5)
        lats = enc.latencies(2.0)
        assert lats[1].latency == lats[2].latency

    def test_spike_times_linear(self):
        enc = GrfEncoder(7, 0, 10, 1.5)
        for neuron, t in enc.spike_times(4.0, 10.0):
            assert t == pytest.approx(10.0 * enc.latencies(4.0)[neuron - 1].latency)

    def test_theta_range(self):
        with pytest.raises(ConfigError):
            GrfEncoder(7, 0, 10, 1.5, theta_latency=1.0)
