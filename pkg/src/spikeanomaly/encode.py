"""Value-to-spike encoders.

:class:`AdaptiveEncoder` turns each value of a stream into a firing rate
``|tanh((x - mean) / sd)|`` where mean and sd come from a running
statistics tracker, so the receptive field re-centres itself as the stream
drifts. :class:`GrfEncoder` is the classic Gaussian-receptive-field
population code, kept as a baseline: a fixed bank of overlapping Gaussians
converts a value into one spike latency per neuron.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .stats import StatsTracker, _check_finite

__all__ = [
    "RateSample",
    "AdaptiveEncoder",
    "rate_logistic",
    "normalized_rate",
    "grf_centers",
    "GrfEncoder",
    "Latency",
]

DEFAULT_EPSILON_SD = 1e-9
# tanh saturates to exactly 1.0 in double precision for |z| > ~19
_RATE_CEILING = math.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class RateSample:
    rate: float
    rho_max: float

    @property
    def absolute(self) -> float:
        """Rate in spikes/ms."""
        return self.rate * self.rho_max


def normalized_rate(x: float, mean: float, sd: float,
                    epsilon_sd: float = DEFAULT_EPSILON_SD) -> float:
    return min(abs(math.tanh((x - mean) / max(sd, epsilon_sd))), _RATE_CEILING)


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def rate_logistic(x_norm: float) -> float:
    """Rate from the on/off logistic pair: ``|sigma(x) - (1 - sigma(x))|``."""
    x_norm = _check_finite(x_norm)
    return abs(2.0 * _logistic(x_norm) - 1.0)


@dataclass
class AdaptiveEncoder:
    """Adaptive tanh rate encoder.

    The caller feeds each value through :meth:`observe`, which updates the
    tracker and then encodes the value against the updated statistics.
    :meth:`rate` encodes without touching the tracker, which the detector
    uses for lagged values. The first ``warmup`` samples encode to rate 0.
    """

    tracker: StatsTracker
    rho_max: float = 0.5
    epsilon_sd: float = DEFAULT_EPSILON_SD
    warmup: int | None = None

    def __post_init__(self):
        if not self.rho_max > 0:
            raise ConfigError(f"rho_max must be > 0, got {self.rho_max!r}")
        if not self.epsilon_sd > 0:
            raise ConfigError(f"epsilon_sd must be > 0, got {self.epsilon_sd!r}")
        if self.warmup is None:
            self.warmup = self.tracker.default_warmup
        if self.warmup < 0:
            raise ConfigError("warmup must be >= 0")

    @property
    def warming_up(self) -> bool:
        return self.tracker.count <= self.warmup

    def rate(self, x: float) -> RateSample:
        x = _check_finite(x)
        if self.warming_up:
            return RateSample(0.0, self.rho_max)
        t = self.tracker
        return RateSample(normalized_rate(x, t.mean, t.std_dev, self.epsilon_sd),
                          self.rho_max)

    def observe(self, x: float) -> RateSample:
        self.tracker.update(x)
        return self.rate(x)


def grf_centers(n: int, x_min: float, x_max: float, beta: float):
    """Centres (for neurons 1..n) and shared width of a GRF bank."""
    if int(n) != n or n < 3:
        raise ConfigError(f"GRF needs n >= 3 neurons, got {n!r}")
    if not x_min < x_max:
        raise ConfigError(f"need x_min < x_max, got {x_min!r}, {x_max!r}")
    if not beta > 0:
        raise ConfigError(f"beta must be > 0, got {beta!r}")
    n = int(n)
    span = x_max - x_min
    centers = [x_min + (2 * i - 3) * span / (2 * (n - 2)) for i in range(1, n + 1)]
    sigma = span / (beta * (n - 2))
    return centers, sigma


@dataclass(frozen=True)
class Latency:
    neuron: int
    latency: float
    fires: bool

    def spike_time(self, interval_ms: float) -> float | None:
        """Latency mapped linearly onto ``[0, interval_ms]``; None if silent."""
        return self.latency * interval_ms if self.fires else None


@dataclass
class GrfEncoder:
    n_neurons: int
    x_min: float
    x_max: float
    beta: float = 1.5
    theta_latency: float = 0.9
    centers: list = field(init=False)
    sigma: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.theta_latency < 1.0:
            raise ConfigError(f"theta_latency must lie in (0, 1), got {self.theta_latency!r}")
        self.centers, self.sigma = grf_centers(self.n_neurons, self.x_min,
                                               self.x_max, self.beta)

    def latencies(self, x: float) -> list[Latency]:
        """One entry per neuron (1-based index), latency in [0, 1]."""
        x = _check_finite(x)
        two_var = 2.0 * self.sigma * self.sigma
        out = []
        for i, mu in enumerate(self.centers, start=1):
            lat = 1.0 - math.exp(-((x - mu) ** 2) / two_var)
            out.append(Latency(i, lat, lat <= self.theta_latency))
        return out

    def spike_times(self, x: float, interval_ms: float) -> list[tuple[int, float]]:
        return [(l.neuron, l.spike_time(interval_ms))
                for l in self.latencies(x) if l.fires]
