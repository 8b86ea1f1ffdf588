"""Streaming anomaly detector.

Each arriving value updates one shared statistics tracker. ``n_inputs``
adaptive input neurons see the stream at lags 0..n_inputs-1 (neuron 1 gets
the newest value) and encode their value against the current statistics.
Their spike trains drive a single LIF output neuron through identical
synapses; any output spike during the value's simulation interval flags the
value as anomalous.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

import numpy as np

from .encode import DEFAULT_EPSILON_SD, AdaptiveEncoder, RateSample
from .errors import ConfigError, DataError, InputDomainError
from .neuron import LifNeuron, generate_spikes, merge_trains
from .stats import make_tracker

__all__ = ["DetectorConfig", "DetectionRecord", "Detector", "run"]


@dataclass
class DetectorConfig:
    n_inputs: int = 10
    interval_ms: float = 10.0
    theta_mv: float = 40.0
    tau_ms: float = 10.0
    rho_max: float = 0.5
    weight: float = 1.0
    gain_mv: float = 0.8
    v_reset_mv: Optional[float] = None
    leak: bool = True
    carry_membrane: bool = True
    tracker: str = "ewma"
    alpha: Optional[float] = 0.013
    window_k: Optional[int] = None
    warmup: Optional[int] = None
    epsilon_sd: float = DEFAULT_EPSILON_SD
    spike_mode: str = "deterministic"
    seed: Optional[int] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if int(self.n_inputs) != self.n_inputs or self.n_inputs < 1:
            raise ConfigError(f"n_inputs must be an integer >= 1, got {self.n_inputs!r}")
        for name in ("interval_ms", "theta_mv", "tau_ms", "rho_max", "epsilon_sd"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        for name in ("weight", "gain_mv"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")
        if self.v_reset_mv is not None and self.v_reset_mv > 0:
            raise ConfigError("v_reset_mv must be <= 0")
        if self.warmup is not None and self.warmup < 0:
            raise ConfigError("warmup must be >= 0")
        if self.spike_mode not in ("deterministic", "poisson"):
            raise ConfigError(f"unknown spike_mode {self.spike_mode!r}")
        # raises ConfigError on bad tracker parameters
        self.make_tracker()

    def make_tracker(self):
        return make_tracker(self.tracker, alpha=self.alpha, window_k=self.window_k)

    @property
    def amplitude_mv(self) -> float:
        return self.weight * self.gain_mv

    def replace(self, **changes) -> "DetectorConfig":
        d = asdict(self)
        d.update(changes)
        return DetectorConfig(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class DetectionRecord:
    index: int
    timestamp: str
    value: float
    rate: float
    detected: bool
    output_spikes: int = field(default=0, compare=False)


class Detector:
    """One detector per stream; feed it values in order with :meth:`step`."""

    def __init__(self, config: DetectorConfig | None = None):
        self.config = config or DetectorConfig()
        cfg = self.config
        self.encoder = AdaptiveEncoder(cfg.make_tracker(), rho_max=cfg.rho_max,
                                       epsilon_sd=cfg.epsilon_sd, warmup=cfg.warmup)
        self.output = LifNeuron(theta=cfg.theta_mv, tau=cfg.tau_ms,
                                v_reset=cfg.v_reset_mv, leak_enabled=cfg.leak)
        self.history: deque = deque(maxlen=cfg.n_inputs)
        self.index = 0
        self.ingest_errors = 0
        self._rng = None
        if cfg.spike_mode == "poisson":
            if cfg.seed is None:
                raise ConfigError("poisson spike mode needs a seed")
            self._rng = np.random.default_rng(cfg.seed)

    @property
    def tracker(self):
        return self.encoder.tracker

    def input_rates(self) -> list[RateSample]:
        """Rates of the input neurons for the current state (newest lag first)."""
        zero = RateSample(0.0, self.config.rho_max)
        rates = [self.encoder.rate(x) for x in reversed(self.history)]
        rates += [zero] * (self.config.n_inputs - len(rates))
        return rates

    def step(self, timestamp: str, value: float) -> DetectionRecord:
        try:
            x = float(value)
        except (TypeError, ValueError):
            x = math.nan
        if not math.isfinite(x):
            self.ingest_errors += 1
            raise InputDomainError(f"row {self.index}: non-finite value {value!r}")

        cfg = self.config
        self.tracker.update(x)
        self.history.append(x)
        rates = self.input_rates()

        t0 = self.index * cfg.interval_ms
        trains = [generate_spikes(r, cfg.interval_ms, cfg.spike_mode, rng=self._rng,
                                  source=j, reproducible=True)
                  for j, r in enumerate(rates, start=1)]

        if not cfg.carry_membrane:
            self.output.v = 0.0
            self.output.last_time = t0
        fired = 0
        amp = cfg.amplitude_mv
        for t, _src in merge_trains(trains):
            if self.output.receive(t0 + t, amp):
                fired += 1

        rec = DetectionRecord(self.index, timestamp, x, rates[0].rate, fired > 0, fired)
        self.index += 1
        return rec


def run(stream: Iterable, config: DetectorConfig | None = None,
        fast: bool | None = None) -> list[DetectionRecord]:
    """Run a detector over ``(timestamp, value)`` pairs.

    ``fast`` selects the compiled batch kernel; by default it is used
    whenever the spike mode is deterministic. Both paths give identical
    records.
    """
    config = config or DetectorConfig()
    points = [(p.timestamp, p.value) if hasattr(p, "timestamp") else tuple(p)
              for p in stream]
    if fast is None:
        fast = config.spike_mode == "deterministic"
    for i, (_ts, v) in enumerate(points):
        try:
            ok = math.isfinite(float(v))
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise DataError(f"row {i}: non-finite value {v!r}")
    if fast:
        if config.spike_mode != "deterministic":
            raise ConfigError("the batch kernel supports deterministic spike mode only")
        from ._kernel import run_batch
        return run_batch(points, config)
    det = Detector(config)
    return [det.step(ts, v) for ts, v in points]
