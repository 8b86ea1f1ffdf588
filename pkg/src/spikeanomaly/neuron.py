"""Integrate-and-fire point neurons and rate-to-spike-train conversion.

The neuron is event driven: between input spikes the membrane potential
relaxes towards rest (0 mV) as ``v * exp(-dt / tau)``, so there is no time
step. A non-leaky (IF) neuron simply holds its potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .encode import RateSample
from .errors import ConfigError, TimeOrderError

__all__ = ["LifNeuron", "SpikeTrain", "generate_spikes", "merge_trains"]


@dataclass
class LifNeuron:
    theta: float = 40.0
    tau: float = 10.0
    v_reset: Optional[float] = None
    leak_enabled: bool = True
    v: float = 0.0
    last_time: float = 0.0

    def __post_init__(self):
        if not self.theta > 0:
            raise ConfigError(f"theta must be > 0 mV, got {self.theta!r}")
        if not self.tau > 0:
            raise ConfigError(f"tau must be > 0 ms, got {self.tau!r}")
        if self.v_reset is None:
            # hyperpolarised reset, 10% of threshold below rest
            self.v_reset = -0.1 * self.theta
        if self.v_reset > 0:
            raise ConfigError("v_reset must be <= 0 mV")

    def potential_at(self, t: float) -> float:
        """Membrane potential at ``t`` assuming no input since ``last_time``."""
        if t < self.last_time:
            raise TimeOrderError(f"t={t} precedes last update at {self.last_time}")
        if not self.leak_enabled or t == self.last_time:
            return self.v
        return self.v * math.exp(-(t - self.last_time) / self.tau)

    def advance(self, t: float) -> None:
        self.v = self.potential_at(t)
        self.last_time = t

    def receive(self, t: float, amplitude: float) -> bool:
        """Deliver an instantaneous input of ``amplitude`` mV at time ``t``.

        Returns True if the neuron fired; the potential is then reset.
        """
        self.advance(t)
        self.v += amplitude
        if self.v >= self.theta:
            self.v = self.v_reset if self.leak_enabled else 0.0
            return True
        return False

    def reset(self) -> None:
        self.v = 0.0
        self.last_time = 0.0


@dataclass
class SpikeTrain:
    times: list = field(default_factory=list)
    source: int = 0

    def __len__(self):
        return len(self.times)

    def shifted(self, offset: float) -> "SpikeTrain":
        return SpikeTrain([t + offset for t in self.times], self.source)


def generate_spikes(rate, interval_ms: float, mode: str = "deterministic",
                    rng: np.random.Generator | int | None = None,
                    source: int = 0, reproducible: bool = False) -> SpikeTrain:
    """Turn a firing rate into spike times inside ``[0, interval_ms)``.

    ``rate`` is a :class:`RateSample` or an absolute rate in spikes/ms.
    Deterministic mode emits ``round(rate * interval_ms)`` evenly spaced
    spikes at the centres of equal sub-intervals. Poisson mode draws
    exponential inter-arrival times from ``rng`` (a Generator or a seed).
    """
    if not interval_ms > 0:
        raise ConfigError(f"interval_ms must be > 0, got {interval_ms!r}")
    absolute = rate.absolute if isinstance(rate, RateSample) else float(rate)
    if absolute < 0 or not math.isfinite(absolute):
        raise ConfigError(f"invalid absolute rate {absolute!r}")

    if mode == "deterministic":
        # round half up so 2.5 -> 3 regardless of float parity rules
        count = int(math.floor(absolute * interval_ms + 0.5))
        if count == 0:
            return SpikeTrain([], source)
        step = interval_ms / count
        return SpikeTrain([(j + 0.5) * step for j in range(count)], source)

    if mode == "poisson":
        if rng is None:
            if reproducible:
                raise ConfigError("poisson spike generation needs a seed in reproducible runs")
            rng = np.random.default_rng()
        elif not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        if absolute == 0:
            return SpikeTrain([], source)
        times = []
        t = rng.exponential(1.0 / absolute)
        while t < interval_ms:
            times.append(float(t))
            t += rng.exponential(1.0 / absolute)
        return SpikeTrain(times, source)

    raise ConfigError(f"unknown spike mode {mode!r}")


def merge_trains(trains: Sequence[SpikeTrain]) -> list[tuple[float, int]]:
    """All spikes as ``(time, source)`` pairs in time order.

    Simultaneous spikes are ordered by ascending source id.
    """
    events = [(t, tr.source) for tr in trains for t in tr.times]
    events.sort()
    return events
