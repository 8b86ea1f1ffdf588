"""Compiled batch path for :func:`spikeanomaly.detect.run`.

Mirrors ``Detector.step`` operation for operation (same float expressions,
same event ordering) so that both paths produce identical records; the
equivalence is checked in the test suite. Only deterministic spike
placement is supported.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .encode import _RATE_CEILING, AdaptiveEncoder
from .detect import DetectionRecord, DetectorConfig


@numba.njit(cache=True)
def _simulate(values, means, sds, warm, n_inputs, interval, rho_max, eps, ceiling,
              theta, tau, v_reset, leak, carry, amp):
    n = values.shape[0]
    rate0 = np.zeros(n)
    fired = np.zeros(n, dtype=np.int64)
    max_count = int(math.floor(ceiling * rho_max * interval + 0.5))
    times = np.empty(n_inputs * max(max_count, 1))
    v = 0.0
    last = 0.0
    for i in range(n):
        t0 = i * interval
        m = 0
        if not warm[i]:
            sd = max(sds[i], eps)
            for lag in range(n_inputs):
                idx = i - lag
                if idx < 0:
                    break
                r = min(abs(math.tanh((values[idx] - means[i]) / sd)), ceiling)
                if lag == 0:
                    rate0[i] = r
                count = int(math.floor(r * rho_max * interval + 0.5))
                if count == 0:
                    continue
                step = interval / count
                for j in range(count):
                    times[m] = (j + 0.5) * step
                    m += 1
        if not carry:
            v = 0.0
            last = t0
        if m == 0:
            continue
        # stable sort keeps ascending source order among equal times
        order = np.argsort(times[:m], kind="mergesort")
        k = 0
        for e in range(m):
            tt = t0 + times[order[e]]
            if leak and tt != last:
                v = v * math.exp(-(tt - last) / tau)
            last = tt
            v += amp
            if v >= theta:
                v = v_reset if leak else 0.0
                k += 1
        fired[i] = k
    return rate0, fired


def tracker_trace(values, config: DetectorConfig):
    """Per-step mean, std-dev and warm-up flag after each update."""
    enc = AdaptiveEncoder(config.make_tracker(), rho_max=config.rho_max,
                          epsilon_sd=config.epsilon_sd, warmup=config.warmup)
    tr = enc.tracker
    n = len(values)
    means = np.empty(n)
    sds = np.empty(n)
    warm = np.empty(n, dtype=np.bool_)
    for i, x in enumerate(values):
        tr.update(x)
        means[i] = tr.mean
        sds[i] = tr.std_dev
        warm[i] = enc.warming_up
    return means, sds, warm


def simulate(values, config: DetectorConfig):
    """Rate of the newest-value neuron and output spike count per step."""
    values = np.asarray(values, dtype=np.float64)
    means, sds, warm = tracker_trace(values, config)
    lif_reset = config.v_reset_mv if config.v_reset_mv is not None else -0.1 * config.theta_mv
    return _simulate(values, means, sds, warm, int(config.n_inputs),
                     float(config.interval_ms), float(config.rho_max),
                     float(config.epsilon_sd), _RATE_CEILING, float(config.theta_mv),
                     float(config.tau_ms), float(lif_reset), bool(config.leak),
                     bool(config.carry_membrane), float(config.amplitude_mv))


def run_batch(points, config: DetectorConfig) -> list[DetectionRecord]:
    values = [float(v) for _, v in points]
    rate0, fired = simulate(values, config)
    return [DetectionRecord(i, ts, values[i], float(rate0[i]), bool(fired[i] > 0),
                            int(fired[i]))
            for i, (ts, _) in enumerate(points)]
