"""Online mean/variance trackers for a scalar stream.

Three flavours share one interface (``update``, ``mean``, ``variance``,
``std_dev``, ``count``):

* :class:`CumulativeTracker` -- Welford's recurrence over every sample seen.
* :class:`WindowedTracker` -- exact statistics of the last ``k`` samples.
* :class:`EwmaTracker` -- exponentially weighted mean and variance with
  forgetting rate ``alpha``.

All trackers start the same way: after the first sample the mean equals that
sample and the variance is zero.
"""

from __future__ import annotations

import copy
import math
from collections import deque
from typing import Union

from .errors import ConfigError, EmptyStateError, InputDomainError

__all__ = [
    "CumulativeTracker",
    "WindowedTracker",
    "EwmaTracker",
    "StatsTracker",
    "make_tracker",
]


def _check_finite(x) -> float:
    try:
        x = float(x)
    except (TypeError, ValueError) as exc:
        raise InputDomainError(f"not a real number: {x!r}") from exc
    if not math.isfinite(x):
        raise InputDomainError(f"non-finite input: {x!r}")
    return x


class _Tracker:
    kind = ""

    def __init__(self):
        self.count = 0
        self._mean = 0.0

    @property
    def mean(self) -> float:
        if self.count == 0:
            raise EmptyStateError("no samples seen yet")
        return self._mean

    @property
    def std_dev(self) -> float:
        return math.sqrt(self.variance)

    @property
    def default_warmup(self) -> int:
        return 10

    def copy(self):
        return copy.deepcopy(self)

    def reset(self) -> None:
        self.__init__(**self._params())

    def _params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"tracker": self.kind, **self._params()}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self._params().items())
        return f"{type(self).__name__}({args}) <n={self.count}>"


class CumulativeTracker(_Tracker):
    """Running mean and sample variance over the whole stream."""

    kind = "cumulative"

    def __init__(self):
        super().__init__()
        self.m2 = 0.0

    def update(self, x) -> "CumulativeTracker":
        x = _check_finite(x)
        self.count += 1
        if self.count == 1:
            self._mean = x
            self.m2 = 0.0
            return self
        delta = x - self._mean
        self._mean += delta / self.count
        self.m2 += delta * (x - self._mean)
        if self.m2 < 0.0:
            self.m2 = 0.0
        return self

    @property
    def variance(self) -> float:
        if self.count == 0:
            raise EmptyStateError("no samples seen yet")
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)


class WindowedTracker(_Tracker):
    """Exact mean and sample variance of the last ``window_k`` samples.

    The moments are recomputed from the ring buffer with exact summation on
    every update (O(k)); incremental add/remove updates lose relative
    precision when the window variance is tiny compared with its mean.
    """

    kind = "windowed"

    def __init__(self, window_k: int):
        if int(window_k) != window_k or window_k < 2:
            raise ConfigError(f"window_k must be an integer >= 2, got {window_k!r}")
        super().__init__()
        self.window_k = int(window_k)
        self.buffer: deque = deque(maxlen=self.window_k)
        self.m2 = 0.0

    def _params(self):
        return {"window_k": self.window_k}

    @property
    def default_warmup(self) -> int:
        return self.window_k

    def update(self, x) -> "WindowedTracker":
        x = _check_finite(x)
        self.count += 1
        self.buffer.append(x)
        n = len(self.buffer)
        m = math.fsum(self.buffer) / n
        self._mean = m
        self.m2 = math.fsum((v - m) * (v - m) for v in self.buffer)
        return self

    @property
    def variance(self) -> float:
        if self.count == 0:
            raise EmptyStateError("no samples seen yet")
        n = len(self.buffer)
        if n < 2:
            return 0.0
        return self.m2 / (n - 1)


class EwmaTracker(_Tracker):
    """Exponentially weighted running mean and variance.

    mean_i = mean_{i-1} + alpha * (x_i - mean_{i-1})
    var_i  = (1 - alpha) * (var_{i-1} + alpha * (x_i - mean_{i-1})**2)
    """

    kind = "ewma"

    def __init__(self, alpha: float):
        if not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
            raise ConfigError(f"alpha must lie in (0, 1), got {alpha!r}")
        super().__init__()
        self.alpha = float(alpha)
        self.var = 0.0

    def _params(self):
        return {"alpha": self.alpha}

    @property
    def default_warmup(self) -> int:
        return math.ceil(1.0 / self.alpha)

    def update(self, x) -> "EwmaTracker":
        x = _check_finite(x)
        self.count += 1
        if self.count == 1:
            self._mean = x
            self.var = 0.0
            return self
        delta = x - self._mean
        self._mean += self.alpha * delta
        self.var = (1.0 - self.alpha) * (self.var + self.alpha * delta * delta)
        if self.var < 0.0:
            self.var = 0.0
        return self

    @property
    def variance(self) -> float:
        if self.count == 0:
            raise EmptyStateError("no samples seen yet")
        return self.var


StatsTracker = Union[CumulativeTracker, WindowedTracker, EwmaTracker]


def make_tracker(kind: str = "ewma", *, alpha: float | None = None,
                 window_k: int | None = None) -> StatsTracker:
    """Build a tracker from a variant name and its one parameter."""
    if kind == "cumulative":
        return CumulativeTracker()
    if kind == "windowed":
        if window_k is None:
            raise ConfigError("windowed tracker needs window_k")
        return WindowedTracker(window_k)
    if kind == "ewma":
        if alpha is None:
            raise ConfigError("ewma tracker needs alpha")
        return EwmaTracker(alpha)
    raise ConfigError(f"unknown tracker kind {kind!r}")
