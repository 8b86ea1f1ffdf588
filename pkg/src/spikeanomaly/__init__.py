"""Adaptive spike encoding of real-valued streams and LIF-based anomaly detection."""

__version__ = "0.1.0"

from .stats import CumulativeTracker, EwmaTracker, WindowedTracker, make_tracker
from .encode import AdaptiveEncoder, GrfEncoder, RateSample, grf_centers, rate_logistic
from .neuron import LifNeuron, SpikeTrain, generate_spikes
from .detect import DetectionRecord, Detector, DetectorConfig, run
from .data import AnomalyWindow, SeriesPoint, read_series, read_windows
from .evaluate import ScoreCard, SweepRow, default_alphas, score, sweep

__all__ = [
    "CumulativeTracker", "EwmaTracker", "WindowedTracker", "make_tracker",
    "AdaptiveEncoder", "GrfEncoder", "RateSample", "grf_centers", "rate_logistic",
    "LifNeuron", "SpikeTrain", "generate_spikes",
    "DetectionRecord", "Detector", "DetectorConfig", "run",
    "AnomalyWindow", "SeriesPoint", "read_series", "read_windows",
    "ScoreCard", "SweepRow", "default_alphas", "score", "sweep",
]
