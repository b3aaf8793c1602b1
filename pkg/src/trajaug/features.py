"""Kinematic feature windows for the sequence autoencoder.

A window is a 4 x T matrix of (speed, accel, heading, yaw_rate) samples
cut from one trajectory; 3 s at 10 Hz gives the default T = 30.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Trajectory
from .errors import DegenerateInputError

FEATURE_NAMES = ("speed", "accel", "heading", "yaw_rate")
N_FEATURES = 4
DEFAULT_WINDOW = 30

STD_FLOOR = 1e-8


@dataclass(frozen=True)
class FeatureWindow:
    """One autoencoder input sample with its provenance."""

    traj_id: str
    start_index: int
    data: np.ndarray  # (4, T)

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != N_FEATURES:
            raise DegenerateInputError(
                f"feature window must be ({N_FEATURES}, T), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DegenerateInputError("feature window contains non-finite values")
        object.__setattr__(self, "data", arr)

    @property
    def key(self):
        """Provenance key used everywhere windows are referenced."""
        return (self.traj_id, self.start_index)


@dataclass(frozen=True)
class NormStats:
    """Per-feature mean and (floored) standard deviation."""

    mean: np.ndarray  # (4,)
    std: np.ndarray  # (4,)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        std = np.maximum(np.asarray(self.std, dtype=float), STD_FLOOR)
        if mean.shape != (N_FEATURES,) or std.shape != (N_FEATURES,):
            raise DegenerateInputError("norm stats must be length-4 vectors")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)


def extract_windows(traj: Trajectory, window: int = DEFAULT_WINDOW, stride: int | None = None):
    """Cut fixed-length feature windows out of a trajectory.

    Windows start at indices 0, stride, 2*stride, ... while the full window
    fits. A trajectory shorter than `window` yields no windows. Default
    stride equals the window length (non-overlapping).
    """
    if window < 2:
        raise DegenerateInputError(f"window length must be >= 2, got {window}")
    if stride is None:
        stride = window
    if stride < 1:
        raise DegenerateInputError(f"stride must be >= 1, got {stride}")
    rows = np.vstack([traj.speed, traj.accel, traj.heading, traj.yaw_rate])
    out = []
    for start in range(0, len(traj) - window + 1, stride):
        out.append(
            FeatureWindow(
                traj_id=traj.traj_id,
                start_index=start,
                data=rows[:, start : start + window],
            )
        )
    return out


def fit_norm_stats(windows):
    """Population mean/std per feature over every sample of every window."""
    if not windows:
        raise DegenerateInputError("cannot fit normalization stats on zero windows")
    stacked = np.concatenate([w.data for w in windows], axis=1)
    return NormStats(mean=stacked.mean(axis=1), std=stacked.std(axis=1))


def normalize(window: FeatureWindow, stats: NormStats):
    data = (window.data - stats.mean[:, None]) / stats.std[:, None]
    return FeatureWindow(traj_id=window.traj_id, start_index=window.start_index, data=data)


def denormalize(data, stats: NormStats):
    """Inverse of `normalize` on a raw (4, T) matrix."""
    return np.asarray(data, dtype=float) * stats.std[:, None] + stats.mean[:, None]
