"""Frenet-frame projection and similarity deltas between trajectory pairs.

One trajectory serves as the curvilinear reference; points of the other
are described by arc length traveled (s) and signed lateral offset (d,
positive to the left of the travel direction). The similarity deltas feed
the pair-acceptance gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Trajectory, arc_length, resample_polyline, wrap_angle
from .errors import DegenerateInputError, DegeneratePolylineError

REDUCTIONS = ("max", "mean", "rms")


@dataclass(frozen=True)
class FrenetCoord:
    s: float  # arc length of the foot point, clamped to [0, L]
    d: float  # signed lateral offset, left of travel positive


@dataclass(frozen=True)
class SimilarityDeltas:
    delta_lon: float
    delta_lat: float
    delta_vel: float


def project_point(reference, p):
    """Project a 2D point onto a reference polyline.

    The foot point minimizes distance over all segments; among equidistant
    segments the smallest arc length wins. Points projecting beyond either
    end clamp s to [0, L] and measure d from the terminal segment's
    infinite line, so driving past the end does not register as lateral
    error.
    """
    ref = np.asarray(reference, dtype=float)
    if ref.ndim != 2 or ref.shape[0] < 2:
        raise DegenerateInputError("reference polyline needs >= 2 points")
    s_cum = arc_length(ref)
    if s_cum[-1] <= 0:
        raise DegeneratePolylineError("reference polyline has zero length")
    p = np.asarray(p, dtype=float)

    starts = ref[:-1]
    deltas = np.diff(ref, axis=0)
    lens2 = np.einsum("ij,ij->i", deltas, deltas)
    safe = np.where(lens2 > 0, lens2, 1.0)
    tpar = np.clip(np.einsum("ij,ij->i", p - starts, deltas) / safe, 0.0, 1.0)
    tpar = np.where(lens2 > 0, tpar, 0.0)
    feet = starts + tpar[:, None] * deltas
    dist2 = np.einsum("ij,ij->i", p - feet, p - feet)
    seg = int(np.argmin(dist2))  # first minimum -> smallest s

    foot = feet[seg]
    seg_len = np.sqrt(lens2[seg])
    s = float(s_cum[seg] + tpar[seg] * seg_len)

    first_dir = _first_nonzero_dir(deltas)
    last_dir = _last_nonzero_dir(deltas)
    if seg == 0 and tpar[seg] == 0.0 and np.dot(p - ref[0], first_dir) < 0:
        d = float(np.cross(first_dir, p - ref[0]))
        return FrenetCoord(s=0.0, d=d)
    if seg == len(deltas) - 1 and tpar[seg] == 1.0:
        d = float(np.cross(last_dir, p - ref[-1]))
        return FrenetCoord(s=float(s_cum[-1]), d=d)

    direction = deltas[seg] / seg_len if seg_len > 0 else last_dir
    offset = p - foot
    d = float(np.copysign(np.linalg.norm(offset), np.cross(direction, offset)))
    return FrenetCoord(s=s, d=d)


def _first_nonzero_dir(deltas):
    for v in deltas:
        n = np.linalg.norm(v)
        if n > 0:
            return v / n
    raise DegeneratePolylineError("reference polyline has zero length")


def _last_nonzero_dir(deltas):
    for v in deltas[::-1]:
        n = np.linalg.norm(v)
        if n > 0:
            return v / n
    raise DegeneratePolylineError("reference polyline has zero length")


def normalize_pose(traj: Trajectory) -> Trajectory:
    """Move a trajectory into its start-local frame.

    The first waypoint lands at the origin with heading along +x; scalar
    kinematics (speed, accel, yaw rate) are unchanged.
    """
    h0 = float(traj.heading[0])
    c, s = np.cos(-h0), np.sin(-h0)
    dx = traj.x - traj.x[0]
    dy = traj.y - traj.y[0]
    return Trajectory(
        traj_id=traj.traj_id,
        agent_id=traj.agent_id,
        scene_id=traj.scene_id,
        t=traj.t,
        x=c * dx - s * dy,
        y=s * dx + c * dy,
        heading=wrap_angle(traj.heading - h0),
        speed=traj.speed,
        accel=traj.accel,
        yaw_rate=traj.yaw_rate,
    )


def similarity_deltas(
    original: Trajectory,
    guide: Trajectory,
    lon_lat_reduction="max",
    vel_reduction="mean",
    normalize=True,
) -> SimilarityDeltas:
    """Longitudinal / lateral / velocity discrepancies between originators.

    Both trajectories are pose-normalized (pass normalize=False when the
    inputs are already expressed in a common frame); the guide is resampled
    (with its speed profile) to the original's point count, then compared
    point by point in the original's own Frenet frame: delta_lon aggregates
    |s(guide_i) - s_i| against the original's cumulative arc length,
    delta_lat aggregates |d(guide_i)|, delta_vel aggregates the speed
    differences. Default reductions: worst case for the offsets, mean for
    velocity.
    """
    if lon_lat_reduction not in REDUCTIONS or vel_reduction not in REDUCTIONS:
        raise DegenerateInputError(f"reductions must be one of {REDUCTIONS}")
    if normalize:
        orig = normalize_pose(original)
        gde = normalize_pose(guide)
    else:
        orig, gde = original, guide

    n = len(orig)
    g_pts, g_speed = _resample_with_speed(gde, n)
    ref = orig.positions
    s_orig = arc_length(ref)

    s_err = np.empty(n)
    d_abs = np.empty(n)
    for i in range(n):
        fc = project_point(ref, g_pts[i])
        s_err[i] = abs(fc.s - s_orig[i])
        d_abs[i] = abs(fc.d)
    v_err = np.abs(g_speed - orig.speed)

    return SimilarityDeltas(
        delta_lon=_reduce(s_err, lon_lat_reduction),
        delta_lat=_reduce(d_abs, lon_lat_reduction),
        delta_vel=_reduce(v_err, vel_reduction),
    )


def _resample_with_speed(traj: Trajectory, n_out):
    """Resample positions to n_out points and carry the speed profile along
    the same arc-length parameterization."""
    pts = resample_polyline(traj.positions, n_out)
    s_in = arc_length(traj.positions)
    s_out = arc_length(pts)
    speed = np.interp(s_out, s_in, traj.speed)
    return pts, speed


def _reduce(values, how):
    if how == "max":
        return float(np.max(values))
    if how == "mean":
        return float(np.mean(values))
    return float(np.sqrt(np.mean(np.square(values))))
