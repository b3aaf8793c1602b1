"""Core trajectory data model, kinematics derivation, and polyline resampling.

Everything downstream (feature extraction, Frenet comparison, synthesis,
QA gates) consumes the types defined here. Trajectories are sampled on a
fixed 10 Hz grid; positions are metric 2D, headings radians in (-pi, pi].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInputError,
    DegeneratePolylineError,
    InvalidTimeError,
)

DT = 0.1
DT_REL_TOL = 1e-6

# below this speed a sample's displacement direction is treated as tracking
# jitter rather than motion: heading is held from the last moving sample
STANDSTILL_SPEED = 0.5


def wrap_angle(a):
    """Wrap angle(s) into (-pi, pi]."""
    a = np.asarray(a, dtype=float)
    wrapped = np.mod(-a + np.pi, 2.0 * np.pi)
    out = -(wrapped - np.pi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Waypoint:
    """One sample of a trajectory: pose plus derived kinematics."""

    t: float
    x: float
    y: float
    heading: float
    speed: float
    accel: float
    yaw_rate: float


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered waypoints of a single agent at a uniform 0.1 s period.

    Columns are stored as parallel numpy arrays; `waypoints` materializes
    the per-sample view when object access is more convenient.
    """

    traj_id: str
    agent_id: str
    scene_id: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    speed: np.ndarray
    accel: np.ndarray
    yaw_rate: np.ndarray

    def __post_init__(self):
        for name in ("t", "x", "y", "heading", "speed", "accel", "yaw_rate"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        n = len(self.t)
        if n < 2:
            raise DegenerateInputError(
                f"trajectory '{self.traj_id}' needs >= 2 waypoints, got {n}"
            )
        for name in ("x", "y", "heading", "speed", "accel", "yaw_rate"):
            if len(getattr(self, name)) != n:
                raise DegenerateInputError(
                    f"trajectory '{self.traj_id}': field '{name}' length mismatch"
                )
            if not np.all(np.isfinite(getattr(self, name))):
                raise DegenerateInputError(
                    f"trajectory '{self.traj_id}': non-finite values in '{name}'"
                )
        dts = np.diff(self.t)
        if np.any(dts <= 0):
            i = int(np.argmax(dts <= 0))
            raise InvalidTimeError(
                f"trajectory '{self.traj_id}': non-increasing timestamp at index {i + 1}"
            )
        if np.any(np.abs(dts - DT) > DT * DT_REL_TOL):
            i = int(np.argmax(np.abs(dts - DT) > DT * DT_REL_TOL))
            raise InvalidTimeError(
                f"trajectory '{self.traj_id}': sample period {dts[i]:.6g} at index "
                f"{i + 1} deviates from {DT} s"
            )

    def __len__(self):
        return len(self.t)

    @property
    def positions(self):
        """(N, 2) array of x/y positions."""
        return np.column_stack([self.x, self.y])

    @property
    def waypoints(self):
        return [
            Waypoint(*vals)
            for vals in zip(
                self.t, self.x, self.y, self.heading, self.speed, self.accel, self.yaw_rate
            )
        ]

    @property
    def duration(self):
        return float(self.t[-1] - self.t[0])

    def replace_geometry(self, traj_id, x, y):
        """New trajectory with this one's timestamps but fresh positions.

        Kinematic fields are re-derived from the new geometry.
        """
        return derive_kinematics(
            np.column_stack([self.t, x, y]),
            traj_id=traj_id,
            agent_id=self.agent_id,
            scene_id=self.scene_id,
        )


@dataclass(frozen=True)
class Scene:
    """One recorded scene: the ego trajectory plus surrounding agents.

    `trajectories` holds every member including the ego; the ego is
    identified by `ego_traj_id` and must appear exactly once.
    """

    scene_id: str
    ego_traj_id: str
    trajectories: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "trajectories", tuple(self.trajectories))
        ids = [tr.traj_id for tr in self.trajectories]
        if len(set(ids)) != len(ids):
            raise DegenerateInputError(f"scene '{self.scene_id}': duplicate trajectory ids")
        n_ego = ids.count(self.ego_traj_id)
        if n_ego != 1:
            raise DegenerateInputError(
                f"scene '{self.scene_id}': ego '{self.ego_traj_id}' present {n_ego} times"
            )

    @property
    def ego(self):
        return next(tr for tr in self.trajectories if tr.traj_id == self.ego_traj_id)

    @property
    def agents(self):
        """All non-ego trajectories."""
        return [tr for tr in self.trajectories if tr.traj_id != self.ego_traj_id]


def arc_length(points):
    """Cumulative arc length along a polyline.

    Parameters
    ----------
    points : (N, 2) array-like
        Ordered 2D points, N >= 1.

    Returns
    -------
    (N,) ndarray starting at 0; last entry is the total polyline length.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 1:
        raise DegenerateInputError("arc_length needs at least 1 point")
    if pts.shape[0] == 1:
        return np.zeros(1)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def resample_polyline(points, n_out, max_iter=100, tol=1e-13):
    """Resample a polyline to `n_out` points uniformly spaced in arc length.

    The returned chain is a fixed point of resampling: its own vertices are
    equally spaced along itself (equal chords), so resampling the output at
    the same `n_out` reproduces it to float precision. A short parameter
    correction loop enforces this; on straight or equally-sampled input it
    converges immediately to plain linear arc-length interpolation.

    Endpoints are copied bit-exactly from the input.

    Raises
    ------
    DegenerateInputError
        Fewer than 2 input points or n_out < 2.
    DegeneratePolylineError
        Zero total arc length.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise DegenerateInputError("resample_polyline needs >= 2 2D points")
    if n_out < 2:
        raise DegenerateInputError(f"n_out must be >= 2, got {n_out}")
    s = arc_length(pts)
    total = s[-1]
    if total <= 0.0:
        raise DegeneratePolylineError("polyline has zero arc length")

    u = np.linspace(0.0, total, n_out)
    out = None
    for _ in range(max_iter):
        out = np.column_stack([np.interp(u, s, pts[:, 0]), np.interp(u, s, pts[:, 1])])
        c = arc_length(out)
        target = np.linspace(0.0, c[-1], n_out)
        if np.max(np.abs(c - target)) <= tol * total:
            break
        u = np.interp(target, c, u)
        u[0], u[-1] = 0.0, total
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out


def derive_kinematics(points, traj_id="traj", agent_id="agent", scene_id="scene"):
    """Build a full Trajectory from raw (t, x, y) samples.

    Velocity vectors come from central differences of position (one-sided
    at the ends); heading is the direction of that velocity, speed its
    magnitude. Acceleration and yaw rate are central differences of speed
    and unwrapped heading. Near-stationary samples inherit the neighboring
    heading instead of the meaningless atan2(0, 0).

    Parameters
    ----------
    points : (N, 3) array-like
        Columns (t, x, y), N >= 2, strictly increasing t on the 0.1 s grid.

    Raises
    ------
    DegenerateInputError
        Fewer than 2 points.
    InvalidTimeError
        Duplicate or decreasing timestamps.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DegenerateInputError("derive_kinematics expects (N, 3) columns (t, x, y)")
    if arr.shape[0] < 2:
        raise DegenerateInputError(f"need >= 2 points, got {arr.shape[0]}")
    t, x, y = arr[:, 0], arr[:, 1], arr[:, 2]
    if np.any(np.diff(t) <= 0):
        i = int(np.argmax(np.diff(t) <= 0))
        raise InvalidTimeError(f"non-increasing timestamp at index {i + 1}")

    vx = _central_diff(x, t)
    vy = _central_diff(y, t)
    speed = np.hypot(vx, vy)

    heading = np.arctan2(vy, vx)
    # hold heading through standstill samples to keep yaw rate meaningful
    moving = speed >= STANDSTILL_SPEED
    if not np.any(moving):
        moving = speed > 1e-9  # all slow: fall back to any actual motion
    if not np.any(moving):
        heading = np.zeros_like(heading)
    elif not np.all(moving):
        src = np.where(moving, np.arange(len(heading)), -1)
        np.maximum.accumulate(src, out=src)
        src[src < 0] = int(np.argmax(moving))
        heading = heading[src]

    accel = _central_diff(speed, t)
    unwrapped = np.unwrap(heading)
    yaw_rate = _central_diff(unwrapped, t)
    heading = wrap_angle(unwrapped)

    return Trajectory(
        traj_id=traj_id,
        agent_id=agent_id,
        scene_id=scene_id,
        t=t,
        x=x,
        y=y,
        heading=heading,
        speed=speed,
        accel=accel,
        yaw_rate=yaw_rate,
    )


def _central_diff(values, t):
    """Central finite differences, one-sided at the endpoints."""
    v = np.asarray(values, dtype=float)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (t[2:] - t[:-2])
    out[0] = (v[1] - v[0]) / (t[1] - t[0])
    out[-1] = (v[-1] - v[-2]) / (t[-1] - t[-2])
    return out
