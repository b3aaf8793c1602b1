"""Accept/reject gates for synthesized trajectories.

Four gates run on every candidate, always all of them so the report is
complete: similarity of the originator pair (strict inequalities), then
collision, comfort, and progress checks on the synthetic itself. A
candidate enters the dataset only if every gate passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DT, Scene, Trajectory, arc_length
from .errors import ConfigError, DegenerateInputError, TrajaugError
from .frenet import similarity_deltas

GATE_ORDER = ("similarity", "collision", "comfort", "progress")

# speed floor for curvature = yaw_rate / speed, avoiding standstill blow-up
V_FLOOR = 0.5


@dataclass(frozen=True)
class QaThresholds:
    delta_lon_max: float = 5.0  # m
    delta_lat_max: float = 1.5  # m
    delta_vel_max: float = 2.0  # m/s
    collision_radius: float = 2.0  # m, combined center-to-center disc
    accel_max: float = 4.0  # m/s^2
    jerk_max: float = 10.0  # m/s^3
    curvature_max: float = 0.2  # 1/m
    avg_speed_min: float = 0.5  # m/s
    avg_speed_max: float = 30.0  # m/s

    def __post_init__(self):
        vals = [
            self.delta_lon_max,
            self.delta_lat_max,
            self.delta_vel_max,
            self.collision_radius,
            self.accel_max,
            self.jerk_max,
            self.curvature_max,
            self.avg_speed_min,
            self.avg_speed_max,
        ]
        if any(v <= 0 for v in vals):
            raise ConfigError("QA thresholds must all be positive")
        if self.avg_speed_min > self.avg_speed_max:
            raise ConfigError("avg_speed_min must not exceed avg_speed_max")


@dataclass(frozen=True)
class GateRecord:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    reason: str = ""

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": dict(self.measured),
            "thresholds": dict(self.thresholds),
            "reason": self.reason,
        }


@dataclass(frozen=True)
class QaReport:
    gates: tuple

    @property
    def accepted(self):
        return all(g.passed for g in self.gates)

    def gate(self, name):
        return next(g for g in self.gates if g.name == name)

    def first_failed_gate(self):
        """First failing gate in the fixed GATE_ORDER, or None."""
        for name in GATE_ORDER:
            for g in self.gates:
                if g.name == name and not g.passed:
                    return name
        return None

    def as_dict(self):
        return {"accepted": self.accepted, "gates": [g.as_dict() for g in self.gates]}


def similarity_gate(
    original: Trajectory,
    guide: Trajectory,
    thresholds: QaThresholds,
    lon_lat_reduction="max",
    vel_reduction="mean",
) -> GateRecord:
    """Eq-style pair gate: all three deltas must be strictly below their
    thresholds. Degenerate geometry fails the gate instead of raising."""
    lims = {
        "delta_lon_max": thresholds.delta_lon_max,
        "delta_lat_max": thresholds.delta_lat_max,
        "delta_vel_max": thresholds.delta_vel_max,
    }
    try:
        d = similarity_deltas(original, guide, lon_lat_reduction, vel_reduction)
    except TrajaugError as exc:
        return GateRecord(
            name="similarity",
            passed=False,
            measured={},
            thresholds=lims,
            reason=f"degenerate geometry: {exc}",
        )
    passed = (
        d.delta_lon < thresholds.delta_lon_max
        and d.delta_lat < thresholds.delta_lat_max
        and d.delta_vel < thresholds.delta_vel_max
    )
    return GateRecord(
        name="similarity",
        passed=bool(passed),
        measured={"delta_lon": d.delta_lon, "delta_lat": d.delta_lat, "delta_vel": d.delta_vel},
        thresholds=lims,
    )


def collision_gate(synthetic, scene: Scene, thresholds: QaThresholds) -> GateRecord:
    """Check the synthetic's waypoints against every non-ego agent.

    Agent samples are matched to synthetic timestamps by nearest frame
    within half a sample period; a center distance strictly below the
    collision radius at any matched time is a collision.
    """
    traj = _as_trajectory(synthetic)
    agents = sorted(scene.agents, key=lambda tr: tr.traj_id)
    if any(tr.traj_id == scene.ego_traj_id for tr in agents):
        raise ConfigError(
            f"scene '{scene.scene_id}': ego trajectory listed among agents"
        )
    lims = {"collision_radius": thresholds.collision_radius}

    first = None
    n_collisions = 0
    min_dist = np.inf
    for agent in agents:
        idx = np.rint((traj.t - agent.t[0]) / DT).astype(int)
        valid = (idx >= 0) & (idx < len(agent))
        if not np.any(valid):
            continue
        matched = idx[valid]
        close = np.abs(agent.t[matched] - traj.t[valid]) <= DT / 2 + 1e-9
        if not np.any(close):
            continue
        sel = np.flatnonzero(valid)[close]
        dx = traj.x[sel] - agent.x[matched[close]]
        dy = traj.y[sel] - agent.y[matched[close]]
        dist = np.hypot(dx, dy)
        min_dist = min(min_dist, float(dist.min()))
        hits = dist < thresholds.collision_radius
        n_collisions += int(hits.sum())
        if np.any(hits) and (first is None or traj.t[sel[np.argmax(hits)]] < first[0]):
            i = int(np.argmax(hits))
            first = (float(traj.t[sel[i]]), agent.traj_id, float(dist[i]))

    measured = {
        "n_collisions": n_collisions,
        "min_distance": None if np.isinf(min_dist) else min_dist,
    }
    if first is not None:
        measured["first_collision"] = {"t": first[0], "agent_id": first[1], "distance": first[2]}
    return GateRecord(
        name="collision",
        passed=n_collisions == 0,
        measured=measured,
        thresholds=lims,
    )


def comfort_gate(synthetic, thresholds: QaThresholds) -> GateRecord:
    """Bound acceleration, jerk, and curvature magnitudes.

    Curvature is yaw_rate / max(speed, V_FLOOR); when the trajectory never
    reaches V_FLOOR the curvature check is recorded as not applicable and
    skipped.
    """
    traj = _as_trajectory(synthetic)
    max_accel = float(np.max(np.abs(traj.accel)))
    jerk = np.diff(traj.accel) / np.diff(traj.t)
    max_jerk = float(np.max(np.abs(jerk))) if len(jerk) else 0.0

    curvature_applicable = bool(np.any(traj.speed >= V_FLOOR))
    if curvature_applicable:
        curvature = traj.yaw_rate / np.maximum(traj.speed, V_FLOOR)
        max_curv = float(np.max(np.abs(curvature)))
        curv_ok = max_curv <= thresholds.curvature_max
    else:
        max_curv = None
        curv_ok = True

    passed = (
        max_accel <= thresholds.accel_max
        and max_jerk <= thresholds.jerk_max
        and curv_ok
    )
    return GateRecord(
        name="comfort",
        passed=bool(passed),
        measured={
            "max_accel": max_accel,
            "max_jerk": max_jerk,
            "max_curvature": max_curv,
            "curvature_applicable": curvature_applicable,
        },
        thresholds={
            "accel_max": thresholds.accel_max,
            "jerk_max": thresholds.jerk_max,
            "curvature_max": thresholds.curvature_max,
        },
    )


def progress_gate(synthetic, thresholds: QaThresholds) -> GateRecord:
    """Average speed (polyline length over duration) must lie in the
    configured band."""
    traj = _as_trajectory(synthetic)
    duration = traj.duration
    if duration <= 0:
        raise DegenerateInputError("trajectory has zero duration")
    avg_speed = float(arc_length(traj.positions)[-1] / duration)
    passed = thresholds.avg_speed_min <= avg_speed <= thresholds.avg_speed_max
    return GateRecord(
        name="progress",
        passed=bool(passed),
        measured={"avg_speed": avg_speed},
        thresholds={
            "avg_speed_min": thresholds.avg_speed_min,
            "avg_speed_max": thresholds.avg_speed_max,
        },
    )


def run_qa(
    synthetic,
    original: Trajectory,
    guide: Trajectory,
    scene: Scene,
    thresholds: QaThresholds,
    lon_lat_reduction="max",
    vel_reduction="mean",
) -> QaReport:
    """Evaluate every gate (no short-circuit) and combine the verdicts."""
    gates = (
        similarity_gate(original, guide, thresholds, lon_lat_reduction, vel_reduction),
        collision_gate(synthetic, scene, thresholds),
        comfort_gate(synthetic, thresholds),
        progress_gate(synthetic, thresholds),
    )
    return QaReport(gates=gates)


def _as_trajectory(obj) -> Trajectory:
    return obj.trajectory if hasattr(obj, "trajectory") else obj
