"""Deterministic synthetic maneuver and scene generation.

Analytic backbones for the maneuver archetypes the pipeline is tested
against: arcs for turns, a smoothstep lateral profile for lane changes,
trapezoidal speed profiles for acceleration and braking. Seeded Gaussian
noise is added to positions before kinematics are derived, so generated
trajectories behave like (idealized) recorded ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DT, Scene, Trajectory, derive_kinematics
from .errors import DegenerateInputError

MANEUVER_KINDS = (
    "constant-speed",
    "turn-left",
    "turn-right",
    "decel-stop",
    "accel-from-stop",
    "lane-change-left",
    "lane-change-right",
)

# fraction of the duration spent ramping in trapezoidal speed profiles
_RAMP_FRACTION = 0.8

# correlation time of the positional noise process, in samples
_NOISE_SIGMA_SAMPLES = 3.0


@dataclass(frozen=True)
class ManeuverSpec:
    """Recipe for one synthetic maneuver trajectory."""

    kind: str
    duration: float = 3.0
    speed: float = 8.0
    radius: float = 10.0
    lane_offset: float = 3.5
    noise_std: float = 0.0
    seed: int = 0
    start_x: float = 0.0
    start_y: float = 0.0
    start_heading: float = 0.0

    def __post_init__(self):
        if self.kind not in MANEUVER_KINDS:
            raise DegenerateInputError(
                f"unknown maneuver kind '{self.kind}', expected one of {MANEUVER_KINDS}"
            )
        if self.duration <= 0:
            raise DegenerateInputError("duration must be positive")
        if self.speed < 0:
            raise DegenerateInputError("speed must be >= 0")
        if self.kind in ("turn-left", "turn-right") and self.radius <= 0:
            raise DegenerateInputError("turn radius must be positive")
        if self.noise_std < 0:
            raise DegenerateInputError("noise_std must be >= 0")


def gen_maneuver(spec: ManeuverSpec, traj_id="traj", agent_id="agent", scene_id="scene"):
    """Sample one maneuver at 10 Hz and derive its kinematics.

    Deterministic for a fixed spec (the seed drives the positional noise).
    """
    n = int(round(spec.duration / DT))
    if n < 2:
        raise DegenerateInputError("duration too short for 2 samples")
    t = np.arange(n) * DT

    kind = spec.kind
    if kind == "constant-speed":
        s = spec.speed * t
        x, y = s, np.zeros(n)
    elif kind in ("turn-left", "turn-right"):
        sign = 1.0 if kind == "turn-left" else -1.0
        phi = spec.speed * t / spec.radius
        x = spec.radius * np.sin(phi)
        y = sign * spec.radius * (1.0 - np.cos(phi))
    elif kind in ("lane-change-left", "lane-change-right"):
        sign = 1.0 if kind == "lane-change-left" else -1.0
        u = t / spec.duration
        x = spec.speed * t
        y = sign * spec.lane_offset * (3.0 * u**2 - 2.0 * u**3)
    elif kind == "decel-stop":
        s = _trapezoid_distance(t, spec.duration, v_start=spec.speed, v_end=0.0)
        x, y = s, np.zeros(n)
    elif kind == "accel-from-stop":
        s = _trapezoid_distance(t, spec.duration, v_start=0.0, v_end=spec.speed)
        x, y = s, np.zeros(n)

    c, si = np.cos(spec.start_heading), np.sin(spec.start_heading)
    xr = spec.start_x + c * x - si * y
    yr = spec.start_y + si * x + c * y

    if spec.noise_std > 0:
        rng = np.random.default_rng(spec.seed)
        xr = xr + _smooth_noise(rng, n, spec.noise_std)
        yr = yr + _smooth_noise(rng, n, spec.noise_std)

    return derive_kinematics(
        np.column_stack([t, xr, yr]), traj_id=traj_id, agent_id=agent_id, scene_id=scene_id
    )


def _smooth_noise(rng, n, std):
    """Band-limited Gaussian positional noise with marginal std `std`.

    Recorded trajectories carry temporally correlated tracking residue, not
    per-frame white noise; white noise would be amplified ~60x by the 10 Hz
    double differentiation in derive_kinematics and bury every kinematic
    feature. A Gaussian kernel (sigma 0.2 s) gives a realistic correlation
    time while keeping the marginal distribution Gaussian at the asked std.
    """
    half = int(np.ceil(4.0 * _NOISE_SIGMA_SAMPLES))
    j = np.arange(-half, half + 1)
    kernel = np.exp(-0.5 * (j / _NOISE_SIGMA_SAMPLES) ** 2)
    kernel /= kernel.sum()
    white = rng.normal(0.0, 1.0, size=n + 2 * half)
    smoothed = np.convolve(white, kernel, mode="valid")
    return smoothed * (std / np.linalg.norm(kernel))


def _trapezoid_distance(t, duration, v_start, v_end):
    """Distance profile: constant-rate speed ramp over the first 80% of the
    duration, then constant speed."""
    t_ramp = _RAMP_FRACTION * duration
    rate = (v_end - v_start) / t_ramp
    ramp = np.minimum(t, t_ramp)
    dist_ramp = v_start * ramp + 0.5 * rate * ramp**2
    hold = np.maximum(t - t_ramp, 0.0)
    return dist_ramp + v_end * hold


def gen_scene(
    scene_id,
    ego_spec: ManeuverSpec,
    agent_specs=(),
    agent_offsets=(),
    ego_agent_id="ego",
):
    """Assemble a Scene: one ego plus agents shifted by (dx, dy) offsets.

    All members share the ego's time base, so every spec must use the same
    duration. Agent ids are agent-00, agent-01, ...
    """
    agent_specs = list(agent_specs)
    agent_offsets = list(agent_offsets)
    if len(agent_offsets) != len(agent_specs):
        raise DegenerateInputError("need one (dx, dy) offset per agent spec")
    for sp in agent_specs:
        if abs(sp.duration - ego_spec.duration) > 1e-9:
            raise DegenerateInputError("all scene members must share the ego's duration")

    ego_traj_id = f"{scene_id}/{ego_agent_id}"
    ego = gen_maneuver(ego_spec, traj_id=ego_traj_id, agent_id=ego_agent_id, scene_id=scene_id)
    members = [ego]
    for idx, (sp, (dx, dy)) in enumerate(zip(agent_specs, agent_offsets)):
        agent_id = f"agent-{idx:02d}"
        shifted = ManeuverSpec(
            kind=sp.kind,
            duration=sp.duration,
            speed=sp.speed,
            radius=sp.radius,
            lane_offset=sp.lane_offset,
            noise_std=sp.noise_std,
            seed=sp.seed,
            start_x=sp.start_x + dx,
            start_y=sp.start_y + dy,
            start_heading=sp.start_heading,
        )
        members.append(
            gen_maneuver(
                shifted,
                traj_id=f"{scene_id}/{agent_id}",
                agent_id=agent_id,
                scene_id=scene_id,
            )
        )
    return Scene(scene_id=scene_id, ego_traj_id=ego_traj_id, trajectories=members)
