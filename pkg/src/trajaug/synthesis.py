"""Trajectory synthesis: within-cluster pairing and the endpoint-constrained
rotation + uniform-scale transform.

Each ordered pair (original, guide) yields one candidate: the guide's shape
is rotated, scaled, and translated so its endpoints land exactly on the
original's endpoints, resampled to the original's point count, stamped with
the original's timestamps, and given freshly derived kinematics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Trajectory, resample_polyline
from .errors import DegenerateChordError

# chords shorter than this make the endpoint registration numerically explosive
DEFAULT_MIN_CHORD = 0.5


@dataclass(frozen=True)
class CandidatePair:
    cluster_label: str
    original_id: str
    guide_id: str

    def __post_init__(self):
        if self.original_id == self.guide_id:
            raise ValueError("a trajectory cannot pair with itself")


@dataclass(frozen=True)
class SimilarityTransform:
    """p -> scale * R(theta) * p + (tx, ty); preserves angles and shape."""

    theta: float
    scale: float
    tx: float
    ty: float

    def __post_init__(self):
        if not (self.scale > 0 and np.isfinite([self.theta, self.scale, self.tx, self.ty]).all()):
            raise ValueError("similarity transform requires finite fields and scale > 0")

    def as_dict(self):
        return {"theta": self.theta, "scale": self.scale, "tx": self.tx, "ty": self.ty}


@dataclass(frozen=True)
class SyntheticTrajectory:
    """A synthesized trajectory plus full provenance; QA verdict attaches later."""

    trajectory: Trajectory
    original_id: str
    guide_id: str
    cluster_label: str
    transform: SimilarityTransform
    config: dict = field(default_factory=dict)
    qa: object = None  # QaReport once gates have run

    @property
    def traj_id(self):
        return self.trajectory.traj_id

    def with_qa(self, report):
        return SyntheticTrajectory(
            trajectory=self.trajectory,
            original_id=self.original_id,
            guide_id=self.guide_id,
            cluster_label=self.cluster_label,
            transform=self.transform,
            config=self.config,
            qa=report,
        )


def enumerate_pairs(cluster_label, member_ids):
    """All ordered (original, guide) pairs of distinct members: n(n-1) of
    them, sorted by (original_id, guide_id)."""
    members = sorted(member_ids)
    return [
        CandidatePair(cluster_label=cluster_label, original_id=a, guide_id=b)
        for a in members
        for b in members
        if a != b
    ]


def fit_endpoint_transform(guide: Trajectory, original: Trajectory, min_chord=DEFAULT_MIN_CHORD):
    """Similarity transform carrying the guide's endpoints onto the original's.

    theta is the angle between the two endpoint chords, scale their length
    ratio, and the translation closes the start points. Chords shorter than
    `min_chord` raise DegenerateChordError.
    """
    g0, g1 = guide.positions[0], guide.positions[-1]
    o0, o1 = original.positions[0], original.positions[-1]
    g_chord = g1 - g0
    o_chord = o1 - o0
    g_len = float(np.hypot(*g_chord))
    o_len = float(np.hypot(*o_chord))
    if g_len < min_chord:
        raise DegenerateChordError(
            f"guide '{guide.traj_id}' chord {g_len:.3g} m below {min_chord} m"
        )
    if o_len < min_chord:
        raise DegenerateChordError(
            f"original '{original.traj_id}' chord {o_len:.3g} m below {min_chord} m"
        )
    theta = float(np.arctan2(o_chord[1], o_chord[0]) - np.arctan2(g_chord[1], g_chord[0]))
    scale = o_len / g_len
    c, s = np.cos(theta), np.sin(theta)
    tx = float(o0[0] - scale * (c * g0[0] - s * g0[1]))
    ty = float(o0[1] - scale * (s * g0[0] + c * g0[1]))
    return SimilarityTransform(theta=theta, scale=scale, tx=tx, ty=ty)


def apply_transform(transform: SimilarityTransform, points):
    """Apply a similarity transform to (N, 2) points."""
    pts = np.asarray(points, dtype=float)
    c, s = np.cos(transform.theta), np.sin(transform.theta)
    rot = np.array([[c, -s], [s, c]])
    return transform.scale * pts @ rot.T + np.array([transform.tx, transform.ty])


def synthesize(
    original: Trajectory,
    guide: Trajectory,
    cluster_label="",
    min_chord=DEFAULT_MIN_CHORD,
    traj_id=None,
    config=None,
) -> SyntheticTrajectory:
    """Create one synthetic trajectory from an (original, guide) pair.

    Pipeline: endpoint transform -> apply to guide positions -> resample to
    the original's point count -> snap endpoints bit-exactly onto the
    original's -> attach the original's timestamps -> derive kinematics.
    Raises DegenerateChordError / DegeneratePolylineError for pairs that
    cannot be synthesized; callers record those as rejected with the
    exception's reason code.
    """
    transform = fit_endpoint_transform(guide, original, min_chord=min_chord)
    moved = apply_transform(transform, guide.positions)
    pts = resample_polyline(moved, len(original))
    pts[0] = original.positions[0]
    pts[-1] = original.positions[-1]

    if traj_id is None:
        traj_id = f"syn/{original.traj_id}~{guide.traj_id}"
    traj = original.replace_geometry(traj_id, pts[:, 0], pts[:, 1])
    return SyntheticTrajectory(
        trajectory=traj,
        original_id=original.traj_id,
        guide_id=guide.traj_id,
        cluster_label=cluster_label,
        transform=transform,
        config=dict(config or {}),
    )


def turning_angles(points):
    """Interior turning angles of a polyline (angle change between
    consecutive segments), used to verify shape preservation."""
    pts = np.asarray(points, dtype=float)
    seg = np.diff(pts, axis=0)
    ang = np.arctan2(seg[:, 1], seg[:, 0])
    d = np.diff(ang)
    return np.arctan2(np.sin(d), np.cos(d))
