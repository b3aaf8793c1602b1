"""K-means over embeddings, cluster consolidation, and 2D projection.

Lloyd's algorithm with k-means++ seeding, fully deterministic for a given
seed and input order. A config-supplied merge map consolidates raw cluster
ids into named behavior groups; trajectories inherit the majority label of
their windows.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInputError, ShapeMismatchError


@dataclass(frozen=True)
class ClusterModel:
    """Fitted k-means state: centroids plus per-window assignments."""

    k: int
    centroids: np.ndarray  # (k, dim)
    assignments: dict  # window key (traj_id, start_index) -> cluster id
    inertia: float

    def __post_init__(self):
        object.__setattr__(self, "centroids", np.asarray(self.centroids, dtype=float))


def kmeans_fit(embeddings, k, seed=0, max_iter=100, tol=1e-8):
    """Fit k-means with k-means++ seeding and Lloyd iterations.

    Iterates until the largest centroid shift drops below `tol` or
    `max_iter` is reached. An emptied cluster is reseeded to the point
    farthest from its assigned centroid. Within-cluster squared distance
    (inertia) never increases from one iteration to the next.
    """
    if not embeddings:
        raise DegenerateInputError("cannot fit k-means on zero embeddings")
    if k < 1:
        raise DegenerateInputError(f"k must be >= 1, got {k}")
    keys = [e.key for e in embeddings]
    x = np.stack([e.z for e in embeddings])
    n = x.shape[0]
    if k > n:
        raise DegenerateInputError(f"k={k} exceeds number of embeddings {n}")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(x, k, rng)

    prev_inertia = np.inf
    for _ in range(max_iter):
        d2 = _sq_dists(x, centroids)
        labels = np.argmin(d2, axis=1)
        point_d2 = d2[np.arange(n), labels]

        # repair empty clusters with the worst-fitted point
        for cid in range(k):
            if not np.any(labels == cid):
                worst = int(np.argmax(point_d2))
                centroids[cid] = x[worst]
                labels[worst] = cid
                point_d2[worst] = 0.0

        inertia = float(point_d2.sum())
        if inertia > prev_inertia * (1.0 + 1e-12) + 1e-12:
            raise AssertionError("Lloyd iteration increased inertia")
        prev_inertia = inertia

        new_centroids = np.vstack(
            [x[labels == cid].mean(axis=0) for cid in range(k)]
        )
        shift = np.linalg.norm(new_centroids - centroids, axis=1).max()
        centroids = new_centroids
        if shift < tol:
            break

    d2 = _sq_dists(x, centroids)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments={key: int(lab) for key, lab in zip(keys, labels)},
        inertia=inertia,
    )


def _kmeans_pp_init(x, k, rng):
    """k-means++ seeding: subsequent centers drawn with probability
    proportional to squared distance from the nearest chosen center."""
    n = x.shape[0]
    centers = [x[int(rng.integers(n))]]
    for _ in range(1, k):
        d2 = _sq_dists(x, np.vstack(centers)).min(axis=1)
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with a center; pick deterministically
            centers.append(x[int(rng.integers(n))])
            continue
        probs = d2 / total
        centers.append(x[int(rng.choice(n, p=probs))])
    return np.vstack(centers).astype(float)


def _sq_dists(x, centroids):
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("ikj,ikj->ik", diff, diff)


def assign(model: ClusterModel, embedding):
    """Nearest-centroid id for one embedding; ties break to the lowest id."""
    z = np.asarray(embedding.z if hasattr(embedding, "z") else embedding, dtype=float)
    if z.shape != (model.centroids.shape[1],):
        raise ShapeMismatchError(
            f"embedding dim {z.shape} does not match centroids {model.centroids.shape}"
        )
    d2 = np.sum((model.centroids - z) ** 2, axis=1)
    return int(np.argmin(d2))


def apply_merge_map(model: ClusterModel, merge_map):
    """Collapse raw cluster ids into labels and lift them to trajectories.

    `merge_map` must cover every raw id in [0, k). A trajectory's label is
    the majority label over its windows; on a tie, the label of the window
    with the smallest start index wins. Returns {label: sorted traj ids}.
    """
    merge_map = {int(a): str(b) for a, b in merge_map.items()}
    missing = sorted(set(range(model.k)) - set(merge_map))
    if missing:
        raise ConfigError(f"merge map missing raw cluster ids {missing}")

    per_traj = {}
    for (traj_id, start_index), cid in model.assignments.items():
        per_traj.setdefault(traj_id, []).append((start_index, merge_map[cid]))

    partition = {}
    for traj_id, items in per_traj.items():
        counts = Counter(lab for _, lab in items)
        best = max(counts.values())
        tied = {lab for lab, c in counts.items() if c == best}
        if len(tied) == 1:
            label = tied.pop()
        else:
            label = next(lab for _, lab in sorted(items) if lab in tied)
        partition.setdefault(label, []).append(traj_id)
    return {lab: sorted(ids) for lab, ids in sorted(partition.items())}


def window_labels(model: ClusterModel, merge_map):
    """Merged label per window key, without lifting to trajectories."""
    merge_map = {int(a): str(b) for a, b in merge_map.items()}
    missing = sorted(set(range(model.k)) - set(merge_map))
    if missing:
        raise ConfigError(f"merge map missing raw cluster ids {missing}")
    return {key: merge_map[cid] for key, cid in model.assignments.items()}


def pca_project(embeddings, dims=2):
    """Project embeddings onto their top principal components.

    Signs are fixed by making each component's largest-magnitude loading
    positive, so the projection is fully deterministic.
    """
    if len(embeddings) < 2:
        raise DegenerateInputError("pca_project needs at least 2 embeddings")
    x = np.stack([e.z if hasattr(e, "z") else np.asarray(e) for e in embeddings]).astype(float)
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:dims]
    for i in range(comps.shape[0]):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return centered @ comps.T
