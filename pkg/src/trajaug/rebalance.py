"""Square-root-frequency rebalancing of cluster sizes.

Targets are anchored at the majority cluster (which never changes), so
rebalancing is purely additive: target_c = round(sqrt(n_c * n_max)).
Post-augmentation proportions then follow the square roots of the original
frequencies. Shortfalls (too few accepted candidates) are reported, never
padded with duplicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError


@dataclass(frozen=True)
class CensusRow:
    label: str
    original_count: int
    accepted_candidate_count: int
    target_count: int
    selected_count: int

    @property
    def after_count(self):
        return self.original_count + self.selected_count

    @property
    def shortfall(self):
        return max(0, self.target_count - self.original_count - self.selected_count)


def target_counts(original_counts):
    """Per-label target sizes: round(sqrt(n_c * n_max)).

    The largest cluster's target equals its own count and every target is
    at least the original count, so rebalancing only ever adds data.
    """
    counts = {str(k): int(v) for k, v in original_counts.items()}
    if not counts or all(v == 0 for v in counts.values()):
        raise DegenerateInputError("census has no members")
    if any(v < 0 for v in counts.values()):
        raise DegenerateInputError("census counts must be >= 0")
    n_max = max(counts.values())
    return {label: int(round(math.sqrt(n * n_max))) for label, n in counts.items()}


def select_augmented(accepted_by_label, targets, original_counts, seed=0):
    """Choose which accepted candidates fill each cluster's deficit.

    Candidates are sorted by id first; if more are available than needed,
    a seeded uniform sample without replacement picks the subset, so the
    selection is reproducible. Returns {label: sorted selected ids}.
    """
    rng = np.random.default_rng(seed)
    selected = {}
    for label in sorted(targets):
        needed = targets[label] - int(original_counts.get(label, 0))
        pool = sorted(accepted_by_label.get(label, []))
        if needed <= 0 or not pool:
            selected[label] = []
        elif len(pool) <= needed:
            selected[label] = pool
        else:
            idx = rng.choice(len(pool), size=needed, replace=False)
            selected[label] = sorted(pool[i] for i in idx)
    return selected


def build_census(original_counts, accepted_by_label, targets, selected):
    """Assemble per-label CensusRow records (sorted by label)."""
    rows = []
    for label in sorted(original_counts):
        rows.append(
            CensusRow(
                label=label,
                original_count=int(original_counts[label]),
                accepted_candidate_count=len(accepted_by_label.get(label, [])),
                target_count=int(targets[label]),
                selected_count=len(selected.get(label, [])),
            )
        )
    return rows


def census_report(census):
    """Before/after frequency table: counts plus percentages per label.

    Percentage columns each sum to 100 (up to float rounding); empty labels
    keep their 0% rows.
    """
    before_total = sum(r.original_count for r in census)
    after_total = sum(r.after_count for r in census)
    if before_total == 0:
        raise DegenerateInputError("census has no members")
    table = []
    for r in census:
        table.append(
            {
                "label": r.label,
                "before_count": r.original_count,
                "after_count": r.after_count,
                "before_pct": 100.0 * r.original_count / before_total,
                "after_pct": 100.0 * r.after_count / after_total,
                "shortfall": r.shortfall,
            }
        )
    return table
