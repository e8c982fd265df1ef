"""Activity-activity proximity and location-specific relatedness density.

Proximity between two activities is their co-occurrence count divided by the
larger of the two ubiquities — the minimum of the two conditional
co-occurrence probabilities. Relatedness density of a location around an
activity is the proximity-weighted share of that activity's neighbors the
location already holds.

The proximity diagonal is reported as 1 (self-similarity) but excluded from
density sums; including it would inflate the density of already-held
activities and blur the adjacent-possible reading. Both choices are stated in
the run manifest.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._io import write_matrix, write_rows
from .errors import DegenerateMargins, IsolatedActivity
from .incidence import IncidenceMatrix

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class ProximityMatrix:
    """Symmetric activity-activity relatedness, entries in [0, 1], unit diagonal."""

    values: np.ndarray
    activity_labels: tuple[str, ...]

    def __post_init__(self):
        n = len(self.activity_labels)
        if self.values.shape != (n, n):
            raise ValueError("proximity matrix must be square over its labels")
        if n == 0:
            return
        if np.abs(self.values - self.values.T).max() > SYMMETRY_TOL:
            raise ValueError("proximity must be symmetric")
        if self.values.min() < 0 or self.values.max() > 1:
            raise ValueError("proximity entries must lie in [0, 1]")
        if not np.array_equal(np.diag(self.values), np.ones(n)):
            raise ValueError("proximity diagonal must be 1")


@dataclass(frozen=True)
class DensityMatrix:
    """Location-activity relatedness density, entries in [0, 1]."""

    values: np.ndarray
    location_labels: tuple[str, ...]
    activity_labels: tuple[str, ...]

    def __post_init__(self):
        if self.values.shape != (len(self.location_labels), len(self.activity_labels)):
            raise ValueError("matrix shape does not match label counts")
        if self.values.size and (self.values.min() < 0 or self.values.max() > 1):
            raise ValueError("density entries must lie in [0, 1]")


def proximity(m: IncidenceMatrix) -> ProximityMatrix:
    """Pairwise activity relatedness from conditional co-occurrence."""
    if m.values.size == 0 or m.diversity.min() < 1 or m.ubiquity.min() < 1:
        raise DegenerateMargins("incidence matrix must be pruned (positive margins)")
    values = np.asarray(m.values, dtype=float)
    cooccurrence = values.T @ values
    phi = cooccurrence / np.maximum.outer(m.ubiquity, m.ubiquity)
    np.fill_diagonal(phi, 1.0)
    return ProximityMatrix(phi, m.activity_labels)


def relatedness_density(m: IncidenceMatrix, phi: ProximityMatrix) -> DensityMatrix:
    """Share of each activity's proximity mass held by each location.

    Self-proximity is excluded from both numerator and denominator, so held
    and unheld activities are scored by the same formula. Numerator and
    denominator are evaluated by the identical column-sum reduction (the
    numerator over a row-masked copy of the off-diagonal proximities), so
    whenever a location holds every positive-proximity neighbor of an
    activity the two sums agree bitwise and the density is exactly 1.
    """
    if m.activity_labels != phi.activity_labels:
        raise ValueError("incidence and proximity activity labels must match")
    off_diagonal = phi.values.copy()
    np.fill_diagonal(off_diagonal, 0.0)
    held = np.asarray(m.values, dtype=float)
    denominator = off_diagonal.sum(axis=0)
    if denominator.min() <= 0:
        isolated = [lab for lab, d in zip(m.activity_labels, denominator) if d <= 0]
        raise IsolatedActivity(f"zero proximity to all other activities: {isolated}")
    numerator = np.empty_like(held)
    for c in range(held.shape[0]):
        numerator[c] = (off_diagonal * held[c][:, None]).sum(axis=0)
    return DensityMatrix(numerator / denominator, m.location_labels, m.activity_labels)


def write_proximity(path: Path, phi: ProximityMatrix, delimiter: str = ",") -> None:
    write_matrix(path, phi.values, phi.activity_labels, phi.activity_labels, delimiter, corner="activity")


def write_proximity_edges(
    path: Path, phi: ProximityMatrix, min_phi: float = 0.0, delimiter: str = ","
) -> None:
    """Upper-triangle edge list (activityA, activityB, phi), thresholded."""
    labels = phi.activity_labels
    rows = (
        (labels[i], labels[j], phi.values[i, j])
        for i in range(len(labels))
        for j in range(i + 1, len(labels))
        if phi.values[i, j] >= min_phi
    )
    write_rows(path, ("activityA", "activityB", "phi"), rows, delimiter)


def write_density(path: Path, density: DensityMatrix, delimiter: str = ",") -> None:
    write_matrix(path, density.values, density.location_labels, density.activity_labels, delimiter)
