"""Dataset ingestion, preprocessing and the synthetic two-component designs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import models, rand
from .models import ModelFamily

__all__ = [
    "DataMatrix",
    "SimSpec",
    "load_csv",
    "standardize",
    "pca_project",
    "table_structure_covariances",
    "simulate_two_component",
    "simulate_bensmail",
    "SIM_STRUCTURES",
]

# Structures available to the two-component simulator: shared or per-cluster
# volume crossed with spherical / diagonal / rotated-diagonal shape.
SIM_STRUCTURES = ("lI", "lkI", "lA", "lkA", "lDADt", "lkDADt")

_VOLUMES = (1.0, 5.0)
_SHAPE = np.array([3.0, 1.0 / 3.0])
_ROT45 = np.array([
    [math.sqrt(2.0) / 2.0, -math.sqrt(2.0) / 2.0],
    [math.sqrt(2.0) / 2.0, math.sqrt(2.0) / 2.0],
])


@dataclass
class DataMatrix:
    """An (n, d) observation matrix with optional ground-truth labels."""

    values: np.ndarray
    labels: np.ndarray | None = None
    column_names: list[str] | None = None

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(values)):
            raise ValueError("data contains NaN or infinite entries")
        self.values = values
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape[0] != values.shape[0]:
                raise ValueError(
                    f"{labels.shape[0]} labels for {values.shape[0]} rows"
                )
            self.labels = labels

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class SimSpec:
    """Configuration of a synthetic two-component draw.

    ``separation`` is the Mahalanobis distance between the component means
    under the pooled covariance (the presets are 1, 3 and 4.5, for poorly,
    well and very well separated mixtures).
    """

    structure: str
    separation: float
    n: int
    mixing: tuple = (0.5, 0.5)
    seed: int | None = None

    def __post_init__(self):
        if self.structure not in SIM_STRUCTURES:
            raise ValueError(
                f"unsupported structure {self.structure!r}; choose from {SIM_STRUCTURES}"
            )
        if self.separation <= 0:
            raise ValueError(f"separation must be positive, got {self.separation}")
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        mixing = tuple(float(w) for w in self.mixing)
        if len(mixing) != 2 or abs(sum(mixing) - 1.0) > 1e-12 or min(mixing) <= 0:
            raise ValueError(f"mixing must be two positive weights summing to 1, got {mixing}")
        object.__setattr__(self, "mixing", mixing)


def load_csv(path, has_header=True, label_column=None):
    """Read a numeric CSV into a :class:`DataMatrix`.

    ``label_column`` selects the ground-truth column by header name or
    0-based index; it is removed from the feature block.  Any cell that does
    not parse as a number raises with its row and column location.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [
            row for row in csv.reader(fh)
            if row and any(cell.strip() for cell in row)
        ]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows below the header")

    width = len(rows[0])
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, str):
            if header is None or label_column not in header:
                raise ValueError(f"{path}: no column named {label_column!r}")
            label_idx = header.index(label_column)
        else:
            label_idx = int(label_column)
            if not 0 <= label_idx < width:
                raise ValueError(f"{path}: label column index {label_idx} out of range")

    values = []
    labels = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        parsed = []
        for j, cell in enumerate(row):
            try:
                val = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: cannot parse cell at row {i + 1}, column {j + 1}: {cell!r}"
                ) from None
            parsed.append(val)
        if label_idx is not None:
            labels.append(parsed.pop(label_idx))
        values.append(parsed)

    names = None
    if header is not None:
        names = [c for j, c in enumerate(header) if j != label_idx]
    lab = np.asarray(labels).astype(np.int64) if label_idx is not None else None
    return DataMatrix(values=np.asarray(values, dtype=float), labels=lab, column_names=names)


def standardize(data):
    """Center each column and scale it to unit population standard deviation."""
    x = data.values
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    for j, s in enumerate(sd):
        if s == 0:
            name = data.column_names[j] if data.column_names else f"column {j}"
            raise ValueError(f"cannot standardize constant column {name}")
    return DataMatrix(values=(x - mean) / sd, labels=data.labels,
                      column_names=data.column_names)


def pca_project(data, n_components=None):
    """Project onto the leading principal axes of the centered data.

    Axes are ordered by decreasing eigenvalue; each axis is sign-fixed so its
    largest-magnitude loading is positive.
    """
    x = data.values
    n, d = x.shape
    if n_components is None:
        n_components = d
    if not 1 <= n_components <= d:
        raise ValueError(f"n_components must be in 1..{d}, got {n_components}")
    centered = x - x.mean(axis=0)
    cov = np.cov(centered, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:n_components]
    axes = eigvecs[:, order]
    for j in range(axes.shape[1]):
        lead = np.argmax(np.abs(axes[:, j]))
        if axes[lead, j] < 0:
            axes[:, j] = -axes[:, j]
    names = [f"pc{j + 1}" for j in range(n_components)]
    return DataMatrix(values=centered @ axes, labels=data.labels, column_names=names)


def table_structure_covariances(structure):
    """The pair of 2-d covariance matrices behind a simulation structure code."""
    vol1, vol2 = _VOLUMES
    if structure == "lI":
        base = np.eye(2)
        return base.copy(), base.copy()
    if structure == "lkI":
        base = np.eye(2)
        return vol1 * base, vol2 * base
    if structure == "lA":
        base = np.diag(_SHAPE)
        return base.copy(), base.copy()
    if structure == "lkA":
        base = np.diag(_SHAPE)
        return vol1 * base, vol2 * base
    if structure == "lDADt":
        base = _ROT45 @ np.diag(_SHAPE) @ _ROT45.T
        return base.copy(), base.copy()
    if structure == "lkDADt":
        base = _ROT45 @ np.diag(_SHAPE) @ _ROT45.T
        return vol1 * base, vol2 * base
    raise ValueError(f"unsupported structure {structure!r}")


def simulate_two_component(spec, rng=None):
    """Draw a labeled sample from one of the two-component designs.

    The first mean sits at the origin; the second lies along the leading
    eigenvector of the pooled covariance at the Mahalanobis distance
    ``spec.separation``.
    """
    if rng is None:
        rng = rand.make_rng(spec.seed)
    sigma1, sigma2 = table_structure_covariances(spec.structure)
    pooled = 0.5 * (sigma1 + sigma2)
    direction, _ = models.orientation_from_spd(pooled)
    u = direction[:, 0]
    scale = math.sqrt(float(u @ np.linalg.solve(pooled, u)))
    mu1 = np.zeros(2)
    mu2 = spec.separation / scale * u

    z = (rng.random(spec.n) >= spec.mixing[0]).astype(np.int64)
    noise = rng.standard_normal((spec.n, 2))
    chols = np.stack([np.linalg.cholesky(sigma1), np.linalg.cholesky(sigma2)])
    means = np.stack([mu1, mu2])
    x = means[z] + np.einsum("nij,nj->ni", chols[z], noise)
    return DataMatrix(values=x, labels=z, column_names=["x1", "x2"])


def simulate_bensmail(n=200, rng=None, seed=None):
    """Two spherical clusters with different volumes: N((8,8), 4I) and N((2,2), I)."""
    if rng is None:
        rng = rand.make_rng(seed)
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    z = (rng.random(n) >= 0.5).astype(np.int64)
    noise = rng.standard_normal((n, 2))
    means = np.array([[8.0, 8.0], [2.0, 2.0]])
    scales = np.array([2.0, 1.0])
    x = means[z] + scales[z, None] * noise
    return DataMatrix(values=x, labels=z, column_names=["x1", "x2"])
