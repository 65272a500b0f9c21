"""Fixed linear projection of feature vectors onto the 2D instance space.

Ten of the 28 features feed a fixed 10x2 coefficient matrix; instances land
at (z1, z2) = matrix^T . x. Features are z-scored against the experiment
batch before projecting, so absolute coordinates depend on the batch while
the cluster structure does not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .features import FeatureVector, format_float
from .graphs import InstanceClass

__all__ = [
    "PROJECTION_FEATURES",
    "PROJECTION_MATRIX",
    "ProjectionSpec",
    "NormalizationStats",
    "InstancePoint",
    "select_features",
    "normalize",
    "project",
    "project_batch",
    "export_scatter",
]

PROJECTION_FEATURES: tuple[str, ...] = (
    "radius",
    "minimumDegree",
    "minimumDominatingSetSize",
    "regular",
    "planar",
    "averageDistance",
    "laplacianLargestEigenvalue",
    "numberOfOrbits",
    "groupSize",
    "numberOfEdges",
)

PROJECTION_MATRIX: np.ndarray = np.array(
    [
        [0.5051, -0.485],
        [-0.6291, 0.0463],
        [0.4771, -0.0263],
        [-0.4878, -0.9917],
        [0.5781, -0.0577],
        [0.4284, -0.2866],
        [-0.0279, 0.9336],
        [-0.5347, -0.4114],
        [0.4849, 0.9991],
        [-0.4417, 0.5989],
    ],
    dtype=np.float64,
)
PROJECTION_MATRIX.setflags(write=False)


@dataclass(frozen=True)
class ProjectionSpec:
    """Ordered selected-feature names plus their 10x2 coefficient matrix."""

    feature_names: tuple[str, ...]
    matrix: np.ndarray

    def validate(self) -> None:
        if self.matrix.shape != (len(self.feature_names), 2):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{len(self.feature_names)} feature names x 2"
            )

    def to_json(self) -> str:
        return json.dumps(
            {"features": list(self.feature_names), "matrix": self.matrix.tolist()},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ProjectionSpec":
        obj = json.loads(text)
        spec = cls(
            feature_names=tuple(obj["features"]),
            matrix=np.array(obj["matrix"], dtype=np.float64),
        )
        spec.validate()
        return spec

    @classmethod
    def load(cls, path: Path | str) -> "ProjectionSpec":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


DEFAULT_PROJECTION = ProjectionSpec(feature_names=PROJECTION_FEATURES, matrix=PROJECTION_MATRIX)


@dataclass(frozen=True)
class NormalizationStats:
    """Per-feature z-score statistics over a reference instance set.

    Features that are constant across the reference set are flagged and map
    to 0 instead of dividing by a zero spread.
    """

    means: np.ndarray
    stds: np.ndarray
    constant: np.ndarray

    @classmethod
    def fit(cls, raw: np.ndarray) -> "NormalizationStats":
        raw = np.asarray(raw, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[0] < 2:
            raise ValueError(f"need a (instances, features) matrix with >= 2 rows, got {raw.shape}")
        means = raw.mean(axis=0)
        stds = raw.std(axis=0)
        constant = stds == 0.0
        return cls(means=means, stds=np.where(constant, 1.0, stds), constant=constant)


@dataclass(frozen=True)
class InstancePoint:
    instance_id: str
    z1: float
    z2: float
    instance_class: InstanceClass


def select_features(fv: FeatureVector, spec: ProjectionSpec = DEFAULT_PROJECTION) -> np.ndarray:
    """The selected features in the projection's column order."""
    return np.array([fv.get(name) for name in spec.feature_names], dtype=np.float64)


def normalize(raw: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape != stats.means.shape:
        raise ValueError(f"expected {stats.means.shape[0]} values, got {raw.shape}")
    z = (raw - stats.means) / stats.stds
    return np.where(stats.constant, 0.0, z)


def project(values: np.ndarray, spec: ProjectionSpec = DEFAULT_PROJECTION) -> tuple[float, float]:
    """(z1, z2) = matrix^T . values."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (spec.matrix.shape[0],):
        raise ValueError(f"expected {spec.matrix.shape[0]} values, got shape {values.shape}")
    z = spec.matrix.T @ values
    return float(z[0]), float(z[1])


def project_batch(
    items: list[tuple[str, InstanceClass, FeatureVector]],
    spec: ProjectionSpec = DEFAULT_PROJECTION,
) -> list[InstancePoint]:
    """z-score the batch's selected features, then project every instance."""
    if len(items) < 2:
        raise ValueError("projection batch needs at least 2 instances to normalize")
    raw = np.vstack([select_features(fv, spec) for _, _, fv in items])
    stats = NormalizationStats.fit(raw)
    points = []
    for (instance_id, cls, _), row in zip(items, raw):
        z1, z2 = project(normalize(row, stats), spec)
        if not (np.isfinite(z1) and np.isfinite(z2)):
            raise ValueError(f"non-finite projection for {instance_id}")
        points.append(InstancePoint(instance_id=instance_id, z1=z1, z2=z2, instance_class=cls))
    return points


def export_scatter(points: list[InstancePoint], base_path: Path | str) -> tuple[Path, Path]:
    """Write <base>.csv and <base>.svg; returns both paths."""
    from .render import svg_scatter

    if not points:
        raise ValueError("no points to export")
    base = Path(base_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_suffix(".csv")
    svg_path = base.with_suffix(".svg")
    lines = ["id,class,z1,z2"]
    for pt in points:
        lines.append(
            f"{pt.instance_id},{pt.instance_class.value},{format_float(pt.z1)},{format_float(pt.z2)}"
        )
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    svg_scatter(points, svg_path)
    return csv_path, svg_path
