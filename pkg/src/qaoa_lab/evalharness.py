"""Efficiency scoring of initialization strategies and metadata assembly.

Per instance: the best final approximation ratio across strategies sets the
bar, each strategy's score kappa is the evaluation count at which it first
reached ``tau`` times that bar (or a fixed penalty if it never did), and a
strategy is labeled good when its kappa is within ``epsilon`` of the best
kappa. The per-instance rows joined with the 28 features form the metadata
table consumed by the projection stage and by external analysis tooling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .features import FEATURE_NAMES, FeatureVector, format_float
from .graphs import InstanceClass
from .optim import OptTrace
from .qsim import approximation_ratio
from .strategies import StrategyTag

__all__ = [
    "EvalConfig",
    "PerInstanceResult",
    "MetaDataRow",
    "kappa_scores",
    "binary_labels",
    "best_strategy",
    "score_instance",
    "assemble_metadata",
    "write_metadata_csv",
    "read_metadata_csv",
    "METADATA_COLUMNS",
]

STRATEGY_ORDER: tuple[StrategyTag, ...] = tuple(StrategyTag)

METADATA_COLUMNS: tuple[str, ...] = (
    ("id", "class")
    + FEATURE_NAMES
    + tuple(f"kappa_{s.value}" for s in STRATEGY_ORDER)
    + tuple(f"label_{s.value}" for s in STRATEGY_ORDER)
    + ("best",)
)


@dataclass(frozen=True)
class EvalConfig:
    """Scoring thresholds: acceptance fraction tau, penalty score for never
    reaching it, and the goodness margin epsilon."""

    tau: float = 0.95
    penalty: int = 100_000
    epsilon: float = 0.1

    def validate(self) -> None:
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must be in (0,1], got {self.tau}")
        if self.penalty < 1:
            raise ValueError(f"penalty must be positive, got {self.penalty}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class PerInstanceResult:
    instance_id: str
    final_alpha: dict[StrategyTag, float]
    kappa: dict[StrategyTag, int]
    label: dict[StrategyTag, bool]
    alpha_max: float
    alpha_acceptable: float
    best: StrategyTag


@dataclass(frozen=True)
class MetaDataRow:
    instance_id: str
    instance_class: InstanceClass
    features: FeatureVector
    kappa: dict[StrategyTag, int]
    label: dict[StrategyTag, bool]
    best: StrategyTag


def kappa_scores(
    traces: Mapping[StrategyTag, OptTrace], c_max: int, cfg: EvalConfig
) -> dict[StrategyTag, int]:
    """Evaluation count at which each strategy first reached tau * alpha_max.

    alpha_max is the best final ratio among the supplied strategies;
    strategies that never reach the acceptable ratio score the penalty.
    """
    cfg.validate()
    if not traces:
        raise ValueError("at least one strategy trace is required")
    for tag, trace in traces.items():
        trace.validate()
    alphas = {
        tag: approximation_ratio(trace.final_best_energy, c_max) for tag, trace in traces.items()
    }
    alpha_max = max(alphas.values())
    alpha_acceptable = cfg.tau * alpha_max
    scores: dict[StrategyTag, int] = {}
    for tag, trace in traces.items():
        crossing = None
        for point in trace.points:
            # Exact >= comparison in ratio space, no epsilon slack.
            if point.best_energy / c_max >= alpha_acceptable:
                crossing = point.evaluations
                break
        scores[tag] = crossing if crossing is not None else cfg.penalty
    return scores


def binary_labels(
    kappas: Mapping[StrategyTag, int], cfg: EvalConfig
) -> dict[StrategyTag, bool]:
    """Good iff kappa is within (1 + epsilon) of the smallest kappa (inclusive)."""
    cfg.validate()
    if not kappas:
        raise ValueError("at least one kappa score is required")
    bar = (1.0 + cfg.epsilon) * min(kappas.values())
    return {tag: kappas[tag] <= bar for tag in kappas}


def best_strategy(kappas: Mapping[StrategyTag, int]) -> StrategyTag:
    """Smallest kappa wins; ties resolve in STRATEGY_ORDER."""
    if not kappas:
        raise ValueError("at least one kappa score is required")
    ranked = sorted(kappas, key=lambda tag: (kappas[tag], STRATEGY_ORDER.index(tag)))
    return ranked[0]


def score_instance(
    instance_id: str,
    traces: Mapping[StrategyTag, OptTrace],
    c_max: int,
    cfg: EvalConfig,
) -> PerInstanceResult:
    kappas = kappa_scores(traces, c_max, cfg)
    alphas = {
        tag: approximation_ratio(trace.final_best_energy, c_max) for tag, trace in traces.items()
    }
    alpha_max = max(alphas.values())
    return PerInstanceResult(
        instance_id=instance_id,
        final_alpha=alphas,
        kappa=kappas,
        label=binary_labels(kappas, cfg),
        alpha_max=alpha_max,
        alpha_acceptable=cfg.tau * alpha_max,
        best=best_strategy(kappas),
    )


def assemble_metadata(
    results: Mapping[str, PerInstanceResult],
    features: Mapping[str, FeatureVector],
    classes: Mapping[str, InstanceClass],
) -> list[MetaDataRow]:
    """Join per-instance scores with features; incomplete inputs are an error
    naming every gap."""
    gaps = []
    for instance_id in results:
        if instance_id not in features:
            gaps.append(f"missing features for {instance_id}")
        if instance_id not in classes:
            gaps.append(f"missing class tag for {instance_id}")
    for instance_id, result in results.items():
        for tag in STRATEGY_ORDER:
            if tag not in result.kappa:
                gaps.append(f"missing strategy {tag.value} for {instance_id}")
    if gaps:
        raise ValueError("metadata assembly incomplete: " + "; ".join(sorted(gaps)))
    rows = []
    for instance_id, result in results.items():
        rows.append(
            MetaDataRow(
                instance_id=instance_id,
                instance_class=classes[instance_id],
                features=features[instance_id],
                kappa=dict(result.kappa),
                label=dict(result.label),
                best=result.best,
            )
        )
    return rows


def write_metadata_csv(rows: list[MetaDataRow], path: Path | str) -> None:
    lines = [",".join(METADATA_COLUMNS)]
    for row in rows:
        cells = [row.instance_id, row.instance_class.value]
        cells.extend(format_float(x) for x in row.features.as_array())
        cells.extend(str(row.kappa[s]) for s in STRATEGY_ORDER)
        cells.extend("good" if row.label[s] else "bad" for s in STRATEGY_ORDER)
        cells.append(row.best.value)
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_metadata_csv(path: Path | str) -> list[MetaDataRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        missing = [c for c in METADATA_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"metadata CSV missing columns: {', '.join(missing)}")
        rows = []
        for record in reader:
            fv = FeatureVector(**{name: float(record[name]) for name in FEATURE_NAMES})
            rows.append(
                MetaDataRow(
                    instance_id=record["id"],
                    instance_class=InstanceClass(record["class"]),
                    features=fv,
                    kappa={s: int(record[f"kappa_{s.value}"]) for s in STRATEGY_ORDER},
                    label={s: record[f"label_{s.value}"] == "good" for s in STRATEGY_ORDER},
                    best=StrategyTag(record["best"]),
                )
            )
    return rows
