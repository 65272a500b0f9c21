"""The four parameter-initialization strategies and the class-median table.

Strategies:

* ``random`` -- uniform draws inside the angle bounds.
* ``tqa`` -- Trotterized-annealing linear schedule with midpoint sampling.
* ``class_median`` -- look up the per-class median optimal parameters
  (built by optimizing many small instances of the same class).
* ``three_regular`` -- the 3-regular class medians applied to every class,
  probing how transferable those parameters are.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .graphs import GenConfig, InstanceClass, derive_seed, generate_instance
from .optim import AdamConfig, adam_optimize
from .qsim import BETA_BOUND, GAMMA_BOUND, QaoaParams

__all__ = [
    "StrategyTag",
    "MissingTableEntryError",
    "MedianTableBuildError",
    "MedianParamTable",
    "DEFAULT_MEDIAN_TABLE",
    "DEFAULT_TROTTER_STEP",
    "init_random",
    "init_tqa",
    "init_class_median",
    "init_three_regular",
    "initial_params",
    "build_median_table",
]

DEFAULT_TROTTER_STEP = 0.75


class StrategyTag(str, Enum):
    """Initialization strategies; enum order doubles as the tie-break order
    used when two strategies score identically."""

    CLASS_MEDIAN = "class_median"
    THREE_REGULAR = "three_regular"
    TQA = "tqa"
    RANDOM = "random"


class MissingTableEntryError(KeyError):
    """Requested (instance class, p) has no stored median parameters."""


class MedianTableBuildError(RuntimeError):
    """Too many optimization runs failed while building a table cell."""


@dataclass(frozen=True)
class MedianParamTable:
    """Per (instance class, layer count) median optimal parameters.

    ``n``/``instances_per_class``/``base_seed`` record how the table was
    built; the shipped default table was computed externally from 100
    8-node instances per class, so its ``base_seed`` is None.
    """

    entries: dict[tuple[InstanceClass, int], QaoaParams]
    n: int
    instances_per_class: int
    base_seed: int | None = None

    def lookup(self, instance_class: InstanceClass, p: int) -> QaoaParams:
        try:
            return self.entries[(instance_class, p)]
        except KeyError:
            raise MissingTableEntryError(
                f"no median parameters stored for ({instance_class.value}, p={p})"
            ) from None

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "instances_per_class": self.instances_per_class,
                "base_seed": self.base_seed,
                "entries": [
                    {
                        "class": cls.value,
                        "p": p,
                        "gamma": list(params.gamma),
                        "beta": list(params.beta),
                    }
                    for (cls, p), params in sorted(
                        self.entries.items(), key=lambda kv: (kv[0][0].value, kv[0][1])
                    )
                ],
            },
            sort_keys=True,
            indent=2,
        )

    def save(self, path: Path | str) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, text: str) -> "MedianParamTable":
        obj = json.loads(text)
        entries = {
            (InstanceClass(e["class"]), int(e["p"])): QaoaParams(
                gamma=tuple(float(x) for x in e["gamma"]),
                beta=tuple(float(x) for x in e["beta"]),
            )
            for e in obj["entries"]
        }
        base_seed = obj.get("base_seed")
        return cls(
            entries=entries,
            n=int(obj["n"]),
            instances_per_class=int(obj["instances_per_class"]),
            base_seed=None if base_seed is None else int(base_seed),
        )

    @classmethod
    def load(cls, path: Path | str) -> "MedianParamTable":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


# Shipped p=3 medians per class (from 100 8-node instances per class).
_DEFAULT_P3_ROWS: dict[InstanceClass, tuple[tuple[float, ...], tuple[float, ...]]] = {
    InstanceClass.THREE_REGULAR: ((-0.1165, 0.2672, 0.1837), (0.3958, 0.2506, -0.1447)),
    InstanceClass.FOUR_REGULAR: ((0.1370, 0.0331, 0.1837), (0.3238, -0.6131, -0.2158)),
    InstanceClass.UNIFORM_RANDOM: ((0.1428, -0.2116, -0.1327), (0.2952, 0.1680, 0.1992)),
    InstanceClass.GEOMETRIC: ((-0.1564, 0.0487, -0.1783), (0.3514, -0.0762, 0.1305)),
    InstanceClass.NEARLY_COMPLETE_BIPARTITE: (
        (0.0958, -0.0715, -0.2107),
        (0.2473, -0.1765, 0.1576),
    ),
    InstanceClass.POWER_LAW_TREE: ((0.2426, 0.2190, 0.1971), (-0.5864, -0.3827, 0.2193)),
    InstanceClass.WATTS_STROGATZ: ((0.1490, 0.2042, -0.1868), (0.3097, 0.2401, 0.1078)),
}

DEFAULT_MEDIAN_TABLE = MedianParamTable(
    entries={
        (cls, 3): QaoaParams(gamma=gamma, beta=beta)
        for cls, (gamma, beta) in _DEFAULT_P3_ROWS.items()
    },
    n=8,
    instances_per_class=100,
    base_seed=None,
)


def init_random(p: int, rng: np.random.Generator) -> QaoaParams:
    """Uniform gamma_i in (-pi, pi) and beta_i in (-pi/2, pi/2)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    gamma = tuple(float(x) for x in rng.uniform(-GAMMA_BOUND, GAMMA_BOUND, size=p))
    beta = tuple(float(x) for x in rng.uniform(-BETA_BOUND, BETA_BOUND, size=p))
    return QaoaParams(gamma=gamma, beta=beta)


def init_tqa(p: int, dt: float = DEFAULT_TROTTER_STEP) -> QaoaParams:
    """Linear annealing schedule sampled at layer midpoints.

    gamma_k ramps up and beta_k ramps down along the schedule, with
    gamma_k + beta_k = dt at every layer. Midpoint sampling keeps beta_1
    nonzero even at p=1.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if dt <= 0:
        raise ValueError(f"Trotter step must be positive, got {dt}")
    fractions = [(k - 0.5) / p for k in range(1, p + 1)]
    gamma = tuple(f * dt for f in fractions)
    beta = tuple((1.0 - f) * dt for f in fractions)
    params = QaoaParams(gamma=gamma, beta=beta)
    try:
        params.validate()
    except ValueError as exc:
        raise ValueError(f"Trotter step dt={dt} pushes angles outside bounds: {exc}") from exc
    return params


def init_class_median(
    instance_class: InstanceClass, p: int, table: MedianParamTable | None = None
) -> QaoaParams:
    """Stored median optimal parameters for the instance's own class."""
    table = table if table is not None else DEFAULT_MEDIAN_TABLE
    return table.lookup(instance_class, p)


def init_three_regular(p: int, table: MedianParamTable | None = None) -> QaoaParams:
    """3-regular class medians, applied regardless of instance class."""
    table = table if table is not None else DEFAULT_MEDIAN_TABLE
    return table.lookup(InstanceClass.THREE_REGULAR, p)


def initial_params(
    strategy: StrategyTag,
    instance_class: InstanceClass,
    p: int,
    rng: np.random.Generator,
    table: MedianParamTable | None = None,
    dt: float = DEFAULT_TROTTER_STEP,
) -> QaoaParams:
    """Dispatch to the requested strategy with one uniform signature."""
    if strategy is StrategyTag.RANDOM:
        return init_random(p, rng)
    if strategy is StrategyTag.TQA:
        return init_tqa(p, dt)
    if strategy is StrategyTag.CLASS_MEDIAN:
        return init_class_median(instance_class, p, table)
    if strategy is StrategyTag.THREE_REGULAR:
        return init_three_regular(p, table)
    raise ValueError(f"unknown strategy {strategy!r}")


def build_median_table(
    classes: list[InstanceClass],
    n: int = 8,
    max_layers: int = 10,
    instances_per_class: int = 100,
    optimizer_cfg: AdamConfig | None = None,
    base_seed: int = 0,
    gen_overrides: dict | None = None,
    max_failure_fraction: float = 0.2,
) -> MedianParamTable:
    """Rebuild the class-median parameter table locally.

    For every (class, p) cell: generate ``instances_per_class`` fresh
    n-node instances, optimize each from a random start, and store the
    coordinate-wise median of the optimized angles per layer index.
    Individual run failures are tolerated up to ``max_failure_fraction`` of
    a cell, after which the cell errors out.
    """
    if not classes:
        raise ValueError("classes must be non-empty")
    cfg = optimizer_cfg if optimizer_cfg is not None else AdamConfig(max_evaluations=20_000)
    overrides = gen_overrides or {}
    entries: dict[tuple[InstanceClass, int], QaoaParams] = {}
    for instance_class in classes:
        for p in range(1, max_layers + 1):
            collected: list[np.ndarray] = []
            failures = 0
            for index in range(instances_per_class):
                seed = derive_seed(base_seed, instance_class.value, p, index)
                rng = np.random.default_rng(seed)
                config = GenConfig(instance_class=instance_class, n=n, seed=seed, **overrides)
                try:
                    graph = generate_instance(config)
                    init = init_random(p, rng)
                    record = adam_optimize(graph, init, cfg, seed=seed)
                except (ArithmeticError, RuntimeError, ValueError):
                    failures += 1
                    continue
                best = record.trace.best_params()
                collected.append(np.array(list(best.gamma) + list(best.beta)))
            if failures > max_failure_fraction * instances_per_class:
                raise MedianTableBuildError(
                    f"{failures}/{instances_per_class} runs failed for "
                    f"({instance_class.value}, p={p})"
                )
            stacked = np.vstack(collected)
            median = np.median(stacked, axis=0)
            entries[(instance_class, p)] = QaoaParams(
                gamma=tuple(float(x) for x in median[:p]),
                beta=tuple(float(x) for x in median[p:]),
            )
    return MedianParamTable(
        entries=entries,
        n=n,
        instances_per_class=instances_per_class,
        base_seed=base_seed,
    )
