"""ADAM search over (gamma, beta) with per-evaluation trace accounting.

Every energy evaluation (including finite-difference probes) increments one
shared counter and can advance the best-so-far energy; the efficiency
metric downstream is defined directly on those counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .qsim import CostTable, QaoaParams, approximation_ratio, build_cost_table, expectation_from_table, wrap_params

__all__ = [
    "AdamConfig",
    "TracePoint",
    "OptTrace",
    "RunRecord",
    "gradient_fd",
    "adam_optimize",
]


@dataclass(frozen=True)
class AdamConfig:
    """ADAM hyperparameters plus trace/stopping policy.

    ``max_evaluations`` bounds the total energy-evaluation count. The run
    also stops early once the best energy improves by less than
    ``plateau_tol`` over ``plateau_window`` consecutive iterations.
    """

    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_evaluations: int = 100_000
    fd_step: float = 1e-3
    plateau_window: int = 50
    plateau_tol: float = 1e-6
    trace_stride: int = 10

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError(f"beta1/beta2 must lie in (0,1), got {self.beta1}, {self.beta2}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_evaluations < 1:
            raise ValueError(f"max_evaluations must be >= 1, got {self.max_evaluations}")
        if self.fd_step <= 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step}")
        if self.plateau_window < 1 or self.plateau_tol < 0:
            raise ValueError("plateau_window must be >= 1 and plateau_tol >= 0")
        if self.trace_stride < 1:
            raise ValueError(f"trace_stride must be >= 1, got {self.trace_stride}")


@dataclass(frozen=True)
class TracePoint:
    evaluations: int
    best_energy: float
    gamma: tuple[float, ...]
    beta: tuple[float, ...]


@dataclass(frozen=True)
class OptTrace:
    """Best-so-far trajectory, stamped with cumulative evaluation counts.

    Contains every improvement point (so threshold crossings are exact) plus
    a strided subsample; counts are strictly increasing and best energies
    non-decreasing.
    """

    points: tuple[TracePoint, ...]

    def validate(self) -> None:
        if not self.points:
            raise ValueError("trace must contain at least one point")
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.evaluations <= prev.evaluations:
                raise ValueError("trace evaluation counts must be strictly increasing")
            if cur.best_energy < prev.best_energy:
                raise ValueError("best-so-far energy must be non-decreasing")

    @property
    def final_best_energy(self) -> float:
        return self.points[-1].best_energy

    @property
    def total_evaluations(self) -> int:
        return self.points[-1].evaluations

    def first_reaching(self, energy: float) -> int | None:
        """Smallest evaluation count whose best-so-far energy is >= energy."""
        for point in self.points:
            if point.best_energy >= energy:
                return point.evaluations
        return None

    def best_params(self) -> QaoaParams:
        """Parameters of the evaluation that achieved the final best energy."""
        final = self.final_best_energy
        for point in self.points:
            if point.best_energy == final:
                return QaoaParams(gamma=point.gamma, beta=point.beta)
        raise AssertionError("unreachable: final best must appear in the trace")


@dataclass(frozen=True)
class RunRecord:
    """One optimization trajectory and its summary statistics."""

    instance_id: str
    strategy: str
    seed: int
    init: QaoaParams
    c_max: int
    trace: OptTrace
    final_alpha: float
    total_evaluations: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "instance_id": self.instance_id,
                "strategy": self.strategy,
                "seed": self.seed,
                "init_gamma": list(self.init.gamma),
                "init_beta": list(self.init.beta),
                "c_max": self.c_max,
                "final_alpha": self.final_alpha,
                "total_evaluations": self.total_evaluations,
                "trace": [
                    [pt.evaluations, pt.best_energy, list(pt.gamma), list(pt.beta)]
                    for pt in self.trace.points
                ],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        obj = json.loads(line)
        points = tuple(
            TracePoint(
                evaluations=int(e), best_energy=float(b), gamma=tuple(g), beta=tuple(bt)
            )
            for e, b, g, bt in obj["trace"]
        )
        return cls(
            instance_id=obj["instance_id"],
            strategy=obj["strategy"],
            seed=int(obj["seed"]),
            init=QaoaParams(gamma=tuple(obj["init_gamma"]), beta=tuple(obj["init_beta"])),
            c_max=int(obj["c_max"]),
            trace=OptTrace(points=points),
            final_alpha=float(obj["final_alpha"]),
            total_evaluations=int(obj["total_evaluations"]),
        )


class _TracingEvaluator:
    """Counts every energy evaluation and maintains the best-so-far trace."""

    def __init__(self, table: CostTable, stride: int) -> None:
        self.table = table
        self.stride = stride
        self.count = 0
        self.best = -np.inf
        self.points: list[TracePoint] = []

    def __call__(self, params: QaoaParams) -> float:
        energy = expectation_from_table(self.table, params)
        if not np.isfinite(energy):
            raise ArithmeticError(f"non-finite energy {energy} at {params}")
        self.count += 1
        improved = energy > self.best
        if improved:
            self.best = energy
        if improved or self.count % self.stride == 0:
            self.points.append(
                TracePoint(self.count, self.best, params.gamma, params.beta)
            )
        return energy

    def finish(self, params: QaoaParams) -> OptTrace:
        if not self.points or self.points[-1].evaluations != self.count:
            self.points.append(TracePoint(self.count, self.best, params.gamma, params.beta))
        return OptTrace(points=tuple(self.points))


def _central_difference(energy, params: QaoaParams, h: float) -> np.ndarray:
    theta = params.as_vector()
    grad = np.empty_like(theta)
    for k in range(len(theta)):
        plus = theta.copy()
        plus[k] += h
        minus = theta.copy()
        minus[k] -= h
        f_plus = energy(wrap_params(QaoaParams.from_vector(plus)))
        f_minus = energy(wrap_params(QaoaParams.from_vector(minus)))
        grad[k] = (f_plus - f_minus) / (2.0 * h)
    return grad


def gradient_fd(g: Graph, params: QaoaParams, fd_step: float = 1e-3) -> np.ndarray:
    """Central-difference gradient of F_p; costs 4p energy evaluations."""
    params.validate()
    if fd_step <= 0:
        raise ValueError(f"fd_step must be positive, got {fd_step}")
    table = build_cost_table(g)
    return _central_difference(lambda q: expectation_from_table(table, q), params, fd_step)


def adam_optimize(
    g: Graph,
    init: QaoaParams,
    cfg: AdamConfig,
    rng: np.random.Generator | None = None,
    *,
    instance_id: str = "",
    strategy: str = "",
    seed: int = 0,
    cost_table: CostTable | None = None,
) -> RunRecord:
    """Maximize F_p with ADAM on -F_p, recording every energy evaluation.

    ``rng`` is accepted for signature uniformity with stochastic search
    strategies but is not consumed: the update rule is deterministic given
    the initial point, which is what makes reruns reproducible. Pass
    ``cost_table`` to share one prebuilt table across several runs on the
    same instance.
    """
    init.validate()
    cfg.validate()
    table = cost_table if cost_table is not None else build_cost_table(g)
    energy = _TracingEvaluator(table, cfg.trace_stride)

    params = init
    energy(params)

    dim = 2 * init.p
    m = np.zeros(dim)
    v = np.zeros(dim)
    t = 0
    per_iteration = 2 * dim + 1  # one central-difference gradient plus one energy
    best_history: list[float] = []

    while init.p > 0 and energy.count + per_iteration <= cfg.max_evaluations:
        t += 1
        grad = -_central_difference(energy, params, cfg.fd_step)
        if not np.all(np.isfinite(grad)):
            raise ArithmeticError(f"non-finite gradient at iteration {t}")
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad
        m_hat = m / (1.0 - cfg.beta1**t)
        v_hat = v / (1.0 - cfg.beta2**t)
        theta = params.as_vector() - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
        params = wrap_params(QaoaParams.from_vector(theta))
        energy(params)

        best_history.append(energy.best)
        if t > cfg.plateau_window:
            gain = best_history[-1] - best_history[-(cfg.plateau_window + 1)]
            if gain < cfg.plateau_tol:
                break

    trace = energy.finish(params)
    trace.validate()
    return RunRecord(
        instance_id=instance_id,
        strategy=strategy,
        seed=seed,
        init=init,
        c_max=table.c_max,
        trace=trace,
        final_alpha=approximation_ratio(trace.final_best_energy, table.c_max),
        total_evaluations=trace.total_evaluations,
    )
