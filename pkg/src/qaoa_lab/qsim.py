"""Exact statevector simulation of the QAOA ansatz for MaxCut.

Amplitude layout is little-endian: basis state ``z`` stores qubit ``j`` in
bit ``j`` of the index. A layer applies the diagonal cost phase
``exp(-i * gamma * cut(z))`` followed by the product of single-qubit mixers
``exp(-i * beta * X) = [[cos b, -i sin b], [-i sin b, cos b]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph

__all__ = [
    "GAMMA_BOUND",
    "BETA_BOUND",
    "MAX_QUBITS",
    "ResourceLimitError",
    "QaoaParams",
    "CostTable",
    "build_cost_table",
    "uniform_state",
    "evolve_state",
    "expectation_from_table",
    "qaoa_expectation",
    "approximation_ratio",
    "landscape_grid",
    "landscape_axes",
    "wrap_angle",
    "wrap_params",
]

GAMMA_BOUND = math.pi
BETA_BOUND = math.pi / 2
MAX_QUBITS = 24


class ResourceLimitError(RuntimeError):
    """The requested simulation exceeds the configured size guard."""


@dataclass(frozen=True)
class QaoaParams:
    """Layer angles (gamma, beta), gamma in (-pi, pi), beta in (-pi/2, pi/2)."""

    gamma: tuple[float, ...]
    beta: tuple[float, ...]

    @property
    def p(self) -> int:
        return len(self.gamma)

    def validate(self) -> None:
        if len(self.gamma) != len(self.beta):
            raise ValueError(
                f"gamma and beta must have equal length, got {len(self.gamma)} and {len(self.beta)}"
            )
        for g in self.gamma:
            if not -GAMMA_BOUND < g < GAMMA_BOUND:
                raise ValueError(f"gamma value {g} outside (-pi, pi)")
        for b in self.beta:
            if not -BETA_BOUND < b < BETA_BOUND:
                raise ValueError(f"beta value {b} outside (-pi/2, pi/2)")

    def as_vector(self) -> np.ndarray:
        return np.array(list(self.gamma) + list(self.beta), dtype=np.float64)

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "QaoaParams":
        if len(vec) % 2 != 0:
            raise ValueError(f"parameter vector length must be even, got {len(vec)}")
        p = len(vec) // 2
        return cls(gamma=tuple(float(x) for x in vec[:p]), beta=tuple(float(x) for x in vec[p:]))


def wrap_angle(x: float, bound: float) -> float:
    """Wrap x into (-bound, bound] by shifts of the 2*bound period."""
    period = 2.0 * bound
    y = math.fmod(x, period)
    if y > bound:
        y -= period
    elif y <= -bound:
        y += period
    return y


def wrap_params(params: QaoaParams) -> QaoaParams:
    """Fold angles back into their principal open intervals.

    gamma is 2*pi-periodic (integer cost eigenvalues) and beta is
    pi-periodic up to a global phase, so the energy is unchanged. A wrapped
    value landing exactly on the interval boundary is nudged one ulp inward
    to keep the open-interval contract.
    """

    def fold(x: float, bound: float) -> float:
        y = wrap_angle(x, bound)
        return math.nextafter(bound, 0.0) if y == bound else y

    return QaoaParams(
        gamma=tuple(fold(g, GAMMA_BOUND) for g in params.gamma),
        beta=tuple(fold(b, BETA_BOUND) for b in params.beta),
    )


@dataclass(frozen=True)
class CostTable:
    """Cut value of every bit-assignment, plus the exact MaxCut optimum.

    Entry ``z`` counts the edges with endpoints on opposite sides of the
    partition encoded by ``z``. ``c_max``/``argmax`` are the exhaustive
    optimum, so this table doubles as the brute-force MaxCut solver.
    """

    n: int
    m: int
    values: np.ndarray
    c_max: int
    argmax: int

    def __post_init__(self) -> None:
        self.values.setflags(write=False)


def build_cost_table(g: Graph) -> CostTable:
    if g.n > MAX_QUBITS:
        raise ResourceLimitError(f"n={g.n} exceeds the {MAX_QUBITS}-qubit memory guard")
    size = 1 << g.n
    z = np.arange(size, dtype=np.int64)
    cut = np.zeros(size, dtype=np.int64)
    for u, v in g.edges:
        cut += (z >> u ^ z >> v) & 1
    argmax = int(np.argmax(cut))
    return CostTable(n=g.n, m=g.m, values=cut, c_max=int(cut[argmax]), argmax=argmax)


def uniform_state(n: int) -> np.ndarray:
    size = 1 << n
    return np.full(size, 1.0 / math.sqrt(size), dtype=np.complex128)


def _apply_mixer(state: np.ndarray, n: int, beta: float) -> np.ndarray:
    """Apply exp(-i*beta*X) to every qubit of a 2^n statevector."""
    c = math.cos(beta)
    s = -1j * math.sin(beta)
    for j in range(n):
        half = state.reshape(-1, 2, 1 << j)
        a0 = half[:, 0, :].copy()
        a1 = half[:, 1, :]
        half[:, 0, :] = c * a0 + s * a1
        half[:, 1, :] = s * a0 + c * a1
    return state


def evolve_state(table: CostTable, params: QaoaParams) -> np.ndarray:
    """Prepare |+>^n and apply the p alternating cost/mixer layers."""
    params.validate()
    state = uniform_state(table.n)
    cut = table.values
    for gamma, beta in zip(params.gamma, params.beta):
        state *= np.exp(-1j * gamma * cut)
        state = _apply_mixer(state, table.n, beta)
    return state


def expectation_from_table(table: CostTable, params: QaoaParams) -> float:
    """Energy F_p = sum_z |amp_z|^2 * cut(z) for the evolved ansatz state."""
    state = evolve_state(table, params)
    probs = state.real**2 + state.imag**2
    return float(probs @ table.values)


def qaoa_expectation(g: Graph, params: QaoaParams) -> float:
    return expectation_from_table(build_cost_table(g), params)


def approximation_ratio(fp: float, c_max: int) -> float:
    """alpha = F_p / C_max, clamped to [0,1] only within numerical slack."""
    if c_max < 1:
        raise ValueError(f"approximation ratio undefined for c_max={c_max} (edgeless graph?)")
    alpha = fp / c_max
    if alpha < -1e-9 or alpha > 1.0 + 1e-9:
        raise ValueError(f"approximation ratio {alpha} outside [0,1] beyond tolerance")
    return min(max(alpha, 0.0), 1.0)


def landscape_axes(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    gammas = np.linspace(-GAMMA_BOUND, GAMMA_BOUND, resolution)
    betas = np.linspace(-BETA_BOUND, BETA_BOUND, resolution)
    return gammas, betas


def landscape_grid(g: Graph, resolution: int) -> np.ndarray:
    """p=1 energy over a resolution x resolution grid.

    Row i fixes gamma = linspace(-pi, pi)[i]; column j fixes
    beta = linspace(-pi/2, pi/2)[j].
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    table = build_cost_table(g)
    gammas, betas = landscape_axes(resolution)
    grid = np.empty((resolution, resolution), dtype=np.float64)
    base = uniform_state(table.n)
    for i, gamma in enumerate(gammas):
        phased = base * np.exp(-1j * gamma * table.values)
        for j, beta in enumerate(betas):
            state = _apply_mixer(phased.copy(), table.n, beta)
            probs = state.real**2 + state.imag**2
            grid[i, j] = probs @ table.values
    return grid
