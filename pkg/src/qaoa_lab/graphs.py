"""Graph instances for MaxCut experiments.

Seven generator families (uniform random, power-law tree, Watts-Strogatz
small world, geometric, 3-regular, 4-regular, nearly complete bipartite),
plus an edge-list text format and JSON-lines batch manifests.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from hashlib import blake2b
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "GraphFormatError",
    "GenerationError",
    "InstanceClass",
    "GenConfig",
    "ManifestEntry",
    "derive_seed",
    "generate_instance",
    "serialize_graph",
    "parse_graph",
    "write_manifest",
    "read_manifest",
    "REGULAR_RETRY_BUDGET",
    "DEGREE_SEQUENCE_RETRY_BUDGET",
]

REGULAR_RETRY_BUDGET = 10_000
DEGREE_SEQUENCE_RETRY_BUDGET = 100_000


class GraphFormatError(ValueError):
    """Edge-list text could not be parsed. Carries the offending 1-based line."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class GenerationError(RuntimeError):
    """A stochastic generator exhausted its retry budget."""

    def __init__(self, message: str, retries: int) -> None:
        super().__init__(f"{message} (after {retries} retries)")
        self.retries = retries


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count plus a sorted tuple of edges.

    Edges are 0-indexed pairs ``(u, v)`` with ``u < v``, no self-loops and no
    duplicates. Instances are immutable and hashable, so they can be shared
    freely across threads and processes.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"vertex count must be positive, got {self.n}")
        seen: set[tuple[int, int]] = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) has endpoint outside [0,{self.n})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u > v:
                raise ValueError(f"edge ({u},{v}) must be ordered u < v")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build a graph from any iterable of pairs, normalizing orientation."""
        normalized = sorted({(min(u, v), max(u, v)) for u, v in edges})
        return cls(n=n, edges=tuple(normalized))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency_bitmasks(self) -> list[int]:
        """Neighbor sets as integer bitmasks; bit v of entry u set iff u~v."""
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def adjacency_sets(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a


class InstanceClass(str, Enum):
    """The seven instance families covered by the experiment suite."""

    UNIFORM_RANDOM = "uniform_random"
    POWER_LAW_TREE = "power_law_tree"
    WATTS_STROGATZ = "watts_strogatz"
    GEOMETRIC = "geometric"
    THREE_REGULAR = "three_regular"
    FOUR_REGULAR = "four_regular"
    NEARLY_COMPLETE_BIPARTITE = "nearly_complete_bipartite"


@dataclass
class GenConfig:
    """Generator settings for one instance.

    Class-specific knobs (only the ones relevant to ``instance_class`` are
    read): ``edge_probability`` for uniform random, ``exponent`` for the
    power-law degree distribution, ``ws_k``/``ws_beta`` for Watts-Strogatz,
    ``radius``/``dim`` for geometric, and ``part_size``/``flip_probability``
    for nearly complete bipartite. Regular classes fix their degree (3 or 4).

    The uniform-random edge probability and geometric radius defaults are
    local choices (exposed here precisely because no canonical value exists);
    see the README for the rationale.
    """

    instance_class: InstanceClass
    n: int
    seed: int
    edge_probability: float = 0.5
    exponent: float = 3.0
    ws_k: int = 4
    ws_beta: float = 0.5
    radius: float = 0.5
    dim: int = 2
    part_size: int | None = None
    flip_probability: float = 0.05

    def degree(self) -> int:
        if self.instance_class is InstanceClass.THREE_REGULAR:
            return 3
        if self.instance_class is InstanceClass.FOUR_REGULAR:
            return 4
        raise ValueError(f"{self.instance_class.value} has no fixed degree")

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        cls = self.instance_class
        if cls is InstanceClass.UNIFORM_RANDOM:
            _check_probability("edge_probability", self.edge_probability)
        elif cls is InstanceClass.POWER_LAW_TREE:
            if self.exponent <= 1.0:
                raise ValueError(f"power-law exponent must exceed 1, got {self.exponent}")
        elif cls is InstanceClass.WATTS_STROGATZ:
            _check_probability("ws_beta", self.ws_beta)
            if self.ws_k % 2 != 0 or not (0 <= self.ws_k < self.n):
                raise ValueError(f"ws_k must be even and < n, got k={self.ws_k}, n={self.n}")
        elif cls is InstanceClass.GEOMETRIC:
            if self.radius < 0:
                raise ValueError(f"radius must be nonnegative, got {self.radius}")
            if self.dim < 1:
                raise ValueError(f"dim must be positive, got {self.dim}")
        elif cls in (InstanceClass.THREE_REGULAR, InstanceClass.FOUR_REGULAR):
            d = self.degree()
            if d >= self.n:
                raise ValueError(f"degree {d} requires n > {d}, got n={self.n}")
            if (self.n * d) % 2 != 0:
                raise ValueError(f"n*d must be even for a {d}-regular graph, got n={self.n}")
        elif cls is InstanceClass.NEARLY_COMPLETE_BIPARTITE:
            _check_probability("flip_probability", self.flip_probability)
            a = self.part_size if self.part_size is not None else self.n // 2
            if not (1 <= a < self.n):
                raise ValueError(f"part_size must be in [1, n), got {a}")


def _check_probability(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must be in [0,1], got {value}")


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed from a base seed and arbitrary tag parts.

    Uses blake2b so the derivation is identical across processes and runs
    (Python's builtin ``hash`` is salted per process). Batch generation keys
    each instance off (base_seed, class tag, index), making parallel
    generation order-independent.
    """
    text = "\x1f".join([str(int(base_seed))] + [str(p) for p in parts])
    digest = blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def generate_instance(config: GenConfig, rng: np.random.Generator | None = None) -> Graph:
    """Generate one graph for the configured class.

    Deterministic given ``config.seed``; pass ``rng`` explicitly only to
    override the default ``np.random.default_rng(config.seed)``.
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    cls = config.instance_class
    if cls is InstanceClass.UNIFORM_RANDOM:
        return _uniform_random(config.n, config.edge_probability, rng)
    if cls is InstanceClass.POWER_LAW_TREE:
        return _power_law_tree(config.n, config.exponent, rng)
    if cls is InstanceClass.WATTS_STROGATZ:
        return _watts_strogatz(config.n, config.ws_k, config.ws_beta, rng)
    if cls is InstanceClass.GEOMETRIC:
        return _geometric(config.n, config.radius, config.dim, rng)
    if cls in (InstanceClass.THREE_REGULAR, InstanceClass.FOUR_REGULAR):
        return _random_regular(config.n, config.degree(), rng)
    if cls is InstanceClass.NEARLY_COMPLETE_BIPARTITE:
        a = config.part_size if config.part_size is not None else config.n // 2
        return _nearly_complete_bipartite(config.n, a, config.flip_probability, rng)
    raise ValueError(f"unknown instance class {cls!r}")


def _uniform_random(n: int, p: float, rng: np.random.Generator) -> Graph:
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v))
    return Graph(n, tuple(edges))


def _power_law_tree(n: int, exponent: float, rng: np.random.Generator) -> Graph:
    """Random tree whose degree sequence is drawn from P(k) ~ k^-exponent.

    Degrees are sampled i.i.d. and rejected until they sum to 2(n-1) (the
    tree handshake total), then realized uniformly among trees with that
    degree sequence by shuffling the corresponding multiset into a Pruefer
    sequence.
    """
    if n == 1:
        return Graph(1, ())
    if n == 2:
        return Graph(2, ((0, 1),))
    ks = np.arange(1, n, dtype=np.float64)
    weights = ks**-exponent
    weights /= weights.sum()
    target = 2 * (n - 1)
    for attempt in range(DEGREE_SEQUENCE_RETRY_BUDGET):
        degrees = rng.choice(np.arange(1, n), size=n, p=weights)
        if int(degrees.sum()) == target:
            break
    else:
        raise GenerationError(
            f"no power-law degree sequence summing to {target} for n={n}",
            DEGREE_SEQUENCE_RETRY_BUDGET,
        )
    pruefer = np.repeat(np.arange(n), degrees - 1)
    rng.shuffle(pruefer)
    return Graph(n, tuple(sorted(_pruefer_decode(n, [int(x) for x in pruefer]))))


def _pruefer_decode(n: int, seq: list[int]) -> list[tuple[int, int]]:
    degree = [1] * n
    for s in seq:
        degree[s] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, s), max(leaf, s)))
        degree[leaf] -= 1
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return edges


def _watts_strogatz(n: int, k: int, beta: float, rng: np.random.Generator) -> Graph:
    """Ring lattice with k/2 neighbors per side, each edge rewired w.p. beta.

    Rewiring keeps the near endpoint and redirects the far one to a uniform
    non-neighbor; an edge is kept unchanged when its near endpoint already
    touches every other vertex.
    """
    edge_set: set[tuple[int, int]] = set()
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            edge_set.add((min(u, v), max(u, v)))
    adjacency: list[set[int]] = [set() for _ in range(n)]
    for u, v in edge_set:
        adjacency[u].add(v)
        adjacency[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            if rng.random() >= beta:
                continue
            v = (u + j) % n
            key = (min(u, v), max(u, v))
            if key not in edge_set:
                continue
            if len(adjacency[u]) >= n - 1:
                continue
            while True:
                w = int(rng.integers(0, n))
                if w != u and w not in adjacency[u]:
                    break
            edge_set.remove(key)
            adjacency[u].discard(v)
            adjacency[v].discard(u)
            edge_set.add((min(u, w), max(u, w)))
            adjacency[u].add(w)
            adjacency[w].add(u)
    return Graph(n, tuple(sorted(edge_set)))


def _geometric(n: int, radius: float, dim: int, rng: np.random.Generator) -> Graph:
    points = rng.random((n, dim))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if math.dist(points[u], points[v]) <= radius:
                edges.append((u, v))
    return Graph(n, tuple(edges))


def _random_regular(n: int, d: int, rng: np.random.Generator) -> Graph:
    """d-regular graph via configuration-model pairing with rejection."""
    stubs = np.repeat(np.arange(n), d)
    for attempt in range(REGULAR_RETRY_BUDGET):
        rng.shuffle(stubs)
        edges: set[tuple[int, int]] = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = int(stubs[i]), int(stubs[i + 1])
            if u == v:
                ok = False
                break
            key = (min(u, v), max(u, v))
            if key in edges:
                ok = False
                break
            edges.add(key)
        if ok:
            return Graph(n, tuple(sorted(edges)))
    raise GenerationError(
        f"configuration model failed for {d}-regular graph on n={n}",
        REGULAR_RETRY_BUDGET,
    )


def _nearly_complete_bipartite(
    n: int, part_size: int, flip_probability: float, rng: np.random.Generator
) -> Graph:
    """Complete bipartite K_{a,n-a} with each possible edge flipped w.p. p."""
    a = part_size
    edge_set = {(u, v) for u in range(a) for v in range(a, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < flip_probability:
                key = (u, v)
                if key in edge_set:
                    edge_set.remove(key)
                else:
                    edge_set.add(key)
    return Graph(n, tuple(sorted(edge_set)))


# ---------------------------------------------------------------------------
# Edge-list text format: "n m" header, then m lines "u v" with u < v, sorted.
# ---------------------------------------------------------------------------


def serialize_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = text.split("\n")
    if not lines or not lines[0].strip():
        raise GraphFormatError(1, "missing 'n m' header")
    header = lines[0].split()
    if len(header) != 2:
        raise GraphFormatError(1, f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphFormatError(1, f"header must be two integers, got {lines[0]!r}") from None
    if n < 1:
        raise GraphFormatError(1, f"vertex count must be positive, got {n}")
    if m < 0:
        raise GraphFormatError(1, f"edge count must be nonnegative, got {m}")

    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    lineno = 1
    for raw in lines[1:]:
        lineno += 1
        if not raw.strip():
            continue
        if len(edges) == m:
            raise GraphFormatError(lineno, f"more than {m} edge lines")
        parts = raw.split()
        if len(parts) != 2:
            raise GraphFormatError(lineno, f"edge line must be 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(lineno, f"edge endpoints must be integers, got {raw!r}") from None
        if u >= v:
            raise GraphFormatError(lineno, f"edge ({u},{v}) must satisfy u < v")
        if not (0 <= u < n and 0 <= v < n):
            bad = u if not (0 <= u < n) else v
            raise GraphFormatError(lineno, f"vertex {bad} out of range (n={n})")
        if (u, v) in seen:
            raise GraphFormatError(lineno, f"duplicate edge ({u},{v})")
        seen.add((u, v))
        edges.append((u, v))
    if len(edges) != m:
        raise GraphFormatError(lineno + 1, f"expected {m} edge lines, found {len(edges)}")
    return Graph(n, tuple(sorted(edges)))


# ---------------------------------------------------------------------------
# Batch manifests: one JSON object per line.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    instance_id: str
    instance_class: InstanceClass
    n: int
    seed: int
    path: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.instance_id,
                "class": self.instance_class.value,
                "n": self.n,
                "seed": self.seed,
                "path": self.path,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "ManifestEntry":
        obj = json.loads(line)
        return cls(
            instance_id=obj["id"],
            instance_class=InstanceClass(obj["class"]),
            n=int(obj["n"]),
            seed=int(obj["seed"]),
            path=obj["path"],
        )


def write_manifest(entries, path: Path | str) -> None:
    path = Path(path)
    text = "".join(entry.to_json() + "\n" for entry in entries)
    path.write_text(text, encoding="utf-8")


def read_manifest(path: Path | str) -> list[ManifestEntry]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ManifestEntry.from_json(line) for line in lines if line.strip()]
