"""The 28-feature vector used to characterize MaxCut instances.

All features are exact. Distance features (diameter, radius, average
distance) are computed on the largest connected component so that
disconnected instances still produce finite values; the ``connected`` flag
disambiguates. Boolean features are encoded as 0.0/1.0 so the projection
stage consumes one uniform numeric vector.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, fields
from itertools import combinations
from pathlib import Path

import networkx as nx
import numpy as np

from .graphs import Graph
from .spectral import laplacian_matrix, symmetric_eigenvalues
from .symmetry import automorphism_stats

__all__ = [
    "FeatureVector",
    "FEATURE_NAMES",
    "compute_features",
    "clique_number",
    "minimum_dominating_set_size",
    "edge_connectivity",
    "vertex_connectivity",
    "minimal_odd_cycle_count",
    "count_cut_vertices",
    "is_planar",
    "write_features_csv",
    "format_float",
]


@dataclass(frozen=True)
class FeatureVector:
    """One instance's 28 features, in the canonical column order."""

    numberOfEdges: float
    bipartite: float
    cliqueNumber: float
    connected: float
    density: float
    edgeConnectivity: float
    maximumDegree: float
    minimumDegree: float
    minimumDominatingSetSize: float
    regular: float
    smallestAdjacencyEigenvalue: float
    vertexConnectivity: float
    acyclic: float
    averageDistance: float
    diameter: float
    eulerian: float
    numberOfComponents: float
    planar: float
    radius: float
    algebraicConnectivity: float
    laplacianLargestEigenvalue: float
    ratioTwoLargestLaplacianEigenvalues: float
    ratioTwoSmallestLaplacianEigenvalues: float
    distanceRegular: float
    groupSize: float
    numberOfCutVertices: float
    numberOfMinimalOddCycles: float
    numberOfOrbits: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES], dtype=np.float64)

    def get(self, name: str) -> float:
        return float(getattr(self, name))


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(FeatureVector))


def compute_features(g: Graph) -> FeatureVector:
    """Compute all 28 features of a graph. Deterministic and pure."""
    n, m = g.n, g.m
    degrees = g.degrees()
    components = _components(g)
    connected = len(components) == 1

    dist = _distance_matrix(g)
    largest = max(components, key=lambda comp: (len(comp), -min(comp)))
    diameter, radius, avg_dist = _distance_summary(dist, largest)

    lap_eigs = symmetric_eigenvalues(laplacian_matrix(g))
    adj_eigs = symmetric_eigenvalues(g.adjacency_matrix())
    lam1 = max(lap_eigs[0], 0.0)  # Laplacian is PSD; clamp the ~0 eigenvalue
    lam2 = lap_eigs[1] if n >= 2 else 0.0
    algebraic = max(lam2, 0.0) if n >= 2 else 0.0
    lap_max = max(lap_eigs[-1], 0.0)
    ratio_largest = lap_eigs[-1] / lap_eigs[-2] if n >= 2 and lap_eigs[-2] > 0 else 0.0
    ratio_smallest = lam1 / lam2 if n >= 2 and lam2 > 0 else 0.0

    auto = automorphism_stats(g)
    bipartite = _is_bipartite(g)

    return FeatureVector(
        numberOfEdges=float(m),
        bipartite=float(bipartite),
        cliqueNumber=float(clique_number(g)),
        connected=float(connected),
        density=(2.0 * m / (n * (n - 1))) if n > 1 else 0.0,
        edgeConnectivity=float(edge_connectivity(g)),
        maximumDegree=float(max(degrees)),
        minimumDegree=float(min(degrees)),
        minimumDominatingSetSize=float(minimum_dominating_set_size(g)),
        regular=float(max(degrees) == min(degrees)),
        smallestAdjacencyEigenvalue=float(adj_eigs[0]),
        vertexConnectivity=float(vertex_connectivity(g)),
        acyclic=float(m == n - len(components)),
        averageDistance=avg_dist,
        diameter=float(diameter),
        eulerian=float(_is_eulerian(g, degrees, components)),
        numberOfComponents=float(len(components)),
        planar=float(is_planar(g)),
        radius=float(radius),
        algebraicConnectivity=float(algebraic),
        laplacianLargestEigenvalue=float(lap_max),
        ratioTwoLargestLaplacianEigenvalues=float(ratio_largest),
        ratioTwoSmallestLaplacianEigenvalues=float(ratio_smallest),
        distanceRegular=float(_is_distance_regular(g, dist, connected)),
        groupSize=float(auto.group_size),
        numberOfCutVertices=float(count_cut_vertices(g)),
        numberOfMinimalOddCycles=float(minimal_odd_cycle_count(g)),
        numberOfOrbits=float(auto.orbit_count),
    )


# ---------------------------------------------------------------------------
# Connectivity and distances
# ---------------------------------------------------------------------------


def _components(g: Graph) -> list[list[int]]:
    adj = g.adjacency_sets()
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        queue = deque([start])
        seen[start] = True
        comp = []
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def _distance_matrix(g: Graph) -> list[list[int]]:
    """All-pairs shortest path lengths via BFS; -1 for unreachable pairs."""
    adj = g.adjacency_sets()
    dist = [[-1] * g.n for _ in range(g.n)]
    for s in range(g.n):
        row = dist[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if row[w] < 0:
                    row[w] = row[u] + 1
                    queue.append(w)
    return dist


def _distance_summary(dist: list[list[int]], comp: list[int]) -> tuple[int, int, float]:
    """(diameter, radius, average distance) restricted to one component."""
    if len(comp) == 1:
        return 0, 0, 0.0
    eccs = []
    total = 0
    pairs = 0
    for i, u in enumerate(comp):
        row = dist[u]
        eccs.append(max(row[v] for v in comp))
        for v in comp[i + 1 :]:
            total += row[v]
            pairs += 1
    return max(eccs), min(eccs), total / pairs


def _is_bipartite(g: Graph) -> bool:
    adj = g.adjacency_sets()
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return False
    return True


def _is_eulerian(g: Graph, degrees: list[int], components: list[list[int]]) -> bool:
    """Eulerian circuit test: some edges, all degrees even, and all edges in
    one component."""
    if g.m == 0:
        return False
    if any(d % 2 for d in degrees):
        return False
    non_isolated = [comp for comp in components if len(comp) > 1]
    return len(non_isolated) == 1


def _is_distance_regular(g: Graph, dist: list[list[int]], connected: bool) -> bool:
    """Every vertex sees the same number of vertices at each distance.

    This is the distance-degree-regularity reading of the feature (a
    necessary condition for textbook distance regularity); disconnected
    graphs report false.
    """
    if not connected:
        return False
    profiles = set()
    for u in range(g.n):
        counts: dict[int, int] = {}
        for v in range(g.n):
            if v != u:
                counts[dist[u][v]] = counts.get(dist[u][v], 0) + 1
        profiles.add(tuple(sorted(counts.items())))
        if len(profiles) > 1:
            return False
    return True


def count_cut_vertices(g: Graph) -> int:
    """Vertices whose removal increases the number of connected components."""
    if g.n == 1:
        return 0
    base = len(_components(g))
    count = 0
    for v in range(g.n):
        keep = [u for u in range(g.n) if u != v]
        relabel = {u: i for i, u in enumerate(keep)}
        sub_edges = [(relabel[a], relabel[b]) for a, b in g.edges if a != v and b != v]
        sub = Graph.from_edges(g.n - 1, sub_edges)
        if len(_components(sub)) > base:
            count += 1
    return count


# ---------------------------------------------------------------------------
# Cliques, domination, odd cycles
# ---------------------------------------------------------------------------


def clique_number(g: Graph) -> int:
    """Largest clique size via Bron-Kerbosch with pivoting on bitmasks."""
    if g.n == 0:
        return 0
    adj = g.adjacency_bitmasks()
    best = 1 if g.n >= 1 else 0

    def expand(r_size: int, p_mask: int, x_mask: int) -> None:
        nonlocal best
        if p_mask == 0 and x_mask == 0:
            best = max(best, r_size)
            return
        if r_size + _popcount(p_mask) <= best:
            return
        pivot_pool = p_mask | x_mask
        pivot = (pivot_pool & -pivot_pool).bit_length() - 1
        best_cover = -1
        for u in _bits(pivot_pool):
            cover = _popcount(p_mask & adj[u])
            if cover > best_cover:
                best_cover = cover
                pivot = u
        for v in _bits(p_mask & ~adj[pivot]):
            bit = 1 << v
            expand(r_size + 1, p_mask & adj[v], x_mask & adj[v])
            p_mask &= ~bit
            x_mask |= bit

    expand(0, (1 << g.n) - 1, 0)
    return best


def _popcount(mask: int) -> int:
    return mask.bit_count()


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def minimum_dominating_set_size(g: Graph) -> int:
    """Smallest dominating set, by scanning subsets in increasing size."""
    adj = g.adjacency_bitmasks()
    closed = [adj[v] | (1 << v) for v in range(g.n)]
    full = (1 << g.n) - 1
    for k in range(1, g.n + 1):
        for subset in combinations(range(g.n), k):
            cover = 0
            for v in subset:
                cover |= closed[v]
            if cover == full:
                return k
    return g.n


def minimal_odd_cycle_count(g: Graph) -> int:
    """Number of odd cycles containing no smaller odd cycle on a vertex
    subset.

    An odd cycle with a chord splits into a strictly smaller odd cycle plus
    an even one, so the minimal odd cycles are exactly the chordless ones,
    and each corresponds to a unique vertex subset whose induced subgraph is
    a cycle. We scan all odd vertex subsets.
    """
    if _is_bipartite(g):
        return 0
    adj = g.adjacency_bitmasks()
    count = 0
    for subset in range(1 << g.n):
        size = subset.bit_count()
        if size < 3 or size % 2 == 0:
            continue
        if _induces_cycle(adj, subset, size):
            count += 1
    return count


def _induces_cycle(adj: list[int], subset: int, size: int) -> bool:
    inner_degrees = []
    first = -1
    for v in _bits(subset):
        if first < 0:
            first = v
        d = _popcount(adj[v] & subset)
        if d != 2:
            return False
        inner_degrees.append(d)
    # All inner degrees are 2; connected <=> single cycle.
    seen = 1 << first
    frontier = adj[first] & subset
    while frontier:
        seen |= frontier
        nxt = 0
        for v in _bits(frontier):
            nxt |= adj[v] & subset
        frontier = nxt & ~seen
    return seen == subset


# ---------------------------------------------------------------------------
# Edge and vertex connectivity (Menger via unit-capacity max-flow)
# ---------------------------------------------------------------------------

_INF = 1 << 20


def _max_flow(capacity: list[list[int]], source: int, sink: int) -> int:
    n = len(capacity)
    residual = [row[:] for row in capacity]
    flow = 0
    while True:
        parent = [-1] * n
        parent[source] = source
        queue = deque([source])
        while queue and parent[sink] < 0:
            u = queue.popleft()
            for v in range(n):
                if parent[v] < 0 and residual[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if parent[sink] < 0:
            return flow
        bottleneck = _INF
        v = sink
        while v != source:
            u = parent[v]
            bottleneck = min(bottleneck, residual[u][v])
            v = u
        v = sink
        while v != source:
            u = parent[v]
            residual[u][v] -= bottleneck
            residual[v][u] += bottleneck
            v = u
        flow += bottleneck


def edge_connectivity(g: Graph) -> int:
    """Minimum number of edges whose removal disconnects the graph.

    Disconnected (or single-vertex) graphs report 0. Uses the fixed-source
    form of Menger's theorem: min over t of maxflow(0, t) with unit edge
    capacities.
    """
    if g.n <= 1 or g.m == 0:
        return 0
    capacity = [[0] * g.n for _ in range(g.n)]
    for u, v in g.edges:
        capacity[u][v] = 1
        capacity[v][u] = 1
    return min(_max_flow(capacity, 0, t) for t in range(1, g.n))


def vertex_connectivity(g: Graph) -> int:
    """Minimum number of vertices whose removal disconnects (or trivializes)
    the graph: n-1 for complete graphs, else the minimum vertex-disjoint
    path count over non-adjacent pairs."""
    n = g.n
    if n <= 1:
        return 0
    if g.m == n * (n - 1) // 2:
        return n - 1
    adj = g.adjacency_sets()
    best = n
    for s in range(n):
        for t in range(s + 1, n):
            if t in adj[s]:
                continue
            best = min(best, _vertex_flow(g, adj, s, t))
            if best == 0:
                return 0
    return best


def _vertex_flow(g: Graph, adj: list[set[int]], s: int, t: int) -> int:
    # Split each vertex v into v_in = v and v_out = v + n with capacity 1.
    n = g.n
    size = 2 * n
    capacity = [[0] * size for _ in range(size)]
    for v in range(n):
        capacity[v][v + n] = 1 if v not in (s, t) else _INF
    for u, v in g.edges:
        capacity[u + n][v] = _INF
        capacity[v + n][u] = _INF
    return _max_flow(capacity, s + n, t)


# ---------------------------------------------------------------------------
# Planarity (delegated to networkx's left-right planarity check)
# ---------------------------------------------------------------------------


def is_planar(g: Graph) -> bool:
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges)
    planar, _ = nx.check_planarity(nxg)
    return bool(planar)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    """Serialize floats with 9 significant digits (the file-format contract)."""
    return f"{float(x):.9g}"


def write_features_csv(rows: list[tuple[str, FeatureVector]], path: Path | str) -> None:
    """Write ``id`` plus the 28 canonical feature columns, one row per instance."""
    lines = ["id," + ",".join(FEATURE_NAMES)]
    for instance_id, fv in rows:
        lines.append(instance_id + "," + ",".join(format_float(x) for x in fv.as_array()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
