"""Automorphism group size and vertex orbits.

Exact enumeration by backtracking over candidate vertex images, pruned with
iterated degree/neighborhood color refinement. Intended for graphs up to 16
vertices; a node-visit budget turns pathological inputs into an explicit
error rather than an open-ended search.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph

__all__ = ["AutomorphismStats", "SearchBudgetError", "automorphism_stats", "color_refinement"]

DEFAULT_BUDGET = 100_000_000


class SearchBudgetError(RuntimeError):
    """Automorphism search exceeded its node-visit budget."""


@dataclass(frozen=True)
class AutomorphismStats:
    group_size: int
    orbits: tuple[tuple[int, ...], ...]

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)


def color_refinement(g: Graph) -> list[int]:
    """Stable vertex coloring: start from degrees, refine by the multiset of
    neighbor colors until no class splits further."""
    adj = g.adjacency_sets()
    colors = g.degrees()
    while True:
        signatures = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(g.n)]
        palette = {sig: i for i, sig in enumerate(sorted(set(signatures)))}
        new_colors = [palette[sig] for sig in signatures]
        if new_colors == colors:
            return colors
        colors = new_colors


def automorphism_stats(g: Graph, budget: int = DEFAULT_BUDGET) -> AutomorphismStats:
    """Count adjacency-preserving vertex bijections and group the vertices
    into orbits under them.

    Every automorphism is visited, so the orbit partition is exact. Raises
    ``SearchBudgetError`` once more than ``budget`` search nodes have been
    expanded (e.g. near-edgeless or near-complete graphs beyond ~12 vertices,
    whose groups are factorially large).
    """
    n = g.n
    colors = color_refinement(g)
    adj = g.adjacency_bitmasks()

    # Order vertices so that small color classes are mapped first.
    class_size: dict[int, int] = {}
    for c in colors:
        class_size[c] = class_size.get(c, 0) + 1
    order = sorted(range(n), key=lambda v: (class_size[colors[v]], colors[v], v))

    candidates = [[w for w in range(n) if colors[w] == colors[v]] for v in order]

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    image = [0] * n
    group_size = 0
    visits = 0

    def extend(depth: int, used_mask: int) -> None:
        nonlocal group_size, visits
        if depth == n:
            group_size += 1
            for v in range(n):
                union(v, image[v])
            return
        v = order[depth]
        # Image of v must be adjacent exactly to the images of v's already
        # mapped neighbors.
        required = 0
        for i in range(depth):
            if adj[v] >> order[i] & 1:
                required |= 1 << image[order[i]]
        for w in candidates[depth]:
            bit = 1 << w
            if used_mask & bit:
                continue
            visits += 1
            if visits > budget:
                raise SearchBudgetError(
                    f"automorphism search exceeded {budget} node visits on n={n}"
                )
            if adj[w] & used_mask != required:
                continue
            image[v] = w
            extend(depth + 1, used_mask | bit)

    extend(0, 0)

    orbit_map: dict[int, list[int]] = {}
    for v in range(n):
        orbit_map.setdefault(find(v), []).append(v)
    orbits = tuple(tuple(sorted(vs)) for _, vs in sorted(orbit_map.items()))
    return AutomorphismStats(group_size=group_size, orbits=orbits)
