"""Connected components: union-find for measurement, exploration for fidelity.

The measurement path is a flat-array disjoint-set forest (path halving +
union by size).  The exploration algorithm is the active/saturated/
neutral procedure whose stopping time T equals the component size; it
exists to generate traces for branching-process comparisons and to
cross-check the union-find backend, not for throughput.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import torus_distance
from .model import Graph


class DisjointSet:
    """Array-backed union-find with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


@dataclass
class ComponentSummary:
    sizes: np.ndarray  # descending
    largest: int
    count: int

    @classmethod
    def from_sizes(cls, sizes) -> "ComponentSummary":
        arr = np.sort(np.asarray(sizes, dtype=np.int64))[::-1]
        return cls(sizes=arr, largest=int(arr[0]), count=len(arr))


def largest_component(g: Graph) -> ComponentSummary:
    """Exact component decomposition of the sampled graph."""
    n = g.n_vertices
    ds = DisjointSet(n)
    for a, b in g.edges:
        ds.union(int(a), int(b))
    roots = [ds.find(i) for i in range(n)]
    sizes = np.bincount(np.asarray(roots))
    return ComponentSummary.from_sizes(sizes[sizes > 0])


@dataclass
class TraceStep:
    i: int
    active: int        # |S_i| after the step
    activated: int     # X_i
    chosen: int        # vertex index saturated at this step


@dataclass
class ExplorationTrace:
    start: int
    steps: list[TraceStep] = field(default_factory=list)
    ring_counts: list[dict[int, int]] | None = None

    @property
    def T(self) -> int:
        return len(self.steps)

    def vertices(self) -> list[int]:
        return [s.chosen for s in self.steps]

    def to_jsonl(self) -> str:
        """One JSON record per step: {"i": ..., "S": |S_i|, "X": X_i}."""
        return "\n".join(
            json.dumps({"i": s.i, "S": s.active, "X": s.activated}) for s in self.steps
        )


def explore_component(g: Graph, v: int, rng: np.random.Generator,
                      record_rings: bool = False) -> ExplorationTrace:
    """Reveal the component of v by the active/saturated/neutral procedure.

    At each step one active vertex is chosen uniformly at random and its
    neutral neighbors become active.  The stopping time (number of
    steps) is the component size, whatever the tie-breaking.

    `v` may be an index or an (u1, u2) coordinate pair.
    """
    if not isinstance(v, (int, np.integer)):
        v = g.vertex_index(v)
    status = np.zeros(g.n_vertices, dtype=np.int8)  # 0 neutral, 1 active, 2 saturated
    status[v] = 1
    active = [int(v)]
    trace = ExplorationTrace(start=int(v), ring_counts=[] if record_rings else None)
    i = 0
    while active:
        i += 1
        pick = int(rng.integers(len(active)))
        active[pick], active[-1] = active[-1], active[pick]
        vi = active.pop()
        status[vi] = 2
        newly = [int(u) for u in g.neighbors(vi) if status[u] == 0]
        for u in newly:
            status[u] = 1
        active.extend(newly)
        trace.steps.append(TraceStep(i=i, active=len(active), activated=len(newly), chosen=vi))
        if record_rings:
            cfg = _torus_of(g)
            per_ring: dict[int, int] = {}
            for u in newly:
                r = torus_distance(g.index_vertex(vi), g.index_vertex(u), cfg)
                per_ring[r] = per_ring.get(r, 0) + 1
            trace.ring_counts.append(per_ring)
    return trace


def _torus_of(g: Graph):
    from .geometry import TorusConfig

    cfg = getattr(g, "_torus_cfg", None)
    if cfg is None:
        cfg = TorusConfig(g.N)
        g._torus_cfg = cfg
    return cfg


def component_decomposition(g: Graph, rng: np.random.Generator) -> list[ExplorationTrace]:
    """Explore components from uniformly chosen unvisited start vertices
    until every vertex is covered exactly once."""
    unvisited = set(range(g.n_vertices))
    traces: list[ExplorationTrace] = []
    while unvisited:
        pool = sorted(unvisited)
        start = pool[int(rng.integers(len(pool)))]
        tr = explore_component(g, start, rng)
        traces.append(tr)
        unvisited.difference_update(tr.vertices())
    return traces
