"""Exact geometry of the 2-D discrete torus and its continuous rescaling.

Vertices live on {1,...,N}^2 with coordinate-wise wrap-around; distance is
the folded L1 metric d(u,v) = d_N(|u1-v1|) + d_N(|u2-v2|) where
d_N(i) = i for i <= N/2 and N - i above.  Ring sizes (number of vertices
at distance exactly r from a fixed vertex) have closed forms that differ
by parity of N.  Rescaling vertices by 1/N embeds them in the continuous
torus [0,1)^2 with metric rho; the inverse-distance kernel on that torus
reproduces the discrete edge probabilities exactly.
"""

from __future__ import annotations

import numpy as np

Vertex = tuple[int, int]
ContinuousPoint = tuple[float, float]


class TorusConfig:
    """Side length N plus cached offset tables for ring enumeration."""

    def __init__(self, N: int):
        if N <= 1:
            raise ValueError(f"side length must be > 1, got {N}")
        self.N = int(N)
        i = np.arange(self.N)
        # folded distance of a single-coordinate offset; for even N the
        # case i = N/2 falls in the first branch (both branches agree there
        # would not: N - N/2 = N/2, so they do agree).  |u1 - v1| <= N - 1
        # always, so no extension of d_N beyond i < N is needed.
        self.offset_dist = np.where(2 * i <= self.N, i, self.N - i).astype(np.int64)
        self._ring_offsets_cache: dict[int, np.ndarray] | None = None

    @property
    def n_vertices(self) -> int:
        return self.N * self.N

    @property
    def max_dist(self) -> int:
        """Largest r with ring_size(r) > 0."""
        return self.N if self.N % 2 == 0 else 2 * (self.N // 2)

    def _ring_offsets(self) -> dict[int, np.ndarray]:
        """Map r -> array of coordinate offsets (di, dj), di,dj in {0..N-1},
        whose folded distance sums to r.  Built once, O(N^2) total."""
        if self._ring_offsets_cache is None:
            N = self.N
            d = self.offset_dist
            di, dj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
            dist = d[di] + d[dj]
            offs: dict[int, np.ndarray] = {}
            flat = np.stack([di.ravel(), dj.ravel()], axis=1)
            order = np.argsort(dist.ravel(), kind="stable")
            sorted_dist = dist.ravel()[order]
            sorted_offs = flat[order]
            bounds = np.searchsorted(sorted_dist, np.arange(0, self.max_dist + 2))
            for r in range(1, self.max_dist + 1):
                offs[r] = sorted_offs[bounds[r]:bounds[r + 1]]
            self._ring_offsets_cache = offs
        return self._ring_offsets_cache

    def __repr__(self) -> str:
        return f"TorusConfig(N={self.N})"


def _check_vertex(u: Vertex, N: int) -> None:
    if not (1 <= u[0] <= N and 1 <= u[1] <= N):
        raise ValueError(f"vertex {u} outside {{1,...,{N}}}^2")


def torus_distance(u: Vertex, v: Vertex, cfg: TorusConfig) -> int:
    """Folded L1 distance between two vertices of the N-torus."""
    _check_vertex(u, cfg.N)
    _check_vertex(v, cfg.N)
    d = cfg.offset_dist
    return int(d[(u[0] - v[0]) % cfg.N] + d[(u[1] - v[1]) % cfg.N])


def ring_size(r: int, cfg: TorusConfig) -> int:
    """Number of vertices at distance exactly r from any fixed vertex.

    Closed-form, split by parity of N.  Rings beyond max_dist (possible
    for odd N, where the formula gives 0 at r = N) are valid empty rings.
    """
    N = cfg.N
    if not 1 <= r <= N:
        raise ValueError(f"ring index r={r} outside [1, {N}]")
    if N % 2 == 1:
        half = N // 2
        return 4 * r if r <= half else 4 * (N - r)
    # even N
    if r < N // 2:
        return 4 * r
    if r == N // 2:
        return 2 * (N - 1)
    if r < N:
        return 4 * (N - r)
    return 1  # r == N: the unique antipodal vertex


def ring_sizes(cfg: TorusConfig) -> np.ndarray:
    """ring_size for r = 1..N as an array (index 0 <-> r = 1)."""
    return np.array([ring_size(r, cfg) for r in range(1, cfg.N + 1)], dtype=np.int64)


def ring_vertices(u: Vertex, r: int, cfg: TorusConfig) -> list[Vertex]:
    """All vertices at distance exactly r from u (no duplicates)."""
    _check_vertex(u, cfg.N)
    if not 1 <= r <= cfg.N:
        raise ValueError(f"ring index r={r} outside [1, {cfg.N}]")
    if r > cfg.max_dist:
        return []
    N = cfg.N
    offs = cfg._ring_offsets()[r]
    return [(int((u[0] - 1 + di) % N) + 1, int((u[1] - 1 + dj) % N) + 1) for di, dj in offs]


def continuous_rho(p: ContinuousPoint, q: ContinuousPoint) -> float:
    """Folded L1 metric on the continuous torus [0,1)^2; values in [0,1]."""

    def rho1(a: float) -> float:
        a = abs(a) % 1.0
        return a if a <= 0.5 else 1.0 - a

    return rho1(p[0] - q[0]) + rho1(p[1] - q[1])


def kernel(p: ContinuousPoint, wp: float, q: ContinuousPoint, wq: float) -> float:
    """Edge-intensity kernel wp*wq / rho(p,q) on the continuous torus.

    Undefined on the diagonal: rho(p,q) = 0 raises.
    """
    if wp < 0 or wq < 0:
        raise ValueError("weights must be nonnegative")
    rho = continuous_rho(p, q)
    if rho == 0.0:
        raise ZeroDivisionError("kernel is singular at coincident points")
    return wp * wq / rho
