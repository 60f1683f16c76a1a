"""Vertex-weight distributions, edge probabilities and graph sampling.

The graph on {1,...,N}^2 puts an independent edge between u and v with
probability min{c * W_u W_v / (N d(u,v)), 1}.  Naive pair-by-pair
sampling is O(N^4); the fast path walks the distance rings around each
vertex, draws a Binomial number of proposal candidates per ring at the
weight-capped probability, and thins each candidate by the actual
weight product.  Every unordered pair belongs to exactly one (ring,
half-offset) slot, so the sampled law is exact, not approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AssumptionError, ParameterError
from .geometry import TorusConfig, Vertex, ring_sizes

LOG2X4 = 4.0 * math.log(2.0)


# ---------------------------------------------------------------------------
# weight distributions
# ---------------------------------------------------------------------------

class WeightSpec:
    """Distribution of the i.i.d. vertex weight W.

    Three kinds: a point mass, a finite discrete distribution, and a
    continuous density on a finite interval evaluated by Gauss-Legendre
    quadrature.  All kinds have bounded support, so every exponential
    tilt E(W^k e^{sW}) is finite.
    """

    def __init__(self, kind: str, **data):
        self.kind = kind
        self._data = data
        if kind == "constant":
            w = float(data["value"])
            if w < 0:
                raise ValueError("weight must be nonnegative")
            self.mean = w
            self.second_moment = w * w
            self.support_bound = w
        elif kind == "discrete":
            values = np.asarray(data["values"], dtype=float)
            probs = np.asarray(data["probs"], dtype=float)
            if values.shape != probs.shape or values.ndim != 1:
                raise ValueError("values and probs must be 1-D arrays of equal length")
            if np.any(values < 0):
                raise ValueError("weights must be nonnegative")
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
                raise ValueError("probabilities must be nonnegative and sum to 1")
            self._data["values"] = values
            self._data["probs"] = probs
            self.mean = float(values @ probs)
            self.second_moment = float((values**2) @ probs)
            self.support_bound = float(values.max())
        elif kind == "continuous":
            pdf = data["pdf"]
            lo, hi = float(data["lo"]), float(data["hi"])
            if not (0 <= lo < hi < math.inf):
                raise AssumptionError(
                    "continuous weights need a finite support [lo, hi) with 0 <= lo < hi"
                )
            n_nodes = int(data.get("n_nodes", 400))
            x, wq = np.polynomial.legendre.leggauss(n_nodes)
            nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
            qw = 0.5 * (hi - lo) * wq * pdf(nodes)
            total = qw.sum()
            if not 1 - 1e-8 < total < 1 + 1e-8:
                raise ValueError(f"density does not integrate to 1 on [{lo},{hi}]: {total}")
            qw = qw / total  # absorb quadrature round-off
            self._nodes = nodes
            self._qw = qw
            self.mean = float(nodes @ qw)
            self.second_moment = float((nodes**2) @ qw)
            self.support_bound = hi
            self._sampler = data.get("sampler") or self._grid_inverse_cdf(pdf, lo, hi)
        else:
            raise ValueError(f"unknown weight kind {kind!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: float = 1.0) -> "WeightSpec":
        return cls("constant", value=value)

    @classmethod
    def discrete(cls, values, probs) -> "WeightSpec":
        return cls("discrete", values=values, probs=probs)

    @classmethod
    def continuous(cls, pdf, lo: float, hi: float, n_nodes: int = 400, sampler=None) -> "WeightSpec":
        return cls("continuous", pdf=pdf, lo=lo, hi=hi, n_nodes=n_nodes, sampler=sampler)

    @classmethod
    def truncated_exponential(cls, rate: float = 1.0, upper: float = 8.0, n_nodes: int = 400) -> "WeightSpec":
        """Exponential(rate) conditioned on [0, upper]."""
        if rate <= 0 or upper <= 0:
            raise ValueError("rate and upper must be positive")
        Z = 1.0 - math.exp(-rate * upper)

        def pdf(x):
            return rate * np.exp(-rate * np.asarray(x)) / Z

        def sampler(rng, n):
            u = rng.random(n)
            return -np.log1p(-u * Z) / rate

        return cls("continuous", pdf=pdf, lo=0.0, hi=upper, n_nodes=n_nodes, sampler=sampler)

    # -- queries -----------------------------------------------------------

    @staticmethod
    def _grid_inverse_cdf(pdf, lo, hi, n_grid: int = 1 << 14):
        grid = np.linspace(lo, hi, n_grid + 1)
        dens = pdf(grid)
        cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(grid))])
        cdf /= cdf[-1]

        def sampler(rng, n):
            return np.interp(rng.random(n), cdf, grid)

        return sampler

    def expectation(self, fn) -> float:
        """E[fn(W)] with fn vectorized over arrays."""
        if self.kind == "constant":
            return float(fn(np.array([self._data["value"]]))[0])
        if self.kind == "discrete":
            return float(fn(self._data["values"]) @ self._data["probs"])
        return float(fn(self._nodes) @ self._qw)

    def moment(self, k: int) -> float:
        return self.expectation(lambda x: x**k)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be >= 0")
        if self.kind == "constant":
            return np.full(n, float(self._data["value"]))
        if self.kind == "discrete":
            return rng.choice(self._data["values"], size=n, p=self._data["probs"])
        return self._sampler(rng, n)

    def __repr__(self) -> str:
        if self.kind == "constant":
            return f"WeightSpec.constant({self._data['value']})"
        if self.kind == "discrete":
            pairs = dict(zip(self._data["values"], self._data["probs"]))
            return f"WeightSpec.discrete({pairs})"
        return f"WeightSpec.continuous([{self._data['lo']}, {self._data['hi']}])"


def sample_weights(spec: WeightSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws of W."""
    return spec.sample(n, rng)


# ---------------------------------------------------------------------------
# model configuration
# ---------------------------------------------------------------------------

def lambda_of_c(c: float) -> float:
    """Mean-degree parameter: lambda = 4 c log 2."""
    if c < 0:
        raise ValueError("c must be nonnegative")
    return c * LOG2X4


def c_of_lambda(lam: float) -> float:
    """Inverse of lambda_of_c."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return lam / LOG2X4


@dataclass
class ModelConfig:
    torus: TorusConfig
    c: float
    weights: WeightSpec = field(default_factory=WeightSpec.constant)
    seed: int = 0

    def __post_init__(self):
        # c = 0 is allowed as the degenerate empty graph
        if self.c < 0:
            raise ValueError("edge-intensity parameter c must be nonnegative")

    @classmethod
    def from_lambda(cls, N: int, lam: float, weights: WeightSpec | None = None, seed: int = 0) -> "ModelConfig":
        return cls(TorusConfig(N), c_of_lambda(lam), weights or WeightSpec.constant(), seed)

    @property
    def lam(self) -> float:
        return lambda_of_c(self.c)


def edge_probability(u: Vertex, v: Vertex, wu: float, wv: float, m: ModelConfig) -> float:
    """min{c * wu * wv / (N d(u,v)), 1}; undefined on the diagonal."""
    from .geometry import torus_distance

    d = torus_distance(u, v, m.torus)
    if d == 0:
        raise ValueError("no self-loops: u == v")
    return min(m.c * wu * wv / (m.torus.N * d), 1.0)


def lambda_N(c: float, cfg: TorusConfig) -> float:
    """Exact finite-N Poisson-domination intensity sum(-N_r log(1 - p_r)).

    Expands as lambda - 2c/N + o(1/N).  Requires p_r = c/(N r) < 1 on
    every nonempty ring (worst case r = 1), else the log diverges.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    N = cfg.N
    sizes = ring_sizes(cfg)
    r = np.arange(1, N + 1, dtype=float)
    p = c / (N * r)
    if np.any((sizes > 0) & (p >= 1.0)):
        raise ParameterError(f"p_r >= 1 on a nonempty ring: N={N} too small for c={c}")
    mask = sizes > 0
    return float(-(sizes[mask] * np.log1p(-p[mask])).sum())


def mean_degree(c: float, cfg: TorusConfig) -> float:
    """Exact expected degree sum(N_r p_r) when no probability is capped."""
    N = cfg.N
    sizes = ring_sizes(cfg)
    r = np.arange(1, N + 1, dtype=float)
    p = np.minimum(c / (N * r), 1.0)
    return float((sizes * p).sum())


# ---------------------------------------------------------------------------
# sampled graph
# ---------------------------------------------------------------------------

@dataclass
class Graph:
    """Immutable sampled graph on the N^2 torus vertices.

    Vertices are indexed 0..N^2-1 row-major over coordinates; `edges`
    holds each undirected edge once as (min, max), lexicographically
    sorted.  Adjacency (CSR) is built lazily.
    """

    N: int
    weights: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        self._indptr: np.ndarray | None = None
        self._indices: np.ndarray | None = None

    @property
    def n_vertices(self) -> int:
        return self.N * self.N

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def vertex_index(self, u: Vertex) -> int:
        return (u[0] - 1) * self.N + (u[1] - 1)

    def index_vertex(self, i: int) -> Vertex:
        return (i // self.N + 1, i % self.N + 1)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        if self.edge_count:
            deg += np.bincount(self.edges[:, 0], minlength=self.n_vertices)
            deg += np.bincount(self.edges[:, 1], minlength=self.n_vertices)
        return deg

    def _build_adjacency(self) -> None:
        n = self.n_vertices
        if self.edge_count == 0:
            self._indptr = np.zeros(n + 1, dtype=np.int64)
            self._indices = np.empty(0, dtype=np.int64)
            return
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=n)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self._indices = dst

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor indices of vertex i."""
        if self._indptr is None:
            self._build_adjacency()
        return self._indices[self._indptr[i]:self._indptr[i + 1]]

    def export_edges(self, path) -> None:
        """Edge list, one line per edge: 'u1 u2 v1 v2'."""
        with open(path, "w") as fh:
            for a, b in self.edges:
                u, v = self.index_vertex(int(a)), self.index_vertex(int(b))
                fh.write(f"{u[0]} {u[1]} {v[0]} {v[1]}\n")

    def export_weights(self, path) -> None:
        """Vertex weights, one line per vertex: 'u1 u2 w'."""
        with open(path, "w") as fh:
            for i, w in enumerate(self.weights):
                u = self.index_vertex(i)
                fh.write(f"{u[0]} {u[1]} {w!r}\n")


# ---------------------------------------------------------------------------
# pair population: each unordered pair in exactly one (ring, offset) slot
# ---------------------------------------------------------------------------

def _half_offsets(cfg: TorusConfig) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Per ring r: (paired, selfinv) offset arrays.

    `paired` keeps exactly one of each {o, -o} pair, so applying it to
    every vertex enumerates each unordered pair once.  `selfinv` holds
    offsets with o == -o (even N only); those pairs are deduplicated by
    an index-order filter at sampling time.
    """
    cache = getattr(cfg, "_half_offsets_cache", None)
    if cache is not None:
        return cache
    N = cfg.N
    out: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for r, offs in cfg._ring_offsets().items():
        neg = (N - offs) % N
        is_self = np.all(offs == neg, axis=1)
        keep = (offs[:, 0] < neg[:, 0]) | ((offs[:, 0] == neg[:, 0]) & (offs[:, 1] < neg[:, 1]))
        out[r] = (offs[keep & ~is_self], offs[is_self])
    cfg._half_offsets_cache = out
    return out


def _apply_offset(idx: np.ndarray, off: np.ndarray, N: int) -> np.ndarray:
    """Vertex indices shifted by a single coordinate offset (di, dj)."""
    i, j = idx // N, idx % N
    return ((i + off[0]) % N) * N + (j + off[1]) % N


def iter_candidate_pairs(cfg: TorusConfig):
    """Yield (u_index, v_index, r) over the fast sampler's population.

    Test hook: the population must cover each unordered vertex pair
    exactly once, with r the torus distance of the pair.
    """
    n = cfg.n_vertices
    idx = np.arange(n)
    for r, (paired, selfinv) in _half_offsets(cfg).items():
        for off in paired:
            v = _apply_offset(idx, off, cfg.N)
            for a, b in zip(idx, v):
                yield int(a), int(b), r
        for off in selfinv:
            v = _apply_offset(idx, off, cfg.N)
            for a, b in zip(idx, v):
                if a < b:
                    yield int(a), int(b), r


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _uniform_distinct(rng: np.random.Generator, m: int, k: int) -> np.ndarray:
    """Uniform k-subset of range(m), sorted.  Exact: draws with
    replacement and redraws collisions, which is the sequential
    rejection scheme in batched form."""
    if k >= m:
        return np.arange(m)
    if 3 * k >= m:
        return np.sort(rng.permutation(m)[:k])
    chosen = np.unique(rng.integers(0, m, size=k))
    while chosen.size < k:
        extra = rng.integers(0, m, size=k - chosen.size)
        chosen = np.unique(np.concatenate([chosen, extra]))
    return chosen


def _substreams(seed: int, count: int) -> list[np.random.Generator]:
    """Counter-based (Philox) substreams with stable derivation, so the
    sampled graph is a function of the root seed alone."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(s)) for s in children]


def sample_graph(m: ModelConfig, seed: int | None = None) -> Graph:
    """Sample the graph by ring thinning; exact and near-linear.

    Per vertex ring r, candidates are proposed with the weight-capped
    probability pbar_r = min{c B^2 / (N r), 1} (B = weight support bound,
    or the realized max weight when unbounded) and accepted with
    p(u,v)/pbar_r, which is the exact edge probability overall.
    """
    cfg = m.torus
    N, n = cfg.N, cfg.n_vertices
    root = m.seed if seed is None else seed
    rngs = _substreams(root, cfg.max_dist + 1)
    weights = sample_weights(m.weights, n, rngs[0])

    bound = m.weights.support_bound
    B = bound if bound is not None else (float(weights.max()) if n else 0.0)
    if m.weights.kind != "constant":
        # the realized max can only lower the cap; tighter proposals, same law
        B = min(B, float(weights.max())) if n else B

    srcs: list[np.ndarray] = []
    dsts: list[np.ndarray] = []
    halves = _half_offsets(cfg)
    for r in range(1, cfg.max_dist + 1):
        paired, selfinv = halves[r]
        rng = rngs[r]
        pbar = min(m.c * B * B / (N * r), 1.0)
        if pbar <= 0.0:
            continue
        for population, pop_idx in _ring_populations(cfg, paired, selfinv):
            total = population
            k = int(rng.binomial(total, pbar)) if pbar < 1.0 else total
            if k == 0:
                continue
            chosen = _uniform_distinct(rng, total, k)
            u_idx, v_idx = pop_idx(chosen)
            p_true = np.minimum(m.c * weights[u_idx] * weights[v_idx] / (N * r), 1.0)
            if pbar < 1.0 or np.any(p_true < 1.0):
                keep = rng.random(k) * pbar < p_true
                u_idx, v_idx = u_idx[keep], v_idx[keep]
            srcs.append(u_idx)
            dsts.append(v_idx)

    if srcs:
        u = np.concatenate(srcs)
        v = np.concatenate(dsts)
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        edges = np.stack([lo, hi], axis=1)
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Graph(N, weights, edges.astype(np.int64))


def _ring_populations(cfg: TorusConfig, paired: np.ndarray, selfinv: np.ndarray):
    """Candidate-pair populations of one ring, as (size, index_decoder).

    The paired block is the flat product vertex x half-offset; each
    self-inverse offset contributes the n/2 vertices whose image has a
    larger index.
    """
    n, N = cfg.n_vertices, cfg.N
    mh = len(paired)
    if mh:
        pair_arr = paired

        def decode(chosen, pair_arr=pair_arr, mh=mh):
            u_idx = chosen // mh
            off = pair_arr[chosen % mh]
            i, j = u_idx // N, u_idx % N
            v_idx = ((i + off[:, 0]) % N) * N + (j + off[:, 1]) % N
            return u_idx, v_idx

        yield n * mh, decode
    for off in selfinv:
        v_all = _apply_offset(np.arange(n), off, N)
        pop = np.flatnonzero(np.arange(n) < v_all)

        def decode_self(chosen, pop=pop, v_all=v_all):
            u_idx = pop[chosen]
            return u_idx, v_all[u_idx]

        yield len(pop), decode_self


def sample_graph_reference(m: ModelConfig, seed: int | None = None,
                           decision=None) -> Graph:
    """O(N^4) per-pair reference sampler (small N only).

    Walks every unordered pair in canonical index order.  `decision`
    optionally replaces the RNG: a callable (u_idx, v_idx, p) -> bool.
    """
    cfg = m.torus
    N, n = cfg.N, cfg.n_vertices
    if n > 4096 and decision is None:
        raise ParameterError("reference sampler is O(N^4); use sample_graph for N > 64")
    root = m.seed if seed is None else seed
    rngs = _substreams(root, 1)
    weights = sample_weights(m.weights, n, rngs[0])
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(root).spawn(2)[1]))

    d = cfg.offset_dist
    idx = np.arange(n)
    i, j = idx // N, idx % N
    dist = d[np.abs(i[:, None] - i[None, :])] + d[np.abs(j[:, None] - j[None, :])]
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            p = min(m.c * weights[a] * weights[b] / (N * dist[a, b]), 1.0)
            hit = decision(a, b, p) if decision is not None else rng.random() < p
            if hit:
                edges.append((a, b))
    arr = np.array(edges, dtype=np.int64) if edges else np.empty((0, 2), dtype=np.int64)
    return Graph(N, weights, arr)
