"""Sampling of the multilayer superposition graph.

Each layer picks a uniform node subset of its sampled size and links its
pairs independently with its sampled strength; the graph is the union of
all layer edge sets.  Every layer draws from its own counter-derived
random stream, so the output depends only on (seed, config, distribution),
never on generation order or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .layers import LayerType, LayerTypeDistribution, sample_layer_type

# dense Bernoulli over all pairs above this strength, geometric skips below
_DENSE_STRENGTH = 0.25
# partial Fisher-Yates above this occupancy, rejection sampling below
_FY_FRACTION = 64


@dataclass(frozen=True)
class GenConfig:
    n: int
    layers: Optional[int] = None
    mu: Optional[float] = None
    seed: int = 0
    keep_layer_records: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if (self.layers is None) == (self.mu is None):
            raise ValueError("exactly one of layers / mu must be given")
        if self.m < 1:
            raise ValueError("derived layer count must be >= 1")

    @property
    def m(self) -> int:
        if self.layers is not None:
            return int(self.layers)
        return int(round(self.mu * self.n))


@dataclass(frozen=True)
class LayerRecord:
    layer_type: LayerType
    nodes: np.ndarray
    edges: np.ndarray  # shape (E, 2), 1-based, i < j


@dataclass(frozen=True)
class GraphSample:
    """Deduplicated undirected graph on nodes 1..n."""

    n: int
    edges: np.ndarray  # shape (E, 2), 1-based, i < j, lexicographically sorted
    m: Optional[int] = None
    seed: Optional[int] = None
    layer_records: Optional[list] = None

    @property
    def edge_count(self) -> int:
        return len(self.edges)


class _LayerStreams:
    """Counter-based per-layer random streams.

    Stream k is Philox keyed by (master seed, k); resetting the state of a
    single reusable bit generator reproduces a freshly keyed generator
    exactly, at a fraction of the construction cost.
    """

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        self._bg = np.random.Philox(key=0)
        self._gen = np.random.Generator(self._bg)

    def layer_rng(self, k: int) -> np.random.Generator:
        self._bg.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": np.zeros(4, dtype=np.uint64),
                "key": np.array([k, self._seed], dtype=np.uint64),
            },
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gen


def _uniform_subset(n: int, x: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform size-x subset of {1,...,n}, sorted."""
    if x >= n:
        return np.arange(1, n + 1, dtype=np.int64)
    if x * _FY_FRACTION > n:
        # partial Fisher-Yates over [0, n)
        pool = np.arange(n, dtype=np.int64)
        idx = rng.integers(0, n - np.arange(x))
        for i, j in enumerate(idx + np.arange(x)):
            pool[i], pool[j] = pool[j], pool[i]
        picked = pool[:x]
    else:
        draw = rng.integers(0, n, size=x)
        if len(np.unique(draw)) == x:
            picked = draw
        else:
            seen: set[int] = set()
            while len(seen) < x:
                for v in rng.integers(0, n, size=x - len(seen)).tolist():
                    if len(seen) < x:
                        seen.add(v)
            picked = np.fromiter(seen, dtype=np.int64, count=x)
    out = np.sort(picked) + 1
    return out


def _pair_indices(x: int, y: float, rng: np.random.Generator) -> np.ndarray:
    """Linear indices (lexicographic) of the Bernoulli(y)-selected pairs."""
    npairs = x * (x - 1) // 2
    if npairs == 0 or y <= 0.0:
        return np.empty(0, dtype=np.int64)
    if y >= 1.0:
        return np.arange(npairs, dtype=np.int64)
    if y > _DENSE_STRENGTH:
        return np.nonzero(rng.random(npairs) < y)[0]
    # geometric skip-sampling: expected cost proportional to edge count
    hits = []
    pos = -1
    est = max(8, int(npairs * y * 1.3) + 4)
    while True:
        skips = rng.geometric(y, size=est)
        steps = pos + np.cumsum(skips)
        over = np.searchsorted(steps, npairs)
        hits.append(steps[:over])
        if over < len(steps):
            break
        pos = int(steps[-1])
    return np.concatenate(hits) if len(hits) > 1 else hits[0]


def _unrank_pairs(e: np.ndarray, x: int) -> tuple[np.ndarray, np.ndarray]:
    """Map lexicographic pair indices to (row, col) with row < col < x."""
    # row r occupies indices [r*(2x-r-1)/2, ...); invert the triangular offset
    t = x * (x - 1) // 2 - 1 - e
    k = ((np.sqrt(8.0 * t + 1) - 1) // 2).astype(np.int64)
    r = x - 2 - k
    offset = r * (2 * x - r - 1) // 2
    c = e - offset + r + 1
    return r, c


def generate_layer(n: int, layer: LayerType, rng: np.random.Generator):
    """One layer: a uniform node subset plus independent pair links.

    Returns (nodes, edges) with nodes a sorted 1-based array and edges a
    (E, 2) array of 1-based pairs i < j.  Sizes above n are clamped.
    """
    x = min(layer.size, n)
    nodes = _uniform_subset(n, x, rng) if x > 0 else np.empty(0, dtype=np.int64)
    idx = _pair_indices(x, layer.strength, rng)
    if len(idx) == 0:
        return nodes, np.empty((0, 2), dtype=np.int64)
    r, c = _unrank_pairs(idx, x)
    edges = np.stack([nodes[r], nodes[c]], axis=1)
    return nodes, edges


def _generate_chunk(lo, hi, n, dist, seed, keep_records):
    streams = _LayerStreams(seed)
    codes = []
    records = [] if keep_records else None
    for k in range(lo, hi):
        rng = streams.layer_rng(k)
        lt = sample_layer_type(dist, rng)
        nodes, edges = generate_layer(n, lt, rng)
        if len(edges):
            codes.append((edges[:, 0] - 1) * n + (edges[:, 1] - 1))
        if keep_records:
            records.append(LayerRecord(lt, nodes, edges))
    return codes, records


def generate_graph(
    config: GenConfig,
    dist: LayerTypeDistribution,
    threads: int = 1,
) -> GraphSample:
    """Sample the full superposition graph.

    Output is a pure function of (seed, config, dist); the thread count
    only partitions the per-layer work.
    """
    n, m = config.n, config.m
    if threads <= 1:
        chunks = [_generate_chunk(0, m, n, dist, config.seed, config.keep_layer_records)]
    else:
        bounds = np.linspace(0, m, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(
                    _generate_chunk, int(lo), int(hi), n, dist, config.seed,
                    config.keep_layer_records,
                )
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            chunks = [f.result() for f in futures]

    codes = [c for ck, _ in chunks for c in ck]
    if codes:
        uniq = np.unique(np.concatenate(codes))
        edges = np.stack([uniq // n + 1, uniq % n + 1], axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)

    records = None
    if config.keep_layer_records:
        records = [r for _, rk in chunks for r in rk]

    return GraphSample(n=n, edges=edges, m=m, seed=config.seed, layer_records=records)


def degrees(g: GraphSample) -> np.ndarray:
    """Distinct-neighbor counts per node; sums to twice the edge count."""
    d = np.bincount(g.edges[:, 0] - 1, minlength=g.n)
    d += np.bincount(g.edges[:, 1] - 1, minlength=g.n)
    return d


# -- edge-list files ------------------------------------------------------

def write_edge_list(g: GraphSample, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# superpose-net n={g.n} m={g.m} seed={g.seed}\n")
        for i, j in g.edges.tolist():
            fh.write(f"{i} {j}\n")


def read_edge_list(path) -> GraphSample:
    n = m = seed = None
    pairs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        key, _, val = tok.partition("=")
                        if key == "n":
                            n = int(val)
                        elif key == "m":
                            m = int(val) if val != "None" else None
                        elif key == "seed":
                            seed = int(val) if val != "None" else None
                continue
            i, j = map(int, line.split())
            pairs.append((min(i, j), max(i, j)))
    edges = np.array(sorted(set(pairs)), dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(edges.max()) if len(edges) else 0
    return GraphSample(n=n, edges=edges, m=m, seed=seed)


def write_layer_records(g: GraphSample, path) -> None:
    import json

    if g.layer_records is None:
        from .errors import MissingRecords

        raise MissingRecords("sample was generated without keep_layer_records")
    with open(path, "w") as fh:
        for rec in g.layer_records:
            fh.write(json.dumps({
                "size": rec.layer_type.size,
                "strength": rec.layer_type.strength,
                "nodes": rec.nodes.tolist(),
                "edges": rec.edges.tolist(),
            }) + "\n")
