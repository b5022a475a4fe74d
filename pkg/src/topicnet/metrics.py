"""Weighted network measures: node strength, betweenness and shortest paths
under edge length 1/w, intensity-based clustering, and the global summary."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from heapq import heappop, heappush

import numpy as np

from .cooccurrence import TopicNetwork
from .louvain import CommunityPartition, louvain_partition, modularity

__all__ = [
    "GlobalMeasures",
    "NodeMeasures",
    "PathStatistics",
    "node_strengths",
    "path_statistics",
    "weighted_betweenness",
    "average_shortest_path_length",
    "distance_matrix",
    "weighted_gcc",
    "local_clustering",
    "modularity",
    "louvain_partition",
    "compute_measures",
]


class NoReachablePairs(ValueError):
    pass


def node_strengths(net: TopicNetwork) -> dict[str, float]:
    incident: dict[str, list[float]] = {n: [] for n in net.nodes}
    for (a, b), w in net.edges.items():
        incident[a].append(w)
        incident[b].append(w)
    return {n: math.fsum(ws) for n, ws in incident.items()}


def _length_adjacency(net: TopicNetwork) -> list[list[tuple[int, float]]]:
    index = {n: i for i, n in enumerate(net.nodes)}
    adj: list[list[tuple[int, float]]] = [[] for _ in net.nodes]
    for (a, b), w in net.sorted_edges():
        if not w > 0:
            raise ValueError(f"nonpositive weight {w} on edge {(a, b)}")
        length = 1.0 / w
        adj[index[a]].append((index[b], length))
        adj[index[b]].append((index[a], length))
    return adj


def _single_source(adj, s):
    """Dijkstra from s with exact shortest-path counting.

    Returns (dist, sigma, dependency) where dependency[v] is the Brandes pair
    dependency of s on v. Ties are exact float equality.
    """
    n = len(adj)
    inf = math.inf
    dist = [inf] * n
    sigma = [0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    done = [False] * n
    order = []
    dist[s] = 0.0
    sigma[s] = 1
    heap = [(0.0, s)]
    while heap:
        d, v = heappop(heap)
        if done[v]:
            continue
        done[v] = True
        order.append(v)
        sv = sigma[v]
        for w, length in adj[v]:
            if done[w]:
                continue
            alt = d + length
            cur = dist[w]
            if alt < cur:
                dist[w] = alt
                sigma[w] = sv
                preds[w] = [v]
                heappush(heap, (alt, w))
            elif alt == cur:
                sigma[w] += sv
                preds[w].append(v)
    delta = [0.0] * n
    for w in reversed(order):
        coeff = (1.0 + delta[w]) / sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] * coeff
    delta[s] = 0.0
    return dist, sigma, delta


def _source_chunk(args):
    adj, sources = args
    return [_single_source(adj, s)[::2] for s in sources]


@dataclass
class PathStatistics:
    nodes: tuple[str, ...]
    dist: np.ndarray  # row s holds distances computed from source s
    dependency: np.ndarray  # summed over ordered (s, t) pairs, i.e. 2x undirected

    def component_sizes(self) -> np.ndarray:
        return np.isfinite(self.dist).sum(axis=1)


def path_statistics(net: TopicNetwork, workers: int = 1) -> PathStatistics:
    """All-sources Dijkstra pass shared by betweenness and ASPL.

    Per-source results are reduced in source order, so the output does not
    depend on ``workers``.
    """
    adj = _length_adjacency(net)
    n = len(adj)
    sources = list(range(n))
    if workers > 1 and n > 1:
        size = math.ceil(n / workers)
        chunks = [(adj, sources[i:i + size]) for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_source_chunk, chunks) for r in part]
    else:
        results = _source_chunk((adj, sources))
    dist = np.full((n, n), np.inf)
    dep = [0.0] * n
    for s, (row, delta) in enumerate(results):
        dist[s] = row
        for v in range(n):
            dep[v] += delta[v]
    return PathStatistics(tuple(net.nodes), dist, np.array(dep))


def weighted_betweenness(
    net: TopicNetwork,
    normalization: str = "graph",
    workers: int = 1,
    stats: PathStatistics | None = None,
) -> dict[str, float]:
    """Betweenness under edge length 1/w, normalized by 2/((n-1)(n-2)).

    ``normalization="graph"`` uses the node count of the whole network;
    ``"component"`` uses the size of each node's connected component.
    """
    stats = stats or path_statistics(net, workers)
    n = len(net.nodes)
    if normalization == "graph":
        sizes = np.full(n, n)
    elif normalization == "component":
        sizes = stats.component_sizes()
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    out = {}
    for i, node in enumerate(net.nodes):
        k = int(sizes[i])
        # dependency is summed over ordered pairs: halve, then scale by 2/((k-1)(k-2))
        out[node] = float(stats.dependency[i]) / ((k - 1) * (k - 2)) if k > 2 else 0.0
    return out


def distance_matrix(net: TopicNetwork, workers: int = 1) -> np.ndarray:
    return path_statistics(net, workers).dist


def average_shortest_path_length(
    net: TopicNetwork, workers: int = 1, stats: PathStatistics | None = None
) -> tuple[float, int]:
    """Mean distance over reachable unordered pairs, plus the unreachable count."""
    stats = stats or path_statistics(net, workers)
    iu = np.triu_indices(len(net.nodes), k=1)
    upper = stats.dist[iu]
    reachable = np.isfinite(upper)
    if not reachable.any():
        raise NoReachablePairs("no reachable node pairs")
    return math.fsum(upper[reachable].tolist()) / int(reachable.sum()), int((~reachable).sum())


def local_clustering(net: TopicNetwork) -> dict[str, float]:
    """Intensity-based local clustering for nodes with degree >= 2.

    C_i = sum over ordered neighbour pairs (j, h) of (w_ij w_jh w_hi)^(1/3)
    divided by k_i (k_i - 1), with weights scaled by the network maximum.
    """
    n = len(net.nodes)
    index = {v: i for i, v in enumerate(net.nodes)}
    W = np.zeros((n, n))
    for (a, b), w in net.edges.items():
        W[index[a], index[b]] = W[index[b], index[a]] = w
    if not net.edges:
        return {}
    C = np.cbrt(W / W.max())
    cycles = np.einsum("ij,jk,ki->i", C, C, C)
    k = (W > 0).sum(axis=1)
    return {
        v: float(cycles[i] / (k[i] * (k[i] - 1)))
        for v, i in index.items()
        if k[i] >= 2
    }


def weighted_gcc(net: TopicNetwork) -> float:
    local = local_clustering(net)
    if not local:
        raise ValueError("no node with degree >= 2")
    return math.fsum(local.values()) / len(local)


@dataclass
class NodeMeasures:
    strength: dict[str, float]
    betweenness: dict[str, float]


@dataclass
class GlobalMeasures:
    avg_node_strength: float
    link_count: int
    modularity: float
    weighted_gcc: float
    aspl: float
    unreachable_pairs: int

    def as_dict(self) -> dict:
        return asdict(self)


def compute_measures(
    net: TopicNetwork,
    seed: int = 42,
    workers: int = 1,
    normalization: str = "graph",
) -> tuple[GlobalMeasures, NodeMeasures, CommunityPartition]:
    strength = node_strengths(net)
    stats = path_statistics(net, workers)
    betweenness = weighted_betweenness(net, normalization, stats=stats)
    aspl, unreachable = average_shortest_path_length(net, stats=stats)
    partition = louvain_partition(net, seed)
    measures = GlobalMeasures(
        avg_node_strength=math.fsum(strength.values()) / len(strength),
        link_count=len(net.edges),
        modularity=partition.quality,
        weighted_gcc=weighted_gcc(net),
        aspl=aspl,
        unreachable_pairs=unreachable,
    )
    return measures, NodeMeasures(strength, betweenness), partition
