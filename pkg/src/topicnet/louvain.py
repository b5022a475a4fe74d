"""Weighted modularity and seeded Louvain community detection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cooccurrence import TopicNetwork


@dataclass
class CommunityPartition:
    assignment: dict[str, int]
    quality: float
    seed: int | None = None

    def communities(self) -> list[list[str]]:
        groups: dict[int, list[str]] = {}
        for node in sorted(self.assignment):
            groups.setdefault(self.assignment[node], []).append(node)
        return [groups[c] for c in sorted(groups)]


def modularity(net: TopicNetwork, assignment) -> float:
    """Newman-Girvan weighted modularity at resolution 1.

    Q = sum_c [ in_c / 2m - (tot_c / 2m)^2 ], where in_c counts each internal
    edge twice and tot_c is the summed strength of the community's nodes.
    """
    missing = [n for n in net.nodes if n not in assignment]
    if missing:
        raise KeyError(f"nodes missing from assignment: {missing[:5]}")
    m = net.total_weight()
    if m <= 0:
        raise ValueError("modularity is undefined for a network without edge weight")
    internal: dict[int, list[float]] = {}
    total: dict[int, list[float]] = {}
    for (a, b), w in net.edges.items():
        ca, cb = assignment[a], assignment[b]
        total.setdefault(ca, []).append(w)
        total.setdefault(cb, []).append(w)
        if ca == cb:
            internal.setdefault(ca, []).extend((w, w))
    two_m = 2.0 * m
    terms = []
    for c, ws in total.items():
        tot = math.fsum(ws)
        terms.append(math.fsum(internal.get(c, ())) / two_m - (tot / two_m) ** 2)
    return math.fsum(terms)


def _one_level(adj, loops, rng, m):
    """Local-move phase on one level graph. Returns (community of each node, moved?)."""
    n = len(adj)
    k = [math.fsum(nb.values()) + 2.0 * loops[i] for i, nb in enumerate(adj)]
    comm = list(range(n))
    tot = list(k)
    two_m = 2.0 * m
    any_move = False
    while True:
        moved = False
        for i in rng.permutation(n).tolist():
            ci = comm[i]
            ki = k[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                c = comm[j]
                links[c] = links.get(c, 0.0) + w
            tot[ci] -= ki
            # gain of inserting the isolated node into c, up to the common 1/m factor
            best = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki / two_m
            threshold = 1e-12 * ki
            for c, w_ic in links.items():
                gain = w_ic - tot[c] * ki / two_m
                if gain - best_gain > threshold:
                    best, best_gain = c, gain
            tot[best] += ki
            comm[i] = best
            if best != ci:
                moved = True
        if not moved:
            break
        any_move = True
    return comm, any_move


def _aggregate(adj, loops, comm):
    labels: dict[int, int] = {}
    for c in comm:
        labels.setdefault(c, len(labels))
    new_comm = [labels[c] for c in comm]
    size = len(labels)
    new_adj: list[dict[int, float]] = [{} for _ in range(size)]
    new_loops = [0.0] * size
    for i, nb in enumerate(adj):
        ci = new_comm[i]
        new_loops[ci] += loops[i]
        for j, w in nb.items():
            if j < i:
                continue
            cj = new_comm[j]
            if ci == cj:
                new_loops[ci] += w
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
                new_adj[cj][ci] = new_adj[cj].get(ci, 0.0) + w
    return new_adj, new_loops, new_comm


def louvain_partition(net: TopicNetwork, seed: int = 42) -> CommunityPartition:
    """Greedy Louvain modularity optimization.

    Node visit order in each local-move pass is a fresh permutation drawn from
    a generator seeded with ``seed``, so (network, seed) fixes the result.
    """
    if not net.edges:
        raise ValueError("louvain needs at least one edge")
    nodes = net.nodes
    index = {v: i for i, v in enumerate(nodes)}
    adj: list[dict[int, float]] = [{} for _ in nodes]
    for (a, b), w in net.sorted_edges():
        adj[index[a]][index[b]] = w
        adj[index[b]][index[a]] = w
    loops = [0.0] * len(nodes)
    m = net.total_weight()
    rng = np.random.default_rng(seed)

    membership = list(range(len(nodes)))
    while True:
        comm, moved = _one_level(adj, loops, rng, m)
        if not moved:
            break
        adj, loops, comm = _aggregate(adj, loops, comm)
        membership = [comm[c] for c in membership]

    # relabel by first appearance in sorted node order
    labels: dict[int, int] = {}
    assignment = {v: labels.setdefault(membership[i], len(labels)) for i, v in enumerate(nodes)}
    q = modularity(net, assignment)
    if q < 0:
        assignment = dict.fromkeys(nodes, 0)
        q = modularity(net, assignment)
    return CommunityPartition(assignment, q, seed)
