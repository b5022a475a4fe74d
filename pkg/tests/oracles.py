"""Random test networks and slow, independent reference implementations."""

import math
import random

import numpy as np

from topicnet.cooccurrence import TopicNetwork

DYADIC = (1.0, 0.5, 0.25, 0.125)


def random_network(seed, n_max=8, dyadic=None, connected=False, n_min=3):
    """Seeded random weighted graph on nodes N0..N{n-1}.

    Dyadic weights make 1/w lengths small integers, so equal-length routes
    (shortest-path ties) are common and exact.
    """
    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    p = rng.uniform(0.25, 0.9)
    if dyadic is None:
        dyadic = rng.random() < 0.5
    nodes = [f"N{i:02d}" for i in range(n)]
    edges = {}
    order = list(range(n))
    rng.shuffle(order)
    pick = (lambda: rng.choice(DYADIC)) if dyadic else (lambda: rng.uniform(0.02, 1.0))
    if connected:
        for a, b in zip(order, order[1:]):
            u, v = sorted((nodes[a], nodes[b]))
            edges[(u, v)] = pick()
    for i in range(n):
        for j in range(i + 1, n):
            if (nodes[i], nodes[j]) not in edges and rng.random() < p:
                edges[(nodes[i], nodes[j])] = pick()
    if not edges:
        edges[(nodes[0], nodes[1])] = pick()
    return TopicNetwork(tuple(nodes), edges, provenance={"label": f"rand{seed}"})


def simple_paths(net, s, t):
    adj = {v: [] for v in net.nodes}
    for (a, b), w in net.edges.items():
        adj[a].append((b, w))
        adj[b].append((a, w))
    out = []

    def walk(v, path, length):
        if v == t:
            out.append((length, tuple(path)))
            return
        for u, w in adj[v]:
            if u not in path:
                path.append(u)
                walk(u, path, length + 1.0 / w)
                path.pop()

    walk(s, [s], 0.0)
    return out


def brute_paths(net):
    """Enumerate every simple path for every ordered pair.

    Lengths accumulate left to right from the source. Returns
    (dist, sigma, betweenness) with betweenness normalized by (n-1)(n-2)
    over ordered pairs (equivalently 2/((n-1)(n-2)) over unordered ones).
    """
    nodes = net.nodes
    n = len(nodes)
    dist, sigma = {}, {}
    credit = dict.fromkeys(nodes, 0.0)
    for s in nodes:
        for t in nodes:
            if s == t:
                continue
            paths = simple_paths(net, s, t)
            if not paths:
                dist[s, t] = math.inf
                sigma[s, t] = 0
                continue
            best = min(length for length, _ in paths)
            shortest = [p for length, p in paths if length == best]
            dist[s, t] = best
            sigma[s, t] = len(shortest)
            for p in shortest:
                for v in p[1:-1]:
                    credit[v] += 1.0 / len(shortest)
    norm = (n - 1) * (n - 2)
    between = {v: (credit[v] / norm if n > 2 else 0.0) for v in nodes}
    return dist, sigma, between


def floyd_warshall(net):
    idx = {v: i for i, v in enumerate(net.nodes)}
    n = len(idx)
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for (a, b), w in net.edges.items():
        d[idx[a], idx[b]] = d[idx[b], idx[a]] = 1.0 / w
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


def modularity_oracle(net, assignment):
    """Matrix form: Q = (1/2m) sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j)."""
    idx = {v: i for i, v in enumerate(net.nodes)}
    n = len(idx)
    A = np.zeros((n, n))
    for (a, b), w in net.edges.items():
        A[idx[a], idx[b]] = A[idx[b], idx[a]] = w
    k = A.sum(axis=1)
    two_m = A.sum()
    same = np.array([[assignment[u] == assignment[v] for v in net.nodes] for u in net.nodes])
    return float(((A - np.outer(k, k) / two_m) * same).sum() / two_m)


def ols_oracle(x, y):
    """Closed-form least squares via numpy lstsq."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    X = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = ((y - y.mean()) ** 2).sum()
    r2 = 1.0 - (resid ** 2).sum() / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def two_block(seed, size=10, bridge=0.01):
    """Two unit-weight cliques joined by a single light edge; node names shuffled."""
    rng = random.Random(seed)
    names = [f"T{i:02d}" for i in range(2 * size)]
    rng.shuffle(names)
    left, right = names[:size], names[size:]
    edges = {}
    for block in (left, right):
        for i in range(size):
            for j in range(i + 1, size):
                edges[tuple(sorted((block[i], block[j])))] = 1.0
    edges[tuple(sorted((rng.choice(left), rng.choice(right))))] = bridge
    return TopicNetwork(tuple(names), edges), set(left), set(right)


def relabel(net, mapping):
    edges = {tuple(sorted((mapping[a], mapping[b]))): w for (a, b), w in net.edges.items()}
    return TopicNetwork(tuple(mapping[v] for v in net.nodes), edges)


def scale(net, c):
    return TopicNetwork(net.nodes, {k: c * w for k, w in net.edges.items()})
