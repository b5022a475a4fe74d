"""Absolute-difference networks between two strata and the analyses run on
them: node and category rankings, and the link-adjacency regression."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats as sps

from .cooccurrence import TopicNetwork
from .mesh import MeshTaxonomy, first_level_parent
from .metrics import node_strengths
from .rollup import rank, rollup


class NodeSetMismatch(ValueError):
    def __init__(self, only_a, only_b):
        self.only_a = sorted(only_a)
        self.only_b = sorted(only_b)
        super().__init__(
            f"node sets differ: only in first {self.only_a}; only in second {self.only_b}"
        )


def diff(a: TopicNetwork, b: TopicNetwork) -> TopicNetwork:
    """Network with weights |w_a - w_b|, missing edges read as 0, zeros dropped."""
    if set(a.nodes) != set(b.nodes):
        raise NodeSetMismatch(set(a.nodes) - set(b.nodes), set(b.nodes) - set(a.nodes))
    edges = {}
    for key in set(a.edges) | set(b.edges):
        w = abs(a.edges.get(key, 0.0) - b.edges.get(key, 0.0))
        if w != 0.0:
            edges[key] = w
    sources = sorted([a.label, b.label])
    prov = {"label": f"Diff({sources[0]},{sources[1]})", "sources": sources}
    for k in ("year",):
        if k in a.provenance and a.provenance.get(k) == b.provenance.get(k):
            prov[k] = a.provenance[k]
    return TopicNetwork(a.nodes, dict(sorted(edges.items())), {}, prov, dict(a.labels))


def adjacency_points(net: TopicNetwork) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) = (w_e, w_e') for every ordered pair of distinct links sharing a node."""
    incident: dict[str, list[float]] = {n: [] for n in net.nodes}
    for (a, b), w in net.sorted_edges():
        incident[a].append(w)
        incident[b].append(w)
    xs, ys = [], []
    for node in net.nodes:
        ws = incident[node]
        for i, wi in enumerate(ws):
            for j, wj in enumerate(ws):
                if i != j:
                    xs.append(wi)
                    ys.append(wj)
    return np.array(xs), np.array(ys)


@dataclass
class Bin:
    center: float
    mean: float
    sem: float | None
    count: int


@dataclass
class AdjacencyRegression:
    slope: float
    intercept: float
    r_squared: float
    p_value: float
    n_pairs: int
    bins: list[Bin] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def regress_points(x, y) -> tuple[float, float, float, float]:
    """OLS of y on x. Returns (slope, intercept, r_squared, two-sided p for slope)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 2:
        raise ValueError("need at least 2 points")
    if x.min() == x.max():
        raise ValueError("all x values identical; slope undefined")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    sxy = float(dx @ dy)
    syy = float(dy @ dy)
    slope = sxy / sxx
    intercept = float(ym - slope * xm)
    resid = dy - slope * dx
    sse = float(resid @ resid)
    if syy == 0.0 or sse <= syy * 1e-30:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - sse / syy))
    if n <= 2 or sse == 0.0:
        p = 0.0 if n > 2 else 1.0
    else:
        se = math.sqrt(sse / (n - 2) / sxx)
        t = slope / se
        p = float(2.0 * sps.t.sf(abs(t), n - 2))
    return slope, intercept, r2, p


def bin_points(x, y, n_bins: int = 20) -> list[Bin]:
    """Equal-width bins over [min x, max x] (top edge closed); empty bins omitted."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = float(x.min()), float(x.max())
    edges = np.linspace(lo, hi, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, n_bins - 1)
    out = []
    for b in range(n_bins):
        sel = y[idx == b]
        if not len(sel):
            continue
        sem = float(sel.std(ddof=1) / math.sqrt(len(sel))) if len(sel) > 1 else None
        out.append(Bin(float((edges[b] + edges[b + 1]) / 2), float(sel.mean()), sem, len(sel)))
    return out


def adjacency_regression(net: TopicNetwork, n_bins: int = 20) -> AdjacencyRegression:
    x, y = adjacency_points(net)
    if len(x) < 2:
        raise ValueError("need at least 2 adjacent link pairs")
    slope, intercept, r2, p = regress_points(x, y)
    return AdjacencyRegression(slope, intercept, r2, p, len(x), bin_points(x, y, n_bins))


@dataclass
class NodeRank:
    code: str
    label: str
    strength: float
    parent: str
    parent_label: str


def diff_node_ranking(net: TopicNetwork, k: int = 5, tax: MeshTaxonomy | None = None) -> list[NodeRank]:
    strengths = node_strengths(net)
    ranked = sorted(((c, s) for c, s in strengths.items() if s > 0), key=lambda cs: (-cs[1], cs[0]))
    out = []
    for code, s in ranked[:k]:
        parent = first_level_parent(code)
        out.append(NodeRank(
            code,
            tax.label(code) if tax else code,
            s,
            parent,
            tax.label(parent) if tax else parent,
        ))
    return out


def diff_community_ranking(net: TopicNetwork, k: int = 3, inter_mode: str = "full") -> dict[str, list[tuple[str, float]]]:
    roll = rollup(net, inter_mode=inter_mode)
    return {key: rank(roll, key, k) for key in ("total", "intra", "inter")}
