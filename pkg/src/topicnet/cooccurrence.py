"""Co-occurrence counting over topic bags and cosine-normalized topic networks."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations


class CountConsistencyError(ValueError):
    pass


class EmptyCoreError(ValueError):
    pass


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass
class CooccurrenceCounts:
    diag: dict[str, int] = field(default_factory=dict)
    pair: dict[tuple[str, str], int] = field(default_factory=dict)
    n_papers: int = 0

    @property
    def n_topics(self) -> int:
        return len(self.diag)

    def merge(self, other: "CooccurrenceCounts") -> "CooccurrenceCounts":
        diag = Counter(self.diag)
        diag.update(other.diag)
        pair = Counter(self.pair)
        pair.update(other.pair)
        return CooccurrenceCounts(dict(diag), dict(pair), self.n_papers + other.n_papers)


@dataclass
class TopicNetwork:
    """Undirected weighted graph over topic codes.

    ``edges`` is keyed by sorted endpoint pairs; ``diag`` carries the per-topic
    paper counts the weights were normalized with (empty for derived networks).
    """

    nodes: tuple[str, ...]
    edges: dict[tuple[str, str], float]
    diag: dict[str, int] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    labels: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = tuple(sorted(set(self.nodes)))
        nodeset = set(self.nodes)
        for (a, b), w in self.edges.items():
            if a == b:
                raise ValueError(f"self-edge on {a}")
            if a > b:
                raise ValueError(f"edge key {(a, b)} not sorted")
            if a not in nodeset or b not in nodeset:
                raise ValueError(f"edge {(a, b)} endpoint not in node set")

    @property
    def label(self) -> str:
        return self.provenance.get("label", "network")

    def label_of(self, node: str) -> str:
        return self.labels.get(node, node)

    def weight(self, a: str, b: str) -> float:
        return self.edges.get(edge_key(a, b), 0.0)

    def degree(self) -> dict[str, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def total_weight(self) -> float:
        return math.fsum(self.edges.values())

    def sorted_edges(self):
        return sorted(self.edges.items())

    def subgraph(self, keep) -> "TopicNetwork":
        keep = set(keep)
        return TopicNetwork(
            nodes=tuple(n for n in self.nodes if n in keep),
            edges={k: w for k, w in self.edges.items() if k[0] in keep and k[1] in keep},
            diag={n: c for n, c in self.diag.items() if n in keep},
            provenance=dict(self.provenance),
            labels={n: l for n, l in self.labels.items() if n in keep},
        )


def count(bags) -> CooccurrenceCounts:
    diag: Counter = Counter()
    pair: Counter = Counter()
    n = 0
    for bag in bags:
        topics = sorted(set(bag.topics))
        n += 1
        diag.update(topics)
        pair.update(combinations(topics, 2))
    return CooccurrenceCounts(dict(diag), dict(pair), n)


def normalize(counts: CooccurrenceCounts, provenance: dict | None = None) -> TopicNetwork:
    """Cosine-normalize co-occurrence counts: w_ij = c_ij / sqrt(c_ii * c_jj)."""
    edges = {}
    for (a, b), cij in counts.pair.items():
        if a == b:
            raise CountConsistencyError(f"pair key {(a, b)} is a self pair")
        cii, cjj = counts.diag.get(a, 0), counts.diag.get(b, 0)
        if cij < 0 or cij > min(cii, cjj):
            raise CountConsistencyError(
                f"c[{a},{b}]={cij} exceeds min(c[{a}]={cii}, c[{b}]={cjj})"
            )
        if cij == 0:
            continue
        edges[edge_key(a, b)] = cij / math.sqrt(cii * cjj)
    nodes = tuple(n for n, c in counts.diag.items() if c > 0)
    prov = {"papers": counts.n_papers, "observed_nodes": len(nodes)}
    prov.update(provenance or {})
    return TopicNetwork(nodes, edges, {n: counts.diag[n] for n in nodes}, prov)


def build_network(bags, **provenance) -> TopicNetwork:
    return normalize(count(bags), provenance)


def extract_core(nets, policy: str = "intersection") -> list[TopicNetwork]:
    """Drop isolated nodes.

    ``per-network``: each network loses its own degree-0 nodes.
    ``intersection``: keep only nodes that are non-isolated in every network,
    repeated until no kept node is isolated in any network, so all outputs
    share one node set.
    """
    nets = list(nets)
    if not nets:
        raise ValueError("extract_core needs at least one network")
    if policy == "per-network":
        out = []
        for net in nets:
            deg = net.degree()
            core = net.subgraph(n for n in net.nodes if deg[n] > 0)
            if not core.nodes:
                raise EmptyCoreError(f"core of {net.label} is empty")
            out.append(core)
    elif policy == "intersection":
        keep = set(nets[0].nodes)
        for net in nets[1:]:
            keep &= set(net.nodes)
        while True:
            subs = [net.subgraph(keep) for net in nets]
            new_keep = set(keep)
            for sub in subs:
                deg = sub.degree()
                new_keep = {n for n in new_keep if deg[n] > 0}
            if new_keep == keep:
                break
            keep = new_keep
        if not keep:
            raise EmptyCoreError("intersection core is empty")
        out = subs
    else:
        raise ValueError(f"unknown core policy {policy!r}")
    for net, core in zip(nets, out):
        core.provenance["core_policy"] = policy
        core.provenance["pre_core_nodes"] = len(net.nodes)
    return out
