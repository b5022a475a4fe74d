"""Aggregate link strength to first-level categories, split into intra- and
inter-category parts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cooccurrence import TopicNetwork
from .mesh import first_level_parent


@dataclass
class CategoryStrength:
    total: float
    intra: float
    inter: float


@dataclass
class CommunityRollup:
    categories: dict[str, CategoryStrength] = field(default_factory=dict)
    inter_mode: str = "full"

    def __getitem__(self, code: str) -> CategoryStrength:
        return self.categories[code]

    def __iter__(self):
        return iter(sorted(self.categories))

    def value(self, code: str, key: str) -> float:
        return getattr(self.categories[code], key)


def rollup(net: TopicNetwork, parent=first_level_parent, inter_mode: str = "full") -> CommunityRollup:
    """Per-category strength.

    An edge inside category c adds w once to intra(c). An edge between c and d
    adds w to inter(c) and inter(d) (``inter_mode="full"``) or w/2 to each
    (``"half"``). total = intra + inter.
    """
    if inter_mode not in ("full", "half"):
        raise ValueError(f"unknown inter_mode {inter_mode!r}")
    share = 1.0 if inter_mode == "full" else 0.5
    intra: dict[str, list[float]] = {}
    inter: dict[str, list[float]] = {}
    for node in net.nodes:
        c = parent(node)
        intra.setdefault(c, [])
        inter.setdefault(c, [])
    for (a, b), w in net.edges.items():
        ca, cb = parent(a), parent(b)
        if ca == cb:
            intra[ca].append(w)
        else:
            inter[ca].append(w * share)
            inter[cb].append(w * share)
    cats = {}
    for c in intra:
        s_in, s_out = math.fsum(intra[c]), math.fsum(inter[c])
        cats[c] = CategoryStrength(s_in + s_out, s_in, s_out)
    return CommunityRollup(cats, inter_mode)


def rank(roll: CommunityRollup, key: str = "total", k: int = 3) -> list[tuple[str, float]]:
    """Top-k categories by descending value, ties broken by code."""
    if key not in ("total", "intra", "inter"):
        raise ValueError(f"unknown rollup key {key!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    items = [(c, roll.value(c, key)) for c in roll.categories]
    items.sort(key=lambda cv: (-cv[1], cv[0]))
    return items[:k]
