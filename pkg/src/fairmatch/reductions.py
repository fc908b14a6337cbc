"""Constructive maps from neighbouring problems into CMM, with decoders.

Each source problem also gets a direct exhaustive solver that never touches
CMM, so equivalence can be checked without going in circles.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import networkx as nx

from .approx import GmisInstance
from .model import Assignment, ClassConstraint, Instance, NotApplicable

PLATFORM = "p"


# --------------------------------------------------------------------------
# maximum independent set


def mis_to_cmm(graph: nx.Graph) -> tuple[Instance, Callable[[Assignment], set]]:
    """One item per vertex on a single platform; a quota-1 class per graph edge."""
    if any(u == v for u, v in graph.edges):
        raise ValueError("graph has a self loop")
    verts = list(graph.nodes)
    name = {v: str(v) for v in verts}
    if len(set(name.values())) != len(verts):
        raise ValueError("vertex labels collide after str()")
    back = {name[v]: v for v in verts}
    classes = [
        ClassConstraint(f"e{k}", PLATFORM, [(name[u], PLATFORM), (name[v], PLATFORM)], 1)
        for k, (u, v) in enumerate(graph.edges)
    ]
    inst = Instance(
        items=[name[v] for v in verts],
        platforms=[PLATFORM],
        edges=[(name[v], PLATFORM) for v in verts],
        platform_quota={PLATFORM: len(verts)},
        platform_classes=classes,
    )

    def decode(asg: Assignment) -> set:
        return {back[a] for a, _ in asg.matched}

    return inst, decode


def is_independent(graph: nx.Graph, chosen: Iterable) -> bool:
    chosen = set(chosen)
    return not any(u in chosen and v in chosen for u, v in graph.edges)


def mis_optimum(graph: nx.Graph) -> int:
    """Independence number via a maximum clique of the complement."""
    if graph.number_of_nodes() == 0:
        return 0
    _, size = nx.max_weight_clique(nx.complement(graph), weight=None)
    return size


def read_edge_list(text: str) -> nx.Graph:
    """One edge ``u v`` per line; a lone token declares an isolated vertex; ``#`` comments."""
    g = nx.Graph()
    for line in text.splitlines():
        line = line.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) == 1:
            g.add_node(line[0])
        elif len(line) == 2:
            g.add_edge(line[0], line[1])
        else:
            raise ValueError(f"bad edge line: {' '.join(line)!r}")
    return g


# --------------------------------------------------------------------------
# generalized independent sets on hypergraphs


def gmis_to_cmm(g: GmisInstance) -> tuple[Instance, Callable[[Assignment], set]]:
    """Vertices become items of one platform; hyperedges become classes."""
    name = {v: str(v) for v in g.vertices}
    if len(set(name.values())) != len(g.vertices):
        raise ValueError("vertex labels collide after str()")
    back = {name[v]: v for v in g.vertices}
    classes = [
        ClassConstraint(f"h{k}", PLATFORM, [(name[v], PLATFORM) for v in mem], cap)
        for k, (mem, cap) in enumerate(g.hyperedges)
        if mem
    ]
    inst = Instance(
        items=[name[v] for v in g.vertices],
        platforms=[PLATFORM],
        edges=[(name[v], PLATFORM) for v in g.vertices],
        platform_quota={PLATFORM: len(g.vertices)},
        platform_classes=classes,
        edge_weight=None if g.weights is None else {(name[v], PLATFORM): w for v, w in g.weights.items()},
    )

    def decode(asg: Assignment) -> set:
        return {back[a] for a, _ in asg.matched}

    return inst, decode


def cmm_to_gmis(inst: Instance) -> tuple[GmisInstance, dict]:
    """Single-platform CMM as a hypergraph over its items.

    Classes become hyperedges; the platform quota is added only when it binds
    (quota below the platform degree), and item-side rows only when they do.
    Multi-platform instances go through the edge-item reduction instead.
    """
    if len(inst.platforms) != 1:
        raise NotApplicable("cmm_to_gmis handles one platform; use edge_item_reduction")
    (p,) = inst.platforms
    edges = [e for e in inst.edges]
    vmap = {e: e[0] for e in edges}
    hyper = [(frozenset(vmap[e] for e in c.members), c.quota) for c in inst.platform_classes]
    if inst.platform_quota[p] < len(edges):
        hyper.append((frozenset(vmap.values()), inst.platform_quota[p]))
    for a, q in inst.item_quota.items():
        if q < 1 and any(e[0] == a for e in edges):
            hyper.append((frozenset([a]), q))
    for c in inst.item_classes:
        if c.quota < 1:
            hyper.append((frozenset(vmap[e] for e in c.members), c.quota))
    weights = None if inst.edge_weight is None else {vmap[e]: w for e, w in inst.edge_weight.items()}
    g = GmisInstance([vmap[e] for e in edges], hyper, weights)
    return g, vmap


def gmis_optimum(g: GmisInstance) -> tuple[Fraction, frozenset]:
    """Exhaustive optimum over all vertex subsets (small hypergraphs only)."""
    best = (Fraction(-1), frozenset())
    vs = list(g.vertices)
    for r in range(len(vs) + 1):
        for sub in itertools.combinations(vs, r):
            s = frozenset(sub)
            if g.is_feasible(s):
                val = g.value(s)
                if val > best[0]:
                    best = (val, s)
    return best


def load_gmis(data: dict) -> GmisInstance:
    return GmisInstance(
        data["vertices"],
        [(h["members"], h["capacity"]) for h in data["hyperedges"]],
        None if data.get("weights") is None else {v: Fraction(str(w)) for v, w in data["weights"].items()},
    )


# --------------------------------------------------------------------------
# fair ranking


@dataclass(frozen=True)
class RankingInstance:
    """Rank up to ``n`` of ``m`` items under prefix quotas per property.

    ``U[p][k-1]`` caps the number of items of property ``p`` in the top ``k``.
    ``W[i][j-1]`` is the value of item ``i`` at position ``j`` (1 if omitted).
    """

    m: int
    n: int
    properties: tuple
    U: tuple
    W: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "properties", tuple(frozenset(p) for p in self.properties))
        object.__setattr__(self, "U", tuple(tuple(u) for u in self.U))
        if self.W is not None:
            object.__setattr__(self, "W", tuple(tuple(Fraction(x) for x in row) for row in self.W))
        if not 0 <= self.n <= self.m:
            raise ValueError("need 0 <= n <= m")
        if len(self.U) != len(self.properties):
            raise ValueError("one quota row per property")
        for p, u in zip(self.properties, self.U):
            if len(u) != self.n or any(x < 0 for x in u) or any(a > b for a, b in zip(u, u[1:])):
                raise ValueError("each U row needs n nonnegative nondecreasing entries")
            if not all(0 <= i < self.m for i in p):
                raise ValueError("property mentions an unknown item")
        if self.W is not None and (len(self.W) != self.m or any(len(r) != self.n for r in self.W)):
            raise ValueError("W must be m x n")

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(1) if self.W is None else self.W[i][j - 1]


def _copy(i: int, j: int) -> str:
    return f"i{i}@{j}"


def ranking_to_cmm(r: RankingInstance) -> tuple[Instance, Callable[[Assignment], dict]]:
    """Item copies ``(i, j)`` on one platform.

    Classes: each item at most once, each position at most once, and per
    property a nested chain over the top-``j`` copies with quota ``U[p][j]``.
    The decoder returns ``{position: item}``, possibly with gaps.
    """
    copies = [(i, j) for i in range(r.m) for j in range(1, r.n + 1)]
    edge = {c: (_copy(*c), PLATFORM) for c in copies}
    classes = []
    for i in range(r.m):
        if r.n:
            classes.append(ClassConstraint(f"item{i}", PLATFORM, [edge[i, j] for j in range(1, r.n + 1)], 1))
    for j in range(1, r.n + 1):
        classes.append(ClassConstraint(f"pos{j}", PLATFORM, [edge[i, j] for i in range(r.m)], 1))
    for k, (prop, u) in enumerate(zip(r.properties, r.U)):
        for j in range(1, r.n + 1):
            mem = [edge[i, jj] for i in sorted(prop) for jj in range(1, j + 1)]
            if mem:
                classes.append(ClassConstraint(f"prop{k}@{j}", PLATFORM, mem, u[j - 1]))
    back = {edge[c][0]: c for c in copies}
    inst = Instance(
        items=[edge[c][0] for c in copies],
        platforms=[PLATFORM],
        edges=[edge[c] for c in copies],
        platform_quota={PLATFORM: r.n},
        platform_classes=classes,
        edge_weight=None if r.W is None else {edge[i, j]: r.value(i, j) for i, j in copies},
    )

    def decode(asg: Assignment) -> dict:
        out = {}
        for a, _ in asg.matched:
            i, j = back[a]
            out[j] = i
        return dict(sorted(out.items()))

    return inst, decode


def ranking_feasible(r: RankingInstance, ranking: dict) -> bool:
    """``ranking`` maps positions to distinct items and respects every prefix quota."""
    if any(not 1 <= j <= r.n for j in ranking):
        return False
    if len(set(ranking.values())) != len(ranking):
        return False
    for prop, u in zip(r.properties, r.U):
        count = 0
        for k in range(1, r.n + 1):
            if ranking.get(k) in prop:
                count += 1
            if count > u[k - 1]:
                return False
    return True


def ranking_value(r: RankingInstance, ranking: dict) -> Fraction:
    return sum((r.value(i, j) for j, i in ranking.items()), Fraction(0))


def ranking_optimum(r: RankingInstance) -> Fraction:
    """Best partial ranking by enumerating every position's choice (item or gap)."""
    best = Fraction(0)
    for choice in itertools.product([None, *range(r.m)], repeat=r.n):
        ranking = {j + 1: i for j, i in enumerate(choice) if i is not None}
        if ranking_feasible(r, ranking):
            best = max(best, ranking_value(r, ranking))
    return best


def load_ranking(data: dict) -> RankingInstance:
    return RankingInstance(data["m"], data["n"], data["properties"], data["U"], data.get("W"))


# --------------------------------------------------------------------------
# simultaneous matchings


@dataclass(frozen=True)
class SimMatchInstance:
    """Bipartite ``(X + D, E)`` and a family of subsets of ``X``."""

    X: tuple
    D: tuple
    edges: tuple
    family: tuple

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(self.X))
        object.__setattr__(self, "D", tuple(self.D))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "family", tuple(frozenset(c) for c in self.family))
        xs, ds = set(self.X), set(self.D)
        if xs & ds:
            raise ValueError("X and D must be disjoint")
        for x, d in self.edges:
            if x not in xs or d not in ds:
                raise ValueError(f"edge {(x, d)!r} leaves X x D")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edge")
        for c in self.family:
            if not c <= xs:
                raise ValueError("family member not a subset of X")


def simmatch_feasible(s: SimMatchInstance, M: Iterable) -> bool:
    """For every C in the family, the edges of M leaving C form a matching."""
    M = [tuple(e) for e in M]
    if not set(M) <= set(s.edges) or len(set(M)) != len(M):
        return False
    for c in s.family:
        sub = [(x, d) for x, d in M if x in c]
        xs = [x for x, _ in sub]
        ds = [d for _, d in sub]
        if len(set(xs)) != len(xs) or len(set(ds)) != len(ds):
            return False
    return True


def simmatch_optimum(s: SimMatchInstance) -> int:
    """Largest feasible edge set, by enumerating subsets from the top down."""
    for r in range(len(s.edges), -1, -1):
        for sub in itertools.combinations(s.edges, r):
            if simmatch_feasible(s, sub):
                return r
    return 0


def simmatch_to_cmm(s: SimMatchInstance) -> tuple[Instance, Callable[[Assignment], set]]:
    """Items are ``X``, platforms are ``D``.

    Platform ``d`` gets a quota-1 class ``(C & N(d)) x {d}`` for every ``C`` in
    the family. Item ``x`` gets a quota-1 class over all its edges for every
    ``C`` containing it. Quotas are the degrees, so they never bind.
    """
    nbr_d = {d: [x for x, dd in s.edges if dd == d] for d in s.D}
    nbr_x = {x: [d for xx, d in s.edges if xx == x] for x in s.X}
    pcs, ics = [], []
    for k, c in enumerate(s.family):
        for d in s.D:
            mem = [(x, d) for x in nbr_d[d] if x in c]
            if mem:
                pcs.append(ClassConstraint(f"{d}:F{k}", d, mem, 1))
        for x in s.X:
            if x in c and nbr_x[x]:
                ics.append(ClassConstraint(f"{x}:F{k}", x, [(x, d) for d in nbr_x[x]], 1))
    inst = Instance(
        items=s.X,
        platforms=s.D,
        edges=s.edges,
        platform_quota={d: len(nbr_d[d]) for d in s.D},
        item_quota={x: len(nbr_x[x]) for x in s.X},
        platform_classes=pcs,
        item_classes=ics,
    )

    def decode(asg: Assignment) -> set:
        return set(asg.matched)

    return inst, decode


def load_simmatch(data: dict) -> SimMatchInstance:
    return SimMatchInstance(data["X"], data["D"], data["edges"], data["family"])


def reduce_file(kind: str, text: str) -> Instance:
    """Parse a source-problem file and return its CMM instance."""
    if kind == "mis":
        return mis_to_cmm(read_edge_list(text))[0]
    data = json.loads(text)
    if kind == "gmis":
        return gmis_to_cmm(load_gmis(data))[0]
    if kind == "ranking":
        return ranking_to_cmm(load_ranking(data))[0]
    if kind == "simmatch":
        return simmatch_to_cmm(load_simmatch(data))[0]
    raise ValueError(f"unknown source problem {kind!r}")
