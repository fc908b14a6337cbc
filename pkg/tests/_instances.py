"""Named reference instances and seeded random instance builders."""

from __future__ import annotations

import random

import networkx as nx

from fairmatch.model import ClassConstraint, Instance
from fairmatch.reductions import mis_to_cmm


def inst_a(weights=None) -> Instance:
    """Three items on one platform; C1 = {a1, a2} and C2 = {a2, a3} cross."""
    e = [("a1", "p"), ("a2", "p"), ("a3", "p")]
    return Instance(
        items=["a1", "a2", "a3"],
        platforms=["p"],
        edges=e,
        platform_quota={"p": 3},
        platform_classes=[ClassConstraint("C1", "p", e[:2], 1), ClassConstraint("C2", "p", e[1:], 1)],
        edge_weight=weights,
    )


def inst_b() -> Instance:
    return mis_to_cmm(nx.complete_graph(3))[0]


def inst_c() -> Instance:
    e = [("a1", "p"), ("a2", "p"), ("a3", "p")]
    return Instance(
        items=["a1", "a2", "a3"],
        platforms=["p"],
        edges=e,
        platform_quota={"p": 2},
        platform_classes=[ClassConstraint("big", "p", e, 2), ClassConstraint("small", "p", e[:2], 1)],
    )


def inst_d() -> Instance:
    return Instance(
        items=["a1", "a2"],
        platforms=["p1", "p2"],
        edges=[("a1", "p1"), ("a1", "p2"), ("a2", "p1")],
        platform_quota={"p1": 1, "p2": 1},
    )


def inst_e() -> Instance:
    return Instance(
        items=["a1", "a2"],
        platforms=["p1", "p2"],
        edges=[("a1", "p1"), ("a1", "p2"), ("a2", "p1")],
        platform_quota={"p1": 1, "p2": 1},
    )


# --------------------------------------------------------------------------
# random instances


def _compatible(x, y):
    return not (x & y) or x <= y or y <= x


def laminar_family(rng: random.Random, universe: list, n_classes: int) -> list[frozenset]:
    """Up to ``n_classes`` distinct nonempty sets over ``universe``, pairwise nested or disjoint."""
    out: list[frozenset] = []
    if not universe:
        return out
    for _ in range(n_classes * 8):
        if len(out) == n_classes:
            break
        perm = universe[:]
        rng.shuffle(perm)
        size = rng.randint(1, len(universe))
        cand = frozenset(perm[:size])
        if cand not in out and all(_compatible(cand, s) for s in out):
            out.append(cand)
    return out


def random_sets(rng: random.Random, universe: list, n_classes: int) -> list[frozenset]:
    out = []
    for _ in range(n_classes):
        if not universe:
            break
        k = rng.randint(1, len(universe))
        out.append(frozenset(rng.sample(universe, k)))
    return out


def _classes(rng, owner, universe, laminar, families, per_family, tag):
    sets = []
    if laminar:
        sets = laminar_family(rng, universe, per_family)
    else:
        for _ in range(families):
            sets.extend(laminar_family(rng, universe, per_family))
    out = []
    for k, s in enumerate(sets):
        q = rng.choice([0, 1, 1, 1, 2, 2, len(s)]) if rng.random() < 0.9 else rng.randint(0, len(s) + 1)
        out.append(ClassConstraint(f"{owner}:{tag}{k}", owner, sorted(s), min(q, len(s) + 1)))
    return out


def random_instance(seed: int, *, n_items=(2, 8), n_platforms=(1, 3), max_edges=20, model=1,
                    laminar=True, families=2, per_family=3, item_families=1,
                    weighted=False) -> Instance:
    """Seeded random CMM instance.

    ``model=1``: item quota 1, no item classes. ``model=2``: item quotas up to
    the degree and item classes. With ``laminar=False`` each owner's classes
    are the union of ``families`` independent laminar families (so they may
    cross).
    """
    rng = random.Random(seed)
    n = rng.randint(*n_items) if isinstance(n_items, tuple) else n_items
    m = rng.randint(*n_platforms) if isinstance(n_platforms, tuple) else n_platforms
    items = [f"a{i}" for i in range(n)]
    plats = [f"p{j}" for j in range(m)]
    edges = []
    for a in items:
        k = rng.randint(0 if rng.random() < 0.1 else 1, m)
        for p in sorted(rng.sample(plats, k)):
            edges.append((a, p))
    rng.shuffle(edges)
    edges = edges[:max_edges]
    by_p = {p: [e for e in edges if e[1] == p] for p in plats}
    by_a = {a: [e for e in edges if e[0] == a] for a in items}
    pq = {p: rng.randint(0, len(by_p[p]) + 1) if rng.random() < 0.3 else max(1, len(by_p[p]) - rng.randint(0, 2))
          for p in plats}
    pcs = []
    for p in plats:
        pcs += _classes(rng, p, by_p[p], laminar, families, per_family, "C")
    iq = {a: 1 for a in items}
    ics = []
    if model == 2:
        iq = {a: rng.randint(1, max(1, len(by_a[a]))) for a in items}
        for a in items:
            ics += _classes(rng, a, by_a[a], laminar, item_families, 2, "K")
    w = None
    if weighted:
        w = {e: rng.choice([1, 1, 2, 3, 5]) for e in edges}
    return Instance(items=items, platforms=plats, edges=edges, platform_quota=pq, item_quota=iq,
                    platform_classes=pcs, item_classes=ics, edge_weight=w)


def single_platform_instance(seed: int, *, n_items=(1, 12), max_classes=4) -> Instance:
    """One platform, arbitrary (possibly crossing) classes."""
    rng = random.Random(seed)
    n = rng.randint(*n_items)
    items = [f"a{i}" for i in range(n)]
    edges = [(a, "p") for a in items]
    pcs = []
    for k, s in enumerate(random_sets(rng, edges, rng.randint(0, max_classes))):
        pcs.append(ClassConstraint(f"C{k}", "p", sorted(s), rng.randint(0, max(1, len(s) - 1))))
    return Instance(items=items, platforms=["p"], edges=edges,
                    platform_quota={"p": rng.randint(0, n + 1)}, platform_classes=pcs)
