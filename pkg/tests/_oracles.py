"""Reference implementations written straight from the definitions.

None of these use the compiled row form or any solver from the package.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction


def naive_feasible(inst, matched) -> bool:
    matched = set(map(tuple, matched))
    if not matched <= set(inst.edges):
        return False
    per_p = Counter(p for _, p in matched)
    per_a = Counter(a for a, _ in matched)
    if any(per_p[p] > inst.platform_quota[p] for p in inst.platforms):
        return False
    if any(per_a[a] > inst.item_quota[a] for a in inst.items):
        return False
    for c in list(inst.platform_classes) + list(inst.item_classes):
        if len(matched & c.members) > c.quota:
            return False
    return True


def naive_value(inst, matched) -> Fraction:
    if inst.edge_weight is None:
        return Fraction(len(matched))
    return sum((Fraction(inst.edge_weight[e]) for e in matched), Fraction(0))


def naive_opt(inst) -> Fraction:
    """Best value over every subset of edges. Exponential: keep edges <= 14."""
    best = Fraction(0)
    edges = list(inst.edges)
    for r in range(len(edges) + 1):
        for sub in itertools.combinations(edges, r):
            if naive_feasible(inst, sub):
                best = max(best, naive_value(inst, sub))
    return best


def gmis_feasible(g, chosen) -> bool:
    chosen = set(chosen)
    return all(len(chosen & m) <= c for m, c in g.hyperedges)


def is_maximal(g, chosen) -> bool:
    chosen = set(chosen)
    return all(not gmis_feasible(g, chosen | {v}) for v in g.vertices if v not in chosen)


def min_laminar_partition(sets) -> int:
    """Fewest laminar families covering ``sets``, by trying every colouring."""
    sets = [frozenset(s) for s in sets]
    n = len(sets)
    if n == 0:
        return 0

    def ok(x, y):
        return not (x & y) or x <= y or y <= x

    for k in range(1, n + 1):
        for colour in itertools.product(range(k), repeat=n):
            if all(ok(sets[i], sets[j]) for i in range(n) for j in range(i + 1, n)
                   if colour[i] == colour[j]):
                return k
    return n


def milp_opt(inst):
    """Optimum via scipy's MILP solver, or None if scipy is missing."""
    try:
        import numpy as np
        from scipy.optimize import Bounds, LinearConstraint, milp
        from scipy.sparse import lil_matrix
    except ImportError:
        return None
    idx = {e: k for k, e in enumerate(inst.edges)}
    rows, caps = [], []
    for p in inst.platforms:
        rows.append([k for e, k in idx.items() if e[1] == p])
        caps.append(inst.platform_quota[p])
    for a in inst.items:
        rows.append([k for e, k in idx.items() if e[0] == a])
        caps.append(inst.item_quota[a])
    for c in list(inst.platform_classes) + list(inst.item_classes):
        rows.append([idx[e] for e in c.members])
        caps.append(c.quota)
    A = lil_matrix((len(rows), len(idx)))
    for r, ks in enumerate(rows):
        for k in ks:
            A[r, k] = 1
    w = np.array([float(inst.edge_weight[e]) if inst.edge_weight else 1.0 for e in inst.edges])
    res = milp(-w, constraints=LinearConstraint(A.tocsr(), -np.inf, np.array(caps, dtype=float)),
               integrality=np.ones(len(idx)), bounds=Bounds(0, 1))
    if not res.success:
        return None
    return round(-res.fun)
