"""Exact solvers: exhaustive search, max-flow for laminar classes, type IP."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .approx import sequential_compose
from .laminar import NotLaminar, build_forest, is_laminar
from .model import Assignment, Instance, NotApplicable, make_assignment


class InstanceTooLarge(NotApplicable):
    pass


class TooManyClasses(NotApplicable):
    pass


class WeightedNotSupported(NotApplicable):
    pass


def _require_unweighted(inst: Instance, who: str) -> None:
    if inst.is_weighted:
        raise WeightedNotSupported(f"{who} handles unweighted instances only")


# --------------------------------------------------------------------------
# exhaustive search


def brute_force(inst: Instance, limit: int = 24) -> Assignment:
    """Optimal assignment by include-first depth-first search over edges.

    Prunes on feasibility and on ``value + weight of still-addable edges``.
    The first optimum met wins; for unweighted instances that is the
    lexicographically smallest optimal edge set (by edge index).
    """
    m = len(inst.edges)
    if m > limit:
        raise InstanceTooLarge(f"{m} edges exceeds brute-force limit {limit}")
    comp = inst.compiled
    scale = math.lcm(*(w.denominator for w in comp.weights)) if m else 1
    w = [int(x * scale) for x in comp.weights]
    caps = [int(c) for c in comp.caps]
    rows = comp.edge_rows
    load = [0] * len(caps)
    picked: list[int] = []
    best = [-1, ()]

    def fits(k):
        return all(load[r] < caps[r] for r in rows[k])

    def dfs(k, value):
        if k == m:
            if value > best[0]:
                best[0] = value
                best[1] = tuple(picked)
            return
        bound = value + sum(w[j] for j in range(k, m) if fits(j))
        if bound <= best[0]:
            return
        if fits(k):
            for r in rows[k]:
                load[r] += 1
            picked.append(k)
            dfs(k + 1, value + w[k])
            picked.pop()
            for r in rows[k]:
                load[r] -= 1
        dfs(k + 1, value)

    dfs(0, 0)
    return make_assignment(inst, (inst.edges[k] for k in best[1]))


# --------------------------------------------------------------------------
# max flow for laminar classes


@dataclass(frozen=True)
class FlowNetwork:
    n_nodes: int
    source: int
    sink: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray
    labels: list
    edge_arcs: dict  # CMM edge -> index of its (edge node -> platform tree) arc

    def solve(self):
        return _kernels.max_flow(self.n_nodes, self.tails, self.heads, self.caps, self.source, self.sink)


def build_flow_network(inst: Instance) -> FlowNetwork:
    """Source -> item trees -> edge nodes -> platform trees -> sink.

    Each owner's quota is the root of its tree; a class hangs below the
    smallest class strictly containing it, and the arc into (item side) or out
    of (platform side) a class node carries its quota. An edge node links the
    deepest classes containing the edge on both sides.
    """
    labels: list = ["source", "sink"]
    tails: list[int] = []
    heads: list[int] = []
    caps: list[int] = []

    def node(label):
        labels.append(label)
        return len(labels) - 1

    def arc(u, v, c):
        tails.append(u)
        heads.append(v)
        caps.append(int(c))
        return len(tails) - 1

    def owner_tree(owner, classes, side):
        root = node((side, "root", owner))
        if not classes:
            return root, {}
        if not is_laminar(classes):
            raise NotLaminar(f"classes of {side} {owner!r} are not laminar")
        forest = build_forest(classes)
        ids = {c.id: node((side, "class", c.id)) for c in classes}
        quota = {c.id: c.quota for c in classes}
        for c in classes:
            up = ids[forest.parent[c.id]] if c.id in forest.parent else root
            if side == "item":
                arc(up, ids[c.id], quota[c.id])
            else:
                arc(ids[c.id], up, quota[c.id])
        return root, {e: ids[cid] for e, cid in forest.leaf_map.items()}

    item_cls: dict[str, list] = {a: [] for a in inst.items}
    for c in inst.item_classes:
        item_cls[c.owner].append(c)
    plat_cls: dict[str, list] = {p: [] for p in inst.platforms}
    for c in inst.platform_classes:
        plat_cls[c.owner].append(c)

    item_leaf, item_root = {}, {}
    for a in inst.items:
        root, leaves = owner_tree(a, item_cls[a], "item")
        arc(0, root, inst.item_quota[a])
        item_root[a] = root
        item_leaf.update(leaves)
    plat_leaf, plat_root = {}, {}
    for p in inst.platforms:
        root, leaves = owner_tree(p, plat_cls[p], "platform")
        arc(root, 1, inst.platform_quota[p])
        plat_root[p] = root
        plat_leaf.update(leaves)
    edge_arcs = {}
    for e in inst.edges:
        a, p = e
        x = node(("edge", e))
        arc(item_leaf.get(e, item_root[a]), x, 1)
        edge_arcs[e] = arc(x, plat_leaf.get(e, plat_root[p]), 1)
    as_arr = lambda xs: np.array(xs, dtype=np.int64)
    return FlowNetwork(len(labels), 0, 1, as_arr(tails), as_arr(heads), as_arr(caps), labels, edge_arcs)


def flow_laminar(inst: Instance) -> Assignment:
    _require_unweighted(inst, "flow_laminar")
    net = build_flow_network(inst)
    _, flow = net.solve()
    return make_assignment(inst, (e for e, k in net.edge_arcs.items() if flow[k] > 0))


# --------------------------------------------------------------------------
# type integer program for one platform with few classes


@dataclass(frozen=True)
class TypeTable:
    classes: tuple  # ClassConstraint, bit i of a mask <-> classes[i]
    types: dict  # mask -> edges of that type, input order
    bounds: dict  # mask -> upper bound on x_mask

    def __len__(self):
        return len(self.types)


def build_type_table(inst: Instance) -> TypeTable:
    (p,) = inst.platforms
    classes = tuple(c for c in inst.platform_classes if c.owner == p)
    comp = inst.compiled
    types: dict[int, list] = {}
    for k in comp.platform_edges[p]:
        e = comp.edges[k]
        # item side: only the item quota and singleton item classes touch e
        if any(comp.caps[r] < 1 for r in comp.edge_rows[k] if comp.row_is_item[r]):
            continue
        mask = 0
        for i, c in enumerate(classes):
            if e in c.members:
                mask |= 1 << i
        types.setdefault(mask, []).append(e)
    qp = inst.platform_quota[p]
    bounds = {}
    for mask, es in types.items():
        ub = min(len(es), qp)
        for i, c in enumerate(classes):
            if mask >> i & 1:
                ub = min(ub, c.quota)
        bounds[mask] = ub
    return TypeTable(classes, types, bounds)


def type_ip(inst: Instance, max_classes: int = 16) -> Assignment:
    """Exact single-platform solve with one integer variable per class type.

    Depth-first branch and bound over the type counts, larger counts first.
    The bound is the tightest of: remaining platform quota; per-type caps from
    residual class quotas; and two class covers that charge each type to its
    lowest or highest class.
    """
    if len(inst.platforms) != 1:
        raise NotApplicable("type_ip needs exactly one platform")
    _require_unweighted(inst, "type_ip")
    (p,) = inst.platforms
    n_cls = sum(1 for c in inst.platform_classes if c.owner == p)
    if n_cls > max_classes:
        raise TooManyClasses(f"{n_cls} classes exceeds cap {max_classes}")
    table = build_type_table(inst)
    masks = sorted(table.types, key=lambda s: (bin(s).count("1"), s))
    ub = [table.bounds[s] for s in masks]
    bits = [[i for i in range(n_cls) if s >> i & 1] for s in masks]
    lo_cls = [b[0] if b else -1 for b in bits]
    hi_cls = [b[-1] if b else -1 for b in bits]
    res = [c.quota for c in table.classes]
    res_p = [inst.platform_quota[p]]
    t = len(masks)
    x = [0] * t
    best = [-1, None]

    def cap_of(j):
        c = min(ub[j], res_p[0])
        for i in bits[j]:
            c = min(c, res[i])
        return c

    def bound(j):
        caps = [cap_of(k) for k in range(j, t)]
        total = sum(caps)
        out = min(res_p[0], total)
        for owner in (lo_cls, hi_cls):
            charged = [0] * n_cls
            free = 0
            for k, c in zip(range(j, t), caps):
                if owner[k] < 0:
                    free += c
                else:
                    charged[owner[k]] += c
            out = min(out, free + sum(min(a, b) for a, b in zip(charged, res)))
        return out

    def dfs(j, value):
        if j == t:
            if value > best[0]:
                best[0] = value
                best[1] = list(x)
            return
        if value + bound(j) <= best[0]:
            return
        for v in range(cap_of(j), -1, -1):
            x[j] = v
            res_p[0] -= v
            for i in bits[j]:
                res[i] -= v
            dfs(j + 1, value + v)
            res_p[0] += v
            for i in bits[j]:
                res[i] += v
        x[j] = 0

    dfs(0, 0)
    chosen = []
    for s, cnt in zip(masks, best[1] or []):
        chosen.extend(table.types[s][:cnt])
    return make_assignment(inst, chosen)


def half_approx_multi(inst: Instance, max_classes: int = 16, platform_order=None) -> Assignment:
    """Platforms solved in turn by :func:`type_ip` on the edges still open."""
    return sequential_compose(inst, lambda sub: type_ip(sub, max_classes), platform_order)
