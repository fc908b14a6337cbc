"""Greedy approximations for CMM and generalized independent sets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .laminar import partition_classes
from .model import (ITEM_QUOTA, Assignment, Instance, NotApplicable, make_assignment)


@dataclass(frozen=True, eq=False)
class GmisInstance:
    """Hypergraph with a capacity on every hyperedge; optional vertex weights."""

    vertices: tuple
    hyperedges: tuple  # of (frozenset, capacity)
    weights: Mapping[Hashable, Fraction] | None = None
    labels: tuple | None = None  # provenance per hyperedge, informational only

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "hyperedges", tuple((frozenset(m), int(c)) for m, c in self.hyperedges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertices")
        for m, c in self.hyperedges:
            if c < 0:
                raise ValueError(f"negative capacity {c}")
            if not m <= vs:
                raise ValueError(f"hyperedge {sorted(map(str, m))} has unknown vertices")
        if self.weights is not None:
            object.__setattr__(self, "weights", {v: Fraction(self.weights[v]) for v in self.vertices})

    def __eq__(self, other):
        if not isinstance(other, GmisInstance):
            return NotImplemented
        return (self.vertices == other.vertices and self.hyperedges == other.hyperedges
                and self.weights == other.weights)

    __hash__ = None

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def incidence(self):
        rows: list[list[int]] = [[] for _ in self.vertices]
        for r, (mem, _) in enumerate(self.hyperedges):
            for v in mem:
                rows[self.index[v]].append(r)
        ptr, idx = _kernels.csr(rows)
        caps = np.array([c for _, c in self.hyperedges], dtype=np.int64)
        return ptr, idx, caps

    def is_feasible(self, chosen: Iterable) -> bool:
        chosen = set(chosen)
        return all(len(chosen & m) <= c for m, c in self.hyperedges)

    def value(self, chosen: Iterable) -> Fraction:
        chosen = set(chosen)
        if self.weights is None:
            return Fraction(len(chosen))
        return sum((self.weights[v] for v in chosen), Fraction(0))

    def induced(self, keep: Iterable) -> GmisInstance:
        keep = set(keep)
        verts = [v for v in self.vertices if v in keep]
        return GmisInstance(
            verts,
            [(m & keep, c) for m, c in self.hyperedges],
            None if self.weights is None else {v: self.weights[v] for v in verts},
            self.labels,
        )


@dataclass(frozen=True)
class ReductionMap:
    """Edge <-> synthetic vertex bijection of the edge-item reduction."""

    forward: dict
    backward: dict


def greedy_gmis(g: GmisInstance, order: Sequence | None = None) -> frozenset:
    """Maximal feasible vertex set, scanning ``order`` (default: vertex order)."""
    chosen, _ = _greedy_with_blockers(g, order)
    return chosen


def _greedy_with_blockers(g: GmisInstance, order):
    ptr, idx, caps = g.incidence
    if order is None:
        seq = np.arange(len(g.vertices), dtype=np.int64)
    else:
        seq = np.fromiter((g.index[v] for v in order), dtype=np.int64, count=len(order))
    selected, blocker = _kernels.greedy_scan(ptr, idx, caps, seq)
    chosen = frozenset(g.vertices[i] for i in np.flatnonzero(selected))
    return chosen, blocker


def edge_item_reduction(inst: Instance) -> tuple[GmisInstance, ReductionMap]:
    """One vertex per edge; every quota and class becomes a hyperedge.

    Platform quotas are always emitted (the folded top class). An item quota
    row is emitted only when it can bind, i.e. quota < degree.
    """
    comp = inst.compiled
    hyper, labels = [], []
    for row, mem in zip(comp.rows, comp.row_members):
        if row.kind == ITEM_QUOTA and row.cap >= len(mem):
            continue
        hyper.append((frozenset(comp.edges[k] for k in mem), row.cap))
        labels.append((row.kind, row.owner, row.id))
    weights = None if inst.edge_weight is None else dict(inst.edge_weight)
    g = GmisInstance(inst.edges, hyper, weights, tuple(labels))
    fwd = {e: e for e in inst.edges}
    return g, ReductionMap(fwd, dict(fwd))


def _order_indices(inst: Instance, order) -> np.ndarray:
    m = len(inst.edges)
    if isinstance(order, str):
        if order == "input":
            return np.arange(m, dtype=np.int64)
        if order == "weight":
            w = inst.compiled.weights
            return np.array(sorted(range(m), key=lambda k: -w[k]), dtype=np.int64)
        if order.startswith("random:"):
            rng = np.random.default_rng(int(order.split(":", 1)[1]))
            return rng.permutation(m).astype(np.int64)
        raise ValueError(f"unknown order policy {order!r}")
    seq = inst.compiled.indices(tuple(e) for e in order)
    if len(seq) != m or len(np.unique(seq)) != m:
        raise ValueError("explicit order must be a permutation of the instance edges")
    return seq


def resolve_edge_order(inst: Instance, order="input") -> list:
    """Edge scan order from a policy name or an explicit edge sequence.

    Policies: ``"input"``, ``"weight"`` (nonincreasing weight, ties by input
    order), ``"random:<seed>"``.
    """
    try:
        return [inst.edges[k] for k in _order_indices(inst, order)]
    except KeyError as exc:
        raise ValueError(f"explicit order names a non-edge {exc}") from None


def greedy_cmm(inst: Instance, order="input") -> Assignment:
    """Greedy maximal set of the edge-item reduction, mapped back to edges.

    The compiled rows of ``inst`` are that reduction's hyperedges (plus
    item-quota rows that cannot bind), so the scan runs on them directly.
    """
    try:
        seq = _order_indices(inst, order)
    except KeyError as exc:
        raise ValueError(f"explicit order names a non-edge {exc}") from None
    comp = inst.compiled
    selected, _ = _kernels.greedy_scan(comp.ptr, comp.idx, comp.caps, seq)
    return make_assignment(inst, (inst.edges[k] for k in np.flatnonzero(selected)))


def gmis_degrees(g: GmisInstance) -> dict:
    """Vertex -> number of laminar families (first-fit partition) containing it."""
    return partition_classes([m for m, _ in g.hyperedges], universe=g.vertices).delta_of


def avg_degree_gmis(g: GmisInstance, order: Sequence | None = None) -> frozenset:
    """Best greedy set over all guesses of the optimum size.

    For a guess ``k`` the cutoff is ``2 * n * avg_degree / k``; vertices with
    family-degree above it are dropped before the greedy scan. The largest
    result wins, lowest guess on ties.
    """
    n = len(g.vertices)
    if n == 0:
        return frozenset()
    deg = gmis_degrees(g)
    avg = Fraction(sum(deg.values()), n)
    scan = list(g.vertices) if order is None else list(order)
    best: frozenset | None = None
    last_keep = None
    for guess in range(1, n + 1):
        cutoff = Fraction(2 * n, guess) * avg
        keep = [v for v in scan if deg[v] <= cutoff]
        if keep == last_keep:
            continue
        last_keep = keep
        sub = g.induced(keep)
        got = greedy_gmis(sub, keep)
        if best is None or len(got) > len(best):
            best = got
    return best


SingleSolver = Callable[[Instance], Assignment]


def sequential_compose(inst: Instance, single_solver: SingleSolver,
                       platform_order: Sequence[str] | None = None) -> Assignment:
    """Solve platforms one at a time on the edges still open to them.

    An edge ``(a, p)`` is offered to ``p`` only if ``a``'s own constraints leave
    room given everything matched so far. With item quota 1 and no item classes
    this is exactly "items not yet matched".
    """
    order = list(inst.platforms) if platform_order is None else list(platform_order)
    if sorted(order) != sorted(inst.platforms):
        raise ValueError("platform order must be a permutation of the platforms")
    comp = inst.compiled
    item_rows = np.flatnonzero(comp.row_is_item)
    load = np.zeros(len(comp.rows), dtype=np.int64)
    matched: list = []
    for p in order:
        open_edges = []
        for k in comp.platform_edges[p]:
            rows = [r for r in comp.edge_rows[k] if comp.row_is_item[r]]
            if all(load[r] < comp.caps[r] for r in rows):
                open_edges.append(comp.edges[k])
        if not open_edges:
            continue
        sub = inst.restrict(open_edges, platforms=[p])
        got = single_solver(sub)
        for e in got.matched:
            k = comp.edge_index[e]
            for r in comp.edge_rows[k]:
                load[r] += 1
            matched.append(e)
    assert np.all(load[item_rows] <= comp.caps[item_rows])
    return make_assignment(inst, matched)


def greedy_single(inst: Instance) -> Assignment:
    """Insertion-order greedy, usable as a ``single_solver``."""
    if len(inst.platforms) > 1:
        raise NotApplicable("greedy_single expects one platform")
    return greedy_cmm(inst)

