"""Laminar families: testing, forests, and first-fit partitioning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .model import ClassConstraint, Instance, NotApplicable


class NotLaminar(NotApplicable):
    pass


def _members(c) -> frozenset:
    if isinstance(c, ClassConstraint):
        return c.members
    return frozenset(c)


def _compatible(x: frozenset, y: frozenset) -> bool:
    return x.isdisjoint(y) or x <= y or y <= x


def is_laminar(classes: Iterable) -> bool:
    """True iff every pair of sets is nested or disjoint."""
    sets = [_members(c) for c in classes]
    return _chain_check(sets) is not None


def _chain_check(sets: Sequence[frozenset]):
    """Parents of a laminar family, or None if it is not laminar.

    Sets are visited largest first (ties by position); each element tracks the
    smallest visited set holding it. In a laminar family all elements of the
    next set must agree on that holder, which is then its parent.
    """
    order = sorted(range(len(sets)), key=lambda i: (-len(sets[i]), i))
    deepest: dict = {}
    parent: dict[int, int | None] = {}
    for i in order:
        holders = {deepest.get(x) for x in sets[i]}
        if len(holders) > 1:
            return None
        parent[i] = holders.pop() if holders else None
        for x in sets[i]:
            deepest[x] = i
    return parent, deepest


@dataclass(frozen=True)
class LaminarForest:
    nodes: tuple
    parent: dict
    leaf_map: dict

    def children(self, node) -> list:
        return [c for c in self.nodes if self.parent.get(c) == node]

    @property
    def roots(self) -> list:
        return [c for c in self.nodes if c not in self.parent]

    def path_to_root(self, node) -> list:
        out = [node]
        while out[-1] in self.parent:
            out.append(self.parent[out[-1]])
        return out


def build_forest(classes: Sequence, ids: Sequence[Hashable] | None = None) -> LaminarForest:
    """Parent links to the smallest strict superset.

    Classes with equal member sets are chained in input order: the earlier one
    becomes the parent.
    """
    sets = [_members(c) for c in classes]
    if ids is None:
        ids = [c.id if isinstance(c, ClassConstraint) else i for i, c in enumerate(classes)]
    found = _chain_check(sets)
    if found is None:
        raise NotLaminar("class family is not laminar")
    parent_idx, deepest = found
    parent = {ids[i]: ids[p] for i, p in parent_idx.items() if p is not None}
    leaf_map = {x: ids[i] for x, i in deepest.items()}
    return LaminarForest(tuple(ids), parent, leaf_map)


@dataclass(frozen=True)
class LaminarPartition:
    families: list
    delta_of: dict

    @property
    def delta(self) -> int:
        return max(self.delta_of.values(), default=0)

    @property
    def average_delta(self):
        from fractions import Fraction

        if not self.delta_of:
            return Fraction(0)
        return Fraction(sum(self.delta_of.values()), len(self.delta_of))


def _first_fit(sets, order) -> list[list[int]]:
    families: list[list[int]] = []
    for i in order:
        for fam in families:
            if all(_compatible(sets[i], sets[j]) for j in fam):
                fam.append(i)
                break
        else:
            families.append([i])
    return families


def partition_classes(classes: Sequence, universe: Iterable | None = None) -> LaminarPartition:
    """Greedy first-fit of classes into laminar families.

    Classes are placed largest first (ties by position) into the first family
    they keep laminar. A second first-fit pass in input order is also run and
    wins if it needs strictly fewer families; it recovers the natural grouping
    when the input lists whole groups of disjoint classes one after another.

    ``families`` holds indices into ``classes``. ``delta_of`` counts, for each
    element, the families with a class containing it; elements of ``universe``
    that lie in no class get 0.
    """
    sets = [_members(c) for c in classes]
    families = _first_fit(sets, sorted(range(len(sets)), key=lambda i: (-len(sets[i]), i)))
    if len(families) > 2:
        by_input = _first_fit(sets, range(len(sets)))
        if len(by_input) < len(families):
            families = by_input
    delta_of: dict = {x: 0 for x in universe} if universe is not None else {}
    for fam in families:
        for x in set().union(*(sets[j] for j in fam)):
            delta_of[x] = delta_of.get(x, 0) + 1
    return LaminarPartition(families, delta_of)


def platform_families(inst: Instance, p: str) -> LaminarPartition:
    """Partition of ``p``'s classes with the platform quota folded in as its top class."""
    folded = frozenset(inst.compiled.edges[k] for k in inst.compiled.platform_edges[p])
    classes = [folded] + [c.members for c in inst.platform_classes if c.owner == p]
    return partition_classes(classes, universe=folded)


def item_families(inst: Instance, a: str) -> LaminarPartition:
    folded = frozenset(inst.compiled.edges[k] for k in inst.compiled.item_edges[a])
    classes = [folded] + [c.members for c in inst.item_classes if c.owner == a]
    return partition_classes(classes, universe=folded)


def edge_family_counts(inst: Instance) -> dict:
    """Edge -> (platform-side families, item-side families) containing it."""
    out = {}
    for p in inst.platforms:
        for e, d in platform_families(inst, p).delta_of.items():
            out[e] = [d, 0]
    for a in inst.items:
        for e, d in item_families(inst, a).delta_of.items():
            out[e][1] = d
    return {e: tuple(v) for e, v in out.items()}


def gmis_delta(inst: Instance) -> int:
    """Largest number of laminar families (both sides) covering one edge.

    This is the factor in the greedy guarantee ``OPT <= delta * ALG``; for
    Model 1 instances it is the per-platform family count plus one.
    """
    return max((p + i for p, i in edge_family_counts(inst).values()), default=0)


def is_laminar_instance(inst: Instance) -> bool:
    """Every owner's class family is laminar (quotas fold in harmlessly)."""
    by_owner: dict[str, list] = {}
    for c in inst.platform_classes + inst.item_classes:
        by_owner.setdefault(c.owner, []).append(c.members)
    return all(is_laminar(sets) for sets in by_owner.values())


def laminar_relaxation(inst: Instance, keep: int = 0) -> Instance:
    """Drop classes until every owner is laminar.

    Per owner, family ``keep`` of :func:`partition_classes` survives (clipped to
    the last family). Quotas are untouched, so every feasible set of ``inst``
    stays feasible and the relaxed optimum bounds the original from above.
    """
    kept = set()
    for side_classes in (inst.platform_classes, inst.item_classes):
        by_owner: dict[str, list[ClassConstraint]] = {}
        for c in side_classes:
            by_owner.setdefault(c.owner, []).append(c)
        for cs in by_owner.values():
            fams = partition_classes(cs).families
            fam = fams[min(keep, len(fams) - 1)]
            kept.update(cs[i].id for i in fam)
    return Instance(
        items=inst.items,
        platforms=inst.platforms,
        edges=inst.edges,
        platform_quota=inst.platform_quota,
        item_quota=inst.item_quota,
        platform_classes=[c for c in inst.platform_classes if c.id in kept],
        item_classes=[c for c in inst.item_classes if c.id in kept],
        edge_weight=inst.edge_weight,
    )
