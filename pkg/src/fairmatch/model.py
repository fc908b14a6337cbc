"""Instances, class constraints, assignments and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels

Edge = tuple[str, str]

# constraint-row kinds in the compiled form
PLATFORM_QUOTA, PLATFORM_CLASS, ITEM_QUOTA, ITEM_CLASS = range(4)
PLATFORM_SIDE = (PLATFORM_QUOTA, PLATFORM_CLASS)


class ValidationError(ValueError):
    """Raised with every violation found, not just the first."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NotApplicable(ValueError):
    """A solver was asked to handle an instance outside its preconditions."""


@dataclass(frozen=True)
class ClassConstraint:
    id: str
    owner: str
    members: frozenset
    quota: int

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(tuple(e) for e in self.members))


@dataclass(frozen=True)
class Row:
    """One capacity constraint of the compiled instance."""

    kind: int
    owner: str
    id: str | None
    cap: int

    @property
    def side(self) -> str:
        return "platform" if self.kind in PLATFORM_SIDE else "item"


class Compiled:
    """Dense-index view of an instance: every quota as a row over edge indices.

    Rows are ordered platform quotas, platform classes, item quotas, item
    classes. The platform quota is the implicit top-level class of its
    platform; the item quota is kept as its own row kind.
    """

    def __init__(self, inst: Instance):
        self.edges = inst.edges
        self.edge_index = {e: k for k, e in enumerate(inst.edges)}
        item_idx = {a: i for i, a in enumerate(inst.items)}
        plat_idx = {p: i for i, p in enumerate(inst.platforms)}
        self.edge_item = np.array([item_idx[a] for a, _ in inst.edges], dtype=np.int64)
        self.edge_platform = np.array([plat_idx[p] for _, p in inst.edges], dtype=np.int64)
        by_plat: dict[str, list[int]] = {p: [] for p in inst.platforms}
        by_item: dict[str, list[int]] = {a: [] for a in inst.items}
        for k, (a, p) in enumerate(inst.edges):
            by_plat[p].append(k)
            by_item[a].append(k)
        self.platform_edges = by_plat
        self.item_edges = by_item

        rows: list[Row] = []
        members: list[list[int]] = []
        for p in inst.platforms:
            rows.append(Row(PLATFORM_QUOTA, p, None, inst.platform_quota[p]))
            members.append(by_plat[p])
        for c in inst.platform_classes:
            rows.append(Row(PLATFORM_CLASS, c.owner, c.id, c.quota))
            members.append(sorted(self.edge_index[e] for e in c.members))
        for a in inst.items:
            rows.append(Row(ITEM_QUOTA, a, None, inst.item_quota[a]))
            members.append(by_item[a])
        for c in inst.item_classes:
            rows.append(Row(ITEM_CLASS, c.owner, c.id, c.quota))
            members.append(sorted(self.edge_index[e] for e in c.members))
        self.rows = rows
        self.row_members = members
        self.caps = np.array([r.cap for r in rows], dtype=np.int64)
        self.row_is_item = np.array([r.kind not in PLATFORM_SIDE for r in rows], dtype=np.bool_)

        edge_rows: list[list[int]] = [[] for _ in inst.edges]
        for r, mem in enumerate(members):
            for k in mem:
                edge_rows[k].append(r)
        self.edge_rows = edge_rows
        self.ptr, self.idx = _kernels.csr(edge_rows)
        if inst.edge_weight is None:
            self.weights = [Fraction(1)] * len(inst.edges)
        else:
            self.weights = [inst.edge_weight[e] for e in inst.edges]

    def indices(self, edges: Iterable[Edge]) -> np.ndarray:
        return np.fromiter((self.edge_index[tuple(e)] for e in edges), dtype=np.int64)

    def loads(self, edge_ids: np.ndarray) -> np.ndarray:
        return _kernels.row_loads(self.ptr, self.idx, len(self.rows), edge_ids)


@dataclass(frozen=True, eq=False)
class Instance:
    """A validated CMM instance.

    Construct through :func:`validate_instance` (or the constructor, which runs
    the same structural checks). Treat instances as immutable.
    """

    items: tuple
    platforms: tuple
    edges: tuple
    platform_quota: Mapping[str, int]
    item_quota: Mapping[str, int] = field(default_factory=dict)
    platform_classes: tuple = ()
    item_classes: tuple = ()
    edge_weight: Mapping[Edge, Fraction] | None = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "items", tuple(self.items))
        set_(self, "platforms", tuple(self.platforms))
        set_(self, "edges", tuple(tuple(e) for e in self.edges))
        set_(self, "platform_quota", dict(self.platform_quota))
        iq = {a: 1 for a in self.items}
        iq.update(self.item_quota)
        set_(self, "item_quota", iq)
        set_(self, "platform_classes", tuple(self.platform_classes))
        set_(self, "item_classes", tuple(self.item_classes))
        if self.edge_weight is not None:
            set_(self, "edge_weight", {tuple(e): Fraction(w) for e, w in self.edge_weight.items()})
        problems = _structural_violations(self)
        if problems:
            raise ValidationError(problems)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return instance_to_dict(self) == instance_to_dict(other)

    __hash__ = None

    @cached_property
    def compiled(self) -> Compiled:
        return Compiled(self)

    @property
    def is_weighted(self) -> bool:
        return self.edge_weight is not None and any(w != 1 for w in self.edge_weight.values())

    def weight(self, e: Edge) -> Fraction:
        if self.edge_weight is None:
            return Fraction(1)
        return self.edge_weight[tuple(e)]

    def classes_of(self, owner: str) -> list[ClassConstraint]:
        return [c for c in self.platform_classes + self.item_classes if c.owner == owner]

    def restrict(self, keep: Iterable[Edge], platforms: Sequence[str] | None = None) -> Instance:
        """Sub-instance on an edge subset; classes are intersected, empty ones dropped.

        Items and platforms without a kept edge are dropped unless listed in
        ``platforms``.
        """
        keep = set(map(tuple, keep))
        edges = [e for e in self.edges if e in keep]
        items = [a for a in self.items if any(e[0] == a for e in edges)]
        if platforms is None:
            plats = [p for p in self.platforms if any(e[1] == p for e in edges)]
        else:
            plats = list(platforms)
        item_set, plat_set = set(items), set(plats)

        def cut(classes, owners):
            out = []
            for c in classes:
                mem = c.members & keep
                if mem and c.owner in owners:
                    out.append(ClassConstraint(c.id, c.owner, mem, c.quota))
            return out

        return Instance(
            items=items,
            platforms=plats,
            edges=edges,
            platform_quota={p: self.platform_quota[p] for p in plats},
            item_quota={a: self.item_quota[a] for a in items},
            platform_classes=cut(self.platform_classes, plat_set),
            item_classes=cut(self.item_classes, item_set),
            edge_weight=None if self.edge_weight is None else {e: self.edge_weight[e] for e in edges},
        )


@dataclass(frozen=True)
class Assignment:
    matched: frozenset
    value: Fraction

    def __len__(self):
        return len(self.matched)


def make_assignment(inst: Instance, edges: Iterable[Edge]) -> Assignment:
    matched = frozenset(tuple(e) for e in edges)
    return Assignment(matched, assignment_value(inst, matched))


def _structural_violations(inst: Instance) -> list[str]:
    out = []
    for name, ids in (("item", inst.items), ("platform", inst.platforms)):
        seen = set()
        for x in ids:
            if not isinstance(x, str):
                out.append(f"{name} id {x!r} is not a string")
            if x in seen:
                out.append(f"duplicate {name} id {x!r}")
            seen.add(x)
    items, plats = set(inst.items), set(inst.platforms)
    edge_set = set()
    for e in inst.edges:
        if len(e) != 2:
            out.append(f"edge {e!r} is not a pair")
            continue
        a, p = e
        if a not in items:
            out.append(f"edge {e!r} references unknown item {a!r}")
        if p not in plats:
            out.append(f"edge {e!r} references unknown platform {p!r}")
        if e in edge_set:
            out.append(f"duplicate edge {e!r}")
        edge_set.add(e)
    for p in inst.platforms:
        if p not in inst.platform_quota:
            out.append(f"platform {p!r} has no quota")
    for p, q in inst.platform_quota.items():
        if p not in plats:
            out.append(f"quota for unknown platform {p!r}")
        elif not _is_count(q):
            out.append(f"platform {p!r} quota {q!r} is not a nonnegative integer")
    for a, q in inst.item_quota.items():
        if a not in items:
            out.append(f"quota for unknown item {a!r}")
        elif not _is_count(q):
            out.append(f"item {a!r} quota {q!r} is not a nonnegative integer")
    class_ids = set()
    for side, classes, owners, pos in (
        ("platform", inst.platform_classes, plats, 1),
        ("item", inst.item_classes, items, 0),
    ):
        for c in classes:
            if c.id in class_ids:
                out.append(f"duplicate class id {c.id!r}")
            class_ids.add(c.id)
            if c.owner not in owners:
                out.append(f"class {c.id!r} owner {c.owner!r} is not a known {side}")
            if not c.members:
                out.append(f"class {c.id!r} has no members")
            if not _is_count(c.quota):
                out.append(f"class {c.id!r} quota {c.quota!r} is not a nonnegative integer")
            for e in sorted(c.members):
                if e not in edge_set:
                    out.append(f"class {c.id!r} member {e!r} is not an edge")
                elif e[pos] != c.owner:
                    out.append(f"class {c.id!r} member {e!r} not incident to owner {c.owner!r}")
    if inst.edge_weight is not None:
        for e, w in inst.edge_weight.items():
            if e not in edge_set:
                out.append(f"weight given for non-edge {e!r}")
            elif w < 0:
                out.append(f"edge {e!r} has negative weight {w}")
        for e in inst.edges:
            if e not in inst.edge_weight:
                out.append(f"edge {e!r} has no weight")
    return out


def _is_count(q) -> bool:
    return isinstance(q, (int, np.integer)) and not isinstance(q, bool) and q >= 0


# --------------------------------------------------------------------------
# validation and JSON

_TOP_KEYS = {"items", "platforms", "edges", "platform_quota", "item_quota",
             "platform_classes", "item_classes", "edge_weight"}
_CLASS_KEYS = {"id", "owner", "members", "quota"}


def validate_instance(raw: Mapping[str, Any] | Instance) -> Instance:
    """Canonicalize a JSON-shaped description into an :class:`Instance`.

    Raises :class:`ValidationError` listing every problem found.
    """
    if isinstance(raw, Instance):
        return raw
    problems = []
    if not isinstance(raw, Mapping):
        raise ValidationError([f"instance must be an object, got {type(raw).__name__}"])
    for k in sorted(set(raw) - _TOP_KEYS):
        problems.append(f"unknown key {k!r}")
    for k in ("items", "platforms", "edges", "platform_quota"):
        if k not in raw:
            problems.append(f"missing key {k!r}")
    if problems:
        raise ValidationError(problems)

    def pairs(seq, what):
        out = []
        for x in seq:
            if isinstance(x, (list, tuple)) and len(x) == 2:
                out.append((x[0], x[1]))
            else:
                problems.append(f"{what} entry {x!r} is not an [item, platform] pair")
        return out

    def classes(seq, what):
        out = []
        for c in seq:
            if not isinstance(c, Mapping):
                problems.append(f"{what} entry {c!r} is not an object")
                continue
            extra = set(c) - _CLASS_KEYS
            missing = _CLASS_KEYS - set(c)
            if extra or missing:
                problems.append(f"{what} entry {c.get('id')!r}: bad keys "
                                f"(unknown {sorted(extra)}, missing {sorted(missing)})")
                continue
            out.append(ClassConstraint(c["id"], c["owner"], pairs(c["members"], f"class {c['id']!r} member"),
                                       c["quota"]))
        return out

    edges = pairs(raw["edges"], "edges")
    pcs = classes(raw.get("platform_classes", ()), "platform_classes")
    ics = classes(raw.get("item_classes", ()), "item_classes")
    weights = None
    if raw.get("edge_weight") is not None:
        weights = {}
        for w in raw["edge_weight"]:
            if isinstance(w, (list, tuple)) and len(w) == 3:
                try:
                    weights[(w[0], w[1])] = _parse_weight(w[2])
                except (ValueError, TypeError, ZeroDivisionError):
                    problems.append(f"edge_weight entry {w!r} has unparsable weight")
            else:
                problems.append(f"edge_weight entry {w!r} is not [item, platform, weight]")
    if problems:
        raise ValidationError(problems)
    return Instance(
        items=raw["items"],
        platforms=raw["platforms"],
        edges=edges,
        platform_quota=raw["platform_quota"],
        item_quota=raw.get("item_quota", {}),
        platform_classes=pcs,
        item_classes=ics,
        edge_weight=weights,
    )


def _parse_weight(w) -> Fraction:
    if isinstance(w, bool):
        raise TypeError("boolean weight")
    if isinstance(w, float):
        return Fraction(repr(w))
    return Fraction(w)


def _weight_json(w: Fraction):
    return w.numerator if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def instance_to_dict(inst: Instance) -> dict:
    order = {e: k for k, e in enumerate(inst.edges)}

    def cls(c):
        return {"id": c.id, "owner": c.owner,
                "members": [list(e) for e in sorted(c.members, key=order.__getitem__)],
                "quota": int(c.quota)}

    out = {
        "items": list(inst.items),
        "platforms": list(inst.platforms),
        "edges": [list(e) for e in inst.edges],
        "platform_quota": {p: int(inst.platform_quota[p]) for p in inst.platforms},
        "item_quota": {a: int(inst.item_quota[a]) for a in inst.items},
        "platform_classes": [cls(c) for c in inst.platform_classes],
        "item_classes": [cls(c) for c in inst.item_classes],
    }
    if inst.edge_weight is not None:
        out["edge_weight"] = [[a, p, _weight_json(inst.edge_weight[(a, p)])] for a, p in inst.edges]
    return out


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), ensure_ascii=False, separators=(",", ":")) + "\n"


def loads_instance(text: str) -> Instance:
    return validate_instance(json.loads(text))


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_instance(inst))


def assignment_to_dict(inst: Instance, asg: Assignment) -> dict:
    order = inst.compiled.edge_index
    v = asg.value
    return {
        "matched": [list(e) for e in sorted(asg.matched, key=order.__getitem__)],
        "value": int(v) if v.denominator == 1 else float(v),
    }


# --------------------------------------------------------------------------
# feasibility


def is_feasible(inst: Instance, asg: Assignment | Iterable[Edge]) -> bool:
    matched = asg.matched if isinstance(asg, Assignment) else asg
    comp = inst.compiled
    try:
        ids = comp.indices(matched)
    except KeyError:
        return False
    if len(np.unique(ids)) != len(ids):
        return False
    return bool(np.all(comp.loads(ids) <= comp.caps))


def can_extend(inst: Instance, asg: Assignment | Iterable[Edge], e: Edge) -> bool:
    """Whether ``asg + e`` stays feasible; only the rows containing ``e`` are counted."""
    matched = asg.matched if isinstance(asg, Assignment) else frozenset(map(tuple, asg))
    e = tuple(e)
    comp = inst.compiled
    if e not in comp.edge_index:
        raise ValueError(f"{e!r} is not an edge of the instance")
    if e in matched:
        return False
    k = comp.edge_index[e]
    for r in comp.edge_rows[k]:
        used = sum(1 for j in comp.row_members[r] if comp.edges[j] in matched)
        if used + 1 > comp.caps[r]:
            return False
    return True


def assignment_value(inst: Instance, asg: Assignment | Iterable[Edge]) -> Fraction:
    matched = asg.matched if isinstance(asg, Assignment) else asg
    if inst.edge_weight is None:
        return Fraction(len(set(map(tuple, matched))))
    return sum((inst.edge_weight[tuple(e)] for e in set(map(tuple, matched))), Fraction(0))
