"""Online arrival: greedy matching, event traces, random-order trials."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .exact import WeightedNotSupported, flow_laminar
from .laminar import NotLaminar, is_laminar_instance
from .model import Assignment, Instance, NotApplicable, make_assignment


class DegenerateOpt(NotApplicable):
    pass


@dataclass(frozen=True)
class ArrivalOrder:
    sequence: tuple
    provenance: str = "explicit"

    @classmethod
    def random(cls, inst: Instance, seed: int) -> ArrivalOrder:
        rng = np.random.default_rng(seed)
        perm = rng.permutation(len(inst.items))
        return cls(tuple(inst.items[i] for i in perm), f"uniform-random({seed})")


def _as_sequence(inst: Instance, order) -> tuple:
    seq = tuple(order.sequence if isinstance(order, ArrivalOrder) else order)
    if sorted(seq) != sorted(inst.items):
        raise ValueError("arrival order must be a permutation of the items")
    return seq


def _ranking(inst: Instance, ranking) -> tuple:
    r = tuple(inst.platforms) if ranking is None else tuple(ranking)
    if sorted(r) != sorted(inst.platforms):
        raise ValueError("ranking must be a permutation of the platforms")
    return r


def trial_seed(master_seed: int, trial: int) -> int:
    """Seed of trial ``trial``, independent of how trials are scheduled."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _edge_order(inst: Instance, pos: np.ndarray, rank: np.ndarray) -> np.ndarray:
    comp = inst.compiled
    keys = pos[comp.edge_item] * len(inst.platforms) + rank[comp.edge_platform]
    return np.argsort(keys, kind="stable")


def online_greedy(inst: Instance, order, ranking: Sequence[str] | None = None) -> Assignment:
    """Each arriving item takes every feasible platform, best ranked first."""
    if inst.is_weighted:
        raise WeightedNotSupported("online greedy is defined for unweighted instances")
    seq = _as_sequence(inst, order)
    rk = _ranking(inst, ranking)
    item_idx = {a: i for i, a in enumerate(inst.items)}
    plat_idx = {p: i for i, p in enumerate(inst.platforms)}
    pos = np.empty(len(seq), dtype=np.int64)
    pos[[item_idx[a] for a in seq]] = np.arange(len(seq))
    rank = np.empty(len(rk), dtype=np.int64)
    rank[[plat_idx[p] for p in rk]] = np.arange(len(rk))
    comp = inst.compiled
    selected, _ = _kernels.greedy_scan(comp.ptr, comp.idx, comp.caps, _edge_order(inst, pos, rank))
    return make_assignment(inst, (inst.edges[k] for k in np.flatnonzero(selected)))


@dataclass
class Step:
    item: str
    matched: list = field(default_factory=list)
    # platform -> rows that were full when the edge was tried
    blocked: dict = field(default_factory=dict)


@dataclass
class OnlineTrace:
    steps: list
    assignment: Assignment

    def matched_platforms(self, item: str) -> list:
        for s in self.steps:
            if s.item == item:
                return list(s.matched)
        raise KeyError(item)


def simulate(inst: Instance, order, ranking: Sequence[str] | None = None) -> OnlineTrace:
    """Step-by-step online greedy that logs which constraints blocked each edge.

    Works for arbitrary (non-laminar) classes. Interpreted and slower than
    :func:`online_greedy`, which it must agree with.
    """
    if inst.is_weighted:
        raise WeightedNotSupported("online greedy is defined for unweighted instances")
    seq = _as_sequence(inst, order)
    rk = _ranking(inst, ranking)
    comp = inst.compiled
    rank = {p: i for i, p in enumerate(rk)}
    load = [0] * len(comp.rows)
    steps, matched = [], []
    for a in seq:
        step = Step(a)
        for k in sorted(comp.item_edges[a], key=lambda k: rank[comp.edges[k][1]]):
            p = comp.edges[k][1]
            full = [comp.rows[r] for r in comp.edge_rows[k] if load[r] >= comp.caps[r]]
            if full:
                step.blocked[p] = full
                continue
            for r in comp.edge_rows[k]:
                load[r] += 1
            step.matched.append(p)
            matched.append((a, p))
        steps.append(step)
    return OnlineTrace(steps, make_assignment(inst, matched))


def online_greedy_anymodel(inst: Instance, order, ranking: Sequence[str] | None = None) -> Assignment:
    return simulate(inst, order, ranking).assignment


@dataclass(frozen=True)
class CompetitiveReport:
    trials: int
    seeds: tuple
    alg_values: tuple
    opt_value: int
    ratios: tuple  # Fractions

    @property
    def mean(self) -> Fraction:
        return sum(self.ratios, Fraction(0)) / len(self.ratios)

    @property
    def stddev(self) -> float:
        """Sample standard deviation of the per-trial ratios."""
        if len(self.ratios) < 2:
            return 0.0
        mu = self.mean
        var = sum(((r - mu) ** 2 for r in self.ratios), Fraction(0)) / (len(self.ratios) - 1)
        return math.sqrt(var)

    @property
    def min(self) -> Fraction:
        return min(self.ratios)

    @property
    def max(self) -> Fraction:
        return max(self.ratios)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed", "alg_value", "opt_value", "ratio"])
        for t, (s, v, r) in enumerate(zip(self.seeds, self.alg_values, self.ratios)):
            w.writerow([t, s, v, self.opt_value, f"{float(r):.6f}"])
        return buf.getvalue()


def competitive_trials(inst: Instance, trials: int, master_seed: int = 0,
                       ranking: Sequence[str] | None = None) -> CompetitiveReport:
    """Run online greedy under ``trials`` uniform arrival orders against the flow optimum.

    Requires laminar classes on both sides.
    """
    if not is_laminar_instance(inst):
        raise NotLaminar("random-order trials need laminar item and platform classes")
    opt = int(flow_laminar(inst).value)
    if opt == 0:
        raise DegenerateOpt("offline optimum is 0")
    rk = _ranking(inst, ranking)
    plat_idx = {p: i for i, p in enumerate(inst.platforms)}
    rank = np.empty(len(rk), dtype=np.int64)
    rank[[plat_idx[p] for p in rk]] = np.arange(len(rk))
    comp = inst.compiled
    n = len(inst.items)
    seeds, values = [], []
    for t in range(trials):
        s = trial_seed(master_seed, t)
        perm = np.random.default_rng(s).permutation(n)
        pos = np.empty(n, dtype=np.int64)
        pos[perm] = np.arange(n)
        selected, _ = _kernels.greedy_scan(comp.ptr, comp.idx, comp.caps, _edge_order(inst, pos, rank))
        seeds.append(s)
        values.append(int(selected.sum()))
    return CompetitiveReport(trials, tuple(seeds), tuple(values), opt,
                             tuple(Fraction(v, opt) for v in values))
