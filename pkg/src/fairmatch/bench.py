"""Course-allocation instance generator and the solver comparison harness."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .approx import greedy_cmm
from .exact import brute_force, flow_laminar, half_approx_multi
from .laminar import gmis_delta, is_laminar_instance, laminar_relaxation
from .model import ClassConstraint, Instance, NotApplicable


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class QuotaPolicy:
    """Course quota = ceil(overall_factor * demand / n_courses), where demand
    is the expected number of applications, n_students * mean degree.
    Department and batch quotas are ceil(fraction * course quota)."""

    overall_factor: float = 1.2
    department_fraction: float = 0.5
    batch_fraction: float = 0.5
    department: bool = True
    batch: bool = True


@dataclass(frozen=True)
class GenConfig:
    n_courses: int
    n_departments: int
    students_per_dept: int
    degree_min: int
    degree_max: int
    n_batches: int = 5
    popularity: bool = True
    n_categories: int = 2
    quota_policy: QuotaPolicy = field(default_factory=QuotaPolicy)
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.quota_policy, Mapping):
            object.__setattr__(self, "quota_policy", QuotaPolicy(**self.quota_policy))
        problems = []
        for name in ("n_courses", "n_departments", "students_per_dept", "n_batches", "n_categories",
                     "degree_min"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                problems.append(f"{name} must be a positive integer")
        if not problems and not self.degree_min <= self.degree_max <= self.n_courses:
            problems.append("need degree_min <= degree_max <= n_courses")
        qp = self.quota_policy
        if qp.overall_factor <= 0 or qp.department_fraction <= 0 or qp.batch_fraction <= 0:
            problems.append("quota factors must be positive")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def n_students(self) -> int:
        return self.n_departments * self.students_per_dept

    @classmethod
    def from_dict(cls, data: Mapping) -> GenConfig:
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


PRESETS: dict[str, GenConfig] = {
    "tiny-sparse": GenConfig(8, 2, 20, 2, 3),
    "small-sparse": GenConfig(50, 5, 400, 3, 5),
    "small-dense": GenConfig(50, 5, 400, 3, 10),
    # full-size shapes, slow
    "full-small-sparse": GenConfig(300, 20, 2000, 3, 5),
    "full-small-dense": GenConfig(300, 20, 2000, 3, 10),
    "full-large-sparse": GenConfig(500, 20, 10000, 3, 5),
    "full-large-dense": GenConfig(500, 20, 10000, 3, 10),
}


def preset(name: str, seed: int = 0, **overrides) -> GenConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return replace(PRESETS[name], seed=seed, **overrides)


def generate(cfg: GenConfig) -> Instance:
    """Students (items) apply to courses (platforms).

    Degrees are uniform on ``[degree_min, degree_max]``; courses are drawn
    without replacement, weighted by a per-course popularity in (0, 1] when
    enabled (exponential-key reservoir sampling). The random stream is the
    same with popularity off, so both variants share degrees and batches.
    Each course has a department class and a batch class per group present
    among its applicants; each student has one quota-1 class per course
    category.
    """
    rng = np.random.default_rng(cfg.seed)
    C, S = cfg.n_courses, cfg.n_students
    popularity = 1.0 - rng.random(C)
    category = rng.integers(cfg.n_categories, size=C)
    batch = rng.integers(cfg.n_batches, size=S)
    degree = rng.integers(cfg.degree_min, cfg.degree_max + 1, size=S)
    u = rng.random((S, C))
    keys = np.log(u) / popularity if cfg.popularity else np.log(u)
    ranked = np.argsort(-keys, axis=1, kind="stable")

    courses = [f"c{k}" for k in range(C)]
    students = [f"s{k}" for k in range(S)]
    dept = np.arange(S) // cfg.students_per_dept
    edges = []
    choice = []
    for s in range(S):
        picked = np.sort(ranked[s, : degree[s]])
        choice.append(picked)
        edges.extend((students[s], courses[c]) for c in picked)

    qp = cfg.quota_policy
    demand = S * (cfg.degree_min + cfg.degree_max) / 2
    overall = math.ceil(qp.overall_factor * demand / C)
    dq = math.ceil(qp.department_fraction * overall)
    bq = math.ceil(qp.batch_fraction * overall)

    applicants: list[list[int]] = [[] for _ in range(C)]
    for s, picked in enumerate(choice):
        for c in picked:
            applicants[c].append(s)
    pcs = []
    for c in range(C):
        groups = []
        if qp.department:
            groups.append(("dept", dept, dq))
        if qp.batch:
            groups.append(("batch", batch, bq))
        for tag, label, quota in groups:
            members: dict[int, list] = {}
            for s in applicants[c]:
                members.setdefault(int(label[s]), []).append((students[s], courses[c]))
            for g in sorted(members):
                pcs.append(ClassConstraint(f"{courses[c]}:{tag}{g}", courses[c], members[g], quota))
    ics = []
    for s, picked in enumerate(choice):
        by_cat: dict[int, list] = {}
        for c in picked:
            by_cat.setdefault(int(category[c]), []).append((students[s], courses[c]))
        for k in sorted(by_cat):
            ics.append(ClassConstraint(f"{students[s]}:cat{k}", students[s], by_cat[k], 1))
    return Instance(
        items=students,
        platforms=courses,
        edges=edges,
        platform_quota={c: overall for c in courses},
        item_quota={s: cfg.n_categories for s in students},
        platform_classes=pcs,
        item_classes=ics,
    )


# --------------------------------------------------------------------------
# experiments

ALGORITHMS: dict[str, Callable[[Instance], object]] = {
    "greedy_cmm": greedy_cmm,
    "half_approx_multi": half_approx_multi,
    "flow_laminar": flow_laminar,
    "brute_force": brute_force,
}


@dataclass
class Cell:
    instance: str
    algorithm: str
    repetition: int
    value: Fraction | None
    seconds: float
    error: str | None = None


@dataclass
class Reference:
    """The optimum (or an upper bound on it) that ratios are taken against."""

    value: Fraction
    kind: str  # "flow", "brute_force", "relaxation-bound"
    seconds: float


@dataclass
class RunReport:
    cells: list
    references: dict  # instance -> Reference | None
    deltas: dict  # instance -> greedy family count

    def ratio(self, cell: Cell) -> float | None:
        ref = self.references.get(cell.instance)
        if ref is None or cell.value is None:
            return None
        if ref.value == 0:
            return 1.0
        return float(cell.value / ref.value)

    def summary(self) -> list[dict]:
        """Mean value, ratio and time per (instance, algorithm)."""
        groups: dict[tuple, list[Cell]] = {}
        for c in self.cells:
            groups.setdefault((c.instance, c.algorithm), []).append(c)
        out = []
        for (inst, algo), cs in groups.items():
            ok = [c for c in cs if c.error is None]
            row = {"instance": inst, "algorithm": algo, "runs": len(ok),
                   "error": next((c.error for c in cs if c.error), None)}
            if ok:
                row["value"] = float(sum(c.value for c in ok) / len(ok))
                row["seconds"] = sum(c.seconds for c in ok) / len(ok)
                r = [self.ratio(c) for c in ok]
                row["ratio"] = None if r[0] is None else sum(r) / len(r)
            out.append(row)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "algorithm", "repetition", "value", "seconds", "ratio", "reference",
                    "reference_kind", "error"])
        for c in self.cells:
            ref = self.references.get(c.instance)
            r = self.ratio(c)
            w.writerow([c.instance, c.algorithm, c.repetition,
                        "" if c.value is None else _num(c.value), f"{c.seconds:.6f}",
                        "" if r is None else f"{r:.6f}",
                        "" if ref is None else _num(ref.value), "" if ref is None else ref.kind,
                        c.error or ""])
        return buf.getvalue()

    def table(self) -> str:
        lines = [f"{'instance':<20} {'algorithm':<18} {'value':>12} {'ratio':>7} {'seconds':>9}"]
        for row in self.summary():
            if row.get("value") is None:
                lines.append(f"{row['instance']:<20} {row['algorithm']:<18} error: {row['error']}")
                continue
            ratio = "-" if row["ratio"] is None else f"{row['ratio']:.3f}"
            lines.append(f"{row['instance']:<20} {row['algorithm']:<18} {row['value']:>12.1f} "
                         f"{ratio:>7} {row['seconds']:>9.4f}")
        for name, ref in self.references.items():
            if ref is not None:
                lines.append(f"# {name}: reference {_num(ref.value)} ({ref.kind}, {ref.seconds:.4f}s)")
        return "\n".join(lines)


def _num(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{float(v):.6f}"


def reference_value(inst: Instance, brute_limit: int = 24) -> Reference | None:
    """Optimum from the flow when laminar, brute force when tiny, else the
    tightest laminar-relaxation flow bound (an upper bound on the optimum)."""
    if inst.is_weighted:
        if len(inst.edges) <= brute_limit:
            t = time.perf_counter()
            v = brute_force(inst, brute_limit).value
            return Reference(v, "brute_force", time.perf_counter() - t)
        return None
    t = time.perf_counter()
    if is_laminar_instance(inst):
        v = flow_laminar(inst).value
        return Reference(v, "flow", time.perf_counter() - t)
    if len(inst.edges) <= brute_limit:
        v = brute_force(inst, brute_limit).value
        return Reference(v, "brute_force", time.perf_counter() - t)
    bounds = []
    for keep in range(2):
        relaxed = laminar_relaxation(inst, keep)
        bounds.append(flow_laminar(relaxed).value)
    return Reference(min(bounds), "relaxation-bound", (time.perf_counter() - t) / 2)


def run_experiment(instances: Mapping[str, Instance] | Sequence[Instance],
                   algorithms: Sequence[str] = ("greedy_cmm", "flow_laminar"),
                   repetitions: int = 1, master_seed: int = 0, workers: int = 1) -> RunReport:
    """Time every algorithm on every instance ``repetitions`` times.

    Solver errors are recorded per cell rather than raised. ``master_seed``
    seeds the scan order of ``greedy_cmm`` repetitions after the first
    (repetition 0 always uses input order). Rows come out ordered by
    (instance, algorithm, repetition) whatever ``workers`` is.
    """
    if not isinstance(instances, Mapping):
        instances = {f"inst{k}": inst for k, inst in enumerate(instances)}
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    jobs = [(name, algo, rep) for name in instances for algo in algorithms for rep in range(repetitions)]

    def run(job):
        name, algo, rep = job
        inst = instances[name]
        fn = ALGORITHMS[algo]
        t = time.perf_counter()
        try:
            if algo == "greedy_cmm" and rep > 0:
                asg = fn(inst, f"random:{master_seed * 1000003 + rep}")
            else:
                asg = fn(inst)
        except NotApplicable as exc:
            return Cell(name, algo, rep, None, time.perf_counter() - t, f"{type(exc).__name__}: {exc}")
        return Cell(name, algo, rep, asg.value, time.perf_counter() - t)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            cells = list(pool.map(run, jobs))
    else:
        cells = [run(j) for j in jobs]
    refs = {name: reference_value(inst) for name, inst in instances.items()}
    deltas = {name: gmis_delta(inst) for name, inst in instances.items()}
    return RunReport(cells, refs, deltas)


def config_to_dict(cfg: GenConfig) -> dict:
    return asdict(cfg)
