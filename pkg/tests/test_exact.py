import random
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, strategies as st

from _instances import random_instance, single_platform_instance
from _oracles import naive_feasible, naive_opt
from fairmatch import _kernels
from fairmatch.exact import (InstanceTooLarge, TooManyClasses, WeightedNotSupported, brute_force,
                             build_flow_network, build_type_table, flow_laminar, half_approx_multi,
                             type_ip)
from fairmatch.laminar import NotLaminar
from fairmatch.model import ClassConstraint, Instance, is_feasible


class TestBruteForce:
    def test_inst_a(self, inst_a):
        asg = brute_force(inst_a)
        assert asg.value == 2 and asg.matched == {("a1", "p"), ("a3", "p")}

    def test_triangle(self, inst_b):
        assert brute_force(inst_b).value == 1

    def test_no_edges(self):
        inst = Instance(items=[], platforms=["p"], edges=[], platform_quota={"p": 3})
        assert brute_force(inst).value == 0

    def test_limit(self):
        inst = random_instance(1, n_items=12, n_platforms=3, max_edges=40)
        assert len(inst.edges) > 5
        with pytest.raises(InstanceTooLarge):
            brute_force(inst, limit=5)

    def test_lexicographic_tie_break(self):
        e = [(f"a{i}", "p") for i in range(4)]
        inst = Instance(items=[a for a, _ in e], platforms=["p"], edges=e, platform_quota={"p": 2})
        assert brute_force(inst).matched == {e[0], e[1]}


@given(st.integers(0, 10**6))
def test_brute_force_equals_definition(seed):
    inst = random_instance(seed, max_edges=12, model=1 + seed % 2, laminar=seed % 2 == 0,
                           weighted=seed % 4 == 0)
    asg = brute_force(inst)
    assert naive_feasible(inst, asg.matched)
    assert asg.value == naive_opt(inst)


class TestFlow:
    def test_inst_c(self, inst_c):
        asg = flow_laminar(inst_c)
        assert asg.value == 2 == brute_force(inst_c).value
        assert is_feasible(inst_c, asg)

    def test_inst_a_not_laminar(self, inst_a):
        with pytest.raises(NotLaminar):
            flow_laminar(inst_a)

    def test_complete_bipartite(self):
        edges = [(a, p) for a in ("a1", "a2") for p in ("p1", "p2")]
        inst = Instance(items=["a1", "a2"], platforms=["p1", "p2"], edges=edges,
                        platform_quota={"p1": 1, "p2": 1})
        assert flow_laminar(inst).value == 2 == brute_force(inst).value

    def test_weighted_refused(self, inst_c):
        w = Instance(items=inst_c.items, platforms=inst_c.platforms, edges=inst_c.edges,
                     platform_quota=inst_c.platform_quota, platform_classes=inst_c.platform_classes,
                     edge_weight={e: 2 for e in inst_c.edges})
        with pytest.raises(WeightedNotSupported):
            flow_laminar(w)

    def test_unit_weights_are_unweighted(self, inst_c):
        w = Instance(items=inst_c.items, platforms=inst_c.platforms, edges=inst_c.edges,
                     platform_quota=inst_c.platform_quota, platform_classes=inst_c.platform_classes,
                     edge_weight={e: 1 for e in inst_c.edges})
        assert flow_laminar(w).value == 2


@given(st.integers(0, 10**6))
def test_flow_equals_brute_force(seed):
    inst = random_instance(seed, n_items=(2, 10), max_edges=20, model=1 + seed % 2, laminar=True)
    asg = flow_laminar(inst)
    assert naive_feasible(inst, asg.matched)
    assert asg.value == brute_force(inst).value


@given(st.integers(0, 10**6))
def test_flow_conservation(seed):
    inst = random_instance(seed, n_items=(2, 10), model=2, laminar=True)
    net = build_flow_network(inst)
    value, flow = net.solve()
    assert np.all(flow >= 0) and np.all(flow <= net.caps)
    balance = defaultdict(int)
    for t, h, f in zip(net.tails, net.heads, flow):
        balance[t] -= f
        balance[h] += f
    assert balance[net.source] == -value and balance[net.sink] == value
    assert all(b == 0 for v, b in balance.items() if v not in (net.source, net.sink))


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_flow_value_independent_of_arc_order(seed, shuffle_seed):
    inst = random_instance(seed, n_items=(2, 10), model=2, laminar=True)
    net = build_flow_network(inst)
    perm = np.random.default_rng(shuffle_seed).permutation(len(net.tails))
    v1, _ = net.solve()
    v2, _ = _kernels.max_flow(net.n_nodes, net.tails[perm], net.heads[perm], net.caps[perm],
                              net.source, net.sink)
    assert v1 == v2


class TestTypeIp:
    def test_inst_a(self, inst_a):
        table = build_type_table(inst_a)
        assert len(table) == 3  # {C1}, {C1, C2}, {C2}
        assert type_ip(inst_a).value == 2 == brute_force(inst_a).value

    def test_single_class_forced(self):
        e = [(f"a{i}", "p") for i in range(6)]
        inst = Instance(items=[a for a, _ in e], platforms=["p"], edges=e, platform_quota={"p": 6},
                        platform_classes=[ClassConstraint("all", "p", e, 4)])
        assert type_ip(inst).value == 4

    @pytest.mark.parametrize("qp,n,expect", [(3, 5, 3), (9, 5, 5), (0, 4, 0)])
    def test_no_classes(self, qp, n, expect):
        e = [(f"a{i}", "p") for i in range(n)]
        inst = Instance(items=[a for a, _ in e], platforms=["p"], edges=e, platform_quota={"p": qp})
        assert type_ip(inst).value == expect

    def test_decodes_lowest_index_first(self):
        e = [(f"a{i}", "p") for i in range(5)]
        inst = Instance(items=[a for a, _ in e], platforms=["p"], edges=e, platform_quota={"p": 2})
        assert type_ip(inst).matched == {e[0], e[1]}

    def test_class_cap(self):
        inst = single_platform_instance(3, n_items=(6, 6), max_classes=4)
        e = inst.edges
        many = [ClassConstraint(f"c{i}", "p", [e[i % 6]], 1) for i in range(5)]
        big = Instance(items=inst.items, platforms=["p"], edges=e, platform_quota={"p": 6},
                       platform_classes=many)
        with pytest.raises(TooManyClasses):
            type_ip(big, max_classes=4)

    def test_needs_one_platform(self, inst_d):
        from fairmatch.model import NotApplicable
        with pytest.raises(NotApplicable):
            type_ip(inst_d)


@given(st.integers(0, 10**6))
def test_type_ip_equals_brute_force(seed):
    inst = single_platform_instance(seed)
    asg = type_ip(inst)
    assert naive_feasible(inst, asg.matched)
    assert asg.value == brute_force(inst).value


class TestHalfApprox:
    def test_inst_d(self, inst_d):
        assert half_approx_multi(inst_d).value >= 1

    def test_single_platform(self):
        inst = single_platform_instance(17)
        assert half_approx_multi(inst).value == type_ip(inst).value


@given(st.integers(0, 10**6))
def test_half_approx_bound(seed):
    inst = random_instance(seed, n_items=(2, 10), max_edges=18, model=1, laminar=seed % 2 == 0)
    got = half_approx_multi(inst)
    assert naive_feasible(inst, got.matched)
    assert 2 * got.value >= brute_force(inst).value


def test_type_table_partitions_edges():
    rng = random.Random(0)
    for seed in range(50):
        inst = single_platform_instance(rng.randrange(10**6))
        table = build_type_table(inst)
        seen = [e for es in table.types.values() for e in es]
        assert len(seen) == len(set(seen))
        assert len(table) <= 2 ** len(table.classes)
