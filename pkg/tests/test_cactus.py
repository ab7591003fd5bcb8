"""Cactus solver with pre-occupied searchers: rules, traces, oracle sweeps."""

import itertools
import random
import re

import pytest

from onemove.cactus import (
    CactusInstance,
    CactusPlan,
    cactus_solve,
    parse_cactus_instance,
    preoccupied_cycle_solve,
    preoccupied_path_solve,
    write_cactus_instance,
)
from onemove.engines import cfms_run
from onemove.exact import cfms_exact, czf_exact
from onemove.graphs import FamilySpec, Graph, generate


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def random_cactus(rng, n):
    edges = set()
    used = 1
    while used < n:
        anchor = rng.randrange(used)
        room = n - used
        if room >= 2 and rng.random() < 0.45:
            k = rng.randint(2, min(room, 5))
            cyc = [anchor] + list(range(used, used + k))
            for i in range(len(cyc)):
                a, b = cyc[i], cyc[(i + 1) % len(cyc)]
                edges.add((min(a, b), max(a, b)))
            used += k
        else:
            edges.add((anchor, used))
            used += 1
    return Graph(n, edges)


def plan_clears(g, plan, pre):
    state = cfms_run(g, plan.strategy, preoccupied=pre)
    return state.success and state.ever_occupied == frozenset(range(g.n))


class TestInstance:
    def test_rejects_non_cactus(self):
        g = generate(FamilySpec("complete", 4))
        with pytest.raises(ValueError, match="cactus"):
            CactusInstance(g)

    def test_rejects_out_of_range_preoccupied(self):
        with pytest.raises(ValueError):
            CactusInstance(path_graph(3), frozenset({5}))

    def test_accepts_disconnected_cactus(self):
        g = Graph(5, [(0, 1), (2, 3), (3, 4), (2, 4)])
        CactusInstance(g, frozenset({0}))


class TestPathSolve:
    def test_edge_needs_one(self):
        value, _ = preoccupied_path_solve(path_graph(2))
        assert value == 1

    def test_middle_preoccupied_needs_one(self):
        value, _ = preoccupied_path_solve(path_graph(3), {1})
        assert value == 1

    def test_both_preoccupied_needs_none(self):
        value, _ = preoccupied_path_solve(path_graph(2), {0, 1})
        assert value == 0

    def test_rejects_cycle(self):
        with pytest.raises(ValueError):
            preoccupied_path_solve(cycle_graph(4))

    def test_rejects_branching(self):
        with pytest.raises(ValueError):
            preoccupied_path_solve(generate(FamilySpec("star", 4)))

    def test_exhaustive_small_paths(self):
        for n in range(1, 8):
            g = path_graph(n)
            for r in range(n + 1):
                for pre in itertools.combinations(range(n), r):
                    pre = frozenset(pre)
                    value, strategy = preoccupied_path_solve(g, pre)
                    assert value == cfms_exact(g, preoccupied=pre).value
                    state = cfms_run(g, strategy, preoccupied=pre)
                    assert state.success

    def test_disjoint_paths_sum(self):
        g = Graph(5, [(0, 1), (3, 4)])
        value, _ = preoccupied_path_solve(g, {3})
        assert value == cfms_exact(g, preoccupied=frozenset({3})).value


class TestCycleSolve:
    def test_hexagon_without_preoccupied(self):
        value, _ = preoccupied_cycle_solve(cycle_graph(6))
        assert value == 3

    def test_triangle_one_preoccupied(self):
        value, _ = preoccupied_cycle_solve(cycle_graph(3), {0})
        assert value == 1

    def test_adjacent_pair_matches_path(self):
        value, _ = preoccupied_cycle_solve(cycle_graph(4), {0, 1})
        path_value, _ = preoccupied_path_solve(
            Graph(4, [(1, 2), (2, 3), (0, 3)]), {0, 1})
        assert value == path_value == 0

    def test_opposite_pair_needs_one(self):
        # With searchers only on two opposite vertices, each faces two
        # contaminated edges and nobody may slide first; one extra searcher
        # next to either breaks the standoff.
        value, strategy = preoccupied_cycle_solve(cycle_graph(4), {1, 3})
        assert value == 1
        state = cfms_run(cycle_graph(4), strategy, preoccupied=frozenset({1, 3}))
        assert state.success

    def test_rejects_non_cycle(self):
        with pytest.raises(ValueError):
            preoccupied_cycle_solve(path_graph(4))

    def test_exhaustive_small_cycles(self):
        for n in range(3, 8):
            g = cycle_graph(n)
            for r in range(n + 1):
                for pre in itertools.combinations(range(n), r):
                    pre = frozenset(pre)
                    value, strategy = preoccupied_cycle_solve(g, pre)
                    assert value == cfms_exact(g, preoccupied=pre).value
                    state = cfms_run(g, strategy, preoccupied=pre)
                    assert state.success


class TestCactusSolve:
    def test_bowtie(self):
        plan = cactus_solve(CactusInstance(generate(FamilySpec("bowtie", 5))))
        assert plan.additional_searchers == 3
        assert plan.trace == (
            "step5.3 cycle=(0,1,2) extender=2 path=1 cycle=2",
            "isolated-cycle (2,3,4) case=none adds=2",
        )

    def test_square_with_leaf(self):
        g = Graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4)])
        plan = cactus_solve(CactusInstance(g))
        assert plan.additional_searchers == 3
        assert plan.trace == (
            "step1 v=4 u=0",
            "step1 v=1 u=2",
            "isolated v=3 placed",
        )

    def test_two_squares_with_leaf(self):
        g = Graph(8, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (4, 5),
                      (5, 6), (0, 6), (0, 7)])
        plan = cactus_solve(CactusInstance(g))
        assert plan.additional_searchers == czf_exact(g).value == 5

    def test_shared_vertex_squares_with_preoccupied(self):
        # A square and a pentagon sharing vertex 0; the square's interior
        # pair {1,3} cannot clear the square alone even though the path
        # they span needs nothing, so two extra searchers are required.
        g = Graph(9, [(0, 1), (0, 3), (0, 4), (0, 8), (1, 2), (2, 3),
                      (4, 5), (5, 6), (6, 7), (7, 8)])
        pre = frozenset({1, 3, 6})
        plan = cactus_solve(CactusInstance(g, pre))
        assert plan.additional_searchers == 2
        assert plan_clears(g, plan, pre)

    def test_trace_shape(self):
        pattern = re.compile(
            r"^(step[1-4] v=\d+ u=\d+"
            r"|isolated v=\d+ (preoccupied|placed)"
            r"|isolated-cycle \(\d+(,\d+)*\) case=(none|adjacent|a|b|c) adds=\d+"
            r"|step5\.[1-4] cycle=\(\d+(,\d+)*\) extender=\d+ path=\d+ cycle=\d+"
            r"( case=(none|adjacent|a|b|c))?)$")
        rng = random.Random(50)
        for _ in range(40):
            g = random_cactus(rng, rng.randint(1, 10))
            pre = frozenset(v for v in range(g.n) if rng.random() < 0.3)
            plan = cactus_solve(CactusInstance(g, pre))
            for line in plan.trace:
                assert pattern.match(line), line

    def test_empty_graph(self):
        plan = cactus_solve(CactusInstance(Graph(0, [])))
        assert plan.additional_searchers == 0
        assert plan.trace == ()

    def test_isolated_vertices(self):
        plan = cactus_solve(CactusInstance(Graph(2, []), frozenset({0})))
        assert plan.additional_searchers == 1
        assert plan.trace == ("isolated v=0 preoccupied", "isolated v=1 placed")

    def test_matches_czf_without_preoccupied(self):
        rng = random.Random(51)
        for _ in range(60):
            g = random_cactus(rng, rng.randint(1, 12))
            plan = cactus_solve(CactusInstance(g))
            assert plan.additional_searchers == czf_exact(g).value
            assert plan_clears(g, plan, frozenset())

    def test_matches_extended_oracle_with_preoccupied(self):
        rng = random.Random(52)
        for _ in range(50):
            g = random_cactus(rng, rng.randint(1, 9))
            pre = frozenset(v for v in range(g.n) if rng.random() < 0.35)
            plan = cactus_solve(CactusInstance(g, pre))
            assert plan.additional_searchers == cfms_exact(g, preoccupied=pre).value
            assert plan_clears(g, plan, pre)

    def test_disconnected_instances(self):
        rng = random.Random(53)
        for _ in range(25):
            a = random_cactus(rng, rng.randint(1, 5))
            b = random_cactus(rng, rng.randint(1, 5))
            edges = set(a.edges) | {(u + a.n, v + a.n) for u, v in b.edges}
            g = Graph(a.n + b.n, edges)
            pre = frozenset(v for v in range(g.n) if rng.random() < 0.3)
            plan = cactus_solve(CactusInstance(g, pre))
            assert plan.additional_searchers == cfms_exact(g, preoccupied=pre).value


class TestTextFormat:
    def test_roundtrip(self):
        g = Graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4)])
        inst = CactusInstance(g, frozenset({2, 4}))
        text = write_cactus_instance(inst)
        assert text.splitlines()[-1] == "preoccupied 2 4"
        assert parse_cactus_instance(text) == inst

    def test_roundtrip_without_preoccupied(self):
        inst = CactusInstance(path_graph(3))
        again = parse_cactus_instance(write_cactus_instance(inst))
        assert again == inst

    def test_rejects_duplicate_preoccupied_lines(self):
        text = "2 1\n0 1\npreoccupied 0\npreoccupied 1\n"
        with pytest.raises(ValueError):
            parse_cactus_instance(text)

    def test_rejects_bad_vertex_token(self):
        text = "2 1\n0 1\npreoccupied x\n"
        with pytest.raises(ValueError):
            parse_cactus_instance(text)
