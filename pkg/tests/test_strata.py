import itertools
import json
import os
import time

import pytest

from anstab.exact import gr
from anstab.hearts import forward_tilt, standard_heart
from anstab.klattice import simple_twist_data
from anstab.multiscale import validate_msc
from anstab.strata import (
    EnhancedLevelGraph,
    StrataError,
    adjacency_poset,
    canonical_key,
    census,
    double_cover,
    enumerate_graphs,
    from_msc,
    prong_count,
    smooth_graph,
    undegenerate,
    unlabeled_census,
)


def graphs_by_depth(n, max_levels):
    out = {}
    for g in enumerate_graphs(n, max_levels):
        out.setdefault(g.depth, []).append(g)
    return out


class TestEnumeration:
    def test_a2_counts(self):
        gs = enumerate_graphs(2, 2)
        assert len(gs) == 3
        assert all(g.depth == 1 for g in gs)
        assert len(unlabeled_census(gs)) == 1

    def test_a3_level_one(self):
        by_depth = graphs_by_depth(3, 1)
        groups = unlabeled_census(by_depth[1])
        counts = sorted(
            (len(members), prong_count(members[0])[0])
            for members in groups.values()
        )
        assert counts == [(3, 16), (4, 5), (6, 4)]

    def test_a3_level_two(self):
        by_depth = graphs_by_depth(3, 2)
        l2 = by_depth[2]
        groups = unlabeled_census(l2)
        assert len(groups) == 2
        sizes = sorted(len(m) for m in groups.values())
        assert sizes == [6, 12]  # slanted cherries, three-level chains

    def test_enhancements_forced(self):
        for g in enumerate_graphs(4, 2):
            for v in range(g.vertex_count()):
                assert g.vertex_order_sum(v) == -4

    def test_type_count_matches_rho_census(self):
        # unlabeled depth-1 graphs correspond to the valid component types
        for n in range(2, 7):
            gs = [g for g in enumerate_graphs(n, 1)]
            unl = len(unlabeled_census(gs))
            rhos = 0
            for k in range(1, n + 1):
                for sizes in itertools.combinations_with_replacement(
                    range(1, n + 1), k
                ):
                    total = sum(s + 1 for s in sizes)
                    if total > n + 1:
                        continue
                    if total == n + 1 and k < 2:
                        continue
                    rhos += 1
            assert unl == rhos, n

    def test_pole_order(self):
        g = enumerate_graphs(3, 1)[0]
        assert g.pole_order == -8
        assert smooth_graph(2).pole_order == -7


class TestUndegeneration:
    def test_single_passage(self):
        g = enumerate_graphs(2, 1)[0]
        sm = undegenerate(g, [1])
        assert sm.vertex_count() == 1 and sm.depth == 0

    def test_slanted_cherry(self):
        l2 = [g for g in enumerate_graphs(3, 2) if g.depth == 2]
        slanted = next(
            g for g in l2 if all(u == 0 for (u, _, _) in g.edges)
        )
        d2 = undegenerate(slanted, [1])
        d3 = undegenerate(slanted, [2])
        assert d2.depth == 1 and len(d2.edges) == 1 and d2.edges[0][2] == 4
        assert d3.depth == 1 and len(d3.edges) == 2
        assert sorted(k for (_, _, k) in d3.edges) == [4, 4]

    def test_chain(self):
        l2 = [g for g in enumerate_graphs(3, 2) if g.depth == 2]
        chain = next(g for g in l2 if any(u != 0 for (u, _, _) in g.edges))
        assert [k for (_, _, k) in undegenerate(chain, [1]).edges] == [4]
        assert [k for (_, _, k) in undegenerate(chain, [2]).edges] == [5]

    def test_contraction_commutes(self):
        for g in enumerate_graphs(4, 2):
            if g.depth != 2:
                continue
            both = undegenerate(g, [1, 2])
            assert canonical_key(both, labeled=True) == canonical_key(
                undegenerate(undegenerate(g, [2]), [1]), labeled=True
            )

    def test_bad_passage(self):
        with pytest.raises(StrataError):
            undegenerate(enumerate_graphs(2, 1)[0], [3])


class TestPoset:
    def test_a3_incidences(self):
        gs = enumerate_graphs(3, 2)
        keyed, rel = adjacency_poset(gs, labeled=False)

        def name(key):
            g = keyed[key]
            total, per = prong_count(g)
            return (g.depth, tuple(sorted(per)))

        named = {name(k): sorted(name(u) for u in rel[k]) for k in keyed}
        assert named[(2, (4, 5))] == [(1, (4,)), (1, (5,))]
        assert named[(2, (4, 4))] == [(1, (4,)), (1, (4, 4))]
        for k in keyed:
            if keyed[k].depth == 1:
                assert named[name(k)] == []

    def test_rank_is_depth(self):
        gs = enumerate_graphs(3, 2)
        keyed, rel = adjacency_poset(gs, labeled=False)
        for k, ups in rel.items():
            # strict undegenerations live at strictly smaller depth
            for u in ups:
                assert keyed[u].depth < keyed[k].depth

    def test_single_graph(self):
        g = enumerate_graphs(2, 1)[:1]
        keyed, rel = adjacency_poset(g)
        assert len(keyed) == 1 and all(not v for v in rel.values())


class TestDoubleCover:
    def test_two_zero_collision(self):
        g = enumerate_graphs(2, 1)[0]  # kappa = 4
        dc = double_cover(g)
        assert dc.kappa_hats() == [2]
        assert dc.edge_data[0][1] == 2  # two preimage edges
        assert dc.cover_zero_orders[1] == (2, 2)
        assert dc.cover_genus == (0, 0)

    def test_three_zero_collision(self):
        d1 = next(
            g for g in enumerate_graphs(3, 1) if prong_count(g)[0] == 5
        )
        dc = double_cover(d1)
        assert dc.kappa_hats() == [5]
        assert dc.edge_data[0][1] == 1
        assert dc.cover_genus[1] == 1  # bottom vertex lifts to genus one

    def test_matches_twist_data(self):
        for n in range(2, 9):
            for g in enumerate_graphs(n, 1):
                sizes = sorted((k - 3 for (_, _, k) in g.edges), reverse=True)
                data = simple_twist_data([sizes])
                hats = sorted(c.kappa_hat for c in data.levels[0].components)
                assert sorted(double_cover(g).kappa_hats()) == hats


class TestProngs:
    def test_examples(self):
        gs3 = enumerate_graphs(3, 1)
        by_type = {prong_count(m[0])[0] for m in unlabeled_census(gs3).values()}
        assert by_type == {4, 5, 16}

    def test_a2(self):
        assert prong_count(enumerate_graphs(2, 1)[0]) == (4, [4])


class TestFromMsc:
    def test_a2_limit(self):
        top = forward_tilt(standard_heart(2), 2)
        m = validate_msc(top, [{1: gr(0), 2: gr(-1)}, {1: gr(1)}])
        g = from_msc(m)
        assert canonical_key(g) == canonical_key(enumerate_graphs(2, 1)[0])

    def test_honest(self):
        m = validate_msc(standard_heart(2), [{1: gr(0, 1), 2: gr(0, 1)}])
        assert from_msc(m).vertex_count() == 1

    def test_cherry(self):
        h = standard_heart(3)
        m = validate_msc(
            h, [{1: gr(0), 2: gr(0, 1), 3: gr(0)}, {1: gr(1), 3: gr(2)}]
        )
        target = next(
            g for g in enumerate_graphs(3, 1) if prong_count(g)[0] == 16
        )
        assert canonical_key(from_msc(m)) == canonical_key(target)

    def test_enhancement_matches_component_size(self):
        import random

        from anstab.multiscale import type_rho
        from anstab.sampling import random_msc

        rng = random.Random(13)
        for _ in range(40):
            m = random_msc(rng, rng.choice([3, 4, 5]), max_levels=2)
            g = from_msc(m)
            level1 = sorted(
                k - 3 for (u, _, k) in g.edges if u == 0
            )
            # level-1 components of the msc whose parent is the top vertex
            rho1 = sorted(type_rho(m)[0]) if m.L else []
            if m.L:
                assert level1 == rho1


class TestSerialization:
    def test_json_roundtrip(self):
        g = enumerate_graphs(3, 2)[0]
        assert canonical_key(
            EnhancedLevelGraph.from_json(g.to_json()), labeled=True
        ) == canonical_key(g, labeled=True)

    def test_dot(self):
        dot = enumerate_graphs(3, 1)[0].to_dot()
        assert "rank=same" in dot and "->" in dot

    def test_census_runtime(self):
        start = time.monotonic()
        data = census(3, 2)
        assert time.monotonic() - start < 1.0
        assert data["labeled_total"] == 31

    def test_golden_census(self):
        here = os.path.dirname(__file__)
        path = os.path.join(
            here, "..", "src", "anstab", "data", "a3_census.json"
        )
        with open(path) as fh:
            golden = json.load(fh)
        live = census(3, 2)
        assert live == golden
