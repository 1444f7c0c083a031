import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import helpers
from deerkg.graph import build
from deerkg.query import (
    ADJ,
    NOUN,
    VERB,
    HopSpec,
    NotFoundError,
    QueryDirection,
    QuerySpec,
    UnsupportedQueryError,
    aggregate_modifiers,
    entity_entity,
    entity_type,
    extract_modifiers,
    filter_by_modifiers,
    multihop,
)


def triangle():
    return build(
        [
            helpers.scored("t1", "A", "B", 0.9, modifiers={(VERB, "treat")}),
            helpers.scored("t2", "A", "B", 0.8, modifiers={(NOUN, "treatment")}),
            helpers.scored("t3", "B", "C", 0.95, modifiers={(NOUN, "treatment")}),
            helpers.scored("t4", "C", "A", 0.85, modifiers={(ADJ, "effective")}),
            helpers.scored("t5", "C", "A", 0.75),
        ]
    )


class TestEntityEntity:
    def test_out_direction(self):
        res = entity_entity(triangle(), "A", "B", QueryDirection.OUT)
        assert set(res.subgraph.edges) == {("A", "B")}
        assert [d.sentence_id for d in res.subgraph.edges[("A", "B")].descriptions] == [
            "t1",
            "t2",
        ]
        assert res.paths == [("A", "B")]

    def test_both_finds_reverse_edge(self):
        res = entity_entity(triangle(), "A", "C", QueryDirection.BOTH)
        assert set(res.subgraph.edges) == {("C", "A")}

    def test_unknown_id(self):
        with pytest.raises(NotFoundError) as exc:
            entity_entity(triangle(), "A", "X")
        assert "X" in str(exc.value)

    def test_no_edge_is_empty_result(self):
        g = build(
            [helpers.scored("a", "A", "B", 0.9), helpers.scored("b", "C", "D", 0.9)]
        )
        res = entity_entity(g, "A", "C")
        assert not res.subgraph.edges and not res.paths


class TestEntityType:
    def neighborhood(self):
        # hub A with typed neighbors of varying evidence volume
        records = [
            helpers.scored("n1", "A", "B", 0.9, tail_types=("Disease",)),
            helpers.scored("n2", "A", "B", 0.8, tail_types=("Disease",)),
            helpers.scored("n3", "A", "C", 0.95, tail_types=("Disease",)),
            helpers.scored("n4", "D", "A", 0.85, head_types=("Disease",)),
            helpers.scored("n5", "A", "E", 0.9, tail_types=("Chemical",)),
        ]
        return build(records)

    def test_ranked_by_description_count_then_score(self):
        g = self.neighborhood()
        res = entity_type(g, "A", "Disease")
        # B has 2 descriptions, C best score 0.95, D 0.85
        assert res.paths == [("A", "B"), ("A", "C"), ("A", "D")]

    def test_limit(self):
        g = self.neighborhood()
        res = entity_type(g, "A", "Disease", limit=2)
        assert res.paths == [("A", "B"), ("A", "C")]

    def test_limit_larger_than_neighbors(self):
        g = self.neighborhood()
        res = entity_type(g, "A", "Disease", limit=99)
        assert len(res.paths) == 3

    def test_direction_out_excludes_incoming(self):
        g = self.neighborhood()
        res = entity_type(g, "A", "Disease", QueryDirection.OUT)
        assert ("D", "A") not in res.subgraph.edges

    def test_unknown_entity(self):
        with pytest.raises(NotFoundError):
            entity_type(self.neighborhood(), "X", "Disease")

    def test_unknown_type_diagnostic(self):
        res = entity_type(self.neighborhood(), "A", "Nope")
        assert not res.subgraph.edges
        assert any("Nope" in d for d in res.diagnostics)

    def test_ranking_matches_brute_force(self):
        rng = random.Random(17)
        for _ in range(20):
            g = build(helpers.random_records(rng, 10, 40))
            start = next(iter(sorted(g.nodes)), None)
            if start is None:
                continue
            res = entity_type(g, start, "TA")
            def key(n):
                edges = [
                    e
                    for k, e in g.edges.items()
                    if k in ((start, n), (n, start))
                ]
                cnt = sum(len(e.descriptions) for e in edges)
                best = max(
                    (d.rds_score for e in edges for d in e.descriptions), default=0
                )
                return (-cnt, -best, n)
            expected = sorted(
                (
                    n
                    for n in g.nodes
                    if n != start
                    and "TA" in g.nodes[n].types
                    and (
                        (start, n) in g.edges or (n, start) in g.edges
                    )
                ),
                key=key,
            )
            assert [p[1] for p in res.paths] == expected


class TestMultihop:
    def chain(self):
        return build(
            [
                helpers.scored("c1", "A", "B", 0.9, tail_types=("TB",)),
                helpers.scored("c2", "B", "C", 0.9, head_types=("TB",), tail_types=("TC",)),
            ]
        )

    def test_two_hop_chain(self):
        spec = QuerySpec(
            start=frozenset({"A"}),
            hops=(
                HopSpec(types=frozenset({"TB"})),
                HopSpec(types=frozenset({"TC"})),
            ),
        )
        res = multihop(self.chain(), spec)
        assert res.paths == [("A", "B", "C")]
        assert set(res.subgraph.edges) == {("A", "B"), ("B", "C")}

    def test_three_hops_rejected(self):
        hop = HopSpec(types=frozenset({"T"}))
        spec = QuerySpec(start=frozenset({"A"}), hops=(hop, hop, hop))
        with pytest.raises(UnsupportedQueryError):
            multihop(self.chain(), spec)

    def test_unknown_start(self):
        spec = QuerySpec(start=frozenset({"Z"}), hops=(HopSpec(types=frozenset({"TB"})),))
        with pytest.raises(NotFoundError):
            multihop(self.chain(), spec)

    def test_entity_selector(self):
        spec = QuerySpec(
            start=frozenset({"A"}), hops=(HopSpec(entities=frozenset({"B"})),)
        )
        res = multihop(self.chain(), spec)
        assert res.paths == [("A", "B")]

    def test_two_hop_equals_composed_one_hops(self):
        rng = random.Random(23)
        for _ in range(20):
            g = build(helpers.random_records(rng, 12, 50))
            if not g.nodes:
                continue
            start = sorted(g.nodes)[0]
            hop1 = HopSpec(types=frozenset({"TA", "TB"}), limit=3)
            hop2 = HopSpec(types=frozenset({"TC"}), limit=2)
            res = multihop(g, QuerySpec(start=frozenset({start}), hops=(hop1, hop2)))
            # compose by hand: expand hop1, then hop2 from each hop-1 node
            mid = multihop(g, QuerySpec(start=frozenset({start}), hops=(hop1,)))
            expected_paths = set()
            expected_edges = set(mid.subgraph.edges)
            for (_, n1) in mid.paths:
                nxt = multihop(g, QuerySpec(start=frozenset({n1}), hops=(hop2,)))
                for (_, n2) in nxt.paths:
                    expected_paths.add((start, n1, n2))
                expected_edges |= set(nxt.subgraph.edges)
            assert set(res.paths) == expected_paths
            if expected_paths:
                assert set(res.subgraph.edges) == expected_edges

    def test_node_reachable_at_both_hops_appears_in_both_roles(self):
        g = build(
            [
                helpers.scored("x1", "A", "B", 0.9, tail_types=("T",)),
                helpers.scored("x2", "B", "C", 0.9, tail_types=("T",)),
                helpers.scored("x3", "A", "C", 0.9, tail_types=("T",)),
                helpers.scored("x4", "C", "B", 0.9, tail_types=("T",)),
            ]
        )
        hop = HopSpec(types=frozenset({"T"}), direction=QueryDirection.OUT)
        res = multihop(g, QuerySpec(start=frozenset({"A"}), hops=(hop, hop)))
        # B occurs as hop-1 and hop-2 node
        assert ("A", "B", "C") in res.paths
        assert ("A", "C", "B") in res.paths


class TestExtractModifiers:
    def test_copular_treatment_fixture(self):
        s = helpers.copular_treatment(
            "s1", "d1", "chloroquine", "effective", "effective", "covid"
        )
        head, tail = s.mentions
        assert extract_modifiers(s, head, tail) == frozenset(
            {(NOUN, "treatment"), (ADJ, "effective")}
        )

    def test_simple_verb(self):
        s = helpers.svo("s1", "d1", "chloroquine", "treats", "treat", "malaria")
        head, tail = s.mentions
        assert extract_modifiers(s, head, tail) == frozenset({(VERB, "treat")})

    def test_no_content_intermediates(self):
        # path with only function words between the mentions
        from deerkg.corpus import ROOT

        s = helpers.sent(
            "s1",
            "d1",
            [
                ("Chloroquine", "chloroquine", "PROPN"),
                ("with", "with", "ADP"),
                ("Malaria", "malaria", "PROPN"),
            ],
            [(ROOT, "root"), (0, "prep"), (1, "pobj")],
            [helpers.mention("chloroquine", 0, 1), helpers.mention("malaria", 2, 3)],
        )
        head, tail = s.mentions
        assert extract_modifiers(s, head, tail) == frozenset()

    def test_mention_tokens_excluded(self):
        s = helpers.copular_treatment(
            "s1", "d1", "hcq", "effective", "effective", "malaria", obj_adj="severe"
        )
        head, tail = s.mentions
        mods = extract_modifiers(s, head, tail)
        assert (ADJ, "severe") not in mods  # inside the tail mention span
        assert (NOUN, "treatment") in mods


class TestAggregate:
    def test_counts(self):
        res = entity_entity(triangle(), "A", "B")
        assert res.modifier_summary == [
            (NOUN, "treatment", 1),
            (VERB, "treat", 1),
        ]

    def test_empty(self):
        g = build(
            [helpers.scored("a", "A", "B", 0.9), helpers.scored("b", "C", "D", 0.9)]
        )
        res = entity_entity(g, "A", "C")
        assert aggregate_modifiers(res) == []

    def test_summary_equals_recount(self):
        rng = random.Random(31)
        for _ in range(20):
            g = build(helpers.random_records(rng, 8, 30))
            if not g.nodes:
                continue
            start = sorted(g.nodes)[0]
            res = multihop(
                g,
                QuerySpec(
                    start=frozenset({start}),
                    hops=(HopSpec(types=frozenset({"TA", "TB", "TC"})),),
                ),
            )
            recount = Counter()
            for e in res.subgraph.edges.values():
                for d in e.descriptions:
                    recount.update(d.modifiers)
            assert dict(
                ((k, l), c) for k, l, c in res.modifier_summary
            ) == dict(recount)


class TestFilterByModifiers:
    def test_all_observed_is_identity(self):
        res = entity_entity(triangle(), "A", "B")
        wanted = {(k, l) for k, l, _ in res.modifier_summary}
        filtered = filter_by_modifiers(res, wanted)
        assert set(filtered.subgraph.edges) == set(res.subgraph.edges)
        assert filtered.paths == res.paths

    def test_empty_wanted_is_identity(self):
        res = entity_entity(triangle(), "A", "B")
        assert filter_by_modifiers(res, set()) is res

    def test_drops_unsupported_edges_nodes_paths(self):
        res = entity_entity(triangle(), "A", "C")  # C->A edge, one t4 with modifier
        filtered = filter_by_modifiers(res, {(ADJ, "effective")})
        descs = filtered.subgraph.edges[("C", "A")].descriptions
        assert [d.sentence_id for d in descs] == ["t4"]
        gone = filter_by_modifiers(res, {(VERB, "nonexistent")})
        assert not gone.subgraph.edges
        assert not gone.subgraph.nodes
        assert not gone.paths

    @settings(max_examples=50, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        picks=st.sets(
            st.tuples(
                st.sampled_from(["noun", "verb", "adj"]),
                st.sampled_from(helpers.VOCAB),
            ),
            max_size=5,
        ),
    )
    def test_monotone_shrinkage(self, seed, picks):
        rng = random.Random(seed)
        g = build(helpers.random_records(rng, 8, 30))
        if not g.nodes:
            return
        start = sorted(g.nodes)[0]
        res = multihop(
            g,
            QuerySpec(
                start=frozenset({start}),
                hops=(HopSpec(types=frozenset({"TA", "TB", "TC"})),),
            ),
        )
        filtered = filter_by_modifiers(res, picks)
        assert len(filtered.subgraph.nodes) <= len(res.subgraph.nodes)
        assert len(filtered.subgraph.edges) <= len(res.subgraph.edges)
        assert set(filtered.paths) <= set(res.paths)
        n_desc = lambda r: sum(
            len(e.descriptions) for e in r.subgraph.edges.values()
        )
        assert n_desc(filtered) <= n_desc(res)
        # every kept description carries a wanted modifier
        if picks:
            for e in filtered.subgraph.edges.values():
                for d in e.descriptions:
                    assert d.modifiers & picks

    def test_successive_filters_shrink_monotonically(self):
        # hop-1 filter then hop-2 style refinement never grows the result
        res = entity_entity(triangle(), "A", "B")
        first = filter_by_modifiers(res, {(VERB, "treat"), (NOUN, "treatment")})
        second = filter_by_modifiers(first, {(VERB, "treat")})
        assert len(second.subgraph.edges) <= len(first.subgraph.edges) <= len(
            res.subgraph.edges
        )


def test_result_closure_paths_edges_present():
    rng = random.Random(41)
    for _ in range(20):
        g = build(helpers.random_records(rng, 10, 40))
        if not g.nodes:
            continue
        start = sorted(g.nodes)[0]
        res = multihop(
            g,
            QuerySpec(
                start=frozenset({start}),
                hops=(
                    HopSpec(types=frozenset({"TA", "TB"}), limit=4),
                    HopSpec(types=frozenset({"TC"}), limit=3),
                ),
            ),
        )
        for p in res.paths:
            for a, b in zip(p, p[1:]):
                assert (a, b) in res.subgraph.edges or (b, a) in res.subgraph.edges
