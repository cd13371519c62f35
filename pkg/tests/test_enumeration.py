from itertools import combinations

import networkx as nx
import pytest

from models import OutOfRange
from services.enumeration import (
    BudgetExceeded,
    EnumerationSpec,
    RandomSampler,
    canonical_form,
    canonical_poset,
    enumerate_cyclic,
    level_patterns,
    random_cyclic,
)


def hasse_digraph(poset):
    graph = nx.DiGraph()
    graph.add_nodes_from((x, {'rank': poset.rank_of(x)}) for x in poset.elements)
    graph.add_edges_from(poset.covers)
    return graph




class TestEnumerationSpec:
    def test_profiles_are_ordered_by_size(self):
        assert EnumerationSpec(4).level_profiles() == [(1,), (1, 1), (2, 1), (1, 1, 1)]


    def test_max_rank(self):
        assert EnumerationSpec(4, max_rank=1).level_profiles() == [(1,)]


    def test_rejects_bad_bounds(self):
        with pytest.raises(OutOfRange):
            EnumerationSpec(1)
        with pytest.raises(OutOfRange):
            EnumerationSpec(5, max_rank=0)


    def test_isomorph_rejection_has_a_size_limit(self):
        with pytest.raises(OutOfRange):
            EnumerationSpec(10)
        assert EnumerationSpec(10, reject_isomorphs=False).max_elements == 10




class TestEnumerate:
    def test_three_elements(self):
        posets = list(enumerate_cyclic(EnumerationSpec(3)))
        assert len(posets) == 2
        assert [p.rank for p in posets] == [1, 2]


    def test_diamond_appears_once(self, diamond):
        key, _ = canonical_form(diamond)
        matches = [p for p in enumerate_cyclic(EnumerationSpec(4)) if canonical_form(p)[0] == key]
        assert matches == [canonical_poset(diamond)]


    def test_every_result_is_cyclic(self):
        assert all(p.is_cyclic() for p in enumerate_cyclic(EnumerationSpec(6)))


    def test_no_two_results_are_isomorphic(self):
        graphs = [hasse_digraph(p) for p in enumerate_cyclic(EnumerationSpec(6))]
        same_rank = lambda a, b: a['rank'] == b['rank']
        for g, h in combinations(graphs, 2):
            assert not nx.is_isomorphic(g, h, node_match=same_rank)


    def test_keeping_isomorphs_yields_more(self):
        kept = sum(1 for _ in enumerate_cyclic(EnumerationSpec(6, reject_isomorphs=False)))
        rejected = sum(1 for _ in enumerate_cyclic(EnumerationSpec(6)))
        assert kept > rejected


    def test_budget(self):
        with pytest.raises(BudgetExceeded) as exc:
            list(enumerate_cyclic(EnumerationSpec(6, budget=10)))
        assert exc.value.budget == 10


    def test_level_patterns(self):
        assert len(level_patterns(2, 2)) == 7
        assert len(level_patterns(1, 3)) == 1




class TestCanonicalForm:
    def test_relabeling_does_not_change_the_key(self, cycle4):
        renamed = cycle4.relabel({'a': 'b', 'b': 'a', 'u': 'q', 'v': 'u'})
        assert canonical_form(renamed)[0] == canonical_form(cycle4)[0]


    def test_distinguishes_pinch_from_cycle4(self, pinch, cycle4):
        assert canonical_form(pinch)[0] != canonical_form(cycle4)[0]


    def test_canonical_poset_is_isomorphic(self, pinch):
        canonical = canonical_poset(pinch)
        assert set(canonical.plus) == {'x1_0', 'x1_1', 'x2_0', 'x2_1', 'x3_0'}
        assert nx.is_isomorphic(hasse_digraph(canonical), hasse_digraph(pinch))




class TestRandomSampler:
    def test_same_seed_same_posets(self):
        assert random_cyclic(11, 5) == random_cyclic(11, 5)


    def test_samples_respect_bounds(self):
        sampler = RandomSampler(seed=3, max_rank=3, max_width=2)
        for _ in range(20):
            poset = sampler.sample()
            assert poset.is_cyclic()
            assert poset.rank <= 3
            assert all(len(poset.level(r)) <= 2 for r in range(1, poset.rank + 1))


    def test_fixed_rank(self):
        assert RandomSampler(seed=1).sample(rank=2).rank == 2


    def test_bad_bounds(self):
        with pytest.raises(OutOfRange):
            RandomSampler(max_rank=0)
