import pytest

from models import (
    STAR,
    DanglingElement,
    DuplicateElement,
    EmptyW,
    NotCyclic,
    NotPure,
    OutOfRange,
    RankGap,
    RankMismatch,
    ReservedElement,
    UnknownElement,
    WNotLevel,
    hasse_connected,
    validate,
)
from seed import seed_documents
from services.fixtures import UnknownFixture, fixture, fixture_names
from utils import DocumentError, parse_document




class TestValidate:
    def test_diamond_ranks(self, diamond):
        assert {x: diamond.rank_of(x) for x in diamond.plus} == {'a': 1, 'b': 1, 'c': 2}
        assert diamond.rank_of(STAR) == 0
        assert diamond.covers_pair('a', STAR)


    def test_pinch_is_cyclic(self, pinch):
        assert pinch.is_cyclic()
        assert pinch.top == 'x'
        assert pinch.rank == 3


    def test_rank_gap(self):
        with pytest.raises(RankGap) as exc:
            validate(['a', 'c'], {'a': 1, 'c': 3}, [('c', 'a')])
        assert exc.value.code == 'RankGap'


    def test_collects_every_violation(self):
        with pytest.raises(RankGap) as exc:
            validate(['a', 'c', 'd'], {'a': 1, 'c': 3, 'd': 2}, [('c', 'a'), ('d', 'zz')])
        codes = [v.code for v in exc.value.violations]
        assert codes[0] == 'RankGap'
        assert 'UnknownElement' in codes
        assert 'DanglingElement' in codes


    def test_dangling_element(self):
        with pytest.raises(DanglingElement):
            validate(['a', 'b'], {'a': 1, 'b': 2}, [])


    def test_duplicate_and_reserved(self):
        with pytest.raises(DuplicateElement):
            validate(['a', 'a'], {'a': 1}, [])
        with pytest.raises(ReservedElement):
            validate(['a'], {'a': 0}, [])


    def test_unknown_element(self, diamond):
        with pytest.raises(UnknownElement):
            diamond.rank_of('zz')


    def test_not_cyclic(self):
        poset = validate(['a', 'b'], {'a': 1, 'b': 1}, [])
        assert not poset.is_cyclic()
        with pytest.raises(NotCyclic):
            poset.top




class TestSubposets:
    def test_principal_ideal(self, pinch):
        ideal = pinch.principal_ideal('u')
        assert set(ideal.elements) == {STAR, 'a', 'u'}
        assert ideal.is_cyclic()


    def test_below_rejects_empty_and_mixed_levels(self, pinch):
        with pytest.raises(EmptyW):
            pinch.below([])
        with pytest.raises(WNotLevel):
            pinch.layer_window(['a', 'u'], 0)


    def test_layer_window_excludes_star(self, pinch):
        window = pinch.layer_window(['x'], 2)
        assert window.members == frozenset({'x', 'u', 'v', 'a', 'b'})
        with pytest.raises(OutOfRange):
            pinch.layer_window(['x'], 3)


    def test_gamma_ai(self, cycle4):
        assert cycle4.gamma_ai('x', 3).members == frozenset({'u', 'v', 'a', 'b'})
        assert cycle4.gamma_ai('x', 2).members == frozenset({'u', 'v'})


    def test_truncate_shifts_ranks(self, pinch):
        truncated = pinch.truncate(1)
        assert truncated.rank == 2
        assert truncated.rank_of('u') == 1
        assert truncated.covers_pair('u', STAR)


    def test_sphere_and_open_interval(self, cycle4):
        assert cycle4.sphere('x', 2).members == frozenset({'a', 'b'})
        assert cycle4.sphere('x', 3).members == frozenset({STAR})
        assert cycle4.open_interval(STAR, 'x').members == frozenset({'a', 'b', 'u', 'v'})
        assert cycle4.open_interval('a', 'x').members == frozenset({'u', 'v'})


    def test_hasse_connected(self, pinch, cycle4):
        assert not hasse_connected(pinch.gamma_ai('x', 3))
        assert hasse_connected(cycle4.gamma_ai('x', 3))
        assert hasse_connected(pinch.subset([]))




class TestConstructions:
    def test_dual_of_diamond_is_diamond(self, diamond):
        assert diamond.dual() == diamond


    def test_dual_is_an_involution(self, pinch, cycle4):
        for poset in (pinch, cycle4):
            assert poset.dual().dual() == poset


    def test_dual_of_pinch(self, pinch):
        dual = pinch.dual()
        assert dual.rank_of('u') == 1
        assert dual.rank_of('a') == 2
        assert dual.rank_of(STAR) == 0
        assert dual.rank_of('x') == 3


    def test_dual_needs_a_pure_cyclic_poset(self):
        poset = validate(['a', 'b', 'c'], {'a': 1, 'b': 1, 'c': 2}, [('c', 'a')])
        with pytest.raises(NotCyclic):
            poset.dual()
        with pytest.raises(NotPure):
            poset.adjoin_top()


    def test_wedge_and_adjoin_top(self, cycle4):
        glued = cycle4.wedge(cycle4)
        assert len(glued) == 11
        assert set(glued.maximal_elements) == {'L.x', 'R.x'}
        closure = glued.adjoin_top()
        assert closure.top == 'top'
        assert closure.rank == 4


    def test_wedge_rank_mismatch(self, diamond, cycle4):
        with pytest.raises(RankMismatch):
            diamond.wedge(cycle4)


    def test_cyclic_poset_is_its_own_closure(self, cycle4):
        assert cycle4.drop_top().adjoin_top(name='x') == cycle4


    def test_relabel(self, diamond):
        renamed = diamond.relabel({'c': 'top'})
        assert renamed.top == 'top'
        with pytest.raises(ReservedElement):
            diamond.relabel({STAR: 'bottom'})




class TestFixtures:
    def test_names(self):
        assert fixture_names() == ['chain3', 'cycle4', 'diamond', 'hexring', 'pinch', 'wedge']


    def test_wedge_has_twelve_elements(self, wedge):
        assert len(wedge) == 12
        assert wedge.rank == 4


    def test_hexring_shape(self, hexring):
        assert [len(hexring.level(n)) for n in range(5)] == [1, 3, 3, 3, 1]


    def test_unknown_fixture(self):
        with pytest.raises(UnknownFixture):
            fixture('theta')




class TestDocuments:
    def test_seeded_documents_parse_back(self, tmp_path):
        paths = seed_documents(tmp_path, names=['diamond', 'wedge'])
        assert [p.name for p in paths] == ['diamond.poset.json', 'wedge.poset.json']
        poset, meta = parse_document(paths[1].read_text())
        assert poset == fixture('wedge')
        assert meta == {'name': 'wedge', 'field': None}


    def test_field_tag_is_normalised(self):
        doc = '{"elements": [{"id": "a", "rank": 1}], "covers": [], "field": "GF:5"}'
        assert parse_document(doc)[1]['field'] == 'gf:5'


    @pytest.mark.parametrize('text', [
        '[]',
        '{"elements": [{"id": 1, "rank": 1}], "covers": []}',
        '{"elements": [{"id": "a", "rank": 1, "label": "x"}], "covers": []}',
        '{"elements": [], "covers": [["a"]]}',
        '{"covers": []}',
    ])
    def test_malformed_documents(self, text):
        with pytest.raises(DocumentError):
            parse_document(text)
