import pytest

from models import EmptyArgument, OutOfRange, validate
from services.algebra import build_graded
from services.criteria import (
    abh_decomposition,
    bar_criterion,
    is_uniform,
    k_range,
    koszul_by_m_sets,
    linked_split_check,
    maximally_linked,
    psi_check,
    psi_check_window,
    s_complex,
    simW_classes,
    simW_classes_linear,
    tm_sets,
    verify_theorems,
    weakly_cm,
    window_cohomology_pair,
)




class TestUniform:
    @pytest.mark.parametrize('name', ['chain3', 'diamond', 'cycle4', 'hexring'])
    def test_uniform_fixtures(self, name, request):
        assert is_uniform(request.getfixturevalue(name))


    def test_pinch_splits_at_the_top(self, pinch):
        verdict = is_uniform(pinch)
        assert not verdict
        assert verdict.witnesses == [('x', [['u'], ['v']])]


    def test_wedge_splits_at_the_adjoined_top(self, wedge):
        verdict = is_uniform(wedge)
        assert [x for x, _ in verdict.witnesses] == ['top']




class TestSimWClasses:
    def test_pinch_top(self, pinch):
        classes = simW_classes(pinch, ['x'])
        assert classes == [frozenset({'a'}), frozenset({'b'}), frozenset({'u', 'v'}), frozenset({'x'})]


    def test_pinch_middle(self, pinch):
        classes = simW_classes(pinch, ['u', 'v'])
        assert frozenset({'a'}) in classes
        assert frozenset({'b'}) in classes
        assert all(len(c) == 1 for c in classes)


    def test_linear_reading_agrees(self, pinch, any_field):
        algebra = build_graded(pinch, any_field)
        assert simW_classes_linear(algebra, ['x']) == simW_classes(pinch, ['x'])




class TestLevelSets:
    def test_diamond(self, diamond):
        family = tm_sets(diamond)
        assert [W.members for W in family.T[2]] == [frozenset({'c'})]
        assert [W.members for W in family.T[1]] == [frozenset({'a', 'b'})]
        assert [W.members for W in family.M[1]] == [frozenset({'a'}), frozenset({'b'})]


    def test_pinch(self, pinch):
        family = tm_sets(pinch)
        assert family.to_dict()['T'] == {'1': [['a'], ['b']], '2': [['u', 'v']], '3': [['x']]}
        assert family.to_dict()['M']['2'] == [['u'], ['v']]


    def test_maximally_linked(self, cycle4, pinch):
        assert maximally_linked(cycle4, ['u', 'v']) == [frozenset({'u', 'v'})]
        assert maximally_linked(pinch, ['u', 'v']) == [frozenset({'u'}), frozenset({'v'})]


    def test_top_level_m_set_is_the_top(self, cycle4):
        assert [W.members for W in tm_sets(cycle4).M[3]] == [frozenset({'x'})]




class TestSComplex:
    def test_pinch_window_of_depth_two(self, pinch, QQ):
        sc = s_complex(pinch, pinch.layer_window(['x'], 2), QQ)
        assert sc.dims.dims == (2, 0, 0)
        assert sc.dims.at(0) == 2


    def test_pinch_window_of_depth_one(self, pinch, QQ):
        sc = s_complex(pinch, pinch.layer_window(['x'], 1), QQ)
        assert sc.dims.dims == (2, 1)
        assert sc.dims.at(0) == 1
        assert sc.dims.at(1) == 0


    def test_diamond_whole(self, diamond, QQ):
        sc = s_complex(diamond, diamond.plus, QQ)
        assert sc.dims.dims == (2, 1)
        assert [x for x, _ in sc.basis(0)] == ['a', 'b']


    def test_empty_base(self, diamond, QQ):
        with pytest.raises(EmptyArgument):
            s_complex(diamond, [], QQ)




class TestPsi:
    def test_cycle4_bottom(self, cycle4, any_field):
        report = psi_check(cycle4, 0, any_field)
        assert report.s_dims == report.r_dims == (2, 2, 1)
        assert report.ok


    @pytest.mark.parametrize('name', ['diamond', 'pinch', 'hexring'])
    def test_every_k(self, name, request, QQ):
        poset = request.getfixturevalue(name)
        algebra = build_graded(poset, QQ)
        assert all(psi_check(poset, k, QQ, algebra).ok for k in range(poset.rank))


    def test_window(self, pinch, QQ):
        report = psi_check_window(pinch, ['x'], 1, QQ)
        assert report.ok
        assert report.to_dict()['label'] == "W=['x'],k=1"


    def test_k_out_of_range(self, diamond, QQ):
        with pytest.raises(OutOfRange):
            psi_check(diamond, 2, QQ)




class TestWeaklyCM:
    @pytest.mark.parametrize('name', ['chain3', 'diamond', 'pinch', 'cycle4', 'wedge'])
    def test_weakly_cm_fixtures(self, name, request, any_field):
        assert weakly_cm(request.getfixturevalue(name), any_field)


    def test_hexring_fails_at_the_middle_level(self, hexring, QQ):
        verdict = weakly_cm(hexring, QQ)
        assert not verdict
        assert any(W == ('y1', 'y2', 'y3') and k == 2 for _, _, W, k, _ in verdict.witnesses)


    @pytest.mark.parametrize('name', ['pinch', 'cycle4'])
    def test_literal_range_fails(self, name, request, QQ):
        verdict = weakly_cm(request.getfixturevalue(name), QQ, k_policy='literal')
        assert not verdict
        assert verdict.to_dict()['k_policy'] == 'literal'


    def test_unknown_policy(self, diamond, QQ):
        with pytest.raises(ValueError):
            weakly_cm(diamond, QQ, k_policy='loose')
        assert list(k_range('derived', 4)) == [2, 3]


    def test_window_cohomology_sides_agree(self, hexring, QQ):
        s_side, r_side = window_cohomology_pair(hexring, ['y1', 'y2', 'y3'], 2, QQ)
        assert s_side == r_side
        assert s_side > 0




class TestSupplementaryChecks:
    def test_abh_decomposition(self, cycle4, QQ):
        assert abh_decomposition(cycle4, ['x'], QQ).ok


    def test_linked_split(self, pinch, QQ):
        assert linked_split_check(pinch, ['u', 'v'], QQ)


    def test_m_set_conditions_on_a_koszul_poset(self, cycle4, QQ):
        conditions = koszul_by_m_sets(cycle4, QQ)
        assert conditions.annihilators
        assert conditions.exactness


    def test_bar_criterion(self, cycle4, pinch, QQ):
        assert bar_criterion(cycle4.wedge(cycle4), QQ) is True
        assert bar_criterion(pinch.drop_top(), QQ) is True


    def test_bar_criterion_needs_a_pure_poset(self, QQ):
        assert bar_criterion(validate(['a', 'b', 'c'], {'a': 1, 'b': 1, 'c': 2}, [('c', 'a')]), QQ) is None




class TestVerifyTheorems:
    EXPECTED = {
        'chain3': {'uniform': True, 'cm': True, 'weakly_cm': True, 'koszul': True},
        'diamond': {'uniform': True, 'cm': True, 'weakly_cm': True, 'koszul': True},
        'pinch': {'uniform': False, 'cm': False, 'weakly_cm': True, 'koszul': True},
        'cycle4': {'uniform': True, 'cm': True, 'weakly_cm': True, 'koszul': True},
        'hexring': {'uniform': True, 'cm': False, 'weakly_cm': False, 'koszul': False},
        'wedge': {'uniform': False, 'cm': False, 'weakly_cm': True, 'koszul': True},
    }


    @pytest.mark.parametrize('name', sorted(EXPECTED))
    def test_verdicts(self, name, request, QQ):
        report = verify_theorems(request.getfixturevalue(name), QQ)
        assert report.verdicts == self.EXPECTED[name]
        assert report.holds, report.violations


    def test_non_cyclic(self, cycle4, pinch, QQ):
        report = verify_theorems(cycle4.wedge(pinch), QQ)
        assert not report.cyclic
        assert report.verdicts['koszul']
        assert report.witnesses['cm'] == ['R.x']
        assert report.holds
