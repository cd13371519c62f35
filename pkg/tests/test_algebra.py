import pytest

from models import OutOfRange
from services.algebra import (
    BoundTooLarge,
    build_graded,
    ext_prefix,
    hilbert_direct,
    hilbert_via_cohomology,
    koszul_decide,
    r_subcomplex,
    rann_vs_L,
    strong_ideal_check,
)


HILBERT = {
    'chain3': (1, 3),
    'diamond': (1, 3, 1),
    'pinch': (1, 5, 1),
    'cycle4': (1, 5, 3, 1),
    'hexring': (1, 10, 8, 1),
    'wedge': (1, 11, 7, 2),
}




class TestHilbertSeries:
    @pytest.mark.parametrize('name,expected', sorted(HILBERT.items()))
    def test_direct(self, name, expected, request, any_field):
        assert hilbert_direct(request.getfixturevalue(name), any_field) == expected


    @pytest.mark.parametrize('name,expected', sorted(HILBERT.items()))
    def test_via_cohomology(self, name, expected, request, any_field):
        assert hilbert_via_cohomology(request.getfixturevalue(name), any_field) == expected


    def test_words_outside_covering_chains_vanish(self, pinch, QQ):
        algebra = build_graded(pinch, QQ)
        assert algebra.reduce_word(('u', 'a')) == {}
        assert algebra.reduce_word(('x', 'a')) == {}
        assert algebra.reduce_word(('x', 'u')) == {0: QQ(-1)}
        assert algebra.reduce_word(('x', 'v')) == {0: QQ(1)}


    def test_top_degree(self, cycle4, QQ):
        assert build_graded(cycle4, QQ).top_degree == 3




class TestRSubcomplex:
    def test_pinch_has_kernel_in_degree_one(self, pinch, QQ):
        complex_ = r_subcomplex(pinch, 1, QQ)
        assert complex_.positions == (1, 2)
        assert complex_.dims.dims == (2, 1)
        assert complex_.dims.at(1) == 1
        assert complex_.dims.at(2) == 0


    def test_cycle4_spaces(self, cycle4, QQ):
        complex_ = r_subcomplex(cycle4, 0, QQ)
        assert [len(s) for s in complex_.spaces] == [2, 2, 1]


    def test_k_out_of_range(self, cycle4, QQ):
        with pytest.raises(OutOfRange):
            r_subcomplex(cycle4, 3, QQ)




class TestAnnihilators:
    def test_diamond_top(self, diamond, QQ):
        report = rann_vs_L(diamond, ['c'], QQ)
        assert report.rann_dims[1] == 2
        assert report.equal
        assert report.contained
        assert report.closed_form_agrees


    def test_cycle4_top(self, cycle4, any_field):
        report = rann_vs_L(cycle4, ['x'], any_field)
        # a, b, x and r_u + r_v
        assert report.rann_dims[1] == 4
        assert report.rann_dims[2] == report.L_dims[2] == 2
        assert report.first_failure is None


    def test_report_lists_degrees_in_order(self, cycle4, QQ):
        doc = rann_vs_L(cycle4, ['x'], QQ).to_dict()
        assert doc['W'] == ['x']
        assert doc['level'] == 3
        assert len(doc['rann_dims']) == len(doc['L_dims']) == 3


    @pytest.mark.parametrize('name', ['chain3', 'diamond', 'pinch', 'cycle4', 'wedge'])
    def test_koszul_fixtures(self, name, request, QQ):
        assert koszul_decide(request.getfixturevalue(name), QQ)


    def test_hexring_is_not_koszul(self, hexring, any_field):
        verdict = koszul_decide(hexring, any_field)
        assert not verdict
        assert verdict.witnesses
        assert verdict.to_dict()['holds'] is False


    def test_non_cyclic_reduces_to_principal_ideals(self, cycle4, QQ):
        assert koszul_decide(cycle4.wedge(cycle4), QQ)


    @pytest.mark.parametrize('name', sorted(HILBERT))
    def test_strong_ideal(self, name, request, QQ):
        assert strong_ideal_check(request.getfixturevalue(name), QQ)




class TestExtPrefix:
    def test_diamond_resolution_is_linear(self, diamond, QQ):
        table = ext_prefix(diamond, QQ)
        assert table.bound == 3
        assert table.betti[(0, 0)] == 1
        assert table.betti[(1, 1)] == 3
        assert table.linear


    def test_chain_resolution_is_linear(self, chain3, QQ):
        assert ext_prefix(chain3, QQ).linear


    def test_cap(self, diamond, QQ):
        with pytest.raises(BoundTooLarge) as exc:
            ext_prefix(diamond, QQ, cap=1)
        assert exc.value.step == 1


    def test_bound_must_be_positive(self, diamond, QQ):
        with pytest.raises(OutOfRange):
            ext_prefix(diamond, QQ, bound=0)
