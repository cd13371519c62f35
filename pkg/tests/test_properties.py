"""Invariants over randomly sampled cyclic posets and matrices."""
import pytest
from hypothesis import given, settings, strategies as st

from services.algebra import hilbert_direct, hilbert_via_cohomology, koszul_decide
from services.criteria import verify_theorems
from services.enumeration import RandomSampler, canonical_form, canonical_poset
from services.exactlin import ExactMatrix, FieldSpec, cohomology_dims
from services.fixtures import fixture
from services.topology import OrderComplex, reduced_cohomology


QQ = FieldSpec.rational()
GF_LARGE = FieldSpec.parse("gf:10007")

seeds = st.integers(min_value=0, max_value=10_000)
small_posets = seeds.map(lambda seed: RandomSampler(seed=seed, max_rank=3, max_width=2).sample())
fields = st.sampled_from(['rational', 'gf:2', 'gf:3']).map(FieldSpec.parse)
matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda cols: st.lists(st.lists(st.integers(-3, 3), min_size=cols, max_size=cols), min_size=1, max_size=4)
)




class TestPosetInvariants:
    @settings(max_examples=30, deadline=None)
    @given(small_posets)
    def test_dual_is_an_involution(self, poset):
        assert poset.dual().dual() == poset


    @settings(max_examples=30, deadline=None)
    @given(small_posets)
    def test_canonical_form_is_stable(self, poset):
        assert canonical_form(canonical_poset(poset))[0] == canonical_form(poset)[0]


    @settings(max_examples=25, deadline=None)
    @given(small_posets, fields)
    def test_hilbert_routes_agree(self, poset, field):
        assert hilbert_direct(poset, field) == hilbert_via_cohomology(poset, field)


    @settings(max_examples=20, deadline=None)
    @given(small_posets)
    def test_rank_three_is_koszul(self, poset):
        assert koszul_decide(poset, QQ)


    @settings(max_examples=15, deadline=None)
    @given(small_posets)
    def test_biconditionals_hold(self, poset):
        report = verify_theorems(poset, QQ)
        assert report.holds, report.violations


    @settings(max_examples=30, deadline=None)
    @given(small_posets, fields)
    def test_euler_characteristic(self, poset, field):
        dims = reduced_cohomology(OrderComplex(poset, poset.plus), field)
        assert dims.euler_characteristic() == dims.cohomology_euler_characteristic()


    @settings(max_examples=30, deadline=None)
    @given(small_posets)
    def test_second_window_is_the_sphere_below(self, poset):
        for a in poset.plus:
            if poset.rank_of(a) >= 2:
                assert poset.gamma_ai(a, 2).members == poset.sphere(a, 1).members


    @settings(max_examples=30, deadline=None)
    @given(small_posets, st.data())
    def test_widest_layer_window_is_gamma_w(self, poset, data):
        n = data.draw(st.integers(min_value=1, max_value=poset.rank))
        W = data.draw(st.lists(st.sampled_from(poset.level(n)), min_size=1, unique=True))
        assert poset.layer_window(W, n - 1).members == set(poset.below(W).plus)




class TestRelabeling:
    @pytest.mark.parametrize('name', ['pinch', 'cycle4', 'hexring'])
    @settings(max_examples=5, deadline=None)
    @given(data=st.data())
    def test_koszul_verdict_ignores_names(self, name, data):
        poset = fixture(name)
        names = data.draw(st.permutations(list(poset.plus)))
        renamed = poset.relabel(dict(zip(poset.plus, names)))
        assert koszul_decide(renamed, QQ).holds == koszul_decide(poset, QQ).holds




class TestMatrixInvariants:
    @settings(max_examples=50, deadline=None)
    @given(matrices, fields)
    def test_rank_of_transpose(self, rows, field):
        m = ExactMatrix.from_rows(rows, field)
        assert m.rank() == m.transpose().rank() <= min(m.shape)


    @settings(max_examples=50, deadline=None)
    @given(matrices, fields)
    def test_rank_nullity(self, rows, field):
        m = ExactMatrix.from_rows(rows, field)
        kernel = m.kernel_basis()
        assert m.rank() + kernel.rows == m.cols
        for vec in kernel.row_vectors():
            assert m.apply(vec) == {}


    @settings(max_examples=50, deadline=None)
    @given(matrices)
    def test_rank_agrees_with_a_large_prime(self, rows):
        # entries in [-3, 3] keep every minor below 10007
        assert ExactMatrix.from_rows(rows, QQ).rank() == ExactMatrix.from_rows(rows, GF_LARGE).rank()


    @settings(max_examples=25, deadline=None)
    @given(small_posets, fields, st.randoms(use_true_random=False))
    def test_cohomology_ignores_basis_order(self, poset, field, rnd):
        maps = OrderComplex(poset, poset.plus).reduced_cochain_maps(field)
        orders = [list(range(maps[0].cols))] + [list(range(d.rows)) for d in maps]
        for order in orders:
            rnd.shuffle(order)
        shuffled = [d.select(rows=orders[i + 1], cols=orders[i]) for i, d in enumerate(maps)]
        assert cohomology_dims(shuffled).cohomology == cohomology_dims(maps).cohomology
