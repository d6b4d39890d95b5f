from fractions import Fraction

import pytest

import support
from iemlab.birkhoff import (
    decay_profile,
    direct_birkhoff_sum,
    gamma_matrix,
    mean_decompose,
    orbit_decomposition,
    single_block_sum,
    special_sum,
    sup_profile,
)
from iemlab.errors import HorizonExceeded, RangeError
from iemlab.exact import ensure_scalar
from iemlab.functions import PiecewiseFunction
from iemlab.induction import InductionTrace, golden_iem
from iemlab import matutil

F = Fraction


def saw(iem):
    """x - 1/2 restricted to the pieces: mean-zero over the whole interval."""
    return PiecewiseFunction.from_global_poly(iem, (F(-1, 2), F(1)), level=0)


class TestStructuralSums:
    def test_single_block_matches_direct_orbit_sums(self, rng):
        trace = support.rational_trace(rng, 3, 4, bits=16, mode="rv", max_norm=5000)
        fn = saw(trace.base)
        s1 = single_block_sum(trace, 1, fn)
        t0 = trace.iem_at(0)
        t1 = trace.iem_at(1)
        heights = trace.return_times(0, 1)
        for beta in t1.alphabet:
            x = t1.left(beta) + t1.length(beta) / 2
            direct = direct_birkhoff_sum(t0, fn, x, heights[beta])
            assert s1.evaluate(x) == direct

    def test_composition_equals_one_shot(self, rng):
        trace = support.rational_trace(rng, 3, 5, bits=32, mode="rv", max_norm=None)
        fn = saw(trace.base)
        via_blocks = special_sum(trace, 0, 3, fn)
        resumed = special_sum(trace, 2, 3, special_sum(trace, 0, 2, fn))
        for a in via_blocks.iem.alphabet:
            assert via_blocks.pieces[a].trimmed().coeffs == resumed.pieces[a].trimmed().coeffs

    def test_identity_at_equal_levels(self, rng):
        trace = support.rational_trace(rng, 2, 3, bits=24, mode="zorich")
        fn = saw(trace.base)
        assert special_sum(trace, 0, 0, fn) is fn
        with pytest.raises(RangeError):
            special_sum(trace, 3, 1, fn)

    def test_gamma_basis_reproduces_transposed_q(self, rng):
        trace = support.rational_trace(rng, 4, 6, bits=96, mode="rv")
        m, n = 2, 6
        q = trace.q_matrix(m, n)
        t_m = trace.iem_at(m)
        for i, alpha in enumerate(t_m.alphabet):
            ind = PiecewiseFunction.indicator(t_m, alpha, level=m)
            got = special_sum(trace, m, n, ind).gamma_vector()
            assert got == [q[i][j] for j in range(len(q))]
        assert gamma_matrix(trace, m, n) == matutil.transpose(q)

    def test_visit_counts_against_brute_walk(self, rng):
        trace = support.rational_trace(rng, 3, 3, bits=16, mode="rv", max_norm=2000)
        m, n = 0, 3
        q = trace.q_matrix(m, n)
        t_m = trace.iem_at(m)
        i_n = trace.iem_at(n)
        for j, beta in enumerate(i_n.alphabet):
            counts = support.brute_visit_counts(t_m, i_n, beta)
            for i, alpha in enumerate(t_m.alphabet):
                assert counts.get(alpha, 0) == q[i][j]

    def test_integral_preserved_rational(self, rng):
        trace = support.rational_trace(rng, 3, 6, bits=48, mode="rv")
        fn = PiecewiseFunction.from_global_poly(
            trace.base, (F(1, 3), F(-1), F(2)), level=0
        )
        out = special_sum(trace, 0, 6, fn)
        assert out.integral() == fn.integral()
        assert out.max_degree() == fn.max_degree()

    def test_integral_preserved_eigen(self, golden_trace):
        golden_trace.extend_to(8)
        fn = saw(golden_trace.base)
        out = special_sum(golden_trace, 0, 8, fn)
        diff = out.integral() - fn.integral()
        assert diff.is_zero()

    def test_sampled_input_rejected(self, golden_trace):
        from iemlab.errors import UnsupportedKind
        from iemlab.functions import SampledPiece

        iem = golden_trace.base
        pieces = {a: SampledPiece(breaks=(), values=(F(1),)) for a in iem.alphabet}
        fn = PiecewiseFunction(iem, pieces, level=0)
        with pytest.raises(UnsupportedKind):
            single_block_sum(golden_trace, 1, fn)


class TestMeanDecompose:
    def test_split_reassembles(self, rng):
        trace = support.rational_trace(rng, 3, 2, bits=32)
        fn = PiecewiseFunction.from_global_poly(trace.base, (F(2), F(-3)), level=0)
        fn0, chi = mean_decompose(fn)
        assert fn0.is_mean_zero_per_letter()
        back = fn0.add_constants(chi)
        for x in (F(1, 10), F(1, 2), F(9, 10)):
            pt = x * trace.base.total()
            assert back.evaluate(pt) == fn.evaluate(pt)

    def test_mean_zero_input_has_zero_chi(self, rng):
        trace = support.rational_trace(rng, 2, 2, bits=24)
        fn = saw(trace.base)
        fn0, chi = mean_decompose(fn)
        means = fn.letter_means()
        assert chi == [means[a] for a in trace.base.alphabet]


class TestOrbitDecomposition:
    def test_reconstruct_matches_direct_sum(self, rng):
        budget = 137
        trace = support.rational_trace(
            rng, 3, 8, bits=16, mode="rv", min_top_height=budget
        )
        fn = saw(trace.base)
        dec = orbit_decomposition(trace, budget)
        direct = support.direct_orbit_sum(trace.base, fn, budget)
        assert dec.reconstruct(fn) == direct
        assert dec.counts_within_bound()
        assert dec.budget == budget

    def test_terms_descend_and_cover_budget(self, rng):
        budget = 64
        trace = support.rational_trace(
            rng, 2, 10, bits=16, mode="rv", min_top_height=budget
        )
        dec = orbit_decomposition(trace, budget)
        levels = [lvl for lvl, _ in dec.terms]
        assert levels == sorted(levels, reverse=True)
        spent = 0
        for lvl, x in dec.terms:
            beta = trace.iem_at(lvl).locate(x)
            spent += trace.return_times(0, lvl)[beta]
        assert spent == budget

    def test_budget_one_is_single_level_zero_term(self, golden_trace):
        golden_trace.extend_to(2)
        dec = orbit_decomposition(golden_trace, 1)
        assert dec.counts == {0: 1}
        assert dec.max_level == 0

    def test_rejects_bad_budget(self, golden_trace):
        with pytest.raises(RangeError):
            orbit_decomposition(golden_trace, 0)

    def test_shallow_trace_raises_horizon(self):
        trace = InductionTrace(golden_iem(), mode="accelerated")
        trace.extend_to(3)
        with pytest.raises(HorizonExceeded):
            orbit_decomposition(trace, 10**6)


def contracted_constants(iem):
    """Per-letter constants the golden transpose cocycle crushes: (1-rho, 1)."""
    one = ensure_scalar(F(1), iem.lengths[0])
    rho = one / iem.lengths[0]
    return PiecewiseFunction.constants(iem, {"A": one - rho, "B": one}, level=0)


class TestDecayProfile:
    def test_golden_saw_stays_bounded(self, golden_trace):
        fn = saw(golden_trace.base)
        prof = decay_profile(golden_trace, fn, 25)
        assert len(prof.rows) == 26
        assert prof.inequalities_hold
        assert max(prof.sup_floats()) < 1.0
        assert prof.mode == "accelerated"
        for r in prof.rows[1:]:
            assert r.norm_q == golden_trace.norm_q(0, r.n)
            assert r.norm_z == golden_trace.norm_z(r.n)

    def test_contracted_direction_decays(self, golden_trace):
        fn = contracted_constants(golden_trace.base)
        prof = decay_profile(golden_trace, fn, 20)
        assert prof.inequalities_hold
        assert prof.is_decaying()
        # crushed like 1/||Q||: fitted exponent pins to -1
        assert abs(prof.fit.slope + 1.0) < 0.01
        sups = prof.sup_floats()
        assert sups[-1] < sups[0] / 1000

    def test_constant_input_keeps_inequalities_without_decay(self, golden_trace):
        fn = PiecewiseFunction.constants(
            golden_trace.base, {"A": F(1), "B": F(1)}, level=0
        )
        prof = decay_profile(golden_trace, fn, 12)
        assert prof.inequalities_hold
        assert not prof.is_decaying()
        # the mean part rides the return times upward
        assert prof.sup_floats()[-1] > 100

    def test_rational_instance_rows_are_internally_bounded(self, rng):
        trace = support.rational_trace(rng, 3, 6, bits=48, mode="zorich")
        fn = saw(trace.base)
        prof = decay_profile(trace, fn, 6)
        assert prof.inequalities_hold
        assert len(prof.rows) == 7


class TestSupProfile:
    def test_profiles_separate_bounded_from_decaying(self, golden_trace):
        sups, fitted = sup_profile(golden_trace, saw(golden_trace.base), 20)
        assert len(sups) == 21
        assert fitted is not None
        # the raw sawtooth is bounded but not decaying: exponent pins to 0
        assert abs(fitted.slope) < 0.01
        dec_sups, dec_fit = sup_profile(
            golden_trace, contracted_constants(golden_trace.base), 20
        )
        assert dec_fit.slope < -0.9
        assert dec_fit.clears_below(0.0, 2.0)


class TestDirectSum:
    def test_callable_and_function_agree(self, golden_trace):
        iem = golden_trace.base
        fn = saw(iem)
        a = direct_birkhoff_sum(iem, fn, iem.zero(), 50)
        b = direct_birkhoff_sum(iem, fn.evaluate, iem.zero(), 50)
        assert (a - b).is_zero()

    def test_count_one_is_plain_evaluation(self, golden_trace):
        iem = golden_trace.base
        fn = saw(iem)
        x = iem.zero()
        assert direct_birkhoff_sum(iem, fn, x, 1) == fn.evaluate(x)
