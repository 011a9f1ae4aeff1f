import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinslab import EdgeData, SlabSystem
from kleinslab.oracles import (
    DegenerateCaseError,
    barrier_transmission,
    case1_closed,
    case2_closed,
    case3_closed,
    case4_closed,
    closed_form_arrays,
    probabilities_case4,
    reflection_case2,
    reflection_case3,
    sum_rule,
)

SYS = SlabSystem(1.0, 1.0, 1.0, 10.0)
SYS2 = SlabSystem(1.0, 1.0, 2.0, 10.0)


class TestExamples:
    @pytest.mark.parametrize("s, r", [(0.0, 1.0), (0.3, 1.69), (1.0, 4.0)])
    def test_case1(self, s, r):
        m = case1_closed(SYS, EdgeData(s1_0=s))
        assert (m.r_meas_sq, m.t_meas_sq) == pytest.approx((r, 0.0), abs=1e-15)

    @pytest.mark.parametrize("sp, r", [(0.0, 1.0), (1.0, 2.0), (-1.0, 0.4)])
    def test_case2(self, sp, r):
        sys = SYS if sp == 0 else SYS2
        assert case2_closed(sys, EdgeData(s1p_0=sp)).r_meas_sq == pytest.approx(r, rel=1e-15)

    def test_case3(self):
        assert case3_closed(SYS, EdgeData()).r_meas_sq == 1.0
        assert case3_closed(SYS, EdgeData(1.0, 1.0)).r_meas_sq == pytest.approx(2.5, rel=1e-15)

    def test_case3_without_forward_part(self, rng):
        # With S1(0) = 0 the rescaled quantities give chibar = chi0 + S' and
        # sbar = S', so the slope enters twice in the numerator; this is not
        # the case-2 expression unless the slope also vanishes.
        k, chi0, sp = rng.uniform(0.1, 10, 200), rng.uniform(0.1, 10, 200), rng.uniform(-5, 5, 200)
        expected = (k**2 + (chi0 + 2 * sp) ** 2) / (k**2 + (chi0 + sp) ** 2)
        np.testing.assert_allclose(reflection_case3(k, chi0, 0.0, sp), expected, rtol=1e-14)
        np.testing.assert_array_equal(reflection_case3(k, chi0, 0.0, 0.0), reflection_case2(k, chi0, 0.0))

    def test_case4(self):
        assert case4_closed(SYS, EdgeData()).r_meas_sq == 1.0
        assert case4_closed(SYS, EdgeData()).t_meas_sq == 0.0
        m = case4_closed(SYS, EdgeData(s2_a=1.0, s2p_a=1.0))
        assert (m.r_meas_sq, m.t_meas_sq) == pytest.approx((1.0, 1.0), rel=1e-15)
        m = case4_closed(SlabSystem(2.3, 2.3, 0.4, 1.0), EdgeData(s2_a=0.5, s2p_a=-1.7))
        assert m.total == pytest.approx(1.25, rel=1e-14)

    @pytest.mark.parametrize("s, rule", [(0.0, 1.0), (1.0, 2.0), (0.5, 1.25)])
    def test_sum_rule(self, s, rule):
        assert sum_rule(EdgeData(s2_a=s)) == rule

    def test_barrier_textbook_unit_case(self):
        sinh1 = (math.e - 1 / math.e) / 2
        assert barrier_transmission(1.0, 1.0, 1.0) == pytest.approx(1 / (1 + sinh1**2), rel=1e-14)


class TestErrors:
    @pytest.mark.parametrize("fn", [case1_closed, case2_closed, case3_closed, case4_closed])
    def test_asymmetric_rejected(self, fn):
        with pytest.raises(ValueError, match="k2 == k1"):
            fn(SlabSystem(1.0, 1.5, 1.0, 1.0), EdgeData())

    def test_case4_degenerate(self):
        # kappa^2 = k1^2 + chi0^2 with zero slope
        with pytest.raises(DegenerateCaseError):
            case4_closed(SYS, EdgeData(s2_a=1.0, s2p_a=0.0))

    def test_general_has_no_closed_form(self):
        with pytest.raises(KeyError):
            closed_form_arrays("general", 1.0, 1.0, 1.0)


class TestProperties:
    def test_exact_sum_rule(self, rng):
        n = 10_000
        k1, chi0 = rng.uniform(0.1, 10, (2, n))
        s2, s2p = rng.uniform(0, 3, n), rng.uniform(-5, 5, n)
        r, t = probabilities_case4(k1, chi0, s2, s2p)
        np.testing.assert_allclose(r + t, 1 + s2**2, rtol=0, atol=1e-12 * (1 + s2**2).max())
        assert np.all(np.abs(r + t - (1 + s2**2)) <= 1e-12 * (1 + s2**2))

    def test_case2_sign_law(self, rng):
        n = 10_000
        k1, chi0 = rng.uniform(0.1, 10, (2, n))
        sp = rng.uniform(-2 * chi0, 5)
        sp = sp[(sp != 0) & (sp > -2 * chi0)]
        r = reflection_case2(k1[: sp.size], chi0[: sp.size], sp)
        np.testing.assert_array_equal(np.sign(r - 1), np.sign(sp))
        np.testing.assert_allclose(reflection_case2(k1, chi0, 0.0), 1.0, rtol=0, atol=1e-12)

    def test_case3_positive_slope_exceeds_one(self, rng):
        n = 10_000
        k1, chi0 = rng.uniform(0.1, 10, (2, n))
        s, sp = rng.uniform(0, 3, n), rng.uniform(1e-6, 5, n)
        assert np.all(reflection_case3(k1, chi0, s, sp) > 1)

    def test_case4_deviation_law(self, rng):
        # reflection numerator minus denominator is Y (S2^2 - 1)
        n = 10_000
        k1, chi0 = rng.uniform(0.1, 10, (2, n))
        s2 = rng.uniform(0, 3, n)
        s2p = rng.uniform(-5, 5, n)
        r, _ = probabilities_case4(k1, chi0, s2, s2p)
        np.testing.assert_array_equal(np.sign(r - 1), np.sign(s2**2 - 1))

    @pytest.mark.parametrize("fn", [case1_closed, case2_closed, case3_closed, case4_closed])
    def test_degeneration_chain(self, fn, rng):
        for k, chi0 in rng.uniform(0.1, 10, (20, 2)):
            m = fn(SlabSystem(k, k, chi0, 1.0), EdgeData())
            assert (m.r_meas_sq, m.t_meas_sq) == (1.0, 0.0)

    @settings(max_examples=200, deadline=None)
    @given(k=st.floats(0.1, 10), chi0=st.floats(0.1, 10), s=st.floats(0, 3), sp=st.floats(-5, 5))
    def test_case4_probabilities_nonnegative(self, k, chi0, s, sp):
        try:
            r, t = probabilities_case4(k, chi0, s, sp)
        except DegenerateCaseError:
            return
        assert r >= 0 and t >= 0

    def test_closed_form_arrays_broadcast(self):
        r, t = closed_form_arrays("case1", np.ones(3), 1.0, 1.0, 0.3)
        assert r.shape == t.shape == (3,)
        np.testing.assert_allclose(r, 1.69)
