import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinslab import (
    EdgeData,
    EmissionScenario,
    SlabSystem,
    SourceProfile,
    Variant,
    profile_eval,
    validate_system,
)


class TestSlabSystem:
    def test_accepts_positive(self):
        sys = SlabSystem(1, 1, 2, 1)
        assert validate_system(sys) is sys

    @pytest.mark.parametrize("field", ["k1", "k2", "chi0", "a"])
    def test_rejects_nonpositive(self, field):
        kwargs = dict(k1=1.0, k2=1.0, chi0=2.0, a=1.0)
        kwargs[field] = 0.0
        with pytest.raises(ValueError, match=field):
            SlabSystem(**kwargs)

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="chi0"):
            SlabSystem(1.0, 1.0, math.nan, 1.0)

    def test_extreme_scales(self):
        sys = SlabSystem(1, 1, 1e-9, 1e9)
        assert sys.opacity == pytest.approx(1.0)


class TestProfiles:
    def test_constant(self):
        assert profile_eval(SourceProfile("constant", s0=0.5), 0.0) == (0.5, 0.0)

    def test_linear_edge_at_edge(self):
        assert profile_eval(SourceProfile("linear-edge", s0=0.2, slope=1.0), 0.0) == (0.2, 1.0)

    def test_linear_edge_zero_value_keeps_slope(self):
        p = SourceProfile("linear-edge", s0=0.0, slope=1.0)
        assert p.at_edge() == (0.0, 1.0)
        # clipped to zero further out in region 1
        assert profile_eval(p, -0.5) == (0.0, 0.0)

    def test_exponential_edge(self):
        p = SourceProfile("exponential-edge", region=2, s0=0.3, decay_length=2.0, edge=5.0)
        value, slope = profile_eval(p, 7.0)
        expected = 0.3 * math.exp(-1.0)
        assert value == pytest.approx(expected, rel=1e-14)
        assert value == pytest.approx(0.110363832351, rel=1e-10)
        assert slope == pytest.approx(-expected / 2.0, rel=1e-14)
        assert slope == pytest.approx(-0.0551819161757, rel=1e-10)

    def test_tabulated_interpolation_and_right_segment_slope(self):
        p = SourceProfile("tabulated", region=1, knots=(-2.0, -1.0, 0.0), values=(0.0, 1.0, 0.5))
        assert p.value_at(-1.5) == pytest.approx(0.5)
        assert p.slope_at(-1.5) == pytest.approx(1.0)
        # at the interior knot the right-hand segment wins
        assert p.slope_at(-1.0) == pytest.approx(-0.5)
        # at the last knot there is only a left segment
        assert p.at_edge() == (0.5, pytest.approx(-0.5))

    def test_out_of_region(self):
        with pytest.raises(ValueError, match="outside"):
            profile_eval(SourceProfile("constant", s0=0.5), 0.1)
        p2 = SourceProfile("constant", region=2, s0=0.5, edge=3.0)
        with pytest.raises(ValueError, match="outside"):
            p2.value_at(2.9)
        tab = SourceProfile("tabulated", region=2, knots=(0.0, 1.0), values=(1.0, 0.0))
        with pytest.raises(ValueError, match="outside"):
            tab.value_at(1.5)

    @pytest.mark.parametrize("kwargs", [
        dict(family="constant", s0=-0.1),
        dict(family="exponential-edge", s0=0.1, decay_length=0.0),
        dict(family="tabulated", knots=(-1.0, 0.0), values=(0.5, -0.1)),
        dict(family="tabulated", knots=(-1.0, -0.5), values=(0.5, 0.1)),
        dict(family="tabulated", region=2, knots=(-1.0, 0.0), values=(0.5, 0.1)),
        dict(family="constant", region=3),
    ])
    def test_invalid_profiles(self, kwargs):
        with pytest.raises(ValueError):
            SourceProfile(**kwargs)


def _central(p, x, h):
    return (p.value_at(x + h) - p.value_at(x - h)) / (2 * h)


@settings(max_examples=100, deadline=None)
@given(
    s0=st.floats(0.01, 5.0),
    slope=st.floats(-5.0, 5.0),
    length=st.floats(0.2, 10.0) | st.floats(-10.0, -0.2),
    region=st.sampled_from([1, 2]),
    dist=st.floats(0.05, 3.0),
)
def test_slope_matches_central_difference(s0, slope, length, region, dist):
    edge = 0.0 if region == 1 else 2.5
    x = edge - dist if region == 1 else edge + dist
    h = 1e-6 * max(1.0, abs(x))
    for p in (
        SourceProfile("constant", region=region, s0=s0, edge=edge),
        SourceProfile("exponential-edge", region=region, s0=s0, decay_length=length, edge=edge),
        SourceProfile("linear-edge", region=region, s0=s0, slope=slope, edge=edge),
    ):
        if p.family.value == "linear-edge":
            # keep away from the clipping kink
            kink = -s0 / slope if slope else math.inf
            if abs((x - edge) - kink) < 10 * h:
                continue
        fd = _central(p, x, h)
        exact = p.slope_at(x)
        assert abs(fd - exact) <= 1e-5 * max(abs(exact), 1e-3)


class TestScenario:
    def test_gating(self):
        s1 = SourceProfile("constant", s0=0.1)
        s2 = SourceProfile("constant", region=2, s0=0.1)
        EmissionScenario(Variant.CASE1, s1)
        EmissionScenario("case4", s2=s2)
        EmissionScenario("general", s1, s2)
        EmissionScenario("source-free")
        with pytest.raises(ValueError):
            EmissionScenario("case2", s2=s2)
        with pytest.raises(ValueError):
            EmissionScenario("case4", s1, s2)
        with pytest.raises(ValueError):
            EmissionScenario("source-free", s1)
        with pytest.raises(ValueError):
            EmissionScenario("general")
        with pytest.raises(ValueError, match="region-1"):
            EmissionScenario("case3", s1=s2)

    def test_edge_data(self):
        scen = EmissionScenario("general", SourceProfile("linear-edge", s0=0.2, slope=0.7),
                                SourceProfile("exponential-edge", region=2, s0=0.4, decay_length=2.0))
        assert scen.edge_data() == EdgeData(0.2, 0.7, 0.4, -0.2)

    def test_unknown_variant(self):
        with pytest.raises(ValueError, match="unknown scenario"):
            EmissionScenario("case5")


def test_edge_data_rejects_negative_values():
    with pytest.raises(ValueError):
        EdgeData(s1_0=-0.1)
    np.testing.assert_allclose(EdgeData(0.1, -2.0, 0.3, 4.0).scaled(2).as_tuple(), (0.2, -4.0, 0.6, 8.0))
