from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from component_shrink.compose import (
    BattingComponents,
    PitchingComponents,
    expected_pitching_counts,
    fip_ability,
    fip_from_counts,
    hit_probability,
    on_base_probability,
)
from component_shrink.errors import DegeneratePitcherError, DomainError

probs = st.floats(0.0, 1.0)

# exact rational evaluation of the counts route at BFP = 10^4
FIP_EXAMPLE = Fraction(14910, 21367)


def exact_fip(bb, so, hr, hip, bfp):
    bb, so, hr, hip = (Fraction(v) for v in (bb, so, hr, hip))
    home_runs = bfp * (1 - bb) * (1 - so) * hr
    walks = bfp * bb
    strikeouts = bfp * (1 - bb) * so
    innings = Fraction(bfp) * (1 - bb) * (so + (1 - so) * (1 - hr) * (1 - hip)) / 3
    return (13 * home_runs + 3 * walks - 2 * strikeouts) / innings


def test_exact_oracle_agrees_with_frozen_value():
    assert exact_fip("0.08", "0.20", "0.03", "0.30", 10**4) == FIP_EXAMPLE


class TestHitProbability:
    def test_beltran(self):
        assert hit_probability(0.172, 0.049, 0.315) == pytest.approx(0.289, abs=5e-4)

    @pytest.mark.parametrize("p_hr,p_hip", [(0.0, 0.0), (0.5, 0.3), (1.0, 1.0)])
    def test_always_strikes_out(self, p_hr, p_hip):
        assert hit_probability(1.0, p_hr, p_hip) == 0.0

    def test_arithmetic_example(self):
        assert hit_probability(0.2, 0.05, 0.3) == pytest.approx(0.268, abs=1e-12)

    @given(probs, probs, probs)
    def test_is_multinomial_hit_mass(self, so, hr, hip):
        mass = 1 - so - (1 - so) * (1 - hr) * (1 - hip)
        assert hit_probability(so, hr, hip) == pytest.approx(mass, abs=1e-12)
        assert 0.0 <= hit_probability(so, hr, hip) <= 1.0

    def test_monotone_on_grid(self):
        g = np.linspace(0, 1, 21)
        so, hr, hip = np.meshgrid(g, g, g, indexing="ij")
        p = hit_probability(so, hr, hip)
        assert np.all(np.diff(p, axis=0) <= 1e-15)
        assert np.all(np.diff(p, axis=1) >= -1e-15)
        assert np.all(np.diff(p, axis=2) >= -1e-15)

    @given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
    def test_monotone_by_finite_differences(self, so, hr, hip):
        h = 1e-6
        assert hit_probability(so + h, hr, hip) - hit_probability(so - h, hr, hip) <= 0
        assert hit_probability(so, hr + h, hip) - hit_probability(so, hr - h, hip) >= 0
        assert hit_probability(so, hr, hip + h) - hit_probability(so, hr, hip - h) >= 0


class TestOnBase:
    @given(probs)
    def test_no_walks_is_batting_average(self, p):
        assert on_base_probability(0.0, p) == p

    @given(probs)
    def test_always_walks(self, p):
        assert on_base_probability(1.0, p) == 1.0

    def test_arithmetic_example(self):
        assert on_base_probability(0.10, 0.270) == pytest.approx(0.343, abs=1e-12)

    @given(probs, probs)
    def test_bounds(self, bb, h):
        p = on_base_probability(bb, h)
        assert p >= max(bb, h * (1 - bb)) - 1e-15
        assert p <= 1.0 + 1e-15

    def test_batting_components_container(self):
        c = BattingComponents(0.172, 0.049, 0.315, p_bb=0.1)
        assert c.p_on_base == pytest.approx(0.1 + 0.9 * c.p_hit)
        with pytest.raises(DomainError):
            BattingComponents(0.2, 0.05, 0.3).p_on_base
        with pytest.raises(DomainError):
            BattingComponents(1.2, 0.05, 0.3)


class TestFip:
    def test_zero_numerator(self):
        assert fip_ability(PitchingComponents(0.0, 0.0, 0.0, 0.3)) == 0.0

    def test_example(self):
        got = fip_ability(PitchingComponents(0.08, 0.20, 0.03, 0.30))
        assert got == pytest.approx(float(FIP_EXAMPLE), abs=1e-12)
        assert got == pytest.approx(0.6978, abs=1e-4)

    @pytest.mark.parametrize("bfp", [10**3, 4 * 10**3])
    def test_counts_route_cancels_bfp(self, bfp):
        c = PitchingComponents(0.08, 0.20, 0.03, 0.30)
        value = fip_from_counts(*expected_pitching_counts(c, bfp))
        assert value == pytest.approx(fip_ability(c), abs=1e-10)

    def test_degenerate_pitcher(self):
        with pytest.raises(DegeneratePitcherError):
            fip_ability(PitchingComponents(1.0, 0.2, 0.03, 0.3))
        with pytest.raises(DegeneratePitcherError):
            fip_ability(PitchingComponents(0.1, 0.0, 1.0, 0.3))

    def test_constant_is_additive(self):
        c = PitchingComponents(0.08, 0.20, 0.03, 0.30)
        assert fip_ability(c, constant=3.1) == pytest.approx(fip_ability(c) + 3.1)

    def test_can_be_negative(self):
        assert fip_ability(PitchingComponents(0.0, 0.5, 0.0, 0.3)) < 0


class TestFipFromCounts:
    def test_zero(self):
        assert fip_from_counts(0, 0, 0, 9) == 0.0

    def test_example(self):
        assert fip_from_counts(220.8, 800, 1840, 2279.1467) == pytest.approx(0.6978, abs=1e-4)

    def test_homogeneous(self):
        assert fip_from_counts(44, 160, 368, 455.8) == pytest.approx(fip_from_counts(22, 80, 184, 227.9))

    @pytest.mark.parametrize("ip", [0, -1.0])
    def test_ip_domain(self, ip):
        with pytest.raises(DomainError):
            fip_from_counts(1, 1, 1, ip)


@given(st.floats(0.0, 0.95), probs, st.floats(0.0, 0.95), st.floats(0.0, 0.95),
       st.floats(1.0, 1e5))
def test_fip_consistency_identity(bb, so, hr, hip, bfp):
    c = PitchingComponents(bb, so, hr, hip)
    value = fip_from_counts(*expected_pitching_counts(c, bfp))
    assert value == pytest.approx(fip_ability(c), abs=1e-10, rel=1e-12)
