from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from anstab.exact import EC, gr
from anstab.hearts import heart_equal, shift_heart, standard_heart
from anstab.stability import (
    StabilityError,
    c_act,
    indecomposable_spectrum,
    mass,
    phase,
    validate,
)


class TestValidate:
    def test_plain_upper(self):
        validate(standard_heart(2), {1: gr(0, 1), 2: gr(0, 1)})

    def test_paper_family_member(self):
        validate(standard_heart(2), {1: gr(-1, F(1, 3)), 2: gr(1, F(1, 3))})

    def test_positive_real_rejected(self):
        with pytest.raises(StabilityError, match="simple 1"):
            validate(standard_heart(2), {1: gr(1), 2: gr(0, 1)})

    def test_zero_rejected(self):
        with pytest.raises(StabilityError, match="zero"):
            validate(standard_heart(2), {1: gr(0), 2: gr(0, 1)})

    def test_missing_simple(self):
        with pytest.raises(StabilityError):
            validate(standard_heart(2), {1: gr(0, 1)})


class TestPhaseMass:
    def test_phase_half(self):
        s = validate(standard_heart(2), {1: gr(0, 1), 2: gr(0, 1)})
        assert phase(s, (1, 0)).fraction() == F(1, 2)

    def test_phase_one(self):
        s = validate(standard_heart(2), {1: gr(-1), 2: gr(0, 1)})
        assert phase(s, (1, 0)).fraction() == 1

    def test_extension_phase(self):
        s = validate(standard_heart(2), {1: gr(-1, 1), 2: gr(1, 1)})
        assert phase(s, (1, 1)).fraction() == F(1, 2)
        assert mass(s, (1, 1)).exact_square() == 4

    def test_zero_charge_phase_raises(self):
        s = validate(standard_heart(2), {1: gr(-1, 1), 2: gr(1, 1)})
        with pytest.raises(StabilityError):
            phase(s, (0, 0))


class TestAction:
    def test_lambda_one_is_shift(self):
        s = validate(standard_heart(2), {1: gr(0, 1), 2: gr(0, 1)})
        r = c_act(s, 1)
        assert heart_equal(r.heart, shift_heart(s.heart, 1))
        assert r.z(1) == EC.rational(0, 1)

    def test_lambda_zero_identity(self):
        s = validate(standard_heart(3), {1: gr(-1, 1), 2: gr(0, 2), 3: gr(2, 1)})
        r = c_act(s, 0)
        assert r.charge == s.charge and heart_equal(r.heart, s.heart)

    def test_half_turn_example(self):
        s = validate(standard_heart(2), {1: gr(-2, 1), 2: gr(1, 1)})
        r = c_act(s, F(1, 2))
        by_label = {l: v.as_gaussian() for l, v in r.charge}
        assert r.heart.cls(2) == (0, -1) and r.heart.cls(1) == (1, 1)
        assert by_label[2] == gr(-1, 1)
        assert by_label[1] == gr(2, 1)

    def test_lambda_two_preserves(self):
        s = validate(standard_heart(2), {1: gr(-1, 2), 2: gr(2, 3)})
        r = c_act(s, 2)
        assert r.charge == s.charge
        assert heart_equal(r.heart, s.heart)
        assert r.heart.shift == 2

    def test_double_one_equals_two(self):
        s = validate(standard_heart(2), {1: gr(-1, 2), 2: gr(2, 3)})
        a = c_act(c_act(s, 1), 1)
        b = c_act(s, 2)
        assert a.charge == b.charge and heart_equal(a.heart, b.heart)

    @settings(max_examples=30, deadline=None)
    @given(
        st.fractions(min_value=0, max_value=F(9, 10), max_denominator=12),
        st.fractions(min_value=0, max_value=F(9, 10), max_denominator=12),
    )
    def test_additivity(self, l1, l2):
        s = validate(standard_heart(3), {1: gr(-1, 1), 2: gr(0, 2), 3: gr(3, 1)})
        a = c_act(c_act(s, l2), l1)
        b = c_act(s, l1 + l2)
        assert heart_equal(a.heart, b.heart)
        for gamma in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
            assert a.value(gamma) == b.value(gamma)

    def test_charge_transforms_linearly(self):
        s = validate(standard_heart(3), {1: gr(-2, 1), 2: gr(1, 2), 3: gr(-1, 3)})
        lam = F(2, 5)
        r = c_act(s, lam)
        rot = EC.exp_minus_i_pi(lam)
        for gamma in [(1, 0, 0), (1, 1, 0), (2, -1, 3)]:
            assert r.value(gamma) == rot * s.value(gamma)


class TestSpectrum:
    def test_a2(self):
        s = validate(standard_heart(2), {1: gr(-1, 1), 2: gr(1, 1)})
        sp = indecomposable_spectrum(s)
        assert len(sp) == 3
        ext = next(e for e in sp if e.kclass == (1, 1))
        assert ext.phase.fraction() == F(1, 2)
        assert ext.mass.exact_square() == 4

    def test_a1(self):
        s = validate(standard_heart(1), {1: gr(0, 1)})
        assert len(indecomposable_spectrum(s)) == 1

    def test_masses_positive(self):
        s = validate(standard_heart(3), {1: gr(-1, 1), 2: gr(0, 1), 3: gr(1, 2)})
        assert all(float(e.mass) > 0 for e in indecomposable_spectrum(s))
