import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexp.fnexpr import Decay, ExponentField, parse
from vexp.functions import RealFunction, as_real_function, combine
from vexp.norms import (NormSpec, NotIntegrableError, SampledModular,
                        holder_audit, luxemburg_norm, modular, norm_of)
from vexp.steklov import IndicatorSteklov

GAUSS = as_real_function(parse("exp(-x^2)"), name="gauss")


def box():
    eng = IndicatorSteklov(0.0, 1.0)
    return RealFunction(fn=eng, name="box", decay=Decay.compact(0, 1),
                        breakpoints=(0.0, 1.0), exact=eng)


class TestModular:
    def test_zero_function(self, p2):
        zero = as_real_function(parse("0"), name="zero")
        assert modular(zero, p2, 1.0).value == 0.0

    def test_box_mass(self, p2):
        assert modular(box(), p2, 1.0).value == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_closed_form(self, p2):
        assert modular(GAUSS, p2, 1.0).value == \
            pytest.approx(math.sqrt(math.pi / 2.0), abs=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.1, 4.0), st.floats(1.05, 3.0))
    def test_monotone_in_scale(self, lam, factor):
        p = ExponentField.from_expr("2 + 1/(1+x^2)", p_infinity=2.0)
        sm = SampledModular(GAUSS, p, 12.0)
        assert sm.value(lam) >= sm.value(lam * factor) - 1e-12


class TestLuxemburg:
    def test_zero_function(self, p2):
        zero = as_real_function(parse("0"), name="zero")
        res = luxemburg_norm(zero, p2)
        assert res.value == 0.0 and res.bracket_used is None

    def test_box_is_one_in_any_exponent(self, p2, p_bump):
        for p in (p2, p_bump):
            assert luxemburg_norm(box(), p).value == pytest.approx(1.0, abs=1e-10)

    def test_constant_exponent_reduction(self, p1, p2):
        # matches classical L_q norms of the Gaussian
        p3 = ExponentField.from_expr("3")
        oracles = {1: math.sqrt(math.pi),
                   2: (math.pi / 2.0) ** 0.25,
                   3: math.sqrt(math.pi / 3.0) ** (1.0 / 3.0)}
        for p, q in ((p1, 1), (p2, 2), (p3, 3)):
            assert luxemburg_norm(GAUSS, p).value == \
                pytest.approx(oracles[q], abs=1e-6)

    def test_scaled_box_variable_exponent_root(self):
        # f = 2 * box and p(x) = 2 + x on the support: the modular of f/eta
        # is int_0^1 (2/eta)^(2+x) dx, identically 1 at eta = 2
        eng = IndicatorSteklov(0.0, 1.0)
        f2 = RealFunction(fn=lambda x: 2.0 * eng(x), name="2box",
                          decay=Decay.compact(0, 1), breakpoints=(0.0, 1.0))
        p = ExponentField(expr=parse("2 + x"), p_minus=2.0, p_plus=3.0,
                          p_infinity=2.0, c_log_local=0.0, c_log_decay=0.0,
                          name="2+x")
        res = luxemburg_norm(f2, p, window=12.0)
        assert res.value == pytest.approx(2.0, abs=1e-9)
        assert res.modular_at_value == pytest.approx(1.0, abs=1e-6)

    def test_modular_at_root_is_one(self, p_bump):
        res = luxemburg_norm(GAUSS, p_bump)
        assert res.modular_at_value == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("c", [2.0, 1.0 / 3.0, 10.0])
    def test_homogeneity(self, p_bump, c):
        base = luxemburg_norm(GAUSS, p_bump).value
        scaled = RealFunction(fn=lambda x, c=c: c * GAUSS.fn(x), name="cg",
                              decay=GAUSS.decay)
        val = luxemburg_norm(scaled, p_bump).value
        assert abs(val - c * base) <= 1e-8 * c * base

    @pytest.mark.parametrize("pair", [
        ("gauss", "xgauss"), ("gauss_osc", "lorentz"),
        ("box", "box_smooth"), ("sinc1", "cos_gauss"),
    ])
    def test_triangle_inequality(self, p_bump, pair):
        from vexp.corpus import corpus_member
        a = corpus_member(pair[0])
        b = corpus_member(pair[1])
        win = max(a.norm_window, b.norm_window)
        ppu = max(a.panels_per_unit, b.panels_per_unit)
        s = combine([(1.0, a.rf), (1.0, b.rf)], name="sum")
        lhs = luxemburg_norm(s, p_bump, window=win, panels_per_unit=ppu).value
        rhs = (luxemburg_norm(a.rf, p_bump, window=win, panels_per_unit=ppu).value
               + luxemburg_norm(b.rf, p_bump, window=win, panels_per_unit=ppu).value)
        assert lhs <= rhs + 1e-9

    def test_not_integrable_signalled(self, p2):
        grower = as_real_function(parse("exp(x^2)"), name="grower")
        with pytest.raises(NotIntegrableError):
            luxemburg_norm(grower, p2, window=10.0)


class TestHolder:
    def test_box_pair(self, p2):
        row = holder_audit(box(), box(), p2)
        assert row.lhs == pytest.approx(1.0, abs=1e-12)
        assert row.rhs == pytest.approx(2.0, abs=1e-9)
        assert row.ratio == pytest.approx(0.5, abs=1e-9)
        assert row.passed

    def test_gaussian_pair(self, p2):
        row = holder_audit(GAUSS, GAUSS, p2)
        assert row.lhs == pytest.approx(math.sqrt(math.pi / 2.0), abs=1e-9)
        assert row.rhs == pytest.approx(2.0 * math.sqrt(math.pi / 2.0), abs=1e-6)
        assert row.ratio == pytest.approx(0.5, abs=1e-6)

    def test_variable_exponent_passes(self, p_bump):
        row = holder_audit(box(), box(), p_bump)
        assert row.passed and row.ratio <= 1.0

    def test_rejects_pminus_one(self, p1):
        with pytest.raises(ValueError):
            holder_audit(GAUSS, GAUSS, p1)


class TestNormSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            NormSpec(kind="lp")
        with pytest.raises(ValueError):
            NormSpec(kind="vexp")

    def test_sup_dispatch(self):
        val = norm_of(GAUSS, NormSpec.sup(6.0))
        assert val == pytest.approx(1.0, abs=1e-12)
