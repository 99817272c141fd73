import math

import numpy as np
import pytest

from vexp.constants import c10
from vexp.fnexpr import Decay, differentiate, parse
from vexp.functions import RealFunction, as_real_function
from vexp.norms import NormSpec, SampledModular
from vexp.smoothness import (ModulusRequest, k_functional_upper, modulus,
                             modulus_properties_audit)
from vexp.steklov import IndicatorSteklov, nested_steklov

GAUSS = as_real_function(parse("exp(-x^2)"), name="gauss")
SUP5 = NormSpec.sup(5.0)


def box():
    eng = IndicatorSteklov(0.0, 1.0)
    return RealFunction(fn=eng, name="box", decay=Decay.compact(0, 1),
                        breakpoints=(0.0, 1.0), exact=eng)


class TestModulus:
    def test_constant_is_fixed_point(self):
        c = as_real_function(parse("4"), name="const")
        for r in (1, 2):
            assert modulus(ModulusRequest(c, r, 0.7, SUP5)) < 1e-13

    def test_affine_sup_value(self):
        # (I - T_d) x = -d/2 identically
        f = as_real_function(parse("x"))
        val = modulus(ModulusRequest(f, 1, 0.2, SUP5))
        assert val == pytest.approx(0.1, abs=1e-12)

    def test_zero_step(self, p2):
        assert modulus(ModulusRequest(GAUSS, 2, 0.0, NormSpec.vexp(p2))) == 0.0

    def test_vexp_against_nested_oracle(self, p2):
        # brute-force oracle: binomial expansion with literally nested
        # averaging, Luxemburg root from a dense Simpson-style sampling
        r, d = 2, 0.5
        val = modulus(ModulusRequest(GAUSS, r, d, NormSpec.vexp(p2, window=12.0)))
        terms = [nested_steklov(GAUSS, d, k) for k in range(r + 1)]

        def h(x):
            acc = np.zeros_like(x)
            for k, t in enumerate(terms):
                acc += (-1.0) ** k * math.comb(r, k) * t.fn(x)
            return acc

        oracle_fn = RealFunction(fn=h, name="oracle_h")
        sm = SampledModular(oracle_fn, p2, 12.0, panels_per_unit=6.0)
        oracle = sm.luxemburg().value
        assert val == pytest.approx(oracle, abs=1e-7)


class TestKFunctional:
    def test_polynomial_annihilation(self):
        # degree < r: the candidate reproduces f exactly and g^(r) vanishes
        f = as_real_function(parse("2*x - 1"))
        est = k_functional_upper(f, 2, 0.4, SUP5)
        assert est.value < 1e-10
        assert est.f_minus_g_norm < 1e-10 and est.g_deriv_norm < 1e-10

    def test_invariant_value_decomposition(self, p2):
        est = k_functional_upper(GAUSS, 1, 0.5, NormSpec.vexp(p2))
        assert est.value == pytest.approx(
            est.f_minus_g_norm + 0.5 * est.g_deriv_norm, rel=1e-12)
        assert est.candidate_g_description["iterate_powers"] == [2]

    def test_dominates_mollification_family(self):
        # secondary candidate family: Gaussian mollifications g_eps; each
        # gives another upper bound for the true K-functional, and the
        # sharper iterate candidate should not fall below the family's best
        # value by more than tolerance
        r, d = 1, 0.5
        est = k_functional_upper(GAUSS, r, d, SUP5)
        best = math.inf
        xs = np.linspace(-5, 5, 501)
        us = np.linspace(-6, 6, 481)
        du = us[1] - us[0]
        fu = GAUSS(us)
        for eps in (0.05, 0.1, 0.2, 0.4, 0.8):
            kern = np.exp(-(xs[:, None] - us[None, :]) ** 2 / (2 * eps ** 2))
            kern /= math.sqrt(2 * math.pi) * eps
            g = kern @ fu * du
            dkern = kern * (us[None, :] - xs[:, None]) / eps ** 2
            g1 = dkern @ fu * du
            cand = np.max(np.abs(GAUSS(xs) - g)) + d ** r * np.max(np.abs(g1))
            best = min(best, cand)
        assert est.value >= best - 1e-6

    def test_decreasing_in_delta(self):
        vals = [k_functional_upper(GAUSS, 1, d, SUP5).value
                for d in (0.2, 0.1, 0.05)]
        assert vals[0] > vals[1] > vals[2]

    def test_order_three_sup_equivalence(self):
        # candidate iterate powers reach 2 r^2 = 18; the two-sided sup-norm
        # comparison still brackets the modulus
        from vexp.constants import c8_k
        est = k_functional_upper(GAUSS, 3, 0.4, SUP5)
        om = modulus(ModulusRequest(GAUSS, 3, 0.4, SUP5))
        assert om <= 2.0 ** 3 * est.value
        assert est.value <= c8_k(3) * om


class TestGridFunctionInput:
    def test_modulus_of_materialized_samples(self, p2):
        from vexp.steklov import materialize
        g = materialize(GAUSS, 12.0, 0.002)
        val_grid = modulus(ModulusRequest(g, 1, 0.5, NormSpec.vexp(p2)))
        val_exact = modulus(ModulusRequest(GAUSS, 1, 0.5, NormSpec.vexp(p2)))
        assert val_grid == pytest.approx(val_exact, rel=1e-4)


class TestPropertiesAudit:
    def test_zero_function_all_pass(self, p2):
        zero = as_real_function(parse("0"), name="zero")
        rows = modulus_properties_audit(zero, zero, 1, 0.2, 0.5,
                                        NormSpec.vexp(p2), c10=c10(2.0, 0.0))
        assert all(r.passed for r in rows)
        assert all(r.lhs == 0.0 for r in rows)

    def test_gaussian_sup_with_derivative_bound(self):
        f2 = as_real_function(differentiate(parse("exp(-x^2)"), 2), name="g2")
        rows = modulus_properties_audit(GAUSS, GAUSS, 2, 0.2, 0.5, SUP5,
                                        f_deriv=f2)
        by_id = {r.theorem_id: r for r in rows}
        assert by_id["modulus_size_bound"].passed
        assert by_id["modulus_smooth_bound"].passed
        # measured ratios are recorded and meaningful
        assert 0.0 < by_id["modulus_smooth_bound"].ratio <= 1.0

    def test_box_vanishing_sequence(self, p2):
        rows = modulus_properties_audit(box(), box(), 1, 0.2, 0.5,
                                        NormSpec.vexp(p2), c10=c10(2.0, 0.0))
        vanish = [r for r in rows if r.theorem_id == "modulus_vanishing"][0]
        seq = vanish.truncation_bounds["values"]
        assert all(b <= a * (1 + 1e-6) + 1e-12 for a, b in zip(seq, seq[1:]))
        assert vanish.passed

    def test_delta_order_validated(self, p2):
        with pytest.raises(ValueError):
            modulus_properties_audit(GAUSS, GAUSS, 1, 0.5, 0.2,
                                     NormSpec.vexp(p2), c10=1.0)
