import functools
import math

import numpy as np
import pytest

from runshift import (
    DigitSystem,
    WaltersCoefficients,
    coeffs_from_eta,
    estimate_gamma,
    eta_from_coeffs,
    make_eta,
    renorm1_apply,
    renorm1_fixed_point,
    renorm2_apply,
    renorm2_digit_indices,
    renorm2_fixed_point,
    residual,
)


def hofbauer(n_max):
    """a_n = -log(n/(n-1)), the eta_n = 1/n coefficient sequence."""
    n = np.arange(2.0, n_max + 1.0)
    return WaltersCoefficients(-np.log(n / (n - 1.0)))


class TestConversions:
    def test_geometric_coeffs_constant(self, geometric_half):
        coeffs = coeffs_from_eta(geometric_half)
        assert np.allclose(coeffs.a, -math.log(2.0), rtol=0, atol=1e-15)
        assert coeffs.b == pytest.approx(-math.log(2.0))

    def test_hofbauer_telescoping(self):
        eta = eta_from_coeffs(hofbauer(200))
        assert np.allclose(eta.values, 1.0 / np.arange(1.0, 201.0), rtol=1e-13)

    def test_round_trip_power3(self, power3):
        back = eta_from_coeffs(coeffs_from_eta(power3))
        assert np.max(np.abs(back.values - power3.values) / power3.values) < 1e-13

    def test_eta1_gate(self, stretched_half):
        with pytest.raises(ValueError, match="rescale"):
            coeffs_from_eta(stretched_half)
        coeffs = coeffs_from_eta(stretched_half, rescale=True)
        back = eta_from_coeffs(coeffs)
        ratio = stretched_half.values / stretched_half.values[0]
        assert np.max(np.abs(back.values - ratio) / ratio) < 1e-12


class TestBlockOperator:
    def test_hofbauer_fixed_under_k2(self):
        coeffs = hofbauer(100)
        image = renorm1_apply(coeffs, 2)
        # (Ra)_2 = a_3 + a_4 = -log 2 = a_2, and so on
        assert image.a[0] == pytest.approx(-math.log(2.0), rel=1e-14)
        assert np.allclose(image.a, coeffs.a[: image.a.size], atol=1e-15)

    def test_zero_sequence_fixed(self):
        coeffs = WaltersCoefficients(np.zeros(50))
        assert np.all(renorm1_apply(coeffs, 3).a == 0.0)

    def test_hofbauer_not_fixed_under_k3(self):
        image = renorm1_apply(hofbauer(100), 3)
        # a_3 + a_4 + a_5 = -log(5/2) != a_2
        assert image.a[0] == pytest.approx(-math.log(2.5), rel=1e-14)
        assert abs(image.a[0] - (-math.log(2.0))) > 0.2

    def test_missing_index_named(self):
        with pytest.raises(ValueError, match="a_22"):
            renorm1_apply(hofbauer(20), 2, n_out=11)

    def test_passthrough_of_switch_values(self):
        coeffs = WaltersCoefficients(np.zeros(50), b=1.5, d=1.5)
        image = renorm1_apply(coeffs, 2)
        assert image.b == 1.5 and image.d == 1.5


class TestBlockFixedPoint:
    def test_canonical_case_is_hofbauer(self):
        coeffs = renorm1_fixed_point(2, -math.log(2.0), 500)
        n = np.arange(2.0, 501.0)
        assert np.max(np.abs(coeffs.a + np.log(n / (n - 1.0)))) < 1e-14
        eta = eta_from_coeffs(coeffs)
        assert np.allclose(eta.values, 1.0 / np.arange(1.0, 501.0), rtol=1e-12)

    def test_log3_case_by_hand(self):
        coeffs = renorm1_fixed_point(2, -math.log(3.0), 10)
        # alpha(2) = -1/2 gives a_3 = -log 2, a_4 = -log(3/2)
        assert coeffs.a_at(3) == pytest.approx(-math.log(2.0), rel=1e-14)
        assert coeffs.a_at(4) == pytest.approx(-math.log(1.5), rel=1e-14)
        assert coeffs.a_at(3) + coeffs.a_at(4) == pytest.approx(
            -math.log(3.0), rel=1e-14
        )

    @pytest.mark.parametrize("k", [2, 3, 4])
    @pytest.mark.parametrize("a2", [-math.log(2.0), -math.log(3.0)])
    def test_residual_small(self, k, a2):
        coeffs = renorm1_fixed_point(k, a2, k * 1000 + 2)
        rep = residual(coeffs, functools.partial(renorm1_apply, k=k))
        assert rep.sup_abs < 1e-12
        assert rep.n_checked >= 1000

    def test_positive_a2_rejected(self):
        with pytest.raises(ValueError):
            renorm1_fixed_point(2, 0.1, 100)


class TestGammaEstimate:
    def test_power3(self, power3):
        fit = estimate_gamma(power3, 10, 1000)
        assert fit.gamma == pytest.approx(3.0, abs=0.01)
        assert fit.power_law

    def test_hofbauer_is_gamma_one(self):
        eta = eta_from_coeffs(renorm1_fixed_point(2, -math.log(2.0), 2000))
        fit = estimate_gamma(eta, 10, 1500)
        assert fit.gamma == pytest.approx(1.0, abs=0.01)
        assert fit.power_law

    def test_stretched_flagged(self, stretched_half):
        fit = estimate_gamma(stretched_half, 10, 1000)
        assert not fit.power_law
        assert abs(fit.curvature) > 0.02

    def test_degenerate_range(self, power3):
        with pytest.raises(ValueError, match="range"):
            estimate_gamma(power3, 50, 52)


class TestDigitOperator:
    def test_index_arithmetic(self):
        # k=3, digits {0,2}: (Ra)_2 = a_6 + a_4, checked with marker values
        a = np.zeros(10)
        a[6 - 2] = 5.0
        a[4 - 2] = 11.0
        image = renorm2_apply(WaltersCoefficients(a), DigitSystem(3, (0, 2)))
        assert image.a[0] == 16.0

    def test_hofbauer_fixed_in_lebesgue_case(self):
        image = renorm2_apply(hofbauer(100), DigitSystem(3, (0, 1, 2)))
        # -log(6/5) - log(5/4) - log(4/3) = -log 2
        assert image.a[0] == pytest.approx(-math.log(2.0), rel=1e-14)
        assert np.allclose(image.a, hofbauer(100).a[: image.a.size], atol=1e-14)

    def test_zero_fixed(self):
        image = renorm2_apply(WaltersCoefficients(np.zeros(30)), DigitSystem(3, (0, 2)))
        assert np.all(image.a == 0.0)

    def test_digit_system_validation(self):
        with pytest.raises(ValueError):
            DigitSystem(3, (2, 0))
        with pytest.raises(ValueError):
            DigitSystem(3, (0, 4))
        with pytest.raises(ValueError):
            DigitSystem(3, (0, 1, 2, 3))
        with pytest.raises(ValueError):
            DigitSystem(1, (0, 1))


class TestDigitLemma:
    def test_single_pass_is_digits(self):
        ds = DigitSystem(3, (0, 2))
        assert renorm2_digit_indices(ds, 1).tolist() == [0, 2]

    def test_depth_two_and_three(self):
        ds = DigitSystem(3, (0, 2))
        assert renorm2_digit_indices(ds, 2).tolist() == [0, 2, 6, 8]
        assert renorm2_digit_indices(ds, 3).tolist() == [0, 2, 6, 8, 18, 20, 24, 26]

    @pytest.mark.parametrize("n_fold", [1, 2, 3, 4, 5])
    def test_composition_matches_exactly(self, n_fold):
        # integer coefficients make both evaluation orders exact
        ds = DigitSystem(3, (0, 2))
        rng = np.random.default_rng(11)
        a = rng.integers(-50, 50, size=3**n_fold * 8 + 16).astype(float)
        coeffs = WaltersCoefficients(a)
        composed = coeffs
        for _ in range(n_fold):
            composed = renorm2_apply(composed, ds)
        js = renorm2_digit_indices(ds, n_fold)
        n_top = composed.n_max
        direct = np.array(
            [sum(coeffs.a_at(3**n_fold * n - j) for j in js) for n in range(2, n_top + 1)]
        )
        assert np.array_equal(composed.a, direct)

    def test_multiplicity_preserved(self):
        # digits {0,1,3} in base 3 collide: 3 = 3*1 + 0 = 0 + 3
        ds = DigitSystem(3, (0, 1, 3))
        js = renorm2_digit_indices(ds, 2)
        assert js.size == 9
        assert np.count_nonzero(js == 3) == 2

    def test_enumeration_limit(self):
        with pytest.raises(ValueError, match="limit"):
            renorm2_digit_indices(DigitSystem(3, (0, 2)), 25)


class TestDigitFixedPoint:
    def test_lebesgue_case_closed_form(self):
        fp = renorm2_fixed_point(DigitSystem(3, (0, 1, 2)), 60, depth=12)
        n = np.arange(2.0, 61.0)
        assert np.max(np.abs(fp.coeffs.a + np.log(n / (n - 1.0)))) < 1e-8

    def test_self_similarity_residual(self):
        ds = DigitSystem(3, (0, 2))
        fp = renorm2_fixed_point(ds, 30, depth=14)
        image = renorm2_apply(fp.coeffs, ds)
        for n in range(2, 11):
            allowed = (ds.l + 1) * fp.bounds[n - 2]
            assert abs(fp.coeffs.a_at(n) - image.a_at(n)) <= allowed

    def test_k5_alpha_and_eta_order(self):
        ds = DigitSystem(5, (0, 3))
        assert ds.hausdorff_alpha == pytest.approx(0.43067655807339306, abs=1e-12)
        fp = renorm2_fixed_point(ds, 2000, depth=12)
        eta = eta_from_coeffs(fp.coeffs)
        # eta_n of order exp(-n^(1-alpha)): fit log(-log eta_n) against log n
        n = np.arange(200, 2001)
        y = np.log(-np.log(eta.values[n - 1]))
        slope = np.polyfit(np.log(n), y, 1)[0]
        assert slope == pytest.approx(1.0 - ds.hausdorff_alpha, abs=0.05)


class TestResidualOp:
    def test_perturbation_detected(self):
        coeffs = renorm1_fixed_point(2, -math.log(2.0), 200)
        bumped = WaltersCoefficients(coeffs.a.copy())
        bumped.a[2] += 1e-3
        rep = residual(bumped, functools.partial(renorm1_apply, k=2))
        assert rep.sup_abs >= 1e-3

    def test_zero_residual_for_zero(self):
        rep = residual(
            WaltersCoefficients(np.zeros(64)), functools.partial(renorm1_apply, k=2)
        )
        assert rep.sup_abs == 0.0
