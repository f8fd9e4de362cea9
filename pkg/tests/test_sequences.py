import json
import math

import numpy as np
import pytest

from conftest import ZETA3, brute_double_tail
from runshift import (
    EtaSequence,
    NotSummableError,
    ToleranceError,
    inverse_design,
    make_eta,
    sequence_table,
    verify_design_shift,
)


class TestMakeEta:
    def test_geometric_values_and_weight(self, geometric_half):
        n = np.arange(1, 11)
        assert np.array_equal(geometric_half.values[:10], 2.0 ** (1 - n))
        assert geometric_half.W() == 2.0

    def test_power3_weight_matches_zeta(self, power3):
        # independent oracle: direct summation plus integral tail bound
        direct = float(np.sum(np.arange(1.0, 10001.0)[::-1] ** -3.0))
        lo, hi = direct + 10001.0**-2 / 2, direct + 10000.0**-2 / 2
        assert lo <= ZETA3 <= hi
        assert abs(power3.W() - ZETA3) < 1e-8

    def test_power1_not_summable(self):
        with pytest.raises(NotSummableError, match="not summable"):
            make_eta("power", {"gamma": 1.0}, 100)

    def test_nmax_floor(self):
        with pytest.raises(ValueError):
            make_eta("power", {"gamma": 3.0}, 4)

    def test_stretched_param_validation(self):
        with pytest.raises(ValueError):
            make_eta("stretched", {"theta": 1.5}, 100)

    def test_geometric_underflow_rejected(self):
        with pytest.raises(ValueError, match="underflows"):
            make_eta("geometric", {"ratio": 0.5}, 2000)

    def test_values_must_decrease(self):
        with pytest.raises(ValueError, match="nonincreasing"):
            EtaSequence(np.array([1.0, 0.5, 0.7, 0.1] + [0.05] * 8))


class TestTails:
    def test_geometric_tails_exact(self, geometric_half):
        assert geometric_half.tail(3) == 0.5
        assert geometric_half.tail(1) == 2.0

    def test_power_tail(self, power3):
        assert abs(power3.tail(2) - (ZETA3 - 1.0)) < 1e-8

    @pytest.mark.parametrize("fam,params,nmax", [
        ("power", {"gamma": 3.0}, 500),
        ("power", {"gamma": 2.2}, 500),
        ("stretched", {"theta": 0.5}, 500),
        ("stretched", {"theta": 0.3}, 500),
        ("geometric", {"ratio": 0.7}, 500),
    ])
    def test_tail_difference_identity(self, fam, params, nmax):
        # exact up to one rounding of the accumulation: |.| <= ulp(T(m))
        eta = make_eta(fam, params, nmax)
        for m in [1, 2, 5, 17, 100, nmax - 1]:
            diff = eta.tail(m) - eta.tail(m + 1)
            assert abs(diff - eta.values[m - 1]) <= 4e-16 * eta.tail(m)

    @pytest.mark.parametrize("fam,params", [
        ("power", {"gamma": 3.0}),
        ("stretched", {"theta": 0.5}),
        ("geometric", {"ratio": 0.5}),
    ])
    def test_row_sum_identity_exact(self, fam, params):
        # the stochastic-kernel identity (T(m+1) + eta_m)/T(m) = 1 is exact
        # because T(m) was accumulated as that very sum
        eta = make_eta(fam, params, 500)
        t = eta._t_grid
        for m in [1, 2, 5, 17, 100, 499]:
            assert (t[m] + eta.values[m - 1]) / t[m - 1] == 1.0

    def test_power_bracket_across_cutoffs(self):
        # the integral bound brackets the remainder: certified intervals from
        # two cutoffs must overlap and both contain the sharper estimate
        small = make_eta("power", {"gamma": 3.0}, 100)
        big = make_eta("power", {"gamma": 3.0}, 10000)
        lo_s, hi_s = small.tail_model.sum_tail(101)
        val_small = float(np.sum(small.values[::-1]))
        assert val_small + lo_s <= big.W() <= val_small + hi_s

    def test_tolerance_rejection_without_model(self):
        eta = EtaSequence(1.0 / np.arange(1.0, 101.0) ** 3)
        with pytest.raises(ToleranceError):
            eta.tail(1, tol=1e-10)
        # un-certified truncated value still available
        assert eta.tail(1) > 1.0

    def test_custom_with_bound_floor(self):
        values = 2.0 ** (1 - np.arange(1.0, 33.0))
        eta = make_eta("custom", {"values": values, "bound": ("geometric", 1.0, 0.5)}, 32)
        # floor is half the dominating tail at the cutoff
        assert eta.tail(1, tol=1e-9) == pytest.approx(2.0, rel=1e-9)
        with pytest.raises(ToleranceError):
            eta.tail(1, tol=1e-12)


class TestDoubleTail:
    def test_geometric_brute_force(self, geometric_half):
        brute = brute_double_tail(lambda m: 2.0 ** (1 - m), 3, terms=200)
        assert abs(brute - 0.5) < 1e-15
        assert geometric_half.double_tail(3) == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize("fam,params", [
        ("power", {"gamma": 3.0}),
        ("power", {"gamma": 2.5}),
        ("stretched", {"theta": 0.5}),
        ("geometric", {"ratio": 0.5}),
    ])
    def test_difference_identity(self, fam, params):
        eta = make_eta(fam, params, 400)
        for q in [1, 2, 7, 50, 200]:
            lhs = eta.double_tail(q) - eta.double_tail(q + 1)
            assert lhs == pytest.approx(eta.tail(q + 1), rel=1e-10, abs=1e-300)

    def test_stretched_incomplete_gamma_vs_brute(self, stretched_half):
        # certified value against an independent truncated double sum
        q = 10000
        brute = brute_double_tail(lambda m: np.exp(-np.sqrt(m)), q, terms=30000)
        assert stretched_half.double_tail(q) == pytest.approx(brute, rel=1e-10)

    def test_stretched_order_constant(self, stretched_half):
        # D(q) ~ (4 + 12/sqrt(q)) q e^-sqrt(q) from the incomplete-gamma expansion
        q = 10000
        ratio = stretched_half.double_tail(q) / (q * math.exp(-math.sqrt(q)))
        assert ratio == pytest.approx(4.0, rel=0.10)

    def test_power_first_moment_gate(self):
        eta = make_eta("power", {"gamma": 2.0}, 100)
        with pytest.raises(NotSummableError):
            eta.double_tail(5)
        with pytest.raises(NotSummableError):
            eta.first_moment()


class TestPoweredSums:
    def test_geometric_powered(self, geometric_half):
        # W(2) = sum 4^(1-n)... = sum (1/2)^(2(n-1)) = 1/(1-1/4)
        assert geometric_half.W(2.0) == pytest.approx(4.0 / 3.0, rel=1e-14)

    def test_power_powered_divergence(self, power3):
        with pytest.raises(NotSummableError):
            power3.W(0.25)

    def test_stretched_powered(self, stretched_half):
        direct = float(np.sum((stretched_half.values[::-1]) ** 2.0))
        assert stretched_half.W(2.0) == pytest.approx(direct, rel=1e-12)


class TestScaleInvariance:
    @pytest.mark.parametrize("fam,params", [
        ("power", {"gamma": 3.0}),
        ("stretched", {"theta": 0.5}),
        ("geometric", {"ratio": 0.5}),
    ])
    def test_ratios_unchanged(self, fam, params):
        eta = make_eta(fam, params, 200)
        scaled = eta.scaled(7.0)
        for m in [1, 5, 50, 150]:
            assert scaled.tail(m + 1) / scaled.tail(m) == pytest.approx(
                eta.tail(m + 1) / eta.tail(m), rel=1e-14
            )
            assert scaled.switch_ratio(m) == pytest.approx(
                eta.switch_ratio(m), rel=1e-14
            )

    def test_scaled_tails_scale(self, power3):
        assert power3.scaled(7.0).tail(10) == pytest.approx(7.0 * power3.tail(10), rel=1e-14)


class TestInverseDesign:
    def test_geometric_target_exact(self):
        eta = inverse_design(lambda q: 2.0**-q, qmax=40)
        r = np.arange(1, 21)
        assert np.allclose(eta.values[:20], 2.0 ** (-r - 2.0), rtol=1e-15, atol=0)
        for q in range(1, 33):
            assert eta.double_tail(q) == pytest.approx(2.0 ** -(q + 1), rel=1e-13)
        delta, err = verify_design_shift(eta, lambda q: 2.0**-q)
        assert delta == 1 and err < 1e-12

    def test_power_target_within_one_percent(self):
        eta = inverse_design(lambda q: float(q) ** -2.0, qmax=100)
        for q in range(10, 101, 10):
            target = (q + 1.0) ** -2.0
            assert abs(eta.double_tail(q) - target) / target < 0.01

    def test_nonmonotone_rejection_names_index(self):
        d = [0.5, 0.9, 1.0 / 3.0, 0.25, 0.2, 0.1]
        with pytest.raises(ValueError, match="q=1"):
            inverse_design(d, qmax=2)

    def test_nonconvex_rejection(self):
        # decreasing but not convex: differences re-increase -> eta_3 < 0
        d = [1.0, 0.6, 0.5, 0.45, 0.2, 0.1, 0.05, 0.02]
        with pytest.raises(ValueError, match="r=3"):
            inverse_design(d, qmax=2)


class TestSerialization:
    @pytest.mark.parametrize("fam,params", [
        ("power", {"gamma": 3.0}),
        ("stretched", {"theta": 0.5}),
        ("geometric", {"ratio": 0.5}),
    ])
    def test_json_round_trip(self, fam, params):
        eta = make_eta(fam, params, 64)
        back = EtaSequence.from_json(eta.to_json())
        assert np.array_equal(back.values, eta.values)
        assert back.tail(5) == eta.tail(5)
        doc = json.loads(eta.to_json())
        assert set(doc) == {"family", "params", "n_max", "values"}

    def test_table_columns(self, geometric_half):
        table = sequence_table(geometric_half, 10)
        assert list(table) == ["n", "eta", "T", "a"]
        assert math.isnan(table["a"][0])
        assert table["a"][1] == pytest.approx(-math.log(2.0))
        assert table["T"][0] == 2.0
