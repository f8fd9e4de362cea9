import numpy as np
import pytest

from conftest import brute_double_tail
from runshift import (
    correlation_asymptotic,
    decay_table,
    iterates_from_run,
    make_eta,
    renewal_deficits,
    renewal_series,
    stretched_tail_report,
    transfer_iterates,
)

A1_POWER3 = 0.16809262741929248  # (zeta(3) - 1) / zeta(3)
K1_POWER3 = 0.33190737258070746  # 1/zeta(3) - 1/2


class TestBernoulliCase:
    def test_everything_vanishes(self, geometric_half):
        ser = renewal_series(geometric_half, 64)
        assert np.all(ser.iterates == 0.5)
        assert np.all(ser.forcing == 0.0)
        assert np.all(ser.deficits == 0.0)

    def test_iterates_from_any_run(self, geometric_half):
        for s in (1, 2, 4, 8):
            b = iterates_from_run(geometric_half, s, 32)
            assert np.max(np.abs(b - 0.5)) < 1e-15


class TestRenewalRecursion:
    def test_first_iterate(self, power3):
        ser = renewal_series(power3, 8)
        assert ser.iterates[0] == pytest.approx(A1_POWER3, abs=1e-12)
        assert ser.iterates[0] == pytest.approx(power3.tail(2) / power3.W(), rel=1e-14)

    def test_first_forcing_equals_first_deficit(self, power3):
        ser = renewal_series(power3, 8)
        assert ser.forcing[0] == pytest.approx(K1_POWER3, abs=1e-12)
        assert ser.deficits[0] == ser.forcing[0]

    @pytest.mark.parametrize("fam,params,nmax", [
        ("power", {"gamma": 3.0}, 2100),
        ("stretched", {"theta": 0.5}, 2100),
        ("geometric", {"ratio": 0.5}, 1024),
    ])
    def test_deficits_are_half_minus_iterates(self, fam, params, nmax):
        # the two recursions are algebraically the same statement
        eta = make_eta(fam, params, nmax)
        ser = renewal_series(eta, 1000)
        assert np.max(np.abs(ser.deficits - (0.5 - ser.iterates))) < 1e-12

    def test_iterates_in_unit_interval_and_converge(self, power3):
        a = transfer_iterates(power3, 2048)
        assert np.all((a > 0.0) & (a < 1.0))
        # |A_q - 1/2| tail decreases to zero
        gap = np.abs(a - 0.5)
        assert gap[-1] < 1e-5
        assert np.max(gap[1024:]) < np.max(gap[256:1024]) < np.max(gap[:256])

    def test_deficits_vanish(self, power3):
        v = renewal_deficits(power3, 2048)
        assert abs(v[-1]) < 1e-5

    def test_generating_function_identity(self, power3):
        # V(z) (1 + z f(z)) = z K(z) at z = 1/2, within truncation tails
        ser = renewal_series(power3, 400)
        z = 0.5
        pow_z = z ** np.arange(1, 401)
        v_z = float(np.sum(ser.deficits * pow_z))
        f_z = float(np.sum(ser.jump_probs * pow_z / z))
        k_z = float(np.sum(ser.forcing * pow_z / z))
        assert v_z * (1.0 + z * f_z) == pytest.approx(z * k_z, abs=1e-12)


class TestIteratesFromRun:
    def test_reduces_to_plain_iterates_at_unit_run(self, power3):
        ser = renewal_series(power3, 64)
        b = iterates_from_run(power3, 1, 64, series=ser)
        assert np.max(np.abs(b - ser.iterates)) < 1e-14

    def test_first_step_is_continue_probability(self, power3):
        for s in (1, 3, 9):
            b = iterates_from_run(power3, s, 4)
            assert b[0] == pytest.approx(power3.tail(s + 1) / power3.tail(s), rel=1e-14)

    def test_values_in_unit_interval(self, stretched_half):
        for s in (1, 2, 4, 8):
            b = iterates_from_run(stretched_half, s, 256)
            assert np.all((b > 0.0) & (b <= 1.0))


class TestCorrelationOrder:
    def test_power3_loglog_slope(self, power3):
        qs = np.array([128, 181, 256, 362, 512, 724, 1024])
        d = correlation_asymptotic(power3, qs)
        slope = np.polyfit(np.log(qs), np.log(d), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.05)

    def test_stretched_order_constant(self, stretched_half):
        qs = np.linspace(2500, 10000, 16).astype(int)
        ratios = correlation_asymptotic(stretched_half, qs) / (
            qs * np.exp(-np.sqrt(qs))
        )
        assert np.all(np.abs(ratios - 4.0) < 0.4)
        assert ratios.max() / ratios.min() < 1.10

    def test_geometric_not_sharp(self, geometric_half):
        # the order statement is not attained for geometric weights: the
        # predicted scale is 1/2 at q=3 while the true correlation is 0
        assert correlation_asymptotic(geometric_half, 3) == pytest.approx(0.5, abs=1e-13)

    def test_matches_brute_double_sum(self, power3):
        q, terms = 64, 2_000_000
        brute = brute_double_tail(lambda m: m**-3.0, q, terms=terms)
        # remainder of the truncated double sum lies between the integral
        # from the cutoff and that plus one leading term
        cut = q + terms + 1
        lo = 1.0 / cut - q / (2.0 * cut**2)
        value = correlation_asymptotic(power3, q)
        assert brute + lo <= value <= brute + lo + 2.0 * (cut - q) * cut**-3.0


class TestScaleInvariance:
    def test_renewal_outputs_unchanged(self, power3):
        scaled = power3.scaled(7.0)
        s1 = renewal_series(power3, 128)
        s2 = renewal_series(scaled, 128)
        assert np.max(np.abs(s1.iterates - s2.iterates)) < 1e-12
        assert np.max(np.abs(s1.deficits - s2.deficits)) < 1e-12
        assert np.max(np.abs(s1.forcing - s2.forcing)) < 1e-12
        b1 = iterates_from_run(power3, 4, 64)
        b2 = iterates_from_run(scaled, 4, 64)
        assert np.max(np.abs(b1 - b2)) < 1e-12

    def test_double_tail_ratios_unchanged(self, power3):
        scaled = power3.scaled(7.0)
        for q in (2, 8, 64):
            r1 = power3.double_tail(q) / power3.double_tail(1)
            r2 = scaled.double_tail(q) / scaled.double_tail(1)
            assert r1 == pytest.approx(r2, rel=1e-13)


class TestStretchedTailReport:
    def test_limit_constant_two(self, stretched_half):
        report = stretched_tail_report(stretched_half, [10_000])
        assert 1.8 <= report["ratio"][0] <= 2.2

    def test_monotone_approach(self, stretched_half):
        ms = [100, 300, 1000, 3000, 10_000]
        report = stretched_tail_report(stretched_half, ms)
        gaps = np.abs(report["ratio"] - 2.0)
        assert np.all(np.diff(gaps) < 0.0)

    def test_family_gate(self, power3):
        with pytest.raises(ValueError):
            stretched_tail_report(power3, [100])

    def test_faster_family_dominated_termwise(self):
        # exponent 1 - log2/log5 > 1/2, so exp(-n^theta5) <= exp(-sqrt n)
        theta5 = 1.0 - 0.43067655807339306
        fast = make_eta("stretched", {"theta": theta5}, 4000)
        slow = make_eta("stretched", {"theta": 0.5}, 4000)
        assert np.all(fast.values <= slow.values)
        for q in (10, 100, 1000):
            assert fast.double_tail(q) <= slow.double_tail(q)


class TestDecayTable:
    def test_columns(self, geometric_half):
        table = decay_table(geometric_half, 16)
        assert list(table) == ["q", "A", "V", "K", "D", "C_oracle", "C_over_D"]
        assert np.all(np.isnan(table["C_oracle"]))
        table = decay_table(geometric_half, 8, oracle_correlations=np.zeros(8))
        assert np.all(table["C_oracle"] == 0.0)
