"""Integral oracles: branch forms, moment integrals, route equivalence."""

import math

import pytest
from scipy.integrate import quad

from cesaro_fields import (
    CesaroOrder,
    DomainError,
    NumericError,
    TailProfile,
    branch_ratio,
    equivalence_check,
    gamma_integral,
    integral_growth,
    moment_integral,
    regime_case,
    stabilization_report,
    verify_report,
)
from cesaro_fields.integrals import DEFAULT_GAMMA_GRID, RATIO_DRIFT_TOL

# ratio(y) -> (1-g)/(1-2g) below 1/2, 1 at 1/2, -(1-g)/(1-2g) above
LIMITS = {0.1: 1.125, 0.3: 1.75, 0.5: 1.0, 0.7: 0.75, 0.9: 0.125}


class TestGammaIntegral:
    def test_half_is_logarithmic(self):
        for y in (10.0, 1e3, 1e6):
            assert gamma_integral(0.5, y) == pytest.approx(math.log(y),
                                                           rel=1e-14)

    @pytest.mark.parametrize("gamma", [0.3, 0.7, 0.9])
    def test_closed_form_against_quadrature(self, gamma):
        y = 100.0
        e = -gamma / (1.0 - gamma)
        val, err = quad(lambda x: x ** e, y, y ** (1.0 / gamma),
                        epsabs=0.0, epsrel=1e-12, limit=200)
        assert err < 1e-8 * abs(val)
        assert gamma_integral(gamma, y) == pytest.approx(val, rel=1e-8)

    def test_branch_ratios_approach_limits(self):
        for g, lim in LIMITS.items():
            assert branch_ratio(g, 1e6) == pytest.approx(lim, rel=1e-2)

    def test_stabilization_drift(self):
        report = stabilization_report(DEFAULT_GAMMA_GRID)
        assert report["all_stable"]
        for case in report["cases"]:
            assert case["drift"] < RATIO_DRIFT_TOL
            assert case["stable"]

    def test_regimes(self):
        assert regime_case(0.499).regime == "below_half"
        assert regime_case(0.5).regime == "half"
        assert regime_case(0.501).regime == "above_half"
        for g in (0.0, 1.0, -0.2):
            with pytest.raises(DomainError):
                regime_case(g)

    def test_domain_and_overflow(self):
        with pytest.raises(DomainError):
            gamma_integral(0.5, 1.0)
        with pytest.raises(DomainError):
            gamma_integral(1.2, 10.0)
        # gamma near 0 sends the upper limit y^(1/gamma) out of range
        with pytest.raises(NumericError):
            gamma_integral(0.01, 1e4)


class TestMomentIntegral:
    def test_bounded_profile_is_zero(self):
        prof = TailProfile("rademacher")
        assert moment_integral(prof, 2.0, 1.0, 1e6) == 0.0

    def test_pure_power_tail_antiderivative(self):
        # p=3, r=2.5: int_1^e x^1.5 dx + e^3 int_e^U x^-1.5 dx, closed form
        prof = TailProfile("pareto_log", p=3.0, q=0.0)
        e = math.e
        upper = 1e4
        expect = (e ** 2.5 - 1.0) / 2.5 + 2.0 * e ** 3 * (
            e ** -0.5 - upper ** -0.5
        )
        got = moment_integral(prof, 2.5, 0.0, upper)
        assert got == pytest.approx(expect, rel=1e-8)

    def test_critical_power_grows_per_decade(self):
        # p = r = 2: the integral grows by e^2 log(100) per two decades
        prof = TailProfile("pareto_log", p=2.0, q=0.0)
        vals = [moment_integral(prof, 2.0, 0.0, u) for u in (1e2, 1e4, 1e6)]
        e2log = math.e ** 2 * math.log(100.0)
        assert vals[1] - vals[0] == pytest.approx(e2log, rel=1e-8)
        assert vals[2] - vals[1] == pytest.approx(e2log, rel=1e-8)
        expect_first = (math.e ** 2 - 1.0) / 2.0 + math.e ** 2 * (
            math.log(1e2) - 1.0
        )
        assert vals[0] == pytest.approx(expect_first, rel=1e-8)

    def test_domains(self):
        prof = TailProfile("gaussian")
        with pytest.raises(DomainError):
            moment_integral(prof, 2.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            moment_integral(prof, 2.0, -1.0, 1e4)


class TestIntegralGrowth:
    def test_straddle_classifications(self):
        finite = TailProfile("pareto_log", p=2.0, q=5.0)
        infinite = TailProfile("pareto_log", p=2.0, q=3.0)
        _, cls_f = integral_growth(finite, 2.0, 3.0)
        _, cls_i = integral_growth(infinite, 2.0, 3.0)
        assert cls_f == "convergent"
        assert cls_i == "divergent"

    def test_values_monotone_in_upper(self):
        vals, _ = integral_growth(TailProfile("pareto_log", p=2.0, q=4.0),
                                  2.0, 3.0)
        assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))

    def test_needs_three_uppers(self):
        with pytest.raises(DomainError):
            integral_growth(TailProfile("gaussian"), 2.0, 0.0,
                            uppers=(1e2, 1e4))


class TestEquivalence:
    def test_finite_cell_both_convergent(self):
        rep = equivalence_check(
            TailProfile("pareto_log", p=2.0, q=5.0), CesaroOrder(0.5, 0.5))
        assert rep.requirement == (2.0, 3.0)
        assert rep.sum_classification == "convergent"
        assert rep.integral_classification == "convergent"
        assert rep.concordant is True

    def test_infinite_cell_both_divergent(self):
        rep = equivalence_check(
            TailProfile("pareto_log", p=2.0, q=3.0), CesaroOrder(0.5, 0.5))
        assert rep.sum_classification == "divergent"
        assert rep.integral_classification == "divergent"
        assert rep.concordant is True

    def test_bounded_cell_both_convergent(self):
        rep = equivalence_check(TailProfile("rademacher"),
                                CesaroOrder(0.6, 0.8))
        assert rep.sum_classification == "convergent"
        assert rep.integral_classification == "convergent"
        assert rep.concordant is True

    def test_verify_report_at_small_base(self):
        # n_base = 32 leaves the hardest cell in the inconclusive band;
        # the report must say so rather than claim success
        report = verify_report(n_base=32)
        assert set(report) == {"branch_ratios", "equivalence", "ok"}
        assert report["branch_ratios"]["all_stable"] is True
        eq = report["equivalence"]
        assert eq["total"] == 10
        assert eq["discordant"] is False
        assert eq["inconclusive"] is True
        assert report["ok"] is False
