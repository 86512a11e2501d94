"""Sampler determinism, distributional correctness, and tail/moment logic."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cesaro_fields import (
    DomainError,
    FieldSpec,
    RangeError,
    TailProfile,
    derive_seed,
    feller_check,
    moment_finite,
    sample,
    sample_block,
    tail_prob,
    truncated_mean_expect,
)
from cesaro_fields.fields import value_cdf

# two-sided Kolmogorov-Smirnov critical value at level 1e-3 for n = 1e5,
# frozen from the asymptotic inverse
KS_N = 10 ** 5
KS_CRIT = 0.006164779987778185


def _ks_stat(samples, cdf):
    xs = np.sort(samples)
    n = xs.size
    f = cdf(xs)
    i = np.arange(n)
    return float(np.max(np.maximum((i + 1) / n - f, f - i / n)))


PROFILES = [
    TailProfile("gaussian"),
    TailProfile("uniform_sym"),
    TailProfile("pareto_log", p=2.0, q=1.0),
    TailProfile("pareto_log", p=1.0),
    TailProfile("pareto_log", p=1.5, q=0.0, mu=0.3),
]


class TestDeterminism:
    def test_block_repeatable(self):
        spec = FieldSpec(TailProfile("pareto_log", p=2.0, q=0.5), 9, (20, 20))
        a = sample_block(spec, 0, 20, 0, 20)
        b = sample_block(spec, 0, 20, 0, 20)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("profile", PROFILES, ids=lambda p: p.family)
    def test_scalar_matches_block_bitwise(self, profile):
        spec = FieldSpec(profile, 1234, (7, 9))
        blk = sample_block(spec, 0, 7, 0, 9)
        for k in range(8):
            for l in range(10):
                assert sample(spec, k, l) == blk[k, l]

    def test_sub_block_is_a_view_of_the_field(self):
        spec = FieldSpec(TailProfile("gaussian"), 5, (30, 30))
        full = sample_block(spec, 0, 30, 0, 30)
        sub = sample_block(spec, 11, 17, 3, 8)
        assert np.array_equal(sub, full[11:18, 3:9])

    def test_seed_wraps_to_64_bits(self):
        prof = TailProfile("gaussian")
        a = FieldSpec(prof, 5, (4, 4))
        b = FieldSpec(prof, 5 + 2 ** 64, (4, 4))
        assert np.array_equal(sample_block(a, 0, 4, 0, 4),
                              sample_block(b, 0, 4, 0, 4))

    def test_different_seeds_differ(self):
        prof = TailProfile("gaussian")
        a = sample_block(FieldSpec(prof, 1, (6, 6)), 0, 6, 0, 6)
        b = sample_block(FieldSpec(prof, 2, (6, 6)), 0, 6, 0, 6)
        assert not np.array_equal(a, b)

    def test_derive_seed_streams(self):
        seeds = {derive_seed(42, i) for i in range(1000)}
        assert len(seeds) == 1000
        assert derive_seed(42, 3, 7) == derive_seed(42, 3, 7)
        assert derive_seed(42, 3, 7) != derive_seed(42, 7, 3)

    def test_block_outside_extent(self):
        spec = FieldSpec(TailProfile("gaussian"), 0, (4, 4))
        with pytest.raises(RangeError):
            sample_block(spec, 0, 5, 0, 4)
        with pytest.raises(RangeError):
            sample(spec, 2, 5)

    def test_negative_extent(self):
        with pytest.raises(RangeError):
            FieldSpec(TailProfile("gaussian"), 0, (-1, 4))


class TestDistributions:
    @pytest.mark.parametrize(
        "profile",
        PROFILES,
        ids=lambda p: f"{p.family}-mu{p.mu}",
    )
    def test_kolmogorov_smirnov(self, profile):
        side = 500  # eight 500x25 strips stitched into 1e5 draws
        spec = FieldSpec(profile, 2024, (side - 1, KS_N // side - 1))
        xs = sample_block(spec, 0, side - 1, 0, KS_N // side - 1).ravel()
        assert xs.size == KS_N
        d = _ks_stat(xs, lambda v: value_cdf(profile, v))
        assert d < KS_CRIT, d

    def test_rademacher_values(self):
        spec = FieldSpec(TailProfile("rademacher"), 7, (99, 99))
        xs = sample_block(spec, 0, 99, 0, 99)
        assert set(np.unique(xs)) == {-1.0, 1.0}
        assert abs(xs.mean()) < 0.05  # 5 sigma at 1e4 draws

    def test_pareto_support_starts_at_x0(self):
        prof = TailProfile("pareto_log", p=1.0, q=2.0)
        spec = FieldSpec(prof, 3, (99, 99))
        xs = np.abs(sample_block(spec, 0, 99, 0, 99))
        assert xs.min() >= prof.x0

    def test_empirical_tail_matches_closed_form(self):
        prof = TailProfile("pareto_log", p=2.0, q=1.0)
        spec = FieldSpec(prof, 11, (399, 249))
        xs = np.abs(sample_block(spec, 0, 399, 0, 249)).ravel()
        for x in (3.0, 5.0, 12.0):
            p_hat = float((xs > x).mean())
            p_true = tail_prob(prof, x)
            se = math.sqrt(p_true * (1 - p_true) / xs.size)
            assert abs(p_hat - p_true) < 5 * se + 1e-12


class TestProfileValidation:
    def test_pareto_requires_p(self):
        with pytest.raises(DomainError):
            TailProfile("pareto_log")

    def test_pareto_defaults(self):
        prof = TailProfile("pareto_log", p=2.0)
        assert prof.q == 0.0
        assert prof.x0 == math.e

    def test_x0_floor(self):
        with pytest.raises(DomainError):
            TailProfile("pareto_log", p=2.0, x0=2.0)

    def test_light_families_reject_tail_params(self):
        with pytest.raises(DomainError):
            TailProfile("gaussian", p=2.0)
        with pytest.raises(DomainError):
            TailProfile("rademacher", q=1.0)

    def test_unknown_family(self):
        with pytest.raises(DomainError):
            TailProfile("cauchy")

    def test_symmetric_zero_flag(self):
        assert TailProfile("gaussian").is_symmetric_zero()
        assert not TailProfile("gaussian", mu=0.1).is_symmetric_zero()


class TestTailProb:
    def test_rademacher_step(self):
        prof = TailProfile("rademacher")
        assert tail_prob(prof, 0.0) == 1.0
        assert tail_prob(prof, 0.999) == 1.0
        assert tail_prob(prof, 1.0) == 0.0

    def test_uniform_ramp(self):
        prof = TailProfile("uniform_sym")
        assert tail_prob(prof, 0.25) == 0.75
        assert tail_prob(prof, 2.0) == 0.0

    def test_gaussian_at_zero(self):
        assert tail_prob(TailProfile("gaussian"), 0.0) == 1.0

    def test_pareto_closed_form_points(self):
        e = math.e
        assert tail_prob(TailProfile("pareto_log", p=2.0), e ** 2) == \
            pytest.approx(math.exp(-2.0), rel=1e-14)
        assert tail_prob(TailProfile("pareto_log", p=2.0, q=1.0), e ** 2) == \
            pytest.approx(math.exp(-2.0) / 2.0, rel=1e-14)
        assert tail_prob(TailProfile("pareto_log", p=1.0), 1.0) == 1.0

    def test_negative_x_rejected(self):
        with pytest.raises(DomainError):
            tail_prob(TailProfile("gaussian"), -0.5)

    @given(
        p=st.floats(min_value=0.5, max_value=4.0),
        q=st.floats(min_value=0.0, max_value=4.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_tail_monotone_nonincreasing(self, p, q):
        prof = TailProfile("pareto_log", p=p, q=q)
        xs = np.linspace(0.0, 60.0, 400)
        vals = tail_prob(prof, xs)
        assert np.all(np.diff(vals) <= 1e-15)
        assert np.all((vals >= 0) & (vals <= 1))


class TestMomentClassification:
    def test_power_dominates(self):
        assert moment_finite(TailProfile("pareto_log", p=3.0), 2.5)
        assert not moment_finite(TailProfile("pareto_log", p=2.0), 2.5)

    def test_boundary_needs_log_margin(self):
        # at p = r finiteness requires q > s + 1
        for s in (0.0, 1.0, 3.0):
            assert moment_finite(
                TailProfile("pareto_log", p=2.0, q=s + 2.0), 2.0, s
            )
            assert not moment_finite(
                TailProfile("pareto_log", p=2.0, q=s + 1.0), 2.0, s
            )
            assert not moment_finite(
                TailProfile("pareto_log", p=2.0, q=s), 2.0, s
            )

    def test_light_families_always_finite(self):
        for fam in ("rademacher", "uniform_sym", "gaussian"):
            assert moment_finite(TailProfile(fam), 10.0, 5.0)

    def test_shift_never_matters(self):
        assert moment_finite(TailProfile("pareto_log", p=3.0, mu=100.0), 2.5)

    def test_bad_orders(self):
        with pytest.raises(DomainError):
            moment_finite(TailProfile("gaussian"), 0.0)
        with pytest.raises(DomainError):
            moment_finite(TailProfile("gaussian"), 1.0, -1.0)

    def test_feller(self):
        assert feller_check(TailProfile("gaussian"))
        assert feller_check(TailProfile("pareto_log", p=1.5))
        assert feller_check(TailProfile("pareto_log", p=1.0, q=2.0))
        assert feller_check(TailProfile("pareto_log", p=1.0, q=0.5))
        assert not feller_check(TailProfile("pareto_log", p=1.0))
        assert not feller_check(TailProfile("pareto_log", p=0.7, q=3.0))


class TestTruncatedMean:
    def test_symmetric_zero_is_exact(self):
        for prof in (TailProfile("gaussian"), TailProfile("rademacher"),
                      TailProfile("pareto_log", p=1.0, q=2.0)):
            assert truncated_mean_expect(prof, 3.0) == 0.0

    def test_rademacher_enumeration(self):
        prof = TailProfile("rademacher", mu=0.5)  # values -0.5 and 1.5
        assert truncated_mean_expect(prof, 1.0) == -0.25
        assert truncated_mean_expect(prof, 2.0) == 0.5
        assert truncated_mean_expect(prof, 0.1) == 0.0

    def test_uniform_shifted_symmetric_window(self):
        # X uniform on [-0.75, 1.25]; |X| <= 0.5 is symmetric about 0
        prof = TailProfile("uniform_sym", mu=0.25)
        assert truncated_mean_expect(prof, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_gaussian_converges_to_mu(self):
        prof = TailProfile("gaussian", mu=1.0)
        vals = [truncated_mean_expect(prof, c) for c in (2.0, 4.0, 8.0, 16.0)]
        assert abs(vals[-1] - 1.0) < 1e-12
        errs = [abs(v - 1.0) for v in vals]
        assert errs == sorted(errs, reverse=True)

    def test_gaussian_matches_monte_carlo(self):
        prof = TailProfile("gaussian", mu=0.6)
        rng = np.random.default_rng(5)
        xs = rng.normal(0.6, 1.0, 2_000_000)
        mc = float(np.where(np.abs(xs) <= 1.2, xs, 0.0).mean())
        assert truncated_mean_expect(prof, 1.2) == pytest.approx(mc, abs=3e-3)

    def test_shifted_pareto_matches_own_sampler(self):
        prof = TailProfile("pareto_log", p=2.5, q=0.0, mu=0.7)
        spec = FieldSpec(prof, 123, (1499, 1499))
        xs = sample_block(spec, 0, 1499, 0, 1499).ravel()
        for c in (3.0, 10.0):
            kept = np.where(np.abs(xs) <= c, xs, 0.0)
            se = float(kept.std() / math.sqrt(kept.size))
            assert abs(truncated_mean_expect(prof, c) - kept.mean()) < 6 * se

    def test_cutoff_must_be_positive(self):
        with pytest.raises(DomainError):
            truncated_mean_expect(TailProfile("gaussian", mu=1.0), 0.0)


class TestValueCdf:
    def test_median_at_mu(self):
        for prof in (TailProfile("gaussian", mu=0.4),
                      TailProfile("pareto_log", p=2.0, mu=-1.0)):
            assert value_cdf(prof, prof.mu) == pytest.approx(0.5)

    def test_monotone(self):
        prof = TailProfile("pareto_log", p=1.5, q=1.0, mu=0.2)
        xs = np.linspace(-40, 40, 801)
        cdf = value_cdf(prof, xs)
        assert np.all(np.diff(cdf) >= 0)
        assert cdf[0] >= 0 and cdf[-1] <= 1
