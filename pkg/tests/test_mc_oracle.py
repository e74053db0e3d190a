"""Determinism, convergence, and reference behaviour of the Monte Carlo oracles."""

import math

import numpy as np
import pytest

from gase.mc_oracle import (McConfig, McSampler, TailCertificationError,
                            af_snr_sampler, certified_disk_radius, df_snr_sampler,
                            exponential_from_uniform, mc_affected_area, mc_coop_summary,
                            mc_ergodic_capacity, mc_mode_probability, p2p_snr_sampler,
                            single_source_field, two_source_field)
from gase.propagation import PowerLevel, PropagationEnvironment, affected_area_single
from gase.mathkernel import QuadratureSpec, integrate_semi_infinite, scaled_e1

LN2 = math.log(2.0)
ENV4 = PropagationEnvironment.from_dbm(4.0, -100.0, -90.0)


class TestDeterminism:
    def test_bitwise_reproducible(self):
        cfg = McConfig(samples=300_000, seed=1234, stream_id=7)
        a = mc_ergodic_capacity(p2p_snr_sampler(10.0), cfg)
        b = mc_ergodic_capacity(p2p_snr_sampler(10.0), cfg)
        assert a == b

    def test_streams_are_distinct(self):
        a = mc_ergodic_capacity(p2p_snr_sampler(10.0), McConfig(100_000, 5, 0))
        b = mc_ergodic_capacity(p2p_snr_sampler(10.0), McConfig(100_000, 5, 1))
        assert a.mean != b.mean

    def test_sample_prefix_stability(self):
        # sample i depends only on (seed, stream, i), not on the total count
        big = mc_mode_probability(
            McSampler(1, lambda u: u[:, 0] < 0.25), McConfig(200_000, 9, 3))
        small = mc_mode_probability(
            McSampler(1, lambda u: u[:, 0] < 0.25), McConfig(50_000, 9, 3))
        # distinct totals but both near 1/4 and both reproducible
        assert big.mean == pytest.approx(0.25, abs=3 * big.std_error)
        assert small.mean == pytest.approx(0.25, abs=3 * small.std_error)

    def test_exponential_inverse_cdf_mean(self):
        u = np.linspace(0.0, 1.0, 100_001)[:-1]
        z = exponential_from_uniform(u)
        assert z.min() == 0.0
        assert z.mean() == pytest.approx(1.0, abs=2e-4)


class TestErgodicCapacity:
    def test_constant_sampler_exact(self):
        est = mc_ergodic_capacity(McSampler(1, lambda u: np.full(len(u), 3.0)),
                                  McConfig(10_000, 1))
        assert est.mean == 2.0
        assert est.std_error == 0.0

    def test_rayleigh_matches_closed_form(self):
        est = mc_ergodic_capacity(p2p_snr_sampler(10.0), McConfig(1_000_000, 11))
        closed = scaled_e1(0.1) / LN2
        assert abs(est.mean - closed) <= 3.0 * est.std_error

    def test_df_sampler_with_half_duplex_scaling(self):
        est = mc_ergodic_capacity(df_snr_sampler(10.0, 10.0), McConfig(1_000_000, 12)).scaled(0.5)
        closed = scaled_e1(0.2) / (2.0 * LN2)
        assert abs(est.mean - closed) <= 3.0 * est.std_error

    def test_af_exact_below_df(self):
        df = mc_ergodic_capacity(df_snr_sampler(8.0, 14.0), McConfig(200_000, 13))
        af = mc_ergodic_capacity(af_snr_sampler(8.0, 14.0, exact=True), McConfig(200_000, 13))
        assert af.mean < df.mean

    def test_convergence_rate(self):
        small = mc_ergodic_capacity(p2p_snr_sampler(5.0), McConfig(100_000, 21))
        large = mc_ergodic_capacity(p2p_snr_sampler(5.0), McConfig(400_000, 21))
        ratio = small.std_error / large.std_error
        assert ratio == pytest.approx(2.0, rel=0.2)

    def test_convergence_rate_all_oracles(self):
        # quadrupling samples halves the standard error for each oracle kind
        event = McSampler(1, lambda u: u[:, 0] < 0.3)
        p_small = mc_mode_probability(event, McConfig(100_000, 22))
        p_large = mc_mode_probability(event, McConfig(400_000, 22))
        assert p_small.std_error / p_large.std_error == pytest.approx(2.0, rel=0.2)

        p = PowerLevel(0.01)
        radius, tail = certified_disk_radius(ENV4, p)
        field = single_source_field(ENV4, p)
        a_small = mc_affected_area(field, radius, McConfig(100_000, 23), tail, ENV4.p_min_w)
        a_large = mc_affected_area(field, radius, McConfig(400_000, 23), tail, ENV4.p_min_w)
        assert a_small.std_error / a_large.std_error == pytest.approx(2.0, rel=0.2)


class TestModeProbability:
    def test_always_true(self):
        est = mc_mode_probability(McSampler(1, lambda u: np.ones(len(u), dtype=bool)),
                                  McConfig(10_000, 2))
        assert est.mean == 1.0
        assert est.std_error == 0.0

    def test_interference_constraint_event(self):
        # secondary at 20 dBm, 150 m interference link, a = 4, i_th = -80 dBm
        interference = 0.1 / 150.0 ** 4
        i_th = 1e-11
        event = McSampler(1, lambda u: interference * exponential_from_uniform(u[:, 0]) < i_th)
        est = mc_mode_probability(event, McConfig(1_000_000, 3))
        closed = -math.expm1(-i_th / interference)
        assert closed == pytest.approx(0.04936490814130157, rel=1e-10)
        assert abs(est.mean - closed) <= 3.0 * est.std_error


class TestAffectedArea:
    def test_deterministic_disk(self):
        # no fading: power P/r^4 exceeds p_min inside radius (P/p_min)^(1/4)
        field = McSampler(0, lambda x, y, u: 1.0 / np.hypot(x, y) ** 4)
        expected = math.pi * (1.0 / ENV4.p_min_w) ** 0.5
        radius = 2.0 * (1.0 / ENV4.p_min_w) ** 0.25
        est = mc_affected_area(field, radius, McConfig(400_000, 4), 0.0, ENV4.p_min_w)
        assert abs(est.mean - expected) <= 3.0 * est.std_error

    def test_single_rayleigh_source(self):
        p = PowerLevel(1e9 * ENV4.p_min_w)
        radius, tail = certified_disk_radius(ENV4, p)
        est = mc_affected_area(single_source_field(ENV4, p), radius,
                               McConfig(1_000_000, 5), tail, ENV4.p_min_w)
        closed = affected_area_single(ENV4, p)
        assert abs(est.mean - closed) <= 3.0 * est.std_error

    def test_two_source_collapse_matches_erlang_quadrature(self):
        p = PowerLevel(0.05)
        field = two_source_field(ENV4, p, p, d0=0.0)
        radius, tail = certified_disk_radius(ENV4, 2 * p.watts)
        est = mc_affected_area(field, radius, McConfig(600_000, 6), tail, ENV4.p_min_w)

        def erlang_tail(r):
            x = ENV4.p_min_w * r ** 4 / p.watts
            return (1.0 + x) * np.exp(-x) * r

        scale = (p.watts / ENV4.p_min_w) ** 0.25
        ref = 2 * math.pi * integrate_semi_infinite(
            erlang_tail, QuadratureSpec(1e-10, 1e-14), scale=scale).value
        assert abs(est.mean - ref) <= 3.0 * est.std_error

    def test_tail_certification_refusal(self):
        field = single_source_field(ENV4, PowerLevel(1.0))
        with pytest.raises(TailCertificationError):
            mc_affected_area(field, 100.0, McConfig(1000, 7), 1e-3, ENV4.p_min_w)

    def test_certified_radius_bound_is_tiny(self):
        _, tail = certified_disk_radius(ENV4, PowerLevel(1.0))
        assert tail < 1e-10


class TestCoopSummary:
    def test_mixture_identity(self):
        # P_d E[C|d] + P_r E[C|r] == E[C] holds exactly on shared draws
        out = mc_coop_summary(10.0, 10.0, 10.0, "df", McConfig(200_000, 8))
        mix = (out["p_direct"].mean * out["c_direct"].mean
               + (1 - out["p_direct"].mean) * out["c_relay"].mean)
        assert mix == pytest.approx(out["c_inst"].mean, rel=1e-12)

    def test_reproducible(self):
        a = mc_coop_summary(5.0, 8.0, 12.0, "af", McConfig(100_000, 9))
        b = mc_coop_summary(5.0, 8.0, 12.0, "af", McConfig(100_000, 9))
        assert a == b

    def test_af_exact_versus_harmonic_ordering(self):
        h = mc_coop_summary(10.0, 10.0, 10.0, "af", McConfig(200_000, 10))
        e = mc_coop_summary(10.0, 10.0, 10.0, "af-exact", McConfig(200_000, 10))
        # harmonic-mean SNR dominates the exact one, so relay is chosen more
        assert h["p_direct"].mean <= e["p_direct"].mean


class TestConfig:
    def test_invariants(self):
        with pytest.raises(ValueError):
            McConfig(samples=0)
        with pytest.raises(ValueError):
            McConfig(samples=10, stream_id=2 ** 32)

    def test_estimate_scaling(self):
        est = mc_ergodic_capacity(p2p_snr_sampler(2.0), McConfig(50_000, 14))
        half = est.scaled(0.5)
        assert half.mean == est.mean * 0.5
        assert half.std_error == est.std_error * 0.5
