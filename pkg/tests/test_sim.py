"""Tests for the Monte Carlo harness: determinism, stopping, CSV, estimators."""

import math

import pytest

from zfdual.errors import ConfigError, InsufficientData
from zfdual.sim import (
    RATE_CONSTELLATIONS,
    BerCurve,
    BerPoint,
    SimConfig,
    estimate_diversity,
    read_csv,
    run_ber,
    snr_at_ber,
    snr_grid,
    validate_config,
    write_csv,
)


def small_cfg(**overrides):
    base = dict(
        scheme="dual-alamouti",
        n_tx=2,
        constellation="qpsk",
        snr_db=(4.0, 8.0),
        min_bit_errors=50,
        max_trials=4000,
        master_seed=3,
        workers=1,
        chunk_blocks=512,
    )
    base.update(overrides)
    return SimConfig(**base)


class TestConfigValidation:
    def test_valid(self):
        validate_config(small_cfg())

    @pytest.mark.parametrize(
        "overrides,field",
        [
            (dict(scheme="dpc"), "scheme"),
            (dict(constellation="64qam"), "constellation"),
            (dict(n_tx=1), "n_tx"),
            (dict(scheme="bd", n_tx=3), "n_tx"),
            (dict(scheme="downlink-ic", constellation="16qam"), "constellation"),
            (dict(snr_db=()), "snr_db"),
            (dict(min_bit_errors=0), "min_bit_errors"),
            (dict(max_trials=0), "max_trials"),
            (dict(workers=0), "workers"),
        ],
    )
    def test_rejects_with_field_name(self, overrides, field):
        with pytest.raises(ConfigError, match=field):
            validate_config(small_cfg(**overrides))

    def test_snr_grid_helper(self):
        assert snr_grid(0, 2, 24) == tuple(float(x) for x in range(0, 25, 2))
        assert snr_grid(0, 2, 23) == tuple(float(x) for x in range(0, 23, 2))

    def test_rate_constellation_table(self):
        assert RATE_CONSTELLATIONS[1] == {"concurrent": "bpsk", "tdma": "qpsk"}
        assert RATE_CONSTELLATIONS[2] == {"concurrent": "qpsk", "tdma": "16qam"}


class TestRunBer:
    def test_deterministic_repeat(self):
        c1 = run_ber(small_cfg())
        c2 = run_ber(small_cfg())
        assert [(p.bits, p.bit_errors) for p in c1.points] == [
            (p.bits, p.bit_errors) for p in c2.points
        ]

    def test_worker_count_invariance(self):
        c1 = run_ber(small_cfg(workers=1))
        c2 = run_ber(small_cfg(workers=2))
        assert [(p.bits, p.bit_errors) for p in c1.points] == [
            (p.bits, p.bit_errors) for p in c2.points
        ]

    @pytest.mark.parametrize(
        "scheme,n_tx,const",
        [
            ("alamouti", 2, "qpsk"),
            ("dual-alamouti", 2, "qpsk"),
            ("svd", 2, "qpsk"),
            ("uplink-ic", 2, "qpsk"),
            ("downlink-ic", 2, "bpsk"),
            ("downlink-ic-pa", 3, "bpsk"),
            ("bd", 4, "qpsk"),
            ("tdma-da", 2, "16qam"),
        ],
    )
    def test_high_snr_noiseless_limit(self, scheme, n_tx, const):
        cfg = small_cfg(
            scheme=scheme, n_tx=n_tx, constellation=const, snr_db=(60.0,),
            min_bit_errors=1, max_trials=2000,
        )
        curve = run_ber(cfg)
        assert curve.points[0].bit_errors == 0
        assert curve.points[0].truncated

    def test_stopping_rule(self):
        curve = run_ber(small_cfg())
        cfg = small_cfg()
        for p in curve.points:
            assert p.bit_errors >= cfg.min_bit_errors or p.truncated

    def test_bits_accounting(self):
        cfg = small_cfg(snr_db=(60.0,), min_bit_errors=1, max_trials=1000, chunk_blocks=128)
        curve = run_ber(cfg)
        # 2 symbols/block * 2 bits/symbol, all chunks exhausted
        assert curve.points[0].bits == 1000 * 4

    def test_ci_halfwidth(self):
        p = run_ber(small_cfg(snr_db=(4.0,))).points[0]
        expected = 1.96 * math.sqrt(p.ber * (1 - p.ber) / p.bits)
        assert p.ci95_halfwidth == pytest.approx(expected, rel=1e-12)


class TestDiversityEstimator:
    @staticmethod
    def synthetic_curve(slope, snrs, errors=10_000):
        curve = BerCurve(scheme="downlink-ic", n_tx=2, constellation="bpsk")
        for snr in snrs:
            ber = 10 ** (-slope * snr / 10)
            curve.points.append(
                BerPoint(
                    snr_db=snr, bits=int(errors / ber), bit_errors=errors, ber=ber,
                    ci95_halfwidth=0.0, truncated=False,
                )
            )
        return curve

    def test_exact_line(self):
        curve = self.synthetic_curve(2.0, [35.0, 40.0, 45.0])
        est = estimate_diversity(curve, window=(1e-10, 1e-5))
        assert est.slope == pytest.approx(2.0, abs=1e-9)
        assert est.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_window_filters_points(self):
        curve = self.synthetic_curve(2.0, [10.0, 20.0, 30.0, 40.0, 45.0])
        est = estimate_diversity(curve, window=(1e-9, 1e-3))
        assert est.n_points == 4  # the 10 dB point (BER 1e-2) falls outside

    def test_low_count_points_excluded(self):
        curve = self.synthetic_curve(2.0, [35.0, 40.0, 45.0])
        starved = BerPoint(
            snr_db=50.0, bits=10**11, bit_errors=5, ber=5e-11,
            ci95_halfwidth=0.0, truncated=True,
        )
        curve.points.append(starved)
        est = estimate_diversity(curve, window=(1e-12, 1e-5))
        assert est.n_points == 3

    def test_insufficient_data(self):
        curve = self.synthetic_curve(2.0, [35.0, 40.0])
        with pytest.raises(InsufficientData):
            estimate_diversity(curve, window=(1e-10, 1e-5))


class TestSnrAtBer:
    def test_linear_interpolation(self):
        curve = TestDiversityEstimator.synthetic_curve(2.0, [10.0, 20.0])
        # log-linear curve: BER 10^-3 sits exactly at 15 dB
        assert snr_at_ber(curve, 1e-3) == pytest.approx(15.0, abs=1e-9)

    def test_never_crosses(self):
        curve = TestDiversityEstimator.synthetic_curve(2.0, [10.0, 20.0])
        with pytest.raises(InsufficientData):
            snr_at_ber(curve, 1e-9)


class TestCsv:
    def test_round_trip(self, tmp_path):
        curve = run_ber(small_cfg())
        path = tmp_path / "curve.csv"
        write_csv(curve, path)
        back = read_csv(path)
        assert back.scheme == curve.scheme
        assert back.n_tx == curve.n_tx
        assert back.constellation == curve.constellation
        assert back.points == curve.points

    def test_row_count_and_lf_endings(self, tmp_path):
        curve = run_ber(small_cfg())
        path = tmp_path / "curve.csv"
        write_csv(curve, path)
        raw = path.read_bytes()
        assert raw.count(b"\n") == len(curve.points) + 1
        assert b"\r" not in raw

    def test_byte_identical_runs(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(run_ber(small_cfg()), p1)
        write_csv(run_ber(small_cfg()), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_unwritable_path(self):
        with pytest.raises(ConfigError):
            write_csv(run_ber(small_cfg(snr_db=(4.0,))), "/nonexistent-dir/x.csv")
