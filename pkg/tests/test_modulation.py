"""Tests for constellations, Gray mapping, and ML detection rules."""

import itertools

import numpy as np
import pytest

from zfdual.errors import ConfigError, UnsupportedConstellation
from zfdual.modulation import (
    CONSTELLATIONS,
    demap,
    detect_blind_psk,
    detect_coherent,
    get_constellation,
    modulate,
)

from conftest import crandn


@pytest.mark.parametrize("name", CONSTELLATIONS)
class TestConstellationInvariants:
    def test_unit_average_energy(self, name):
        c = get_constellation(name)
        assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) <= 1e-12

    def test_bit_map_is_bijection(self, name):
        c = get_constellation(name)
        labels = {tuple(row) for row in c.bits}
        assert len(labels) == c.size

    def test_modulate_demap_round_trip(self, name):
        c = get_constellation(name)
        bps = c.bits_per_symbol
        bits = np.array(list(itertools.product([0, 1], repeat=2 * bps)), dtype=np.uint8)
        assert np.array_equal(demap(modulate(bits, c), c), bits)


class TestPinnedMappings:
    def test_bpsk_convention(self):
        c = get_constellation("bpsk")
        assert modulate(np.array([0]), c)[0] == 1.0
        assert modulate(np.array([1]), c)[0] == -1.0

    def test_qpsk_table(self):
        c = get_constellation("qpsk")
        table = {
            (0, 0): (1 + 1j) / np.sqrt(2),
            (0, 1): (-1 + 1j) / np.sqrt(2),
            (1, 1): (-1 - 1j) / np.sqrt(2),
            (1, 0): (1 - 1j) / np.sqrt(2),
        }
        for bits, point in table.items():
            assert modulate(np.array(bits), c)[0] == pytest.approx(point, abs=1e-15)

    @pytest.mark.parametrize("name", ["qpsk", "8psk"])
    def test_psk_gray_adjacency(self, name):
        # circularly adjacent points differ in exactly one bit
        c = get_constellation(name)
        order = np.argsort(np.angle(c.points) % (2 * np.pi))
        for a, b in zip(order, np.roll(order, -1)):
            assert np.sum(c.bits[a] != c.bits[b]) == 1

    def test_16qam_grid(self):
        c = get_constellation("16qam")
        levels = np.array([-3, -1, 1, 3]) / np.sqrt(10)
        assert np.allclose(np.sort(np.unique(c.points.real)), levels, atol=1e-15)
        assert np.allclose(np.sort(np.unique(c.points.imag)), levels, atol=1e-15)

    def test_modulate_length_guard(self):
        with pytest.raises(ConfigError):
            modulate(np.array([0, 1, 0]), get_constellation("qpsk"))

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            get_constellation("64qam")


class TestBlindPskDetection:
    def test_positive_scaling_invariance(self):
        c = get_constellation("qpsk")
        for m, point in enumerate(c.points):
            assert detect_blind_psk(3.0 * point, c) == m
            assert detect_blind_psk(0.01 * point, c) == m

    def test_tie_goes_to_lowest_index(self):
        c = get_constellation("8psk")
        assert detect_blind_psk(0.0 + 0.0j, c) == 0
        # exactly between points 0 and 1 (their sum lies on the bisector)
        stat = c.points[0] + c.points[1]
        assert detect_blind_psk(stat, c) == 0

    def test_zero_noise_exhaustive(self, rng):
        # exhaustive argmax oracle over 1e4 random (gain, point) pairs
        c = get_constellation("8psk")
        idx = rng.integers(0, c.size, 10_000)
        gain = rng.uniform(0.01, 10.0, 10_000)
        stats = gain * c.points[idx]
        detected = detect_blind_psk(stats, c)
        assert np.array_equal(detected, idx)
        # independent scalar oracle on a subsample
        for stat, expected in zip(stats[:100], idx[:100]):
            scores = [float(np.real(stat * np.conj(p))) for p in c.points]
            assert scores.index(max(scores)) == expected

    def test_rejects_qam(self):
        with pytest.raises(UnsupportedConstellation):
            detect_blind_psk(1.0 + 0j, get_constellation("16qam"))


class TestCoherentDetection:
    def test_exact_points_recovered(self):
        c = get_constellation("16qam")
        for m, point in enumerate(c.points):
            assert detect_coherent(2.5 * point, 2.5, c) == m

    def test_equidistant_tie_to_lower_index(self):
        c = get_constellation("bpsk")
        assert detect_coherent(0.0 + 0.0j, 1.0, c) == 0

    def test_matches_brute_force(self, rng):
        c = get_constellation("16qam")
        stats = crandn(rng, 10_000) * 3
        gain = 1.7
        detected = detect_coherent(stats, gain, c)
        brute = np.argmin(np.abs(stats[:, None] - gain * c.points) ** 2, axis=1)
        assert np.array_equal(detected, brute)
        for stat, expected in zip(stats[:100], detected[:100]):
            dists = [abs(stat - gain * p) ** 2 for p in c.points]
            assert dists.index(min(dists)) == expected

    def test_gain_guard(self):
        with pytest.raises(ConfigError):
            detect_coherent(1.0 + 0j, 0.0, get_constellation("qpsk"))
