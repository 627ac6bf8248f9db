"""Tests for ZF-system duality and the real-valued Alamouti expansion."""

import numpy as np
import pytest

from zfdual.duality import (
    DISPERSION_A,
    LinearZFSystem,
    alamouti_real_expansion,
    check_zf,
    dualize,
    real_noise_stack,
    snr_dual,
    snr_original,
)
from zfdual.errors import ConfigError, DegenerateChannel, NotZFSystem
from zfdual.linalg import fro_norm
from zfdual.p2p import alamouti_rx, alamouti_tx

from conftest import crandn


def random_expansion(rng, n=2, power=1.0):
    return alamouti_real_expansion(crandn(rng, 2, n), power)


def perturb_receive_filter(system, k=0, eps=0.1):
    v = system.V.copy()
    v[k, 0] += eps
    return LinearZFSystem(Z=system.Z, U=system.U, V=v, P=system.P,
                          total_power=system.total_power)


class TestCheckZf:
    def test_single_stream_is_vacuously_zf(self):
        sys1 = LinearZFSystem(
            Z=np.eye(3), U=np.eye(3)[:1], V=np.eye(3)[:1], P=np.ones(1), total_power=1.0
        )
        assert check_zf(sys1) == 0.0

    def test_expansion_satisfies_zf(self, rng):
        for _ in range(100):
            system, _ = random_expansion(rng, n=int(rng.integers(1, 5)))
            assert check_zf(system) <= 1e-10

    def test_perturbation_detected(self, rng):
        system, _ = random_expansion(rng)
        assert check_zf(perturb_receive_filter(system)) > 1e-3


class TestSnrFormulas:
    def test_diagonal_system(self):
        sys1 = LinearZFSystem(
            Z=np.eye(3), U=np.eye(3), V=np.eye(3), P=np.array([4.0, 1.0, 0.0]),
            total_power=5.0,
        )
        assert snr_original(sys1, 0) == pytest.approx(4.0)
        assert snr_original(sys1, 2) == 0.0

    def test_monte_carlo_snr_oracle(self, rng):
        # simulate the filtered system with unit AWGN and random +-1 streams;
        # measured signal power / noise power must match the formula
        system, _ = random_expansion(rng, n=2, power=3.0)
        k = 1
        sig_acc = err_acc = 0.0
        trials = 1_000_000
        chunk = 100_000
        for _ in range(trials // chunk):
            c = rng.choice([-1.0, 1.0], size=(chunk, 4))
            s = (np.sqrt(system.P) * c) @ system.U
            d = s @ system.Z + rng.standard_normal((chunk, system.Z.shape[1]))
            out = d @ system.V[k]
            signal = (np.sqrt(system.P[k]) * c[:, k]) * float(
                system.U[k] @ system.Z @ system.V[k]
            )
            sig_acc += np.sum(signal**2)
            err_acc += np.sum((out - signal) ** 2)
        assert sig_acc / err_acc == pytest.approx(snr_original(system, k), rel=0.02)

    def test_dual_equals_original_for_zf(self, rng):
        for _ in range(100):
            system, _ = random_expansion(rng, n=int(rng.integers(1, 4)))
            for k in range(4):
                assert abs(snr_dual(system, k) - snr_original(system, k)) <= 1e-10

    def test_interference_strictly_reduces_dual_snr(self, rng):
        # perturbing another stream's filter leaks interference into stream k
        system = perturb_receive_filter(random_expansion(rng)[0], k=0)
        k = 1
        ceiling = system.P[k] * float(system.V[k] @ system.Z.T @ system.U[k]) ** 2
        assert snr_dual(system, k) < ceiling

    def test_orthogonal_filter_gives_zero(self):
        z = np.eye(2)
        sys1 = LinearZFSystem(
            Z=z, U=np.array([[1.0, 0.0]]), V=np.array([[0.0, 1.0]]),
            P=np.ones(1), total_power=1.0,
        )
        assert snr_dual(sys1, 0) == 0.0

    def test_index_guard(self, rng):
        system, _ = random_expansion(rng)
        with pytest.raises(IndexError):
            snr_original(system, 4)


class TestDualize:
    def test_involution(self, rng):
        system, _ = random_expansion(rng, n=3)
        back = dualize(dualize(system))
        assert np.max(np.abs(back.Z - system.Z)) <= 1e-12
        assert np.max(np.abs(back.U - system.U)) <= 1e-12
        assert np.max(np.abs(back.V - system.V)) <= 1e-12
        assert np.array_equal(back.P, system.P)

    def test_rejects_non_zf(self, rng):
        with pytest.raises(NotZFSystem):
            dualize(perturb_receive_filter(random_expansion(rng)[0]))

    def test_dual_transmit_filters_depend_on_channel(self, rng):
        # the dual uses the channel-dependent filters at the transmitter and
        # the fixed dispersion filters at the receiver
        sys_a = dualize(random_expansion(rng)[0])
        sys_b = dualize(random_expansion(rng)[0])
        assert np.max(np.abs(sys_a.U - sys_b.U)) > 1e-3
        assert np.array_equal(sys_a.V, sys_b.V)

    def test_dual_snr_matches_original(self, rng):
        for _ in range(100):
            system, _ = random_expansion(rng, n=2, power=2.0)
            dual = dualize(system)
            for k in range(4):
                assert abs(snr_dual(dual, k) - snr_original(system, k)) <= 1e-10


class TestRealExpansion:
    def test_hand_channel_ghat(self):
        g = np.array([[1.0 + 0j], [0.0 + 0j]])
        _, exp = alamouti_real_expansion(g, 1.0)
        assert np.array_equal(
            exp.Ghat, np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        )

    def test_filter_norms(self, rng):
        system, exp = random_expansion(rng, n=3)
        assert np.max(np.abs(np.linalg.norm(system.U, axis=1) - 1)) <= 1e-10
        assert np.max(np.abs(np.linalg.norm(system.V, axis=1) - 1)) <= 1e-10
        assert np.max(np.abs(np.linalg.norm(exp.U / np.sqrt(2), axis=1) - 1)) <= 1e-10

    def test_block_diagonal_channel(self, rng):
        g = crandn(rng, 2, 3)
        system, exp = alamouti_real_expansion(g, 1.0)
        n = g.shape[1]
        assert np.array_equal(system.Z[:4, 2 * n :], np.zeros((4, 2 * n)))
        assert np.array_equal(system.Z[4:, : 2 * n], np.zeros((4, 2 * n)))
        assert np.array_equal(system.Z[:4, : 2 * n], exp.Ghat)

    def test_receive_matrix_factors(self, rng):
        g = crandn(rng, 2, 2)
        _, exp = alamouti_real_expansion(g, 1.0)
        rebuilt = (exp.D[:, None] * exp.script_g).T / fro_norm(g)
        assert np.array_equal(exp.V, rebuilt)
        assert np.array_equal(exp.A, DISPERSION_A)

    def test_power_profile(self, rng):
        system, _ = random_expansion(rng, power=2.5)
        assert np.array_equal(system.P, np.full(4, 2.5))
        assert system.total_power == pytest.approx(10.0)

    def test_cross_representation_oracle(self, rng):
        # same symbols and the same noise realization pushed through the
        # real-expanded pipeline and the complex combining must agree
        for _ in range(200):
            n = int(rng.integers(1, 5))
            g = crandn(rng, 2, n)
            power = float(rng.uniform(0.5, 4.0))
            s = crandn(rng, 2)
            noise = crandn(rng, 2, n)
            system, _ = alamouti_real_expansion(g, power)

            y = alamouti_tx(s[0], s[1], power) @ g + noise
            dec = alamouti_rx(y, g, power)
            reference = np.array(
                [dec.stats[0].real, dec.stats[0].imag, dec.stats[1].real, dec.stats[1].imag]
            )

            streams = np.array([s[0].real, s[0].imag, s[1].real, s[1].imag])
            sent = (np.sqrt(system.P) * streams) @ system.U
            d = sent @ system.Z + real_noise_stack(noise)
            assert np.max(np.abs(d @ system.V.T - reference)) <= 1e-10

    def test_snr_equality_quantified(self, rng):
        worst = 0.0
        for _ in range(1000):
            system, _ = random_expansion(rng, n=2, power=1.0)
            for k in range(4):
                orig = snr_original(system, k)
                worst = max(worst, abs(orig - snr_dual(system, k)) / orig)
        assert worst <= 1e-9

    def test_degenerate_channel_rejected(self):
        with pytest.raises(DegenerateChannel):
            alamouti_real_expansion(np.zeros((2, 2), complex), 1.0)

    def test_shape_guard(self):
        with pytest.raises(ConfigError):
            alamouti_real_expansion(np.ones((3, 2), complex), 1.0)
