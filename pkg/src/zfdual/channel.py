"""Rayleigh block-fading channel draws, AWGN, and reproducible RNG streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

_MASK64 = (1 << 64) - 1


def stream_rng(master_seed: int, stream_id: int) -> np.random.Generator:
    """Counter-based generator for one Monte Carlo stream.

    Identical ``(master_seed, stream_id)`` pairs reproduce identical draw
    sequences regardless of how streams are scheduled across workers, which
    is what makes the whole simulation a pure function of (config, seed).
    """
    key = np.array([master_seed & _MASK64, stream_id & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_normal(rng: np.random.Generator, shape=(), variance: float = 1.0) -> np.ndarray:
    """i.i.d. circularly-symmetric complex Gaussian draws of the given variance.

    Real and imaginary parts are each N(0, variance/2).  The two underlying
    standard-normal blocks are always drawn, so the stream position does not
    depend on ``variance`` (variance 0 returns exact zeros).
    """
    if variance < 0:
        raise ConfigError(f"noise variance must be >= 0, got {variance}")
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z * np.sqrt(variance / 2.0)


@dataclass(frozen=True)
class ChannelPair:
    """The two users' n_tx x 2 fading matrices for one coherence block.

    Entry (i, j) of ``user(k)`` is the complex gain from transmit antenna i
    to receive antenna j of user k.  Entries are i.i.d. CN(0, 1) and stay
    constant within one transmission block.
    """

    h1: np.ndarray
    h2: np.ndarray

    users = 2

    @property
    def n_tx(self) -> int:
        return self.h1.shape[-2]

    def user(self, k: int) -> np.ndarray:
        return (self.h1, self.h2)[k]


def sample_channel_pair(n_tx: int, rng: np.random.Generator) -> ChannelPair:
    """Draw one block-fading realization for both users."""
    if n_tx < 2:
        raise ConfigError(f"n_tx must be >= 2, got {n_tx}")
    h1 = complex_normal(rng, (n_tx, 2))
    h2 = complex_normal(rng, (n_tx, 2))
    return ChannelPair(h1=h1, h2=h2)


def add_awgn(signal, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. CN(0, variance) noise to a complex signal array."""
    signal = np.asarray(signal, dtype=complex)
    return signal + complex_normal(rng, signal.shape, variance)
