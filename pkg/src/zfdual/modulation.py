"""Gray-mapped PSK/QAM constellations and symbol-wise ML detection.

Bit mapping conventions (pinned for bit-exact reproducibility):

* BPSK: points {+1, -1}, bit 0 -> +1.
* QPSK: points (+-1 +-1j)/sqrt(2); 00 -> (1+1j)/sqrt(2), 01 -> (-1+1j)/sqrt(2),
  11 -> (-1-1j)/sqrt(2), 10 -> (1-1j)/sqrt(2).
* 8PSK: points exp(1j*k*pi/4), labelled with the 3-bit Gray code of k.
* 16QAM: Gray-mapped 4x4 grid on levels {-3,-1,+1,+3}/sqrt(10); the first
  two bits select the real axis, the last two the imaginary axis, each
  through the per-axis Gray map 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.

All four constellations have exact unit average energy.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, UnsupportedConstellation

CONSTELLATIONS = ("bpsk", "qpsk", "8psk", "16qam")


@dataclass(frozen=True)
class Constellation:
    name: str
    points: np.ndarray  # (M,) complex, unit average energy
    bits: np.ndarray  # (M, bits_per_symbol) uint8 Gray labels
    is_psk: bool
    index_of_value: np.ndarray  # packed bit value -> point index

    @property
    def bits_per_symbol(self) -> int:
        return self.bits.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]


def _gray(n: int) -> int:
    return n ^ (n >> 1)


def _unpack(value: int, width: int) -> list[int]:
    return [(value >> (width - 1 - j)) & 1 for j in range(width)]


def _build(name: str, points, bits, is_psk: bool) -> Constellation:
    points = np.asarray(points, dtype=complex)
    bits = np.asarray(bits, dtype=np.uint8)
    weights = 2 ** np.arange(bits.shape[1] - 1, -1, -1)
    values = bits.astype(np.int64) @ weights
    index_of_value = np.empty(points.shape[0], dtype=np.int64)
    index_of_value[values] = np.arange(points.shape[0])
    for arr in (points, bits, index_of_value):
        arr.setflags(write=False)
    return Constellation(name, points, bits, is_psk, index_of_value)


@lru_cache(maxsize=None)
def get_constellation(name: str) -> Constellation:
    """Constellation by name: bpsk, qpsk, 8psk, or 16qam."""
    key = name.lower()
    if key == "bpsk":
        return _build(key, [1.0, -1.0], [[0], [1]], is_psk=True)
    if key == "qpsk":
        points = np.exp(1j * (np.pi / 4 + np.arange(4) * np.pi / 2))
        bits = [_unpack(_gray(k), 2) for k in range(4)]
        return _build(key, points, bits, is_psk=True)
    if key == "8psk":
        points = np.exp(1j * np.arange(8) * np.pi / 4)
        bits = [_unpack(_gray(k), 3) for k in range(8)]
        return _build(key, points, bits, is_psk=True)
    if key == "16qam":
        levels = np.array([-3.0, -1.0, 1.0, 3.0])
        points, bits = [], []
        for a in range(4):
            for b in range(4):
                points.append((levels[a] + 1j * levels[b]) / np.sqrt(10.0))
                bits.append(_unpack(_gray(a), 2) + _unpack(_gray(b), 2))
        return _build(key, points, bits, is_psk=False)
    raise ConfigError(f"unknown constellation {name!r}; expected one of {CONSTELLATIONS}")


def modulate(bits, c: Constellation) -> np.ndarray:
    """Map a bit array (last axis length divisible by bits_per_symbol) to symbols."""
    bits = np.asarray(bits)
    bps = c.bits_per_symbol
    if bits.shape[-1] % bps != 0:
        raise ConfigError(
            f"bit count {bits.shape[-1]} not divisible by {bps} ({c.name})"
        )
    groups = bits.reshape(bits.shape[:-1] + (-1, bps)).astype(np.int64)
    weights = 2 ** np.arange(bps - 1, -1, -1)
    idx = c.index_of_value[groups @ weights]
    return c.points[idx]


def demap(symbols, c: Constellation) -> np.ndarray:
    """Nearest-point hard demapping back to bits (inverse of modulate when noiseless)."""
    symbols = np.asarray(symbols, dtype=complex)
    idx = np.argmin(np.abs(symbols[..., None] - c.points) ** 2, axis=-1)
    out = c.bits[idx]
    if symbols.ndim == 0:
        return out
    return out.reshape(symbols.shape[:-1] + (-1,))


def detect_blind_psk(stat, c: Constellation) -> np.ndarray | int:
    """ML point index for a PSK symbol from a decision statistic, no gain needed.

    For equal-energy constellations the ML metric reduces to
    ``argmax_s Re(stat * s*)``, which is invariant to any positive scaling
    of the statistic, so no channel or gain knowledge enters.  Ties break
    to the lowest point index.
    """
    if not c.is_psk:
        raise UnsupportedConstellation(
            f"blind detection needs an equal-energy constellation, got {c.name}"
        )
    metric = np.real(np.asarray(stat, dtype=complex)[..., None] * np.conj(c.points))
    idx = np.argmax(metric, axis=-1)
    return int(idx) if idx.ndim == 0 else idx


def detect_coherent(stat, gain, c: Constellation) -> np.ndarray | int:
    """ML point index given the (genie or estimated) real channel gain.

    Minimizes ``|stat - gain * s|^2`` over the constellation; ties break to
    the lowest point index.
    """
    gain = np.asarray(gain, dtype=float)
    if np.any(gain <= 0):
        raise ConfigError("detect_coherent requires gain > 0")
    stat = np.asarray(stat, dtype=complex)
    metric = np.abs(stat[..., None] - gain[..., None] * c.points) ** 2
    idx = np.argmin(metric, axis=-1)
    return int(idx) if idx.ndim == 0 else idx
