"""Vectorized per-chunk Monte Carlo kernels.

Each chunk simulates ``n`` independent block-fading transmission blocks
drawn from one dedicated RNG stream.  Per-block draw order is fixed per
scheme (bits, then channels, then noise) so results are a pure function of
(scheme parameters, master seed, chunk index, chunk size).

All kernels return ``(bit_count, bit_error_count)``.
"""

from __future__ import annotations

import numpy as np

from .bc import bd_round, tdma_round
from .channel import complex_normal
from .downlink import (
    PowerAllocation,
    build_downlink_precoders,
    downlink_ic_rx,
    downlink_ic_tx,
    optimal_power_alloc,
)
from .linalg import alamouti_channel_stack, conjugate_stack, fro_norm, hermitian
from .modulation import Constellation, detect_blind_psk, detect_coherent, modulate
from .p2p import alamouti_rx, alamouti_tx, dual_alamouti_rx, dual_alamouti_tx, svd_baseline_round
from .uplink import uplink_ic_receive

_ROW_TOL = 1e-12


def _bits_and_symbols(rng, n: int, n_symbols: int, const: Constellation):
    bits = rng.integers(0, 2, size=(n, n_symbols * const.bits_per_symbol), dtype=np.uint8)
    return bits, modulate(bits, const)


def _detect(stats, gain, const: Constellation):
    if const.is_psk:
        return detect_blind_psk(stats, const)
    return detect_coherent(stats, gain, const)


def _tally(bits, indices, const: Constellation):
    rx = const.bits[indices]
    tx = bits.reshape(rx.shape)
    return bits.size, int(np.count_nonzero(rx != tx))


def _channel_single(rng, n: int, rows: int, cols: int):
    """One user's block-fading draws, redrawing near-zero realizations."""
    h = complex_normal(rng, (n, rows, cols))
    while True:
        bad = np.sum(np.abs(h) ** 2, axis=(-2, -1)) < _ROW_TOL
        if not bad.any():
            return h
        h[bad] = complex_normal(rng, (int(bad.sum()), rows, cols))


def _channel_pair(rng, n: int, rows: int, cols: int, row_axis: int):
    """Both users' draws; redraw any block with a vanishing per-antenna row.

    ``row_axis`` selects which axis indexes antennas whose per-antenna norm
    must stay away from zero (-2 for Nx2 downlink rows, -1 for 2xN uplink
    columns).  Resampling is measure-zero under the fading model.
    """
    sum_axis = -1 if row_axis == -2 else -2
    h1 = complex_normal(rng, (n, rows, cols))
    h2 = complex_normal(rng, (n, rows, cols))
    while True:
        p1 = np.sum(np.abs(h1) ** 2, axis=sum_axis)
        p2 = np.sum(np.abs(h2) ** 2, axis=sum_axis)
        bad = (np.min(p1, axis=-1) < _ROW_TOL) | (np.min(p2, axis=-1) < _ROW_TOL)
        if not bad.any():
            return h1, h2
        m = int(bad.sum())
        h1[bad] = complex_normal(rng, (m, rows, cols))
        h2[bad] = complex_normal(rng, (m, rows, cols))


def chunk_alamouti(n, n_tx, const, power, rng):
    bits, s = _bits_and_symbols(rng, n, 2, const)
    h = _channel_single(rng, n, n_tx, 2)
    g = hermitian(h)
    noise = complex_normal(rng, (n, 2, n_tx))
    y = alamouti_tx(s[:, 0], s[:, 1], power) @ g + noise
    dec = alamouti_rx(y, g, power)
    idx = _detect(dec.stats, np.asarray(dec.gain)[..., None], const)
    return _tally(bits, idx, const)


def chunk_dual_alamouti(n, n_tx, const, power, rng):
    bits, s = _bits_and_symbols(rng, n, 2, const)
    h = _channel_single(rng, n, n_tx, 2)
    noise = complex_normal(rng, (n, 2, 2))
    r = dual_alamouti_tx(s[:, 0], s[:, 1], h, power) @ h + noise
    dec = dual_alamouti_rx(r)
    gain = np.sqrt(power / 2.0) * np.asarray(fro_norm(h))  # genie, for QAM only
    idx = _detect(dec.stats, gain[..., None], const)
    return _tally(bits, idx, const)


def chunk_svd(n, n_tx, const, power, rng):
    bits, s = _bits_and_symbols(rng, n, 2, const)
    h = _channel_single(rng, n, n_tx, 2)
    dec = svd_baseline_round(s, h, power, rng)
    idx = _detect(dec.stats, np.asarray(dec.gain)[..., None], const)
    return _tally(bits, idx, const)


def chunk_uplink_ic(n, n_tx, const, power, rng):
    bits, s = _bits_and_symbols(rng, n, 4, const)
    g1, g2 = _channel_pair(rng, n, 2, n_tx, row_axis=-1)
    noise = complex_normal(rng, (n, 2, n_tx))
    ybar = np.sqrt(power / 4.0) * (
        np.einsum("...ij,...j->...i", alamouti_channel_stack(g1), s[:, :2])
        + np.einsum("...ij,...j->...i", alamouti_channel_stack(g2), s[:, 2:])
    ) + conjugate_stack(noise)
    stats, gains = uplink_ic_receive(ybar, g1, g2, power)
    idx = _detect(stats.reshape(n, 4), np.repeat(gains, 2, axis=-1), const)
    return _tally(bits, idx, const)


def _chunk_downlink(n, n_tx, const, power, rng, optimal_pa: bool):
    bits, s = _bits_and_symbols(rng, n, 4, const)
    h1, h2 = _channel_pair(rng, n, n_tx, 2, row_axis=-2)
    pre = build_downlink_precoders(h1, h2)
    if optimal_pa:
        alloc = optimal_power_alloc(pre.b[0], pre.b[1])
    else:
        alloc = PowerAllocation.equal()
    x = downlink_ic_tx(s[:, :2], s[:, 2:], h1, h2, power, alloc, precoders=pre)
    stats = []
    for h in (h1, h2):
        r = x @ h + complex_normal(rng, (n, 2, 2))
        stats.append(downlink_ic_rx(r))
    idx = detect_blind_psk(np.concatenate(stats, axis=-1), const)
    return _tally(bits, idx, const)


def chunk_downlink_ic(n, n_tx, const, power, rng):
    return _chunk_downlink(n, n_tx, const, power, rng, optimal_pa=False)


def chunk_downlink_ic_pa(n, n_tx, const, power, rng):
    return _chunk_downlink(n, n_tx, const, power, rng, optimal_pa=True)


def chunk_bd(n, n_tx, const, power, rng):
    bits, s = _bits_and_symbols(rng, n, 4, const)
    h1, h2 = _channel_pair(rng, n, n_tx, 2, row_axis=-2)
    dec1, dec2 = bd_round(s[:, :2], s[:, 2:], h1, h2, power, rng)
    stats = np.concatenate([dec1.stats, dec2.stats], axis=-1)
    gains = np.stack([dec1.gain, dec1.gain, dec2.gain, dec2.gain], axis=-1)
    idx = _detect(stats, gains, const)
    return _tally(bits, idx, const)


def chunk_tdma_da(n, n_tx, const, power, rng):
    bits, s = _bits_and_symbols(rng, n, 2, const)
    h1, h2 = _channel_pair(rng, n, n_tx, 2, row_axis=-2)
    td = tdma_round(s[:, 0], s[:, 1], h1, h2, power, const, rng)
    return _tally(bits, td.indices, const)


KERNELS = {
    "alamouti": chunk_alamouti,
    "dual-alamouti": chunk_dual_alamouti,
    "svd": chunk_svd,
    "uplink-ic": chunk_uplink_ic,
    "downlink-ic": chunk_downlink_ic,
    "downlink-ic-pa": chunk_downlink_ic_pa,
    "bd": chunk_bd,
    "tdma-da": chunk_tdma_da,
}
