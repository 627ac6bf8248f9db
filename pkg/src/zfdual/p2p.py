"""Point-to-point schemes: Alamouti, its transmit-side dual, and SVD beamforming.

The receive-side Alamouti scheme (2 transmit antennas, channel known at the
receiver) and its transmit-side dual (N transmit antennas, channel known at
the transmitter, blind receiver) deliver the same effective scalar channel
``sqrt(P/2) * ||channel||`` with unit-variance noise, so they share BER
performance point by point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import complex_normal
from .errors import ConfigError, DegenerateChannel
from .linalg import alamouti_channel_stack, alamouti_embed, conjugate_stack, fro_norm, hermitian

_DEGENERATE_TOL = 1e-24  # squared Frobenius norm below which a channel is unusable


@dataclass(frozen=True)
class P2PDecision:
    """Per-symbol decision statistics and the effective real channel gain.

    ``gain`` is 0.0 for blind combiners (they use no channel knowledge);
    coherent detection of non-PSK constellations then needs a genie-provided
    gain from the caller.
    """

    stats: np.ndarray  # (..., n_symbols) complex decision variables
    gain: float | np.ndarray


def _check_power(p: float) -> None:
    if not p > 0:
        raise ConfigError(f"transmit power must be > 0, got {p}")


def alamouti_tx(s1, s2, power: float) -> np.ndarray:
    """Alamouti code block scaled for per-slot transmit power ``power``."""
    _check_power(power)
    return np.sqrt(power / 2.0) * alamouti_embed(s1, s2)


def alamouti_rx(y, g, power: float) -> P2PDecision:
    """Combine a received 2xN block with full channel knowledge.

    ``y`` holds the two received time slots (rows) across N antennas;
    ``g`` is the 2xN channel.  Returns the two decoupled statistics
    ``sqrt(P/2) * ||g|| * s_j + CN(0, 1)`` and the effective gain.
    """
    g = np.asarray(g, dtype=complex)
    norm = fro_norm(g)
    if np.any(np.asarray(norm) ** 2 < _DEGENERATE_TOL):
        raise DegenerateChannel("zero channel")
    stacked = conjugate_stack(y)
    blocks = alamouti_channel_stack(g)
    stats = np.einsum("...ij,...i->...j", np.conj(blocks), stacked) / np.asarray(norm)[..., None]
    return P2PDecision(stats=stats, gain=np.sqrt(power / 2.0) * norm)


def dual_alamouti_tx(s1, s2, h, power: float) -> np.ndarray:
    """Precode an Alamouti block with the scaled conjugate transpose of h.

    ``h`` is the Nx2 channel known at the transmitter.  The resulting 2xN
    block spends average power ``power`` per time slot for unit-energy
    symbols.
    """
    _check_power(power)
    h = np.asarray(h, dtype=complex)
    norm = fro_norm(h)
    if np.any(np.asarray(norm) ** 2 < _DEGENERATE_TOL):
        raise DegenerateChannel("zero channel")
    block = alamouti_embed(s1, s2)
    return np.sqrt(power) * block @ hermitian(h) / np.asarray(norm)[..., None, None]


def dual_alamouti_rx(r) -> P2PDecision:
    """Decouple both symbols from a 2x2 received block with no channel input.

    Two additions produce ``sqrt(P/2) * ||h|| * s_j + CN(0, 1)``; the 1/sqrt(2)
    factor normalizes the equivalent noise to unit variance.
    """
    r = np.asarray(r, dtype=complex)
    if r.shape[-2:] != (2, 2):
        raise ConfigError(f"expected a 2x2 received block, got shape {r.shape}")
    r1 = (r[..., 0, 0] + np.conj(r[..., 1, 1])) / np.sqrt(2.0)
    r2 = (r[..., 0, 1] - np.conj(r[..., 1, 0])) / np.sqrt(2.0)
    return P2PDecision(stats=np.stack([r1, r2], axis=-1), gain=0.0)


def svd_baseline_round(s, h, power: float, rng, noise_var: float = 1.0) -> P2PDecision:
    """One beamformed round on the dominant singular direction of ``h``.

    Sends one symbol per slot (rate one) with power ``power``; the receiver
    matched-filters with full channel knowledge.  ``s`` holds the symbols
    for the slots of the round; the effective gain is
    ``sqrt(power) * sigma_max(h)`` with unit noise for ``noise_var = 1``.
    """
    _check_power(power)
    s = np.asarray(s, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if np.any(np.asarray(fro_norm(h)) ** 2 < _DEGENERATE_TOL):
        raise DegenerateChannel("zero channel")
    ht = np.swapaxes(h, -1, -2)  # (..., 2, N)
    u, sv, vh = np.linalg.svd(ht, full_matrices=False)
    gain = np.sqrt(power) * sv[..., 0]
    tx_dir = np.conj(vh[..., 0, :])  # (..., N) unit transmit direction
    x = np.sqrt(power) * s[..., :, None] * tx_dir[..., None, :]  # (..., slots, N)
    y = x @ h + complex_normal(rng, s.shape + (2,), noise_var)
    stats = np.einsum("...j,...sj->...s", np.conj(u[..., :, 0]), y)
    return P2PDecision(stats=stats, gain=gain)
