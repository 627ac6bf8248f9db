"""Broadcast-channel baselines: block diagonalization and opportunistic TDMA.

Block diagonalization (BD) sends each user's Alamouti block through an
orthonormal precoder lying in the null space of the other user's channel;
it needs at least four transmit antennas for two 2-antenna users and each
receiver must know its own equivalent (precoded) channel, which is modeled
here as genie-aided.  The opportunistic TDMA baseline gives all power and
all slots to whichever user currently has the stronger channel norm and
uses the transmit-side Alamouti variant, so its receivers stay blind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import complex_normal
from .errors import ConfigError
from .linalg import alamouti_embed, fro_norm
from .modulation import Constellation, detect_blind_psk, detect_coherent
from .p2p import P2PDecision, alamouti_rx, dual_alamouti_rx, dual_alamouti_tx


@dataclass(frozen=True)
class BDPrecoders:
    """Per-user Nx2 precoders with orthonormal columns.

    ``w[k]`` spans a 2-dimensional subspace of the null space of the other
    user's transposed channel, chosen to maximize the own-channel energy
    ``fro_norm(w[k].T @ h_k)`` (the strongest-directions convention).
    """

    w: tuple


def _null_space_precoder(h_own: np.ndarray, h_other: np.ndarray) -> np.ndarray:
    a = np.swapaxes(h_other, -1, -2)  # (..., 2, N)
    _, _, vh = np.linalg.svd(a)
    q = np.conj(np.swapaxes(vh[..., 2:, :], -1, -2))  # (..., N, N-2), a @ q == 0
    projected = np.swapaxes(q, -1, -2) @ h_own  # (..., N-2, 2)
    u, _, _ = np.linalg.svd(projected)
    return q @ np.conj(u[..., :, :2])


def bd_precoders(h1, h2) -> BDPrecoders:
    """Null-space precoders for both users (requires n_tx >= 4)."""
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    if h1.shape[-1] != 2 or h1.shape != h2.shape:
        raise ConfigError(f"expected matching Nx2 channels, got {h1.shape}, {h2.shape}")
    if h1.shape[-2] < 4:
        raise ConfigError(
            f"block diagonalization needs n_tx >= 4 for two 2-antenna users, got {h1.shape[-2]}"
        )
    return BDPrecoders(w=(_null_space_precoder(h1, h2), _null_space_precoder(h2, h1)))


def bd_round(s1, s2, h1, h2, power: float, rng,
             noise_var: float = 1.0) -> tuple[P2PDecision, P2PDecision]:
    """One BD transmission round: precode, receive, combine per user.

    ``s1``/``s2`` hold each user's two symbols (last axis length 2).  Power
    splits equally (``power/2`` per user per slot).  Each receiver performs
    coherent Alamouti combining against its genie-provided 2x2 equivalent
    channel; the returned decisions carry gain
    ``sqrt(power/4) * fro_norm(w_k.T @ h_k)`` with unit-variance noise.
    """
    if not power > 0:
        raise ConfigError(f"transmit power must be > 0, got {power}")
    pre = bd_precoders(h1, h2)
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    x = np.sqrt(power / 4.0) * (
        alamouti_embed(s1[..., 0], s1[..., 1]) @ np.swapaxes(pre.w[0], -1, -2)
        + alamouti_embed(s2[..., 0], s2[..., 1]) @ np.swapaxes(pre.w[1], -1, -2)
    )
    decisions = []
    for k, h in enumerate((h1, h2)):
        r = x @ np.asarray(h, dtype=complex) + complex_normal(rng, x.shape[:-2] + (2, 2), noise_var)
        equivalent = np.swapaxes(pre.w[k], -1, -2) @ h  # genie 2x2 channel
        decisions.append(alamouti_rx(r, equivalent, power / 2.0))
    return decisions[0], decisions[1]


@dataclass(frozen=True)
class TdmaDecision:
    """Outcome of one opportunistic TDMA round for the scheduled user."""

    user: int | np.ndarray  # scheduled user index (ties go to user 0)
    indices: np.ndarray  # detected constellation point indices, (..., 2)
    stats: np.ndarray  # raw decision variables, (..., 2)
    gain: float | np.ndarray  # genie effective gain sqrt(P/2) * ||h||


def tdma_round(s1, s2, h1, h2, power: float, constellation: Constellation, rng,
               noise_var: float = 1.0) -> TdmaDecision:
    """Schedule the stronger-norm user and send both symbols to it.

    The scheduled user gets the full power budget through the transmit-side
    Alamouti code and detects blindly for PSK; for 16QAM the detector is
    handed the true scalar gain (genie-aided in place of decision-feedback
    estimation).
    """
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    n1 = np.asarray(fro_norm(h1))
    n2 = np.asarray(fro_norm(h2))
    user = (n2 > n1).astype(int)
    h = np.where(user[..., None, None] == 0, h1, h2)
    x = dual_alamouti_tx(s1, s2, h, power)
    r = x @ h + complex_normal(rng, x.shape[:-2] + (2, 2), noise_var)
    dec = dual_alamouti_rx(r)
    gain = np.sqrt(power / 2.0) * np.maximum(n1, n2)
    if constellation.is_psk:
        indices = detect_blind_psk(dec.stats, constellation)
    else:
        indices = detect_coherent(dec.stats, gain[..., None], constellation)
    if user.ndim == 0:
        user = int(user)
    return TdmaDecision(user=user, indices=np.asarray(indices), stats=dec.stats, gain=gain)
