"""Two-user uplink interference cancellation for the 2xN multi-access channel.

Both users transmit Alamouti blocks concurrently (power P/2 per user per
slot, network total P).  The receiver, which knows both channels, decouples
all four symbols in two linear steps: a user-separating zero-forcing filter
built from per-antenna Alamouti channel blocks, followed by a
symbol-separating matched filter whose 2x2 sub-blocks inherit the Alamouti
structure (the structure is closed under addition, multiplication, and
conjugate transposition).  The normalization makes the post-filter noise
exactly unit-variance white.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateChannel
from .linalg import alamouti_channel_stack, fro_norm, hermitian

_DEGENERATE_TOL = 1e-12  # per-antenna squared channel norm below which we bail


def _antenna_blocks(g: np.ndarray) -> np.ndarray:
    """Per-antenna 2x2 Alamouti blocks of a 2xN channel, shape (..., N, 2, 2)."""
    stacked = alamouti_channel_stack(g)
    n = stacked.shape[-2] // 2
    return stacked.reshape(stacked.shape[:-2] + (n, 2, 2))


def build_user_sep(g) -> np.ndarray:
    """User-separating ZF filter that annihilates the given user's channel.

    For a 2xN channel the filter is 2(N-1) x 2N; row-block r combines the
    inverted Alamouti block of antenna r with the negated inverted block of
    antenna N, so the product with the user's own stacked channel is exactly
    zero while the other user's symbols pass through.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim < 2 or g.shape[-2] != 2:
        raise ConfigError(f"expected a 2xN channel, got shape {g.shape}")
    n = g.shape[-1]
    if n < 2:
        raise ConfigError(f"user separation needs at least 2 receive antennas, got {n}")
    blocks = _antenna_blocks(g)
    f2 = np.sum(np.abs(blocks) ** 2, axis=(-2, -1))  # (..., N) block Frobenius^2
    if np.any(f2 < 2 * _DEGENERATE_TOL):
        raise DegenerateChannel("vanishing per-antenna channel block")
    bh = hermitian(blocks)
    z = np.zeros(g.shape[:-2] + (2 * (n - 1), 2 * n), dtype=complex)
    last = -2.0 * bh[..., n - 1, :, :] / f2[..., n - 1, None, None]
    for r in range(n - 1):
        z[..., 2 * r : 2 * r + 2, 2 * r : 2 * r + 2] = (
            2.0 * bh[..., r, :, :] / f2[..., r, None, None]
        )
        z[..., 2 * r : 2 * r + 2, 2 * n - 2 : 2 * n] = last
    return z


def build_sym_sep(zbar_other, gtilde_k) -> tuple[np.ndarray, np.ndarray]:
    """Symbol-separating filter and its normalizer for one user.

    ``zbar_other`` is the other user's ZF filter, ``gtilde_k`` this user's
    stacked channel.  The filter is the scaled conjugate transpose of the
    combined equivalent channel; the normalizer alpha makes the total
    combined filter satisfy ``fro_norm(f @ zbar_other)**2 / 2 == 1``, which
    whitens the post-filter noise to exactly CN(0, 1) per component.
    """
    m = np.asarray(zbar_other) @ np.asarray(gtilde_k)
    m2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    if np.any(m2 < _DEGENERATE_TOL):
        raise DegenerateChannel("vanishing equivalent channel")
    denom = fro_norm(hermitian(m) @ zbar_other)
    alpha = np.sqrt(2.0) / denom
    f = np.asarray(alpha)[..., None, None] * hermitian(m)
    return f, alpha


@dataclass(frozen=True)
class UplinkFilters:
    """Receiver filter bank for both users.

    Per-user tuples, indexed by user 0/1: ``zbar[k]`` zero-forces user k's
    own symbols, ``f[k]`` separates user k's two symbols from the output of
    ``zbar[1-k]``, ``alpha[k]`` is the noise-whitening normalizer, and
    ``eq[k]`` the combined equivalent channel ``zbar[1-k] @ gtilde[k]``.
    """

    zbar: tuple
    f: tuple
    alpha: tuple
    eq: tuple


def build_uplink_filters(g1, g2) -> UplinkFilters:
    """Assemble the full two-step filter bank from both users' 2xN channels."""
    z1 = build_user_sep(g1)
    z2 = build_user_sep(g2)
    gt1 = alamouti_channel_stack(g1)
    gt2 = alamouti_channel_stack(g2)
    f1, a1 = build_sym_sep(z2, gt1)
    f2, a2 = build_sym_sep(z1, gt2)
    return UplinkFilters(zbar=(z1, z2), f=(f1, f2), alpha=(a1, a2), eq=(z2 @ gt1, z1 @ gt2))


def uplink_ic_receive(ybar, g1, g2, power: float) -> tuple[np.ndarray, np.ndarray]:
    """Decouple all four symbols from the stacked receive vector.

    ``ybar`` is the length-2N conjugate-stacked receive vector; ``power`` is
    the network total (P/2 per user per slot).  Returns ``(stats, gains)``
    with ``stats[..., k, :]`` the two decision variables of user k
    (``gains[..., k] * s + CN(0, 1)``) and the other user contributing
    exactly zero.
    """
    if not power > 0:
        raise ConfigError(f"transmit power must be > 0, got {power}")
    filters = build_uplink_filters(g1, g2)
    ybar = np.asarray(ybar, dtype=complex)
    stats = []
    gains = []
    for k in (0, 1):
        combined = filters.f[k] @ filters.zbar[1 - k]  # (..., 2, 2N)
        stats.append(np.einsum("...ij,...j->...i", combined, ybar))
        coef = (
            np.asarray(filters.alpha[k])
            / 2.0
            * np.sqrt(power / 4.0)
            * np.asarray(fro_norm(filters.eq[k])) ** 2
        )
        gains.append(coef)
    return np.stack(stats, axis=-2), np.stack(np.broadcast_arrays(*gains), axis=-1)


def uplink_snr_b(g1, g2, k: int) -> float | np.ndarray:
    """Normalized per-symbol output SNR statistic of user k.

    The receiver output SNR is ``power * b / 8``; the statistic depends only
    on the channel realization.  Its value is preserved when the roles of
    the two link directions are exchanged (channels conjugate-transposed),
    which is the duality this toolkit is built around.
    """
    g_own = (g1, g2)[k]
    g_other = (g1, g2)[1 - k]
    z = build_user_sep(g_other)
    m = z @ alamouti_channel_stack(g_own)
    denom = np.asarray(fro_norm(hermitian(m) @ z)) ** 2
    if np.any(denom < _DEGENERATE_TOL):
        raise DegenerateChannel("vanishing equivalent channel")
    return np.asarray(fro_norm(m)) ** 4 / denom
