"""Two-user downlink interference cancellation for the Nx2 broadcast channel.

The transmitter (which knows both users' channels) sends one Alamouti block
per user through two precoding stages: a symbol-separating precoder that
lets each receiver decouple its own two symbols, and a user-separating
precoder that lets each receiver cancel the other user's signal.  Each
receiver needs only two additions of raw received samples, with no channel
knowledge at all: the decision variables come out as

    r1 = R[0, 0] + conj(R[1, 1]),   r2 = R[0, 1] - conj(R[1, 0]),

equal to ``gain * s_j`` plus CN(0, 2) noise.  Power can additionally be
shifted between the two users to maximize the smaller output SNR.

The constructions mirror the uplink receiver filters of
:mod:`zfdual.uplink` with the two link directions exchanged; the per-user
SNR statistic ``b`` is invariant under that exchange.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateChannel, SingularMatrix
from .linalg import alamouti_channel_stack, alamouti_embed, fro_norm, hermitian, solve_hpd

_DEGENERATE_TOL = 1e-12


def htilde_stack(h) -> np.ndarray:
    """Per-antenna Alamouti stack of an Nx2 downlink channel, shape (..., 2N, 2).

    Row i of ``h`` (transmit antenna i's paths to the user's two receive
    antennas) becomes the block ``[[h_i1, h_i2], [-h_i2*, h_i1*]]``.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim < 2 or h.shape[-1] != 2:
        raise ConfigError(f"expected an Nx2 channel, got shape {h.shape}")
    return alamouti_channel_stack(np.swapaxes(h, -1, -2))


def _antenna_blocks(h: np.ndarray) -> np.ndarray:
    stacked = htilde_stack(h)
    n = stacked.shape[-2] // 2
    return stacked.reshape(stacked.shape[:-2] + (n, 2, 2))


def _row_power(h: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(h) ** 2, axis=-1)


def build_user_sep_precoder(h_other) -> np.ndarray:
    """User-separating precoder built from the *other* user's Nx2 channel.

    Shape 2(N-1) x N.  Row-block r places the conjugated, inverse-power
    scaled channel row of antenna r in column r and the negated equivalent
    for antenna N in column N, so that the opposite receiver's combining
    (two additions) annihilates everything sent through this precoder.
    """
    h = np.asarray(h_other, dtype=complex)
    if h.ndim < 2 or h.shape[-1] != 2:
        raise ConfigError(f"expected an Nx2 channel, got shape {h.shape}")
    n = h.shape[-2]
    if n < 2:
        raise ConfigError(f"user separation needs at least 2 transmit antennas, got {n}")
    v = _row_power(h)
    if np.any(v < _DEGENERATE_TOL):
        raise DegenerateChannel("vanishing per-antenna channel row")
    b = np.zeros(h.shape[:-2] + (2 * (n - 1), n), dtype=complex)
    last = -np.conj(h[..., n - 1, :]) / v[..., n - 1, None]
    for r in range(n - 1):
        b[..., 2 * r : 2 * r + 2, r] = np.conj(h[..., r, :]) / v[..., r, None]
        b[..., 2 * r : 2 * r + 2, n - 1] = last
    return b


def _btilde(h_other: np.ndarray) -> np.ndarray:
    """Equivalent 2(N-1) x 2N interference-ZF matrix of the user-sep precoder."""
    blocks = _antenna_blocks(h_other)
    n = blocks.shape[-3]
    v = _row_power(np.asarray(h_other, dtype=complex))
    if np.any(v < _DEGENERATE_TOL):
        raise DegenerateChannel("vanishing per-antenna channel row")
    bh = hermitian(blocks)
    b = np.zeros(h_other.shape[:-2] + (2 * (n - 1), 2 * n), dtype=complex)
    last = -bh[..., n - 1, :, :] / v[..., n - 1, None, None]
    for r in range(n - 1):
        b[..., 2 * r : 2 * r + 2, 2 * r : 2 * r + 2] = bh[..., r, :, :] / v[..., r, None, None]
        b[..., 2 * r : 2 * r + 2, 2 * n - 2 : 2 * n] = last
    return b


def build_ic_matrices(h1, h2, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Equivalent interference-ZF matrix and stacked channel for user k.

    Returns ``(bt, ht)`` where ``bt`` (built from the *other* user's
    channel) annihilates the other user's stacked channel exactly, and
    ``ht`` is user k's own 2N x 2 Alamouti stack.  Every 2x2 sub-block of
    ``bt @ ht`` keeps the Alamouti structure.
    """
    if k not in (0, 1):
        raise ConfigError(f"user index must be 0 or 1, got {k}")
    h_own = (h1, h2)[k]
    h_other = (h1, h2)[1 - k]
    return _btilde(h_other), htilde_stack(h_own)


def build_symbol_sep_precoder(h1, h2, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Symbol-separating precoder and its normalizer beta for user k.

    The precoder is the scaled conjugate transpose of the equivalent
    channel ``bt @ ht``; beta is chosen exactly like the uplink receiver's
    alpha (the construction is the uplink symbol-separating filter with the
    channel indices transposed), which also makes the per-user transmitted
    power come out to exactly half the network budget.
    """
    bt, ht = build_ic_matrices(h1, h2, k)
    m = bt @ ht
    m2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    if np.any(m2 < _DEGENERATE_TOL):
        raise DegenerateChannel("vanishing equivalent channel")
    beta = np.sqrt(2.0) / fro_norm(hermitian(m) @ bt)
    e = np.asarray(beta)[..., None, None] * hermitian(m)
    return e, beta


@dataclass(frozen=True)
class DownlinkPrecoders:
    """Everything the transmitter derives from one channel realization.

    All tuples are indexed by user k: ``e[k]`` is user k's 2 x 2(N-1)
    symbol-separating precoder, ``bbar[k]`` the 2(N-1) x N user-separating
    precoder applied to user k's branch (built from the other user's
    channel), ``btilde[k]`` / ``htilde[k]`` the equivalent matrices behind
    it, ``beta[k]`` the normalizer, and ``b[k]`` the per-symbol SNR
    statistic (output SNR = P * c_k^2 * b_k / 8).
    """

    e: tuple
    bbar: tuple
    btilde: tuple
    htilde: tuple
    beta: tuple
    b: tuple


def build_downlink_precoders(h1, h2) -> DownlinkPrecoders:
    """Assemble both users' precoding stages from the two Nx2 channels."""
    e, bbar, bts, hts, betas, bs = [], [], [], [], [], []
    for k in (0, 1):
        bt, ht = build_ic_matrices(h1, h2, k)
        m = bt @ ht
        m2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
        if np.any(m2 < _DEGENERATE_TOL):
            raise DegenerateChannel("vanishing equivalent channel")
        denom = fro_norm(hermitian(m) @ bt)
        beta = np.sqrt(2.0) / denom
        e.append(np.asarray(beta)[..., None, None] * hermitian(m))
        bbar.append(build_user_sep_precoder((h1, h2)[1 - k]))
        bts.append(bt)
        hts.append(ht)
        betas.append(beta)
        bs.append(np.asarray(fro_norm(m)) ** 4 / np.asarray(denom) ** 2)
    return DownlinkPrecoders(
        e=tuple(e), bbar=tuple(bbar), btilde=tuple(bts), htilde=tuple(hts),
        beta=tuple(betas), b=tuple(bs),
    )


@dataclass(frozen=True)
class PowerAllocation:
    """Per-user power weights ``c_k^2`` with ``c1_sq + c2_sq == 2``."""

    c1_sq: float | np.ndarray
    c2_sq: float | np.ndarray

    def __post_init__(self):
        total = np.asarray(self.c1_sq) + np.asarray(self.c2_sq)
        if np.any(np.asarray(self.c1_sq) < 0) or np.any(np.asarray(self.c2_sq) < 0):
            raise ConfigError("power weights must be non-negative")
        if np.max(np.abs(total - 2.0)) > 1e-12:
            raise ConfigError("power weights must sum to 2")

    @classmethod
    def equal(cls) -> "PowerAllocation":
        return cls(1.0, 1.0)


def downlink_ic_tx(s1, s2, h1, h2, power: float, alloc: PowerAllocation,
                   precoders: DownlinkPrecoders | None = None) -> np.ndarray:
    """Precode both users' symbol pairs into one 2xN transmit block.

    ``s1``/``s2`` are the two symbols for users 1 and 2 (last axis length
    2).  Average transmitted power is ``power`` per time slot for
    unit-energy symbols, split between users according to ``alloc``.
    """
    if not power > 0:
        raise ConfigError(f"transmit power must be > 0, got {power}")
    pre = precoders if precoders is not None else build_downlink_precoders(h1, h2)
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    c1 = np.sqrt(np.asarray(alloc.c1_sq, dtype=float))[..., None, None]
    c2 = np.sqrt(np.asarray(alloc.c2_sq, dtype=float))[..., None, None]
    x1 = alamouti_embed(s1[..., 0], s1[..., 1]) @ pre.e[0] @ pre.bbar[0]
    x2 = alamouti_embed(s2[..., 0], s2[..., 1]) @ pre.e[1] @ pre.bbar[1]
    return np.sqrt(power / 2.0) * (c1 * x1 + c2 * x2)


def downlink_ic_rx(r) -> np.ndarray:
    """Blind combining at one user: two additions, no channel knowledge.

    Returns the two decision variables (no noise renormalization, so the
    equivalent noise is CN(0, 2) per component; blind PSK detection is
    scale invariant so this costs nothing).
    """
    r = np.asarray(r, dtype=complex)
    if r.shape[-2:] != (2, 2):
        raise ConfigError(f"expected a 2x2 received block, got shape {r.shape}")
    r1 = r[..., 0, 0] + np.conj(r[..., 1, 1])
    r2 = r[..., 0, 1] - np.conj(r[..., 1, 0])
    return np.stack([r1, r2], axis=-1)


def downlink_gain(power: float, beta, b_norm_sq, c_sq=1.0) -> np.ndarray:
    """Scalar signal coefficient of the combiner output.

    ``b_norm_sq`` is ``fro_norm(bt @ ht)**2``; the combiner output is
    ``gain * s_j + CN(0, 2)`` with
    ``gain = sqrt(power/2) * beta/2 * c * ||bt @ ht||^2``.
    """
    return (
        np.sqrt(power / 2.0)
        * np.asarray(beta)
        / 2.0
        * np.sqrt(np.asarray(c_sq, dtype=float))
        * np.asarray(b_norm_sq)
    )


def user_snr_b(h1, h2, k: int) -> float | np.ndarray:
    """Per-symbol SNR statistic of user k's combiner output.

    The combiner delivers output SNR ``power * c_k^2 * b / 8`` per symbol;
    ``b`` depends only on the channel pair.  Matches the uplink statistic
    :func:`zfdual.uplink.uplink_snr_b` on conjugate-transposed channels.
    """
    bt, ht = build_ic_matrices(h1, h2, k)
    m = bt @ ht
    denom = np.asarray(fro_norm(hermitian(m) @ bt)) ** 2
    if np.any(denom < _DEGENERATE_TOL):
        raise DegenerateChannel("vanishing equivalent channel")
    return np.asarray(fro_norm(m)) ** 4 / denom


def user_snr_b_trace(h1, h2, k: int) -> float:
    """Whitened-receiver SNR statistic: trace of the projected channel Gram.

    Computed as ``tr(ht^H bt^H (bt bt^H)^{-1} bt ht)`` through a Cholesky
    solve.  Coincides with :func:`user_snr_b` for n_tx == 2 and upper-bounds
    it in general (the blind combiner does not whiten the residual noise
    correlation across antenna branches).  Single channel pair only.
    """
    bt, ht = build_ic_matrices(h1, h2, k)
    if bt.ndim != 2:
        raise ConfigError("user_snr_b_trace takes a single channel pair")
    m = bt @ ht
    gram = bt @ hermitian(bt)
    try:
        x = solve_hpd(gram, m)
    except SingularMatrix as exc:
        raise DegenerateChannel("singular interference-ZF Gram matrix") from exc
    return float(np.real(np.trace(hermitian(m) @ x)))


def optimal_power_alloc(b1, b2) -> PowerAllocation:
    """Split power to maximize the smaller of the two users' output SNRs.

    With per-user SNR ``P * c_k^2 * b_k / 8`` and the constraint
    ``c1^2 + c2^2 == 2``, the max-min solution equalizes the SNRs:
    ``c_k^2 = 2 * b_other / (b1 + b2)``, giving both users
    ``P * b1 * b2 / (4 * (b1 + b2))``.
    """
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    if np.any(b1 <= 0) or np.any(b2 <= 0):
        raise DegenerateChannel("SNR statistics must be positive")
    total = b1 + b2
    return PowerAllocation(c1_sq=2.0 * b2 / total, c2_sq=2.0 * b1 / total)
