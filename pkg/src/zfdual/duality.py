"""Duality between real linear systems with zero-forcing filter banks.

A :class:`LinearZFSystem` is a real linear system ``d = s @ Z + n`` (unit
variance AWGN) carrying J streams through unit-norm transmit filter rows
``U`` and receive filter rows ``V`` with a per-stream power profile ``P``.
When the filters satisfy the zero-forcing conditions, exchanging the roles
of the transmit and receive filters while transposing the channel yields a
second system with the same per-stream output SNRs.  The second system
needs channel knowledge only where the first one did not, which is what
turns receiver-side combining schemes into transmitter-side precoding
schemes.

:func:`alamouti_real_expansion` builds the canonical example: the
real-valued four-stream expansion of a 2xN Alamouti system, whose dual is
the transmit-side Alamouti variant implemented in :mod:`zfdual.p2p`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateChannel, NotZFSystem
from .linalg import fro_norm

#: Fixed 4x4 coupling block of the transmit processing matrix; each row of
#: ``[I_4, DISPERSION_A]`` is one dispersion matrix of the Alamouti code in
#: the real-expanded coordinates (entries only in {-1, 0, 1}).
DISPERSION_A = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ]
)

#: ZF residual above which :func:`dualize` refuses to construct the dual.
ZF_TOL = 1e-8


@dataclass(frozen=True)
class LinearZFSystem:
    """Real linear system with per-stream transmit/receive filter pairs.

    Attributes
    ----------
    Z : (n, m) real channel matrix.
    U : (J, n) transmit filters, one unit-norm row per stream.
    V : (J, m) receive filters, one unit-norm row per stream.
    P : (J,) non-negative per-stream powers, summing to ``total_power``.
    total_power : scalar power budget.
    """

    Z: np.ndarray
    U: np.ndarray
    V: np.ndarray
    P: np.ndarray
    total_power: float

    def __post_init__(self):
        n, m = self.Z.shape
        j = self.U.shape[0]
        if self.U.shape != (j, n) or self.V.shape != (j, m) or self.P.shape != (j,):
            raise ConfigError(
                f"inconsistent system shapes: Z {self.Z.shape}, U {self.U.shape}, "
                f"V {self.V.shape}, P {self.P.shape}"
            )

    @property
    def n_streams(self) -> int:
        return self.U.shape[0]


@dataclass(frozen=True)
class RealExpansion:
    """Factored pieces of the real-valued Alamouti expansion.

    ``U = [I_4, A]`` is channel independent; the receive matrix factors as
    ``V = (D * script_g).T / fro_norm(G)`` where ``D`` (stored as its
    diagonal) applies the negative-conjugate of the second time slot and
    ``script_g`` is built from the two channel expansions ``Ghat``/``Gbar``.
    """

    U: np.ndarray  # 4 x 8
    V: np.ndarray  # 4 x 4N
    Ghat: np.ndarray  # 4 x 2N
    Gbar: np.ndarray  # 4 x 2N
    A: np.ndarray  # 4 x 4
    D: np.ndarray  # (4N,) diagonal signs

    @property
    def script_g(self) -> np.ndarray:
        """The (4N, 4) stacked receive-side channel factor."""
        return np.hstack([self.Ghat, self.Gbar]).T


def check_zf(system: LinearZFSystem) -> float:
    """Largest cross-stream coupling ``|u_l Z v_k^T|`` over l != k (0 if J == 1)."""
    coupling = system.U @ system.Z @ system.V.T
    j = system.n_streams
    if j == 1:
        return 0.0
    off = coupling[~np.eye(j, dtype=bool)]
    return float(np.max(np.abs(off)))


def _check_stream(system: LinearZFSystem, k: int) -> None:
    if not 0 <= k < system.n_streams:
        raise IndexError(f"stream index {k} out of range [0, {system.n_streams})")


def snr_original(system: LinearZFSystem, k: int) -> float:
    """Output SNR of stream k through the receive filter, assuming ZF holds."""
    _check_stream(system, k)
    gain = float(system.U[k] @ system.Z @ system.V[k])
    return float(system.P[k]) * gain**2


def snr_dual(system: LinearZFSystem, k: int) -> float:
    """Output SNR of stream k in the role-swapped system with channel ``Z.T``.

    Interfering streams are treated as noise; with ZF filters the
    interference term vanishes and the value equals :func:`snr_original`.
    """
    _check_stream(system, k)
    coupling = system.V @ system.Z.T @ system.U[k]  # (J,)
    signal = float(system.P[k]) * coupling[k] ** 2
    mask = np.arange(system.n_streams) != k
    interference = float(np.sum(system.P[mask] * coupling[mask] ** 2))
    return signal / (interference + 1.0)


def dualize(system: LinearZFSystem, tol: float = ZF_TOL) -> LinearZFSystem:
    """Swap transmit and receive filter roles over the transposed channel.

    Refuses (``NotZFSystem``) when the input violates zero forcing, since
    the SNR equivalence only holds under the ZF conditions.  Applying
    ``dualize`` twice returns the original system.
    """
    residual = check_zf(system)
    if residual > tol:
        raise NotZFSystem(f"ZF residual {residual:.3e} exceeds {tol:g}")
    return LinearZFSystem(
        Z=system.Z.T.copy(),
        U=system.V.copy(),
        V=system.U.copy(),
        P=system.P.copy(),
        total_power=system.total_power,
    )


def _ghat(g: np.ndarray) -> np.ndarray:
    """4 x 2N real expansion of the 2xN channel (per-path rotation blocks)."""
    n = g.shape[-1]
    re, im = g.real, g.imag
    m = np.empty(g.shape[:-2] + (4, 2 * n))
    m[..., 0, 0::2] = re[..., 0, :]
    m[..., 0, 1::2] = im[..., 0, :]
    m[..., 1, 0::2] = -im[..., 0, :]
    m[..., 1, 1::2] = re[..., 0, :]
    m[..., 2, 0::2] = re[..., 1, :]
    m[..., 2, 1::2] = im[..., 1, :]
    m[..., 3, 0::2] = -im[..., 1, :]
    m[..., 3, 1::2] = re[..., 1, :]
    return m


def _gbar(g: np.ndarray) -> np.ndarray:
    """Companion 4 x 2N expansion entering the second-slot combining."""
    n = g.shape[-1]
    re, im = g.real, g.imag
    m = np.empty(g.shape[:-2] + (4, 2 * n))
    m[..., 0, 0::2] = -re[..., 1, :]
    m[..., 0, 1::2] = im[..., 1, :]
    m[..., 1, 0::2] = -im[..., 1, :]
    m[..., 1, 1::2] = -re[..., 1, :]
    m[..., 2, 0::2] = re[..., 0, :]
    m[..., 2, 1::2] = -im[..., 0, :]
    m[..., 3, 0::2] = im[..., 0, :]
    m[..., 3, 1::2] = re[..., 0, :]
    return m


def real_noise_stack(noise: np.ndarray) -> np.ndarray:
    """Flatten a (2, N) complex noise block into the 4N real noise vector.

    Slot-major, antenna-interleaved (Re, Im) layout matching the receive
    filters built by :func:`alamouti_real_expansion`.  Used to inject one
    noise realization into both the complex and real-expanded pipelines.
    """
    noise = np.asarray(noise, dtype=complex)
    if noise.shape[-2] != 2:
        raise ConfigError(f"expected a 2xN noise block, got shape {noise.shape}")
    n = noise.shape[-1]
    out = np.empty(noise.shape[:-2] + (4 * n,))
    for t in (0, 1):
        out[..., 2 * n * t : 2 * n * (t + 1) : 2] = noise[..., t, :].real
        out[..., 2 * n * t + 1 : 2 * n * (t + 1) : 2] = noise[..., t, :].imag
    return out


def alamouti_real_expansion(g, power: float) -> tuple[LinearZFSystem, RealExpansion]:
    """Real-valued four-stream expansion of a 2xN Alamouti system.

    The four streams carry (Re s1, Im s1, Re s2, Im s2) with power ``power``
    each (total ``4 * power``).  Transmit filters are the rows of
    ``[I_4, A] / sqrt(2)``; receive filters are channel-dependent unit rows.
    The construction satisfies the ZF conditions exactly up to rounding and
    reproduces the complex-domain Alamouti combining statistics entry for
    entry.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != 2 or g.shape[1] < 1:
        raise ConfigError(f"expected a 2xN channel with N >= 1, got shape {g.shape}")
    if power < 0:
        raise ConfigError(f"per-stream power must be >= 0, got {power}")
    norm = float(fro_norm(g))
    if not np.isfinite(norm) or norm**2 < 1e-24:
        raise DegenerateChannel("zero or non-finite channel")
    n = g.shape[1]
    ghat = _ghat(g)
    gbar = _gbar(g)
    u_raw = np.hstack([np.eye(4), DISPERSION_A])
    script_g = np.hstack([ghat, gbar]).T  # 4N x 4
    d = np.concatenate([np.ones(2 * n), np.tile([-1.0, 1.0], n)])
    v = (d[:, None] * script_g).T / norm
    z = np.kron(np.eye(2), ghat)  # 8 x 4N, block diagonal
    system = LinearZFSystem(
        Z=z,
        U=u_raw / np.sqrt(2.0),
        V=v,
        P=np.full(4, float(power)),
        total_power=4.0 * float(power),
    )
    expansion = RealExpansion(U=u_raw, V=v, Ghat=ghat, Gbar=gbar, A=DISPERSION_A.copy(), D=d)
    return system, expansion
