"""Small dense complex linear algebra and Alamouti-structure helpers.

Everything operates on plain numpy arrays.  Matrix arguments accept stacked
inputs the same way ``numpy.linalg`` does: the last two axes hold the
matrix, leading axes broadcast.  All matrices in this toolkit are tiny
(at most ``2*n_tx`` on a side), so no attention is paid to large-matrix
performance.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConfigError, SingularMatrix

# Relative pivot threshold below which a Cholesky factor is declared singular.
PIVOT_RTOL = 1e-12


def alamouti_embed(s1, s2) -> np.ndarray:
    """2x2 orthogonal block ``[[s1, s2], [-s2*, s1*]]`` for a symbol pair.

    ``s1`` and ``s2`` may be scalars or broadcastable arrays; the output
    gains a trailing (2, 2) axis pair.  The block M satisfies
    ``M @ M^H == (|s1|^2 + |s2|^2) * I``.
    """
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    shape = np.broadcast_shapes(s1.shape, s2.shape)
    out = np.empty(shape + (2, 2), dtype=complex)
    out[..., 0, 0] = s1
    out[..., 0, 1] = s2
    out[..., 1, 0] = -np.conj(s2)
    out[..., 1, 1] = np.conj(s1)
    return out


def is_alamouti(m, tol: float):
    """True where a 2x2 block has the orthogonal ``[[a, b], [-b*, a*]]`` shape.

    Returns a bool for a single block, a boolean array for stacked input.
    """
    m = np.asarray(m)
    if m.shape[-2:] != (2, 2):
        raise ConfigError(f"is_alamouti expects 2x2 blocks, got shape {m.shape}")
    ok = (np.abs(m[..., 1, 0] + np.conj(m[..., 0, 1])) <= tol) & (
        np.abs(m[..., 1, 1] - np.conj(m[..., 0, 0])) <= tol
    )
    return bool(ok) if ok.ndim == 0 else ok


def hermitian(m) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    m = np.asarray(m)
    if m.ndim < 2:
        raise ConfigError("hermitian expects at least a 2-D array")
    return np.conj(np.swapaxes(m, -1, -2))


def fro_norm(m):
    """Frobenius norm over the last two axes (scalar for 2-D input)."""
    m = np.asarray(m)
    if m.ndim < 2:
        raise ConfigError("fro_norm expects at least a 2-D array")
    return np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit conformability check."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ConfigError(f"matmul: non-conformable shapes {a.shape} @ {b.shape}")
    return a @ b


def solve_hpd(a, b) -> np.ndarray:
    """Solve ``a @ x == b`` for Hermitian positive-definite ``a`` via Cholesky.

    Raises ``SingularMatrix`` when the factorization fails or the pivot
    ratio ``min(pivot)/max(pivot)`` drops below ``PIVOT_RTOL``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"solve_hpd expects a square 2-D matrix, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ConfigError(f"solve_hpd: rhs shape {b.shape} does not match {a.shape}")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("Cholesky failed: matrix not positive definite") from exc
    pivots = np.abs(np.diagonal(chol)) ** 2
    if pivots.min() < PIVOT_RTOL * pivots.max():
        raise SingularMatrix(
            f"pivot ratio {pivots.min() / pivots.max():.3e} below {PIVOT_RTOL:g}"
        )
    y = solve_triangular(chol, b, lower=True)
    return solve_triangular(chol.conj().T, y, lower=False)


def alamouti_channel_stack(g) -> np.ndarray:
    """Stack per-antenna 2x2 Alamouti channel blocks of a 2xN matrix.

    Column i of ``g`` (the two paths into receive antenna i) becomes the
    block ``[[g_1i, g_2i], [-g_2i*, g_1i*]]``; blocks are stacked into a
    (2N, 2) matrix whose Gram matrix equals ``fro_norm(g)**2 * I_2``.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim < 2 or g.shape[-2] != 2:
        raise ConfigError(f"expected a 2xN matrix, got shape {g.shape}")
    n = g.shape[-1]
    out = np.empty(g.shape[:-2] + (2 * n, 2), dtype=complex)
    out[..., 0::2, 0] = g[..., 0, :]
    out[..., 0::2, 1] = g[..., 1, :]
    out[..., 1::2, 0] = -np.conj(g[..., 1, :])
    out[..., 1::2, 1] = np.conj(g[..., 0, :])
    return out


def conjugate_stack(y) -> np.ndarray:
    """Interleave ``[y_1i, -y_2i*]`` pairs of a two-slot receive block.

    Maps a (2, N) block of received samples (rows are time slots) to the
    length-2N vector the Alamouti-type combiners operate on.
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim < 2 or y.shape[-2] != 2:
        raise ConfigError(f"expected a 2xN block, got shape {y.shape}")
    n = y.shape[-1]
    out = np.empty(y.shape[:-2] + (2 * n,), dtype=complex)
    out[..., 0::2] = y[..., 0, :]
    out[..., 1::2] = -np.conj(y[..., 1, :])
    return out
