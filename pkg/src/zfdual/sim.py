"""Monte Carlo BER engine, diversity-slope estimator, and CSV emission.

Transmit power is tied to the SNR axis by ``P = 10**(snr_db/10)``: noises
and fading channels are normalized, so average receive SNR equals transmit
power.  Trials are grouped into fixed-size chunks, one counter-based RNG
stream per chunk, which makes every curve a pure function of the
configuration and master seed for any worker count.
"""

from __future__ import annotations

import concurrent.futures
import csv as _csv
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import stream_rng
from .errors import ConfigError, InsufficientData
from .kernels import KERNELS
from .modulation import CONSTELLATIONS, get_constellation

SCHEMES = (
    "alamouti",
    "dual-alamouti",
    "svd",
    "uplink-ic",
    "downlink-ic",
    "downlink-ic-pa",
    "bd",
    "tdma-da",
)

#: Constellations giving R bits/channel-use/user: concurrent schemes
#: (IC / BD) use 2^R points, the half-rate TDMA baseline uses 2^(2R).
RATE_CONSTELLATIONS = {
    1: {"concurrent": "bpsk", "tdma": "qpsk"},
    2: {"concurrent": "qpsk", "tdma": "16qam"},
}


@dataclass(frozen=True)
class SimConfig:
    """One BER sweep: scheme, geometry, grid, stopping rule, and seed."""

    scheme: str
    n_tx: int
    constellation: str
    snr_db: tuple  # grid points in dB
    min_bit_errors: int = 200
    max_trials: int = 10_000_000  # blocks per SNR point
    master_seed: int = 0
    workers: int = 1
    chunk_blocks: int = 8192  # blocks per RNG stream (determinism contract)


def snr_grid(start: float, step: float, stop: float) -> tuple:
    """Arithmetic dB grid including both endpoints (within rounding)."""
    if step <= 0:
        raise ConfigError(f"snr grid step must be > 0, got {step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def validate_config(cfg: SimConfig) -> None:
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"scheme: unknown scheme {cfg.scheme!r}, expected one of {SCHEMES}")
    if cfg.constellation.lower() not in CONSTELLATIONS:
        raise ConfigError(f"constellation: unknown constellation {cfg.constellation!r}")
    if cfg.n_tx < 2:
        raise ConfigError(f"n_tx: need at least 2 antennas, got {cfg.n_tx}")
    if cfg.scheme == "bd" and cfg.n_tx < 4:
        raise ConfigError(f"n_tx: scheme 'bd' requires n_tx >= 4, got {cfg.n_tx}")
    if cfg.scheme in ("downlink-ic", "downlink-ic-pa", "uplink-ic"):
        if not get_constellation(cfg.constellation).is_psk:
            raise ConfigError(
                "constellation: blind IC receivers support PSK only "
                f"(got {cfg.constellation!r})"
            )
    if len(cfg.snr_db) == 0:
        raise ConfigError("snr_db: empty SNR grid")
    if cfg.min_bit_errors < 1:
        raise ConfigError(f"min_bit_errors: must be >= 1, got {cfg.min_bit_errors}")
    if cfg.max_trials < 1:
        raise ConfigError(f"max_trials: must be >= 1, got {cfg.max_trials}")
    if cfg.workers < 1:
        raise ConfigError(f"workers: must be >= 1, got {cfg.workers}")
    if cfg.chunk_blocks < 1:
        raise ConfigError(f"chunk_blocks: must be >= 1, got {cfg.chunk_blocks}")


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bits: int
    bit_errors: int
    ber: float
    ci95_halfwidth: float
    truncated: bool  # hit max_trials before min_bit_errors


@dataclass
class BerCurve:
    scheme: str
    n_tx: int
    constellation: str
    points: list = field(default_factory=list)

    def snrs(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])

    def bers(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])


@dataclass(frozen=True)
class DiversityEstimate:
    """Negated least-squares slope of log10(BER) against snr_db / 10."""

    slope: float
    window: tuple
    r_squared: float
    n_points: int


def _ci95(errors: int, bits: int) -> float:
    if bits == 0:
        return 0.0
    p = errors / bits
    return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / bits)


def run_point_chunk(cfg: SimConfig, power: float, chunk_index: int, n_blocks: int):
    """Simulate one chunk of blocks on its own RNG stream (picklable worker)."""
    rng = stream_rng(cfg.master_seed, chunk_index)
    kernel = KERNELS[cfg.scheme]
    return kernel(n_blocks, cfg.n_tx, get_constellation(cfg.constellation), power, rng)


def _chunk_size(cfg: SimConfig, index: int) -> int:
    return min(cfg.chunk_blocks, cfg.max_trials - index * cfg.chunk_blocks)


def _simulate_point(cfg: SimConfig, snr_db: float) -> BerPoint:
    power = 10.0 ** (snr_db / 10.0)
    n_chunks = math.ceil(cfg.max_trials / cfg.chunk_blocks)
    bits = errors = 0
    consumed = 0

    if cfg.workers == 1:
        for idx in range(n_chunks):
            b, e = run_point_chunk(cfg, power, idx, _chunk_size(cfg, idx))
            bits += b
            errors += e
            consumed = idx + 1
            if errors >= cfg.min_bit_errors:
                break
    else:
        window = 2 * cfg.workers
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            pending: dict = {}
            submitted = 0
            for idx in range(n_chunks):
                while submitted < n_chunks and len(pending) < window:
                    pending[submitted] = pool.submit(
                        run_point_chunk, cfg, power, submitted, _chunk_size(cfg, submitted)
                    )
                    submitted += 1
                b, e = pending.pop(idx).result()
                bits += b
                errors += e
                consumed = idx + 1
                if errors >= cfg.min_bit_errors:
                    break
            for fut in pending.values():
                fut.cancel()

    truncated = errors < cfg.min_bit_errors and consumed >= n_chunks
    ber = errors / bits if bits else 0.0
    return BerPoint(
        snr_db=float(snr_db),
        bits=bits,
        bit_errors=errors,
        ber=ber,
        ci95_halfwidth=_ci95(errors, bits),
        truncated=truncated,
    )


def run_ber(cfg: SimConfig) -> BerCurve:
    """Simulate the configured curve, one stopping-ruled point per grid entry."""
    validate_config(cfg)
    curve = BerCurve(scheme=cfg.scheme, n_tx=cfg.n_tx, constellation=cfg.constellation.lower())
    for snr_db in cfg.snr_db:
        curve.points.append(_simulate_point(cfg, snr_db))
    return curve


def estimate_diversity(
    curve: BerCurve,
    window: tuple = (1e-5, 1e-3),
    min_bit_errors: int = 100,
) -> DiversityEstimate:
    """Fit the high-SNR slope of a BER curve inside the given BER window.

    Only points with at least ``min_bit_errors`` errors and BER inside
    ``window`` qualify; fewer than 3 such points raises InsufficientData.
    """
    low, high = window
    pts = [
        p
        for p in curve.points
        if p.bit_errors >= min_bit_errors and low <= p.ber <= high
    ]
    if len(pts) < 3:
        raise InsufficientData(
            f"only {len(pts)} points with >= {min_bit_errors} errors and BER in "
            f"[{low:g}, {high:g}]; need 3"
        )
    x = np.array([p.snr_db / 10.0 for p in pts])
    y = np.log10([p.ber for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DiversityEstimate(
        slope=float(-slope), window=(low, high), r_squared=r_squared, n_points=len(pts)
    )


def snr_at_ber(curve: BerCurve, target_ber: float) -> float:
    """SNR (dB) at which the curve crosses ``target_ber``.

    Linear interpolation of log10(BER) against SNR between the bracketing
    grid points; raises InsufficientData when the curve never crosses.
    """
    pts = [p for p in curve.points if p.ber > 0]
    for a, b in zip(pts, pts[1:]):
        lo, hi = sorted((a.ber, b.ber))
        if lo <= target_ber <= hi and a.ber != b.ber:
            la, lb, lt = math.log10(a.ber), math.log10(b.ber), math.log10(target_ber)
            frac = (lt - la) / (lb - la)
            return a.snr_db + frac * (b.snr_db - a.snr_db)
    raise InsufficientData(f"curve never crosses BER {target_ber:g}")


CSV_HEADER = [
    "scheme",
    "n_tx",
    "constellation",
    "snr_db",
    "bits",
    "bit_errors",
    "ber",
    "ci95",
    "truncated",
]


def write_csv(curve: BerCurve, path) -> None:
    """Write one curve, one row per SNR point, LF line endings, full precision."""
    try:
        with open(path, "w", newline="") as fh:
            writer = _csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for p in curve.points:
                writer.writerow(
                    [
                        curve.scheme,
                        curve.n_tx,
                        curve.constellation,
                        f"{p.snr_db:.10g}",
                        p.bits,
                        p.bit_errors,
                        f"{p.ber:.17g}",
                        f"{p.ci95_halfwidth:.17g}",
                        int(p.truncated),
                    ]
                )
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> BerCurve:
    """Parse a curve previously written by :func:`write_csv`."""
    try:
        with open(path, newline="") as fh:
            reader = _csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ConfigError(f"unexpected CSV header in {path}: {header}")
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"no data rows in {path}")
    curve = BerCurve(scheme=rows[0][0], n_tx=int(rows[0][1]), constellation=rows[0][2])
    for row in rows:
        curve.points.append(
            BerPoint(
                snr_db=float(row[3]),
                bits=int(row[4]),
                bit_errors=int(row[5]),
                ber=float(row[6]),
                ci95_halfwidth=float(row[7]),
                truncated=bool(int(row[8])),
            )
        )
    return curve

