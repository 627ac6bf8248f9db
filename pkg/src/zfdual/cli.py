"""Command-line interface: ber sweeps, diversity fits, and duality self-checks.

Options may also come from a flat ``key=value`` config file (UTF-8, one
pair per line, ``#`` comments); explicit command-line flags override file
values.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .channel import complex_normal, stream_rng
from .downlink import build_downlink_precoders, downlink_ic_rx, downlink_ic_tx, PowerAllocation
from .duality import alamouti_real_expansion, check_zf, snr_dual, snr_original
from .errors import ZfdualError
from .modulation import get_constellation, modulate
from .sim import (
    SimConfig,
    estimate_diversity,
    read_csv,
    run_ber,
    snr_grid,
    write_csv,
)


def _parse_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) == 1:
        return (float(parts[0]),)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected start:step:stop (or a single value), got {text!r}"
        )
    start, step, stop = (float(p) for p in parts)
    return snr_grid(start, step, stop)


def _parse_window(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected low:high, got {text!r}")
    return float(parts[0]), float(parts[1])


def _read_config_file(path: str) -> dict:
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ZfdualError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


_BER_FILE_PARSERS = {
    "scheme": str,
    "n_tx": int,
    "constellation": str,
    "snr_db": _parse_grid,
    "min_errors": int,
    "max_trials": int,
    "seed": int,
    "workers": int,
    "out": str,
}


def _cmd_ber(args) -> int:
    settings = {
        "scheme": None,
        "n_tx": None,
        "constellation": None,
        "snr_db": None,
        "min_errors": 200,
        "max_trials": 10_000_000,
        "seed": 0,
        "workers": 1,
        "out": None,
    }
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key not in _BER_FILE_PARSERS:
                raise ZfdualError(f"unknown config key {key!r}")
            settings[key] = _BER_FILE_PARSERS[key](raw)
    for key in settings:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    missing = [k for k in ("scheme", "n_tx", "constellation", "snr_db") if settings[k] is None]
    if missing:
        raise ZfdualError(f"missing required option(s): {', '.join(missing)}")

    cfg = SimConfig(
        scheme=settings["scheme"],
        n_tx=settings["n_tx"],
        constellation=settings["constellation"],
        snr_db=tuple(settings["snr_db"]),
        min_bit_errors=settings["min_errors"],
        max_trials=settings["max_trials"],
        master_seed=settings["seed"],
        workers=settings["workers"],
    )
    curve = run_ber(cfg)
    for p in curve.points:
        flag = " (truncated)" if p.truncated else ""
        print(
            f"snr={p.snr_db:6.2f} dB  bits={p.bits:>12d}  errors={p.bit_errors:>8d}  "
            f"ber={p.ber:.6e}  ci95=±{p.ci95_halfwidth:.2e}{flag}"
        )
    if settings["out"]:
        write_csv(curve, settings["out"])
        print(f"wrote {settings['out']}")
    return 0


def _cmd_diversity(args) -> int:
    curve = read_csv(args.infile)
    est = estimate_diversity(curve, window=args.ber_window)
    print(
        f"scheme={curve.scheme} n_tx={curve.n_tx} constellation={curve.constellation}\n"
        f"diversity slope = {est.slope:.4f}  (r^2 = {est.r_squared:.5f}, "
        f"{est.n_points} points, BER window [{est.window[0]:g}, {est.window[1]:g}])"
    )
    return 0


def _cmd_duality_check(args) -> int:
    """Property suites: SNR equivalence of dual systems and blind IC decoupling."""
    rng = stream_rng(args.seed, 0)
    n = args.n
    trials = args.trials

    worst_rel = 0.0
    worst_zf = 0.0
    for _ in range(trials):
        g = complex_normal(rng, (2, n))
        system, _ = alamouti_real_expansion(g, power=1.0)
        worst_zf = max(worst_zf, check_zf(system))
        for k in range(4):
            orig = snr_original(system, k)
            dual = snr_dual(system, k)
            worst_rel = max(worst_rel, abs(orig - dual) / orig)
    snr_ok = worst_rel <= 1e-9 and worst_zf <= 1e-10
    print(
        f"SNR duality: max relative SNR mismatch {worst_rel:.3e}, "
        f"max ZF residual {worst_zf:.3e} over {trials} systems "
        f"[{'PASS' if snr_ok else 'FAIL'}]"
    )

    qpsk = get_constellation("qpsk")
    batch = trials
    h1 = complex_normal(rng, (batch, n, 2))
    h2 = complex_normal(rng, (batch, n, 2))
    bits = rng.integers(0, 2, size=(batch, 8), dtype=np.uint8)
    s = modulate(bits, qpsk)
    pre = build_downlink_precoders(h1, h2)
    x = downlink_ic_tx(s[:, :2], s[:, 2:], h1, h2, 1.0, PowerAllocation.equal(), precoders=pre)
    leak = 0.0
    exact = True
    zeros = np.zeros((batch, 2), dtype=complex)
    for k, h in enumerate((h1, h2)):
        stats = downlink_ic_rx(x @ h)
        own = s[:, 2 * k : 2 * k + 2]
        coef = np.sqrt(pre.b[k]) / 2.0  # equal allocation, unit power budget
        err = float(np.max(np.abs(stats - coef[:, None] * own)))
        exact &= err <= 1e-8 * max(1.0, float(coef.max()))
        x_other = downlink_ic_tx(
            zeros if k == 0 else s[:, :2],
            s[:, 2:] if k == 0 else zeros,
            h1, h2, 1.0, PowerAllocation.equal(), precoders=pre,
        )
        leak = max(leak, float(np.max(np.abs(downlink_ic_rx(x_other @ h)))))
    ic_ok = exact and leak <= 1e-10
    print(
        f"blind IC decoupling: cross-user leakage {leak:.3e}, noiseless decoupling "
        f"{'exact' if exact else 'BROKEN'} over {batch} channels "
        f"[{'PASS' if ic_ok else 'FAIL'}]"
    )
    return 0 if (snr_ok and ic_ok) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zfdual",
        description="Link-level Monte Carlo toolkit for ZF-duality transmission schemes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="simulate a BER curve")
    ber.add_argument("--scheme", choices=None, help="transmission scheme")
    ber.add_argument("--n-tx", dest="n_tx", type=int, help="transmit antenna count")
    ber.add_argument("--constellation", help="bpsk | qpsk | 8psk | 16qam")
    ber.add_argument("--snr-db", dest="snr_db", type=_parse_grid, help="grid start:step:stop in dB")
    ber.add_argument("--min-errors", dest="min_errors", type=int, help="bit errors per point")
    ber.add_argument("--max-trials", dest="max_trials", type=int, help="max blocks per point")
    ber.add_argument("--seed", type=int, help="master seed")
    ber.add_argument("--workers", type=int, help="parallel workers")
    ber.add_argument("--out", help="CSV output path")
    ber.add_argument("--config", help="key=value config file (flags override)")
    ber.set_defaults(func=_cmd_ber)

    div = sub.add_parser("diversity", help="fit a diversity slope from a CSV curve")
    div.add_argument("--in", dest="infile", required=True, help="CSV written by 'ber'")
    div.add_argument(
        "--ber-window", dest="ber_window", type=_parse_window, default=(1e-5, 1e-3),
        help="BER fit window low:high",
    )
    div.set_defaults(func=_cmd_diversity)

    check = sub.add_parser("duality-check", help="run duality/decoupling property suites")
    check.add_argument("--trials", type=int, default=1000)
    check.add_argument("--n", type=int, default=2, help="antenna count")
    check.add_argument("--seed", type=int, default=7)
    check.set_defaults(func=_cmd_duality_check)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ZfdualError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
