"""Transmit-side Alamouti: precode with CSIT, decode blindly with two adds.

Shows the scalar equivalent channel sqrt(P/2)*||H|| appearing at a receiver
that never sees the channel, and a quick Monte Carlo comparison of both
Alamouti variants plus the SVD beamforming bound at one SNR point.

Run:  python demos/02_dual_alamouti.py
"""

import numpy as np

from zfdual import (
    SimConfig,
    complex_normal,
    dual_alamouti_rx,
    dual_alamouti_tx,
    fro_norm,
    run_ber,
    stream_rng,
)

rng = stream_rng(7, 0)
h = complex_normal(rng, (4, 2))  # 4 transmit antennas, 2 receive antennas
power = 4.0
s = np.array([(1 + 1j) / np.sqrt(2), (1 - 1j) / np.sqrt(2)])

x = dual_alamouti_tx(s[0], s[1], h, power)
r = x @ h  # noiseless received block
dec = dual_alamouti_rx(r)

print("noiseless blind decoupling (no CSIR):")
print(f"  expected gain sqrt(P/2)*||H|| = {np.sqrt(power / 2) * fro_norm(h):.6f}")
print(f"  stats / symbols              = {np.round(dec.stats / s, 6)}")

print("\nBER at 10 dB, QPSK, 2x2 (same seed for every scheme):")
for scheme in ("alamouti", "dual-alamouti", "svd"):
    cfg = SimConfig(
        scheme=scheme, n_tx=2, constellation="qpsk", snr_db=(10.0,),
        min_bit_errors=2000, max_trials=2_000_000, master_seed=42,
    )
    point = run_ber(cfg).points[0]
    print(f"  {scheme:14s} ber = {point.ber:.4e}  (+-{point.ci95_halfwidth:.1e})")
print("the two Alamouti variants match; SVD with CSIT+CSIR sits ~2.5 dB ahead")
