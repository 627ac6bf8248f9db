"""Link-level toolkit for zero-forcing duality transmission schemes.

Library layout:

* :mod:`zfdual.linalg` - small complex linear algebra and Alamouti helpers
* :mod:`zfdual.channel` - block-fading draws, AWGN, seeded RNG streams
* :mod:`zfdual.modulation` - Gray-mapped constellations and ML detection
* :mod:`zfdual.duality` - ZF filter-bank duality and the real Alamouti expansion
* :mod:`zfdual.p2p` - Alamouti, transmit-side dual Alamouti, SVD beamforming
* :mod:`zfdual.uplink` - two-user uplink interference cancellation
* :mod:`zfdual.downlink` - two-user downlink IC precoding and power allocation
* :mod:`zfdual.bc` - block diagonalization and opportunistic TDMA baselines
* :mod:`zfdual.sim` - Monte Carlo BER engine, diversity fits, CSV output
"""

from .bc import BDPrecoders, TdmaDecision, bd_precoders, bd_round, tdma_round
from .channel import ChannelPair, add_awgn, complex_normal, sample_channel_pair, stream_rng
from .downlink import (
    DownlinkPrecoders,
    PowerAllocation,
    build_downlink_precoders,
    build_ic_matrices,
    build_symbol_sep_precoder,
    build_user_sep_precoder,
    downlink_gain,
    downlink_ic_rx,
    downlink_ic_tx,
    htilde_stack,
    optimal_power_alloc,
    user_snr_b,
    user_snr_b_trace,
)
from .duality import (
    LinearZFSystem,
    RealExpansion,
    alamouti_real_expansion,
    check_zf,
    dualize,
    snr_dual,
    snr_original,
)
from .errors import (
    ConfigError,
    DegenerateChannel,
    InsufficientData,
    NotZFSystem,
    SingularMatrix,
    UnsupportedConstellation,
    ZfdualError,
)
from .linalg import (
    alamouti_channel_stack,
    alamouti_embed,
    conjugate_stack,
    fro_norm,
    hermitian,
    is_alamouti,
    matmul,
    solve_hpd,
)
from .modulation import (
    Constellation,
    demap,
    detect_blind_psk,
    detect_coherent,
    get_constellation,
    modulate,
)
from .p2p import (
    P2PDecision,
    alamouti_rx,
    alamouti_tx,
    dual_alamouti_rx,
    dual_alamouti_tx,
    svd_baseline_round,
)
from .sim import (
    BerCurve,
    BerPoint,
    DiversityEstimate,
    SimConfig,
    estimate_diversity,
    read_csv,
    run_ber,
    snr_at_ber,
    snr_grid,
    write_csv,
)
from .uplink import (
    UplinkFilters,
    build_sym_sep,
    build_uplink_filters,
    build_user_sep,
    uplink_ic_receive,
    uplink_snr_b,
)

__version__ = "0.1.0"
