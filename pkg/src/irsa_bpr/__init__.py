"""IRSA with BPR codebooks over the noiseless binary adder channel.

Codebook construction (:mod:`.bpr` on top of :mod:`.field`), the IRSA frame
encoder (:mod:`.encoding`), the adder channel (:mod:`.channel`), iterative SIC
decoding (:mod:`.sic`), density evolution and sum-rate bounds
(:mod:`.asymptotics`) and a seeded Monte Carlo harness (:mod:`.harness`).
"""
from .asymptotics import (
    DeConfig,
    achievable_sum_rate,
    asymptotic_plr,
    avg_sum_rate,
    bpr_rate,
    converse_G,
    converse_sum_rate,
    de_run,
    de_step,
    load_threshold,
)
from .bpr import BlockObservation, BprCode, bpr_decode, build_code, encode_message
from .channel import FrameSignal, slot_occupancy, transmit
from .encoding import (
    FrameCodeword,
    IrsaBprScheme,
    IrsaDistribution,
    combinadic_decompose,
    combinadic_rank,
    degree_from_message,
    encode_frame,
    positions_from_message,
)
from .field import FieldContext, binary_image, make_field
from .harness import SimConfig, SimReport, run_sweep, run_trial, simulate
from .sic import DecodeResult, empirical_C, peel, per_user_errors, sic_decode

__version__ = "0.1.0"
