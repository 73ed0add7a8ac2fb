"""Polar-code codec with bit- and symbol-decision SC decoding and a
Monte Carlo FER/BER harness, served over a small HTTP API."""

from .channels import ChannelObservation, ChannelSpec, frame_rng, transmit
from .core import (
    BitBlock,
    InputError,
    ParameterError,
    PolarCode,
    bit_reversal_permutation,
    construct,
    encode,
    load_code,
    make_code,
    polar_transform,
    save_code,
)
from .decoders import (
    ConfigError,
    DecodeResult,
    DecoderConfig,
    SegmentErrorStats,
    genie_segment_rates,
    ml_decode,
    sc_bit_decode,
    sc_symbol_decode,
)
from .patterns import classify_patterns, classify_tree, count_dp2, pattern_class
from .sim import DecoderSetting, SimPlan, SimRecord, paired_ordering_report, run, write_csv

__version__ = "0.1.0"

__all__ = [
    "BitBlock",
    "ChannelObservation",
    "ChannelSpec",
    "ConfigError",
    "DecodeResult",
    "DecoderConfig",
    "DecoderSetting",
    "InputError",
    "ParameterError",
    "PolarCode",
    "SegmentErrorStats",
    "SimPlan",
    "SimRecord",
    "bit_reversal_permutation",
    "classify_patterns",
    "classify_tree",
    "construct",
    "count_dp2",
    "encode",
    "frame_rng",
    "genie_segment_rates",
    "load_code",
    "make_code",
    "ml_decode",
    "paired_ordering_report",
    "pattern_class",
    "polar_transform",
    "run",
    "save_code",
    "sc_bit_decode",
    "sc_symbol_decode",
    "transmit",
    "write_csv",
]
