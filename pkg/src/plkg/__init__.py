"""Physical-layer key generation over a simulated private-5G TDD channel."""

from .channel import (
    ALICE,
    BOB,
    EVE,
    NODES,
    ChannelConfig,
    EvePlacement,
    FadingConfig,
    ImpairmentConfig,
    LinkState,
    OfdmConfig,
    ProbeSession,
    RawObservation,
    TddPattern,
    channel_frequency_response,
    evolve_channel,
    run_session,
)
from .config import PipelineConfig, config_from_mapping, config_to_mapping, load_config_file
from .csi import (
    CsiEstimate,
    EliminationPolicy,
    ReciprocityStats,
    average_frames,
    eliminate,
    reciprocity_stats,
    suppress_dc,
    variance_ratio,
)
from .entropy import BiasReport, CompressionReport, bias, evaluate_stream, lzw_compress_size
from .errors import ConfigError, PipelineError, TraceFormatError
from .keygen import AgreementReport, AgreementResult, KeyMaterial, agree, amplify, key_disagreement_rate
from .pipeline import PipelineArtifacts, execute, run_pipeline, sweep
from .quantizer import (
    BitStream,
    LevelBoundaries,
    QuantizerConfig,
    boundaries_equal_width,
    boundaries_equiprobable,
    quantize_estimate,
    quantize_session,
)
from .report import SessionReport, config_from_report, parse_report, render_report
from .trace import TraceHeader, read_trace, write_trace

__version__ = "0.1.0"
