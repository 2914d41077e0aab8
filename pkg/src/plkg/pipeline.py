"""Pipeline orchestration: probe -> clean -> eliminate -> quantize ->
evaluate -> amplify, plus parameter sweeps.

Elimination runs on the coordinator node's estimates only; the kept
probe-index set is treated as shared out of band (it leaks indices, never
CSI values), which keeps all nodes' bit streams aligned. Eve is assumed to
overhear that exchange, so her stream is aligned too.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from typing import Callable

from . import csi as csi_mod
from .channel import ALICE, BOB, EVE, run_session
from .config import PipelineConfig, config_to_mapping
from .csi import CsiEstimate, eliminate, reciprocity_stats, suppress_dc, variance_ratio
from .entropy import evaluate_stream
from .errors import PipelineError
from .keygen import agree
from .quantizer import BitStream, derive_sample_positions, quantize_session
from .report import SessionReport
from .trace import read_trace

# Sessions whose compression ratio leaves this band get an "off_paper" warning.
PAPER_RATIO_BAND = (0.1, 0.2)

# splitmix64 constants for per-point sweep seeds
_MASK64 = (1 << 64) - 1
SPLITMIX64_GAMMA = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    x = (x + SPLITMIX64_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * _MIX_1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX_2) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, *tokens: float) -> int:
    """Mix grid coordinates into the base seed, one splitmix64 round each."""
    x = base_seed & _MASK64
    for token in tokens:
        bits = struct.unpack("<Q", struct.pack("<d", float(token)))[0]
        x = splitmix64(x ^ bits)
    return x


@dataclass
class PipelineArtifacts:
    """Everything a run produced; the report is the exportable part."""

    report: SessionReport
    estimates: dict[str, list[CsiEstimate]]  # cleaned, pre-elimination
    kept: dict[str, list[CsiEstimate]]
    streams: dict[str, BitStream]


def _stage(name: str, fn: Callable, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def _estimates_from_simulation(cfg: PipelineConfig) -> dict[str, list[CsiEstimate]]:
    triples = run_session(cfg.channel, cfg.duration_s, cfg.probe_interval_ms)
    out: dict[str, list[CsiEstimate]] = {ALICE: [], BOB: [], EVE: []}
    for alice, bob, eve in triples:
        out[ALICE].append(CsiEstimate.from_observation(alice))
        out[BOB].append(CsiEstimate.from_observation(bob))
        out[EVE].append(CsiEstimate.from_observation(eve))
    return out


def _clean(per_node: dict[str, list[CsiEstimate]], cfg: PipelineConfig) -> dict[str, list[CsiEstimate]]:
    if not cfg.dc_repair:
        return per_node
    cleaned: dict[str, list[CsiEstimate]] = {}
    for node, estimates in per_node.items():
        repaired = []
        for est in estimates:
            center = len(est.magnitudes) // 2
            repaired.append(suppress_dc(est, center, cfg.dc_repair_window))
        cleaned[node] = repaired
    return cleaned


def _common_probes(per_node: dict[str, list[CsiEstimate]]) -> dict[str, list[CsiEstimate]]:
    """Restrict every node to the probe indices all nodes share."""
    index_sets = [{e.probe_index for e in ests} for ests in per_node.values()]
    common = set.intersection(*index_sets) if index_sets else set()
    return {
        node: [e for e in ests if e.probe_index in common]
        for node, ests in per_node.items()
    }


def execute(cfg: PipelineConfig) -> PipelineArtifacts:
    """Run the full pipeline and assemble the session report."""
    warnings: list[str] = []

    if cfg.trace is not None:
        source = "trace"
        header, raw = _stage("probe", read_trace, cfg.trace)
        if not raw:
            raise PipelineError("probe", ValueError("trace contains no rows"))
    else:
        source = "simulation"
        raw = _stage("probe", _estimates_from_simulation, cfg)

    cleaned = _stage("clean", _clean, raw, cfg)
    cleaned = _common_probes(cleaned)
    probes_total = len(next(iter(cleaned.values()))) if cleaned else 0

    if cfg.coordinator not in cleaned:
        raise PipelineError("eliminate", ValueError(f"missing node {cfg.coordinator!r} (coordinator)"))
    kept_coord, dropped = _stage("eliminate", eliminate, cleaned[cfg.coordinator], cfg.elimination)
    kept_indices = {e.probe_index for e in kept_coord}
    kept = {
        node: [e for e in ests if e.probe_index in kept_indices]
        for node, ests in cleaned.items()
    }
    dropped_low_snr = sum(1 for d in dropped if d.reason == csi_mod.DROP_LOW_SNR)
    dropped_static = sum(1 for d in dropped if d.reason == csi_mod.DROP_STATIC)

    reciprocity = None
    if ALICE in cleaned and BOB in cleaned:
        reciprocity = _stage("reciprocity", reciprocity_stats, cleaned[ALICE], cleaned[BOB])
    elif len(cleaned) == 1:
        raise PipelineError(
            "reciprocity",
            ValueError(f"missing node: only {next(iter(cleaned))!r} present, two-node statistics need alice and bob"),
        )

    vratio = None
    if source == "simulation" and cfg.channel.fading.doppler_mode == "dynamic" and cfg.static_baseline:
        vratio = _stage("variance_baseline", _static_baseline_ratio, cfg, cleaned)

    streams, quantized_bits = _stage("quantize", _quantize_nodes, kept, cfg)

    bias_report = compression = None
    coord_stream = streams.get(cfg.coordinator)
    if coord_stream is not None and len(coord_stream) > 0:
        evaluation = _stage("evaluate", evaluate_stream, coord_stream, cfg.bias_tolerance)
        bias_report, compression = evaluation.bias, evaluation.compression
        if not bias_report.passed:
            warnings.append(f"bias_outside_tolerance: ones_fraction={bias_report.ones_fraction!r}")
        lo, hi = PAPER_RATIO_BAND
        if not lo <= compression.ratio <= hi:
            warnings.append(f"compression_ratio_off_paper: ratio={compression.ratio!r} outside [{lo}, {hi}]")
    else:
        warnings.append("no_kept_estimates: elimination removed every probe")

    agreement = None
    if ALICE in streams and BOB in streams and compression is not None:
        agreement = _stage(
            "amplify",
            agree,
            streams[ALICE],
            streams[BOB],
            streams.get(EVE),
            compression.entropy_upper_bound_bits,
        )
        if any(k.low_entropy_warning for k in agreement.keys.values()):
            bound = compression.entropy_upper_bound_bits
            warnings.append(f"low_entropy: bound {bound} bits is below the 256-bit key length")

    report = SessionReport(
        config=config_to_mapping(cfg),
        source=source,
        probes_total=probes_total,
        kept_count=len(kept_coord),
        dropped_low_snr=dropped_low_snr,
        dropped_static=dropped_static,
        coordinator=cfg.coordinator,
        reciprocity=reciprocity,
        variance_ratio=vratio,
        quantized_bits=quantized_bits,
        bias=bias_report,
        compression=compression,
        agreement=agreement,
        warnings=warnings,
    )
    return PipelineArtifacts(report=report, estimates=cleaned, kept=kept, streams=streams)


def run_pipeline(cfg: PipelineConfig) -> SessionReport:
    return execute(cfg).report


def _quantize_nodes(
    kept: dict[str, list[CsiEstimate]], cfg: PipelineConfig
) -> tuple[dict[str, BitStream], dict[str, int]]:
    qcfg = cfg.quantizer
    if qcfg.sample_positions is None:
        some = next((ests for ests in kept.values() if ests), None)
        if some is not None:
            n = len(some[0].magnitudes)
            exclude_lo = exclude_hi = None
            if cfg.dc_repair:
                center = n // 2
                exclude_lo, exclude_hi = center - cfg.dc_repair_window, center + cfg.dc_repair_window
            positions = derive_sample_positions(n, qcfg.samples_per_estimate, exclude_lo, exclude_hi)
            qcfg = replace(qcfg, sample_positions=positions)
    streams = {node: quantize_session(ests, qcfg) for node, ests in kept.items()}
    return streams, {node: len(s) for node, s in streams.items()}


def _static_baseline_ratio(cfg: PipelineConfig, cleaned_dynamic: dict[str, list[CsiEstimate]]) -> float | None:
    """Same-seed static twin session, for the report's variance ratio."""
    if len(cleaned_dynamic.get(ALICE, ())) < 2:
        return None
    static_channel = replace(cfg.channel, fading=replace(cfg.channel.fading, doppler_mode="static"))
    static_cfg = replace(cfg, channel=static_channel, static_baseline=False)
    static_raw = _estimates_from_simulation(static_cfg)
    static_cleaned = _clean(static_raw, static_cfg)
    return variance_ratio(cleaned_dynamic[ALICE], static_cleaned[ALICE])


@dataclass
class SweepPoint:
    levels: int
    bits: int
    snr_db: float
    mode: str
    seed: int
    report: SessionReport | None
    error: str | None


@dataclass
class SweepResult:
    points: list[SweepPoint]

    def summary_rows(self) -> list[tuple]:
        """Table-1 layout: L, S, bits after quantization, bits after compression."""
        rows = []
        for p in self.points:
            if p.report is None or p.report.compression is None:
                rows.append((p.levels, p.bits, None, None))
            else:
                rows.append(
                    (
                        p.levels,
                        p.bits,
                        p.report.compression.input_bits,
                        p.report.compression.output_bits,
                    )
                )
        return rows

    def to_csv(self) -> str:
        lines = ["L,S,bits_after_quantization,bits_after_compression"]
        for levels, bits, quantized, compressed in self.summary_rows():
            q = "" if quantized is None else str(quantized)
            c = "" if compressed is None else str(compressed)
            lines.append(f"{levels},{bits},{q},{c}")
        return "\n".join(lines) + "\n"


def sweep(
    base: PipelineConfig,
    levels: list[int] | None = None,
    bits: list[int] | None = None,
    snrs: list[float] | None = None,
    modes: list[str] | None = None,
) -> SweepResult:
    """One pipeline run per grid point; failures are recorded, not raised.

    Per-point seeds are base rng_seed mixed with the point's (L, S, snr,
    mode) coordinates through splitmix64, so points are independent yet
    reproducible.
    """
    levels = levels or [base.quantizer.levels_L]
    bits = bits or [base.quantizer.bits_per_estimate_S]
    snrs = snrs if snrs is not None else [base.channel.impairments.snr_db]
    modes = modes or [base.channel.fading.doppler_mode]
    if not (levels and bits and snrs and modes):
        raise ValueError("sweep grid must be nonempty")

    points: list[SweepPoint] = []
    for mode in modes:
        for snr in snrs:
            for lv in levels:
                for s in bits:
                    seed = derive_seed(
                        base.channel.fading.rng_seed, lv, s, snr, float(modes.index(mode))
                    )
                    cfg = point_config(base, lv, s, snr, mode, seed)
                    try:
                        rpt = run_pipeline(cfg)
                        points.append(SweepPoint(lv, s, snr, mode, seed, rpt, None))
                    except Exception as exc:
                        points.append(SweepPoint(lv, s, snr, mode, seed, None, str(exc)))
    return SweepResult(points)


def point_config(
    base: PipelineConfig, levels: int, bits: int, snr_db: float, mode: str, seed: int
) -> PipelineConfig:
    channel = replace(
        base.channel,
        fading=replace(base.channel.fading, doppler_mode=mode, rng_seed=seed),
        impairments=replace(base.channel.impairments, snr_db=snr_db),
    )
    quantizer = replace(base.quantizer, levels_L=levels, bits_per_estimate_S=bits)
    return replace(base, channel=channel, quantizer=quantizer)
