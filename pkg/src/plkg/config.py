"""Flat key-value configuration for the whole pipeline.

Config files are plain text, one `key = value` per line, '#' comments; keys
mirror the field names of the underlying dataclasses. CLI flags carry the
same keys and win over file values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .channel import (
    NODES,
    ChannelConfig,
    EvePlacement,
    FadingConfig,
    ImpairmentConfig,
    OfdmConfig,
    TddPattern,
)
from .csi import EliminationPolicy
from .errors import ConfigError
from .quantizer import QuantizerConfig


@dataclass(frozen=True)
class PipelineConfig:
    channel: ChannelConfig = ChannelConfig()
    duration_s: float = 5.0
    probe_interval_ms: float = 10.0
    quantizer: QuantizerConfig = QuantizerConfig()
    elimination: EliminationPolicy = EliminationPolicy()
    dc_repair: bool = True
    dc_repair_window: int = 1
    bias_tolerance: float = 0.05
    coordinator: str = "alice"
    static_baseline: bool = True
    trace: str | None = None

    def __post_init__(self):
        if self.coordinator not in NODES:
            raise ConfigError(f"coordinator must be one of {NODES}")
        if self.duration_s < 0:
            raise ConfigError("duration_s must be nonnegative")
        if self.probe_interval_ms <= 0:
            raise ConfigError("probe_interval_ms must be positive")
        if self.dc_repair_window < 1:
            raise ConfigError("dc_repair_window must be >= 1")
        if not 0 <= self.bias_tolerance <= 0.5:
            raise ConfigError("bias_tolerance must be in [0, 0.5]")


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected true/false, got {text!r}")


def _str(text: str) -> str:
    return text


def _profile(text: str) -> tuple[float, ...] | None:
    if text.lower() == "auto":
        return None
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"expected 'auto' or comma-separated powers, got {text!r}") from None


def _opt_str(text: str) -> str | None:
    return None if text.lower() == "none" else text


def _render(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    return str(value)


# key -> parser; order here is the canonical order of echoes and docs
CONFIG_KEYS: dict[str, Callable[[str], object]] = {
    "bandwidth_hz": _float,
    "subcarrier_spacing_hz": _float,
    "num_subcarriers": _int,
    "center_frequency_hz": _float,
    "period_ms": _float,
    "uplink_ms": _float,
    "downlink_ms": _float,
    "guard_ms": _float,
    "num_taps": _int,
    "tap_power_profile": _profile,
    "coherence_time_ms": _float,
    "doppler_mode": _str,
    "rng_seed": _int,
    "snr_db": _float,
    "dc_offset_magnitude": _float,
    "dc_offset_node": _str,
    "hardware_asymmetry_db": _float,
    "probe_timing_offset_ms": _float,
    "distance_fraction_of_wavelength": _float,
    "duration_s": _float,
    "probe_interval_ms": _float,
    "levels_L": _int,
    "width_rule": _str,
    "bits_per_estimate_S": _int,
    "min_snr_proxy_db": _float,
    "min_temporal_delta": _float,
    "dc_repair": _bool,
    "dc_repair_window": _int,
    "bias_tolerance": _float,
    "coordinator": _str,
    "static_baseline": _bool,
    "trace": _opt_str,
}


def config_to_plain(cfg: PipelineConfig) -> dict[str, object]:
    ch = cfg.channel
    return {
        "bandwidth_hz": ch.ofdm.bandwidth_hz,
        "subcarrier_spacing_hz": ch.ofdm.subcarrier_spacing_hz,
        "num_subcarriers": ch.ofdm.num_subcarriers,
        "center_frequency_hz": ch.ofdm.center_frequency_hz,
        "period_ms": ch.tdd.period_ms,
        "uplink_ms": ch.tdd.uplink_ms,
        "downlink_ms": ch.tdd.downlink_ms,
        "guard_ms": ch.tdd.guard_ms,
        "num_taps": ch.fading.num_taps,
        "tap_power_profile": ch.fading.tap_power_profile,
        "coherence_time_ms": ch.fading.coherence_time_ms,
        "doppler_mode": ch.fading.doppler_mode,
        "rng_seed": ch.fading.rng_seed,
        "snr_db": ch.impairments.snr_db,
        "dc_offset_magnitude": ch.impairments.dc_offset_magnitude,
        "dc_offset_node": ch.impairments.dc_offset_node,
        "hardware_asymmetry_db": ch.impairments.hardware_asymmetry_db,
        "probe_timing_offset_ms": ch.impairments.probe_timing_offset_ms,
        "distance_fraction_of_wavelength": ch.eve.distance_fraction_of_wavelength,
        "duration_s": cfg.duration_s,
        "probe_interval_ms": cfg.probe_interval_ms,
        "levels_L": cfg.quantizer.levels_L,
        "width_rule": cfg.quantizer.width_rule,
        "bits_per_estimate_S": cfg.quantizer.bits_per_estimate_S,
        "min_snr_proxy_db": cfg.elimination.min_snr_proxy_db,
        "min_temporal_delta": cfg.elimination.min_temporal_delta,
        "dc_repair": cfg.dc_repair,
        "dc_repair_window": cfg.dc_repair_window,
        "bias_tolerance": cfg.bias_tolerance,
        "coordinator": cfg.coordinator,
        "static_baseline": cfg.static_baseline,
        "trace": cfg.trace,
    }


def config_to_mapping(cfg: PipelineConfig) -> dict[str, str]:
    """Flat string echo of a config, in canonical key order."""
    return {k: _render(v) for k, v in config_to_plain(cfg).items()}


def config_from_mapping(values: Mapping[str, str]) -> PipelineConfig:
    """Build a PipelineConfig from defaults plus flat string overrides."""
    plain = config_to_plain(PipelineConfig())
    for key, text in values.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            plain[key] = CONFIG_KEYS[key](text)
        except ConfigError as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from None
    return _assemble(plain)


def _assemble(p: dict[str, object]) -> PipelineConfig:
    channel = ChannelConfig(
        ofdm=OfdmConfig(
            bandwidth_hz=p["bandwidth_hz"],
            subcarrier_spacing_hz=p["subcarrier_spacing_hz"],
            num_subcarriers=p["num_subcarriers"],
            center_frequency_hz=p["center_frequency_hz"],
        ),
        tdd=TddPattern(
            period_ms=p["period_ms"],
            uplink_ms=p["uplink_ms"],
            downlink_ms=p["downlink_ms"],
            guard_ms=p["guard_ms"],
        ),
        fading=FadingConfig(
            num_taps=p["num_taps"],
            tap_power_profile=p["tap_power_profile"],
            coherence_time_ms=p["coherence_time_ms"],
            doppler_mode=p["doppler_mode"],
            rng_seed=p["rng_seed"],
        ),
        impairments=ImpairmentConfig(
            snr_db=p["snr_db"],
            dc_offset_magnitude=p["dc_offset_magnitude"],
            dc_offset_node=p["dc_offset_node"],
            hardware_asymmetry_db=p["hardware_asymmetry_db"],
            probe_timing_offset_ms=p["probe_timing_offset_ms"],
        ),
        eve=EvePlacement(distance_fraction_of_wavelength=p["distance_fraction_of_wavelength"]),
    )
    return PipelineConfig(
        channel=channel,
        duration_s=p["duration_s"],
        probe_interval_ms=p["probe_interval_ms"],
        quantizer=QuantizerConfig(
            levels_L=p["levels_L"],
            width_rule=p["width_rule"],
            bits_per_estimate_S=p["bits_per_estimate_S"],
        ),
        elimination=EliminationPolicy(
            min_snr_proxy_db=p["min_snr_proxy_db"],
            min_temporal_delta=p["min_temporal_delta"],
        ),
        dc_repair=p["dc_repair"],
        dc_repair_window=p["dc_repair_window"],
        bias_tolerance=p["bias_tolerance"],
        coordinator=p["coordinator"],
        static_baseline=p["static_baseline"],
        trace=p["trace"],
    )


def load_config_file(path: str) -> dict[str, str]:
    """Parse `key = value` lines; unknown keys fail later, at assembly."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values
