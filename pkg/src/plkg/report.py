"""Session reports: a flat, machine-parseable key/value tree.

A report embeds the full config echo (including the seed), so re-running
from the embedded values reproduces every numeric field bit-exactly; floats
are rendered with repr for lossless round-trips. No wall-clock state enters
a report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import PipelineConfig, config_from_mapping, config_to_mapping
from .csi import ReciprocityStats
from .entropy import BiasReport, CompressionReport
from .keygen import AgreementResult

REPORT_VERSION = 1


def _fmt(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class SessionReport:
    config: dict[str, str]  # flat echo, canonical order
    source: str  # "simulation" | "trace"
    probes_total: int
    kept_count: int
    dropped_low_snr: int
    dropped_static: int
    coordinator: str
    reciprocity: ReciprocityStats | None
    variance_ratio: float | None
    quantized_bits: dict[str, int]
    bias: BiasReport | None
    compression: CompressionReport | None
    agreement: AgreementResult | None
    warnings: list[str] = field(default_factory=list)


def render_report(r: SessionReport) -> str:
    lines: list[str] = [f"plkg_report.version = {REPORT_VERSION}"]
    for key, value in r.config.items():
        lines.append(f"config.{key} = {value}")
    lines.append(f"source = {r.source}")
    lines.append(f"probes.total = {r.probes_total}")
    lines.append(f"probes.kept = {r.kept_count}")
    lines.append(f"probes.dropped_low_snr = {r.dropped_low_snr}")
    lines.append(f"probes.dropped_static = {r.dropped_static}")
    lines.append(f"probes.coordinator = {r.coordinator}")
    if r.reciprocity is not None:
        lines.append(f"reciprocity.min = {_fmt(r.reciprocity.min)}")
        lines.append(f"reciprocity.mean = {_fmt(r.reciprocity.mean)}")
        lines.append(f"reciprocity.max = {_fmt(r.reciprocity.max)}")
        lines.append(f"reciprocity.undefined_count = {r.reciprocity.undefined_count}")
    lines.append(f"variance_ratio = {_fmt(r.variance_ratio)}")
    for node in sorted(r.quantized_bits):
        lines.append(f"quantized.{node}_bits = {r.quantized_bits[node]}")
    if r.bias is not None:
        lines.append(f"bias.ones_fraction = {_fmt(r.bias.ones_fraction)}")
        lines.append(f"bias.n_bits = {r.bias.n_bits}")
        lines.append(f"bias.tolerance = {_fmt(r.bias.tolerance)}")
        lines.append(f"bias.passed = {_fmt(r.bias.passed)}")
    if r.compression is not None:
        c = r.compression
        lines.append(f"compression.input_bits = {c.input_bits}")
        lines.append(f"compression.output_bits = {c.output_bits}")
        lines.append(f"compression.num_codes = {c.num_codes}")
        lines.append(f"compression.ratio = {_fmt(c.ratio)}")
        lines.append(f"compression.entropy_upper_bound_bits = {c.entropy_upper_bound_bits}")
        lines.append(f"compression.includes_dictionary_overhead = {_fmt(c.includes_dictionary_overhead)}")
    if r.agreement is not None:
        a = r.agreement
        lines.append(f"agreement.alice_bob.kdr = {_fmt(a.alice_bob.pre_hash_kdr)}")
        lines.append(f"agreement.alice_bob.keys_match = {_fmt(a.alice_bob.keys_match)}")
        if a.alice_eve is not None:
            lines.append(f"agreement.alice_eve.kdr = {_fmt(a.alice_eve.pre_hash_kdr)}")
        if a.bob_eve is not None:
            lines.append(f"agreement.bob_eve.kdr = {_fmt(a.bob_eve.pre_hash_kdr)}")
        for node in sorted(a.keys):
            k = a.keys[node]
            lines.append(f"keys.{node} = {k.hex}")
        any_key = next(iter(a.keys.values()))
        lines.append(f"keys.entropy_bound_bits = {any_key.entropy_bound_bits}")
        lines.append(f"keys.low_entropy_warning = {_fmt(any_key.low_entropy_warning)}")
    lines.append(f"warnings.count = {len(r.warnings)}")
    for i, w in enumerate(r.warnings):
        lines.append(f"warnings.{i} = {w}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, str]:
    """Flat dict of a rendered report; inverse of render_report's layout."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if " = " not in line:
            raise ValueError(f"report line {lineno} is not 'key = value': {line!r}")
        key, _, value = line.partition(" = ")
        values[key] = value
    return values


def config_from_report(text: str) -> PipelineConfig:
    """Rebuild the exact config a report was produced from."""
    parsed = parse_report(text)
    echo = {k.removeprefix("config."): v for k, v in parsed.items() if k.startswith("config.")}
    return config_from_mapping(echo)


__all__ = [
    "SessionReport",
    "render_report",
    "parse_report",
    "config_from_report",
    "config_to_mapping",
    "REPORT_VERSION",
]
