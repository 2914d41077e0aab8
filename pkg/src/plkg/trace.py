"""Line-oriented text trace format for recorded or simulated CSI.

Layout: a fixed header block, then one row per (probe, node, subcarrier):

    plkg-trace 1
    num_subcarriers 612
    probe_interval_ms 1.00000000e+01
    center_frequency_hz 3.75000000e+09
    end_header
    0 alice 0.00000000e+00 0 9.33310936e-01
    ...

Rows are sorted by (probe_index, node, subcarrier_index) and every
(probe_index, node) group carries exactly num_subcarriers rows. Magnitudes
and timestamps are serialized in scientific notation with 9 significant
digits; text was chosen over binary so traces diff cleanly and can be
hand-edited in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .channel import NODES, RawObservation
from .csi import CsiEstimate
from .errors import TraceFormatError

TRACE_MAGIC = "plkg-trace"
TRACE_VERSION = 1

_HEADER_FIELDS = ("num_subcarriers", "probe_interval_ms", "center_frequency_hz")


@dataclass(frozen=True)
class TraceHeader:
    num_subcarriers: int
    probe_interval_ms: float
    center_frequency_hz: float
    format_version: int = TRACE_VERSION


def write_trace(path: str, observations: Iterable[RawObservation], header: TraceHeader) -> None:
    obs = sorted(observations, key=lambda o: (o.probe_index, o.node))
    with open(path, "w", encoding="ascii") as f:
        _write_header(f, header)
        for o in obs:
            if len(o.magnitudes) != header.num_subcarriers:
                raise ValueError(
                    f"observation (probe {o.probe_index}, {o.node}) has "
                    f"{len(o.magnitudes)} magnitudes, header says {header.num_subcarriers}"
                )
            t = f"{o.timestamp_ms:.8e}"
            for idx, mag in enumerate(o.magnitudes):
                f.write(f"{o.probe_index} {o.node} {t} {idx} {mag:.8e}\n")


def _write_header(f: TextIO, header: TraceHeader) -> None:
    f.write(f"{TRACE_MAGIC} {header.format_version}\n")
    f.write(f"num_subcarriers {header.num_subcarriers}\n")
    f.write(f"probe_interval_ms {header.probe_interval_ms:.8e}\n")
    f.write(f"center_frequency_hz {header.center_frequency_hz:.8e}\n")
    f.write("end_header\n")


def read_trace(path: str) -> tuple[TraceHeader, dict[str, list[CsiEstimate]]]:
    """Parse and validate a trace; returns the header and per-node estimates.

    Raises TraceFormatError naming the offending line (and, for row-count
    violations, the (probe, node) group).
    """
    with open(path, "r", encoding="ascii") as f:
        lines = f.read().splitlines()
    header, body_start = _parse_header(lines)
    n = header.num_subcarriers

    per_node: dict[str, list[CsiEstimate]] = {}
    group_key: tuple[int, str] | None = None
    group_mags: list[float] = []
    group_time: float | None = None
    last_row_key: tuple[int, str, int] | None = None

    def close_group(lineno: int) -> None:
        if group_key is None:
            return
        probe, node = group_key
        if len(group_mags) != n:
            raise TraceFormatError(
                f"group (probe {probe}, {node}) has {len(group_mags)} rows, expected {n}",
                line=lineno,
            )
        per_node.setdefault(node, []).append(CsiEstimate.from_magnitudes(probe, node, group_mags))

    for lineno in range(body_start, len(lines)):
        line = lines[lineno].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise TraceFormatError(f"expected 5 fields, got {len(fields)}", line=lineno + 1)
        try:
            probe = int(fields[0])
            node = fields[1]
            timestamp = float(fields[2])
            subcarrier = int(fields[3])
            magnitude = float(fields[4])
        except ValueError as exc:
            raise TraceFormatError(f"unparseable row: {exc}", line=lineno + 1) from None
        if node not in NODES:
            raise TraceFormatError(f"unknown node {node!r}", line=lineno + 1)
        if probe < 0 or not 0 <= subcarrier < n:
            raise TraceFormatError(
                f"indices out of range (probe {probe}, subcarrier {subcarrier})", line=lineno + 1
            )
        if magnitude < 0 or not np.isfinite(magnitude):
            raise TraceFormatError(f"invalid magnitude {fields[4]}", line=lineno + 1)
        row_key = (probe, node, subcarrier)
        if last_row_key is not None and row_key <= last_row_key:
            raise TraceFormatError(
                f"rows not sorted by (probe_index, node, subcarrier_index): "
                f"{row_key} after {last_row_key}",
                line=lineno + 1,
            )
        last_row_key = row_key
        if group_key != (probe, node):
            close_group(lineno)
            group_key = (probe, node)
            group_mags = []
            group_time = timestamp
        elif group_time != timestamp:
            raise TraceFormatError(
                f"timestamp changes within group (probe {probe}, {node})", line=lineno + 1
            )
        group_mags.append(magnitude)
    close_group(len(lines))
    return header, per_node


def _parse_header(lines: list[str]) -> tuple[TraceHeader, int]:
    if not lines:
        raise TraceFormatError("empty file", line=1)
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != TRACE_MAGIC:
        raise TraceFormatError(f"not a {TRACE_MAGIC} file", line=1)
    try:
        version = int(magic[1])
    except ValueError:
        raise TraceFormatError(f"bad version field {magic[1]!r}", line=1) from None
    if version != TRACE_VERSION:
        raise TraceFormatError(f"version mismatch: file is v{version}, reader supports v{TRACE_VERSION}", line=1)
    values: dict[str, str] = {}
    for lineno in range(1, len(lines)):
        line = lines[lineno].strip()
        if line == "end_header":
            missing = [k for k in _HEADER_FIELDS if k not in values]
            if missing:
                raise TraceFormatError(f"header missing {missing}", line=lineno + 1)
            try:
                header = TraceHeader(
                    num_subcarriers=int(values["num_subcarriers"]),
                    probe_interval_ms=float(values["probe_interval_ms"]),
                    center_frequency_hz=float(values["center_frequency_hz"]),
                    format_version=version,
                )
            except ValueError as exc:
                raise TraceFormatError(f"bad header value: {exc}") from None
            if header.num_subcarriers < 1:
                raise TraceFormatError("num_subcarriers must be positive")
            return header, lineno + 1
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0] not in _HEADER_FIELDS:
            raise TraceFormatError(f"unexpected header line {line!r}", line=lineno + 1)
        values[parts[0]] = parts[1]
    raise TraceFormatError("header never terminated with end_header", line=len(lines))


def observations_from_triples(triples) -> list[RawObservation]:
    """Flatten session output into a writable row source."""
    return [obs for triple in triples for obs in triple]
