"""Command line interface: simulate, run, sweep, validate.

Every config key doubles as a flag (underscores become dashes); a config
file may be combined with flags, flags winning. Exit codes: 0 success,
2 configuration error, 3 I/O or trace-format error, 4 pipeline error.
"""

from __future__ import annotations

import argparse
import sys

from .channel import run_session
from .config import CONFIG_KEYS, config_from_mapping, load_config_file
from .errors import ConfigError, PipelineError, TraceFormatError
from .pipeline import execute, sweep
from .report import render_report
from .trace import TraceHeader, observations_from_triples, read_trace, write_trace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_PIPELINE = 4


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="flat key = value config file")
    for key in CONFIG_KEYS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=f"key_{key}", metavar="VALUE")


def _gather_config(args: argparse.Namespace):
    values: dict[str, str] = {}
    if args.config:
        values.update(load_config_file(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, f"key_{key}", None)
        if flag is not None:
            values[key] = flag  # flags win over the file
    return config_from_mapping(values)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plkg",
        description="Physical-layer key generation over a simulated private-5G TDD channel",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a CSI trace from the channel simulator")
    _add_config_flags(p_sim)
    p_sim.add_argument("--out", required=True, metavar="TRACE", help="trace file to write")

    p_run = sub.add_parser("run", help="run the full pipeline on a trace or a live simulation")
    _add_config_flags(p_run)
    p_run.add_argument("--report", metavar="FILE", help="write the report here instead of stdout")
    p_run.add_argument(
        "--insecure-debug-bits",
        metavar="FILE",
        help="export raw quantized bit streams (insecure; for debugging only)",
    )

    p_sweep = sub.add_parser("sweep", help="run a parameter grid and emit a summary table")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--levels", metavar="L1,L2,...", help="quantization level counts")
    p_sweep.add_argument("--bits", metavar="S1,S2,...", help="bits per estimate")
    p_sweep.add_argument("--snrs", metavar="DB1,DB2,...", help="SNR grid in dB")
    p_sweep.add_argument("--modes", metavar="M1,M2", help="doppler modes (dynamic,static)")
    p_sweep.add_argument("--out-dir", metavar="DIR", help="write one report per grid point here")
    p_sweep.add_argument("--summary", metavar="FILE", help="write the CSV summary here instead of stdout")

    p_val = sub.add_parser("validate", help="lint a trace file")
    p_val.add_argument("trace_path", metavar="TRACE")
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _gather_config(args)
    triples = run_session(cfg.channel, cfg.duration_s, cfg.probe_interval_ms)
    header = TraceHeader(
        num_subcarriers=cfg.channel.ofdm.num_subcarriers,
        probe_interval_ms=cfg.probe_interval_ms,
        center_frequency_hz=cfg.channel.ofdm.center_frequency_hz,
    )
    write_trace(args.out, observations_from_triples(triples), header)
    print(f"wrote {len(triples)} probes x 3 nodes to {args.out}")
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _gather_config(args)
    artifacts = execute(cfg)
    text = render_report(artifacts.report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if args.insecure_debug_bits:
        with open(args.insecure_debug_bits, "w", encoding="utf-8") as f:
            for node in sorted(artifacts.streams):
                f.write(f"{node} {artifacts.streams[node].to01()}\n")
        print(f"WARNING: raw quantized streams written to {args.insecure_debug_bits}", file=sys.stderr)
    return EXIT_OK


def _parse_list(text: str | None, cast):
    if text is None:
        return None
    try:
        return [cast(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"bad grid value: {exc}") from None


def _cmd_sweep(args: argparse.Namespace) -> int:
    import os

    cfg = _gather_config(args)
    result = sweep(
        cfg,
        levels=_parse_list(args.levels, int),
        bits=_parse_list(args.bits, int),
        snrs=_parse_list(args.snrs, float),
        modes=_parse_list(args.modes, str),
    )
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for p in result.points:
            if p.report is None:
                continue
            name = f"report_L{p.levels}_S{p.bits}_snr{p.snr_db:g}_{p.mode}.txt"
            with open(os.path.join(args.out_dir, name), "w", encoding="utf-8") as f:
                f.write(render_report(p.report))
    csv_text = result.to_csv()
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as f:
            f.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    failures = [p for p in result.points if p.error is not None]
    for p in failures:
        print(f"point L={p.levels} S={p.bits} snr={p.snr_db} {p.mode} failed: {p.error}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    header, per_node = read_trace(args.trace_path)
    probes = {len(ests) for ests in per_node.values()}
    print(
        f"ok: v{header.format_version}, {header.num_subcarriers} subcarriers, "
        f"nodes {sorted(per_node)} with {sorted(probes)} probes"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    commands = {
        "simulate": _cmd_simulate,
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
    }
    try:
        return commands[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TraceFormatError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    raise SystemExit(main())
