"""Bit stream evaluation: bias test and LZW-based entropy upper bound.

The LZW variant is fixed so the entropy bound is reproducible bit for bit:
binary alphabet (dictionary seeded with "0" and "1"), greedy longest-match
parsing, unbounded dictionary, no reset codes. Each emitted code is charged
ceil(log2 D) bits where D is the dictionary size at emission time; the
dictionary then grows by matched-string + next-bit. The compressed size is
the sum of charged widths and upper-bounds the stream's entropy. Dictionary
and header overhead is excluded from the count, and reports say so.

Decompression is deliberately not part of the package; the test suite keeps
an independent reference implementation (including a decoder) as the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .quantizer import BitStream

DEFAULT_BIAS_TOLERANCE = 0.05


@dataclass(frozen=True)
class BiasReport:
    ones_fraction: float
    n_bits: int
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class CompressionReport:
    input_bits: int
    output_bits: int
    num_codes: int
    ratio: float
    entropy_upper_bound_bits: int
    includes_dictionary_overhead: bool = False


@dataclass(frozen=True)
class StreamEvaluation:
    bias: BiasReport
    compression: CompressionReport


def bias(bits: BitStream, tolerance: float = DEFAULT_BIAS_TOLERANCE) -> BiasReport:
    """Fraction of ones; passes when within tolerance of 1/2."""
    n = len(bits)
    if n == 0:
        raise ValueError("bias test rejects an empty stream")
    ones = int(bits.bits.sum())
    fraction = ones / n
    return BiasReport(fraction, n, tolerance, abs(fraction - 0.5) <= tolerance)


def _lzw_output_bits(text: str) -> tuple[int, int]:
    """(num_codes, charged output bits) of the fixed LZW variant."""
    table = {"0": 0, "1": 1}
    current = ""
    num_codes = 0
    out_bits = 0
    for ch in text:
        extended = current + ch
        if extended in table:
            current = extended
            continue
        out_bits += (len(table) - 1).bit_length()  # width = ceil(log2 size)
        num_codes += 1
        table[extended] = len(table)
        current = ch
    out_bits += (len(table) - 1).bit_length()
    num_codes += 1
    return num_codes, out_bits


def lzw_compress_size(bits: BitStream) -> CompressionReport:
    """Compressed size in bits; reported as the stream's entropy upper bound."""
    n = len(bits)
    if n == 0:
        raise ValueError("LZW rejects an empty stream")
    num_codes, out_bits = _lzw_output_bits(bits.to01())
    return CompressionReport(
        input_bits=n,
        output_bits=out_bits,
        num_codes=num_codes,
        ratio=out_bits / n,
        entropy_upper_bound_bits=out_bits,
    )


def evaluate_stream(bits: BitStream, bias_tolerance: float = DEFAULT_BIAS_TOLERANCE) -> StreamEvaluation:
    return StreamEvaluation(bias(bits, bias_tolerance), lzw_compress_size(bits))
