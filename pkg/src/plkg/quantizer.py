"""Multi-level quantization of CSI estimates into bit streams.

An estimate contributes S bits: k = ceil(S / b) subcarriers are sampled
(b = ceil(log2 L) Gray bits per sample) and the concatenated codes are
truncated to exactly S bits, so the session bit budget is S per kept
estimate regardless of L. Level edges come from the calibration population
(all kept estimates of one node, mean-normalized) under one of two rules:
equal-width intervals over [min, max], or empirical quantiles at k/L using
linear interpolation with plotting position h = (n+1)q. Edges are
right-exclusive: a value below the first edge maps to level 0, a value at
or above the last edge to level L-1.

The codebook is the reflected binary Gray code over b bits (first L codes
for non-power-of-two L), so a one-level misclassification flips exactly one
bit of that sample's code.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .csi import CsiEstimate
from .errors import ConfigError

MIN_LEVELS, MAX_LEVELS = 2, 16
MIN_BITS, MAX_BITS = 2, 16

WIDTH_RULES = ("equal_width", "equiprobable")


def bits_per_level(levels: int) -> int:
    """ceil(log2 L) without floating point."""
    return (levels - 1).bit_length()


def gray_code(value: int, width: int) -> tuple[int, ...]:
    g = value ^ (value >> 1)
    return tuple((g >> (width - 1 - i)) & 1 for i in range(width))


def make_codebook(levels: int) -> tuple[tuple[int, ...], ...]:
    width = bits_per_level(levels)
    return tuple(gray_code(i, width) for i in range(levels))


@dataclass(frozen=True)
class QuantizerConfig:
    levels_L: int = 4
    width_rule: str = "equal_width"
    bits_per_estimate_S: int = 3
    sample_positions: tuple[int, ...] | None = None  # None -> derived from the grid

    def __post_init__(self):
        if not MIN_LEVELS <= self.levels_L <= MAX_LEVELS:
            raise ConfigError(f"levels_L must be in [{MIN_LEVELS}, {MAX_LEVELS}]")
        if not MIN_BITS <= self.bits_per_estimate_S <= MAX_BITS:
            raise ConfigError(f"bits_per_estimate_S must be in [{MIN_BITS}, {MAX_BITS}]")
        if self.width_rule not in WIDTH_RULES:
            raise ConfigError(f"width_rule must be one of {WIDTH_RULES}")
        if self.sample_positions is not None:
            pos = self.sample_positions
            if len(pos) != self.samples_per_estimate:
                raise ConfigError(
                    f"need {self.samples_per_estimate} sample positions for "
                    f"L={self.levels_L}, S={self.bits_per_estimate_S}; got {len(pos)}"
                )
            if any(p < 0 for p in pos) or any(a >= b for a, b in zip(pos, pos[1:])):
                raise ConfigError("sample_positions must be strictly increasing and nonnegative")

    @property
    def bits_per_sample(self) -> int:
        return bits_per_level(self.levels_L)

    @property
    def samples_per_estimate(self) -> int:
        return -(-self.bits_per_estimate_S // self.bits_per_sample)


def derive_sample_positions(
    num_subcarriers: int,
    count: int,
    exclude_lo: int | None = None,
    exclude_hi: int | None = None,
) -> tuple[int, ...]:
    """Uniformly spaced subcarrier indices, skipping [exclude_lo, exclude_hi].

    Spacing the samples maximizes frequency separation and hence bit
    decorrelation.
    """
    if exclude_lo is None or exclude_hi is None:
        candidates = list(range(num_subcarriers))
    else:
        candidates = [i for i in range(num_subcarriers) if not exclude_lo <= i <= exclude_hi]
    if count > len(candidates):
        raise ConfigError(f"cannot place {count} sample positions on {len(candidates)} usable subcarriers")
    positions = [candidates[int((j + 0.5) * len(candidates) / count)] for j in range(count)]
    if len(set(positions)) != count:
        raise ConfigError("sample positions collide; grid too small for the requested bit count")
    return tuple(positions)


@dataclass(frozen=True)
class LevelBoundaries:
    """L-1 strictly increasing edges plus the Gray codebook for L levels."""

    edges: np.ndarray
    codebook: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if len(edges) + 1 != len(self.codebook):
            raise ValueError("need exactly L-1 edges for L codebook entries")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be strictly increasing")
        width = len(self.codebook[0])
        if any(len(c) != width for c in self.codebook):
            raise ValueError("codebook entries must share one width")
        object.__setattr__(self, "edges", edges)

    @property
    def num_levels(self) -> int:
        return len(self.codebook)

    def levels(self, values: np.ndarray) -> np.ndarray:
        """Right-exclusive edge rule: value == edge goes to the upper level."""
        return np.searchsorted(self.edges, np.asarray(values, dtype=float), side="right")


def boundaries_equal_width(samples, levels: int) -> LevelBoundaries:
    """L-1 edges splitting [min, max] of the samples into equal widths."""
    if levels < 2:
        raise ValueError("need at least 2 levels")
    values = np.asarray(samples, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        raise ValueError("degenerate sample range: max equals min")
    edges = lo + (hi - lo) * np.arange(1, levels) / levels
    return LevelBoundaries(edges, make_codebook(levels))


def boundaries_equiprobable(samples, levels: int) -> LevelBoundaries:
    """Edges at the k/L empirical quantiles, h = (n+1)q interpolation."""
    if levels < 2:
        raise ValueError("need at least 2 levels")
    values = np.asarray(samples, dtype=float)
    if len(np.unique(values)) < levels:
        raise ValueError(f"need at least {levels} distinct sample values")
    q = np.arange(1, levels) / levels
    edges = np.quantile(values, q, method="weibull")
    return LevelBoundaries(edges, make_codebook(levels))


def build_boundaries(samples, cfg: QuantizerConfig) -> LevelBoundaries:
    if cfg.width_rule == "equal_width":
        return boundaries_equal_width(samples, cfg.levels_L)
    return boundaries_equiprobable(samples, cfg.levels_L)


def calibration_samples(estimates: list[CsiEstimate]) -> np.ndarray:
    """Mean-normalized magnitudes of all kept estimates, pooled over the
    whole grid (every subcarrier of every estimate)."""
    if not estimates:
        raise ValueError("no estimates to calibrate on")
    return np.concatenate([e.normalized() for e in estimates])


@dataclass
class BitStream:
    """Ordered bits plus per-bit provenance (probe_index, subcarrier_index)."""

    bits: np.ndarray
    provenance: list[tuple[int, int]]

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if len(self.bits) != len(self.provenance):
            raise ValueError("bits and provenance must have equal length")

    @classmethod
    def empty(cls) -> "BitStream":
        return cls(np.zeros(0, dtype=np.uint8), [])

    @classmethod
    def from_string(cls, text: str, provenance: list[tuple[int, int]] | None = None) -> "BitStream":
        bits = np.array([int(c) for c in text], dtype=np.uint8)
        if provenance is None:
            provenance = [(-1, i) for i in range(len(bits))]
        return cls(bits, provenance)

    @staticmethod
    def concat(streams: list["BitStream"]) -> "BitStream":
        if not streams:
            return BitStream.empty()
        bits = np.concatenate([s.bits for s in streams])
        prov: list[tuple[int, int]] = []
        for s in streams:
            prov.extend(s.provenance)
        return BitStream(bits, prov)

    def __len__(self) -> int:
        return len(self.bits)

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


def quantize_estimate(est: CsiEstimate, cfg: QuantizerConfig, bounds: LevelBoundaries) -> BitStream:
    """Quantize the sampled magnitudes of one estimate into exactly S bits."""
    if bounds.num_levels != cfg.levels_L:
        raise ValueError("boundaries were built for a different level count")
    positions = cfg.sample_positions
    if positions is None:
        positions = derive_sample_positions(len(est.magnitudes), cfg.samples_per_estimate)
    values = est.normalized()[list(positions)]
    levels = bounds.levels(values)
    bits: list[int] = []
    prov: list[tuple[int, int]] = []
    for pos, level in zip(positions, levels):
        code = bounds.codebook[int(level)]
        bits.extend(code)
        prov.extend([(est.probe_index, pos)] * len(code))
    s = cfg.bits_per_estimate_S
    return BitStream(np.array(bits[:s], dtype=np.uint8), prov[:s])


def quantize_session(
    estimates: list[CsiEstimate],
    cfg: QuantizerConfig,
    bounds: LevelBoundaries | None = None,
) -> BitStream:
    """Concatenated per-estimate fragments: exactly S * len(estimates) bits.

    Boundaries default to the calibration population of the given estimates
    themselves (one node's kept list); they are never exchanged between
    nodes.
    """
    if not estimates:
        return BitStream.empty()
    if cfg.sample_positions is None:
        positions = derive_sample_positions(len(estimates[0].magnitudes), cfg.samples_per_estimate)
        cfg = replace(cfg, sample_positions=positions)
    if bounds is None:
        bounds = build_boundaries(calibration_samples(estimates), cfg)
    return BitStream.concat([quantize_estimate(est, cfg, bounds) for est in estimates])
