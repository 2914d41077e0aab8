"""CSI cleaning and evaluation: frame averaging, DC repair, elimination,
reciprocity and variance statistics.

Estimates are mean-normalized before any distance or quantization use, which
cancels per-node receive-gain mismatch. The SNR proxy needs no ground truth:
the channel is smooth across subcarriers while noise is broadband, so the
residual after a short moving average estimates the noise floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import RawObservation

MOVING_AVERAGE_WINDOW = 5
DEFAULT_DC_WINDOW = 1

DROP_LOW_SNR = "low_snr"
DROP_STATIC = "static_channel"


def _moving_average(x: np.ndarray, window: int = MOVING_AVERAGE_WINDOW) -> np.ndarray:
    pad = window // 2
    padded = np.pad(x, pad, mode="edge")
    return np.convolve(padded, np.ones(window) / window, mode="valid")


def _snr_proxy_db(magnitudes: np.ndarray) -> float:
    mean = float(np.mean(magnitudes))
    residual = magnitudes - _moving_average(magnitudes)
    noise_var = float(np.var(residual))
    if mean <= 0:
        return -math.inf
    if noise_var <= 0:
        return math.inf
    return 10.0 * math.log10(mean * mean / noise_var)


@dataclass(frozen=True)
class CsiEstimate:
    """One cleaned CSI estimate; the central record of the pipeline."""

    probe_index: int
    node: str
    magnitudes: np.ndarray
    mean_mag: float
    variance: float
    snr_proxy_db: float

    @classmethod
    def from_magnitudes(cls, probe_index: int, node: str, magnitudes) -> "CsiEstimate":
        mags = np.asarray(magnitudes, dtype=float)
        if mags.ndim != 1 or len(mags) == 0:
            raise ValueError("magnitudes must be a nonempty 1-D vector")
        if np.any(mags < 0):
            raise ValueError("magnitudes must be nonnegative")
        return cls(
            probe_index=probe_index,
            node=node,
            magnitudes=mags,
            mean_mag=float(np.mean(mags)),
            variance=float(np.var(mags)),
            snr_proxy_db=_snr_proxy_db(mags),
        )

    @classmethod
    def from_observation(cls, obs: RawObservation) -> "CsiEstimate":
        return cls.from_magnitudes(obs.probe_index, obs.node, obs.magnitudes)

    def normalized(self) -> np.ndarray:
        """Magnitudes divided by their own mean (gain-mismatch removal)."""
        if self.mean_mag <= 0:
            raise ValueError("cannot normalize an all-zero estimate")
        return self.magnitudes / self.mean_mag


@dataclass(frozen=True)
class EliminationPolicy:
    """Thresholds for dropping low-SNR and static-channel estimates."""

    min_snr_proxy_db: float = 10.0
    min_temporal_delta: float = 0.0

    def __post_init__(self):
        if self.min_temporal_delta < 0:
            raise ValueError("min_temporal_delta must be nonnegative")


@dataclass(frozen=True)
class DroppedEstimate:
    estimate: CsiEstimate
    reason: str


def average_frames(frames: list[np.ndarray]) -> np.ndarray:
    """Element-wise mean of per-frame magnitude vectors."""
    if not frames:
        raise ValueError("average_frames needs at least one frame")
    arr = [np.asarray(f, dtype=float) for f in frames]
    length = len(arr[0])
    if any(len(f) != length for f in arr):
        raise ValueError("all frames must have equal length")
    return np.mean(arr, axis=0)


def suppress_dc(est: CsiEstimate, center_index: int, window: int = DEFAULT_DC_WINDOW) -> CsiEstimate:
    """Repair a DC spike by linear interpolation across +/-window bins.

    Only indices within the window change; the anchors are the nearest
    untouched neighbours just outside it.
    """
    n = len(est.magnitudes)
    if not 0 < center_index < n - 1:
        raise ValueError(f"center_index must satisfy 0 < i < {n - 1}")
    if window < 1:
        raise ValueError("window must be >= 1")
    lo = center_index - window
    hi = center_index + window
    if lo - 1 < 0 or hi + 1 > n - 1:
        raise ValueError(f"window {window} too large for grid of {n} subcarriers at index {center_index}")
    mags = est.magnitudes.copy()
    left, right = mags[lo - 1], mags[hi + 1]
    span = hi + 1 - (lo - 1)
    for i in range(lo, hi + 1):
        frac = (i - (lo - 1)) / span
        mags[i] = left + frac * (right - left)
    return CsiEstimate.from_magnitudes(est.probe_index, est.node, mags)


def normalized_distance(a: CsiEstimate, b: CsiEstimate) -> float:
    """RMS difference of the two mean-normalized magnitude vectors."""
    return float(np.sqrt(np.mean((a.normalized() - b.normalized()) ** 2)))


def eliminate(
    estimates: list[CsiEstimate], policy: EliminationPolicy
) -> tuple[list[CsiEstimate], list[DroppedEstimate]]:
    """Partition a time-ordered stream into kept and dropped estimates.

    Low-SNR estimates go first; a surviving estimate is then dropped as
    static when it sits closer than min_temporal_delta to the previously
    KEPT estimate of the same node (so a slow drift cannot leak through in
    small steps). kept + dropped is exactly the input, order preserved.
    """
    kept: list[CsiEstimate] = []
    dropped: list[DroppedEstimate] = []
    prev_kept: dict[str, CsiEstimate] = {}
    for est in estimates:
        if est.snr_proxy_db < policy.min_snr_proxy_db:
            dropped.append(DroppedEstimate(est, DROP_LOW_SNR))
            continue
        prev = prev_kept.get(est.node)
        if prev is not None and normalized_distance(est, prev) < policy.min_temporal_delta:
            dropped.append(DroppedEstimate(est, DROP_STATIC))
            continue
        kept.append(est)
        prev_kept[est.node] = est
    return kept, dropped


def pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    """Pearson correlation; None marks the undefined zero-variance case."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0:
        return None
    return float((xc @ yc) / denom)


@dataclass(frozen=True)
class ReciprocityStats:
    """Per-probe magnitude correlations between two nodes, plus a summary."""

    probe_indices: tuple[int, ...]
    correlations: tuple[float | None, ...]
    min: float | None
    max: float | None
    mean: float | None
    undefined_count: int


def reciprocity_stats(a: list[CsiEstimate], b: list[CsiEstimate]) -> ReciprocityStats:
    if len(a) != len(b):
        raise ValueError(f"estimate lists differ in length: {len(a)} vs {len(b)}")
    correlations: list[float | None] = []
    indices: list[int] = []
    for ea, eb in zip(a, b):
        if ea.probe_index != eb.probe_index:
            raise ValueError(f"probe indices do not match: {ea.probe_index} vs {eb.probe_index}")
        indices.append(ea.probe_index)
        correlations.append(pearson(ea.magnitudes, eb.magnitudes))
    defined = [c for c in correlations if c is not None]
    return ReciprocityStats(
        probe_indices=tuple(indices),
        correlations=tuple(correlations),
        min=min(defined) if defined else None,
        max=max(defined) if defined else None,
        mean=float(np.mean(defined)) if defined else None,
        undefined_count=len(correlations) - len(defined),
    )


def variance_ratio(dynamic: list[CsiEstimate], static: list[CsiEstimate]) -> float:
    """Mean per-subcarrier temporal variance of `dynamic` over `static`."""
    def mean_temporal_variance(estimates: list[CsiEstimate]) -> float:
        if len(estimates) < 2:
            raise ValueError("variance_ratio needs at least 2 estimates per list")
        stacked = np.stack([e.magnitudes for e in estimates])
        return float(np.mean(np.var(stacked, axis=0, ddof=1)))

    dyn = mean_temporal_variance(dynamic)
    stat = mean_temporal_variance(static)
    if stat <= 0:
        raise ValueError("static variance is zero: degenerate input")
    return dyn / stat
