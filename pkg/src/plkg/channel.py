"""Simulated reciprocal TDD OFDM channel with a passive eavesdropper.

The channel is a tapped-delay-line Rayleigh model: complex Gaussian taps with
an exponential power profile, evolved in time as a first-order Gauss-Markov
process parameterized by a coherence time. Tap delays sit on the grid
1/(num_subcarriers * subcarrier_spacing), so the channel frequency response is
the plain DFT of the tap vector and Parseval holds exactly on the subcarrier
grid. Tap vectors are kept at unit energy after every evolution step, so the
mean squared response magnitude is 1 for any state.

Alice and Bob observe the same tap state separated by the probe timing offset
(TDD reciprocity); Eve observes a tap vector correlated with the legitimate
one by the Jakes/Clarke factor J0(2*pi*d/lambda), clamped to [0, 1], where d
is her distance from the nearest legitimate node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from .errors import ConfigError

ALICE = "alice"
BOB = "bob"
EVE = "eve"
NODES = (ALICE, BOB, EVE)

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Relative tap perturbation applied per evolution step in static mode, so a
# "static" channel is near-constant but never numerically degenerate.
STATIC_JITTER = 1e-3

DEFAULT_TAP_DECAY_DB = 3.0


def exponential_power_profile(num_taps: int, decay_db_per_tap: float = DEFAULT_TAP_DECAY_DB) -> tuple[float, ...]:
    """Normalized per-tap powers decaying by `decay_db_per_tap` each tap."""
    if num_taps < 1:
        raise ConfigError("num_taps must be >= 1")
    w = 10.0 ** (-decay_db_per_tap * np.arange(num_taps) / 10.0)
    return tuple(w / w.sum())


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM grid; defaults reproduce a 20 MHz / 30 kHz / 612-subcarrier n78 cell."""

    bandwidth_hz: float = 20e6
    subcarrier_spacing_hz: float = 30e3
    num_subcarriers: int = 612
    center_frequency_hz: float = 3.75e9

    def __post_init__(self):
        if self.bandwidth_hz <= 0 or self.subcarrier_spacing_hz <= 0 or self.center_frequency_hz <= 0:
            raise ConfigError("OFDM frequencies must be positive")
        if self.num_subcarriers < 1:
            raise ConfigError("num_subcarriers must be a positive integer")
        occupied = self.num_subcarriers * self.subcarrier_spacing_hz
        if occupied > self.bandwidth_hz * 1.02:  # 2% slack for edge rounding
            raise ConfigError(
                f"grid does not fit the band: {self.num_subcarriers} x "
                f"{self.subcarrier_spacing_hz:g} Hz = {occupied:g} Hz > "
                f"{self.bandwidth_hz:g} Hz (+2%)"
            )

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.center_frequency_hz


@dataclass(frozen=True)
class TddPattern:
    """TDD split of one period into uplink, downlink and guard time."""

    period_ms: float = 5.0
    uplink_ms: float = 2.0
    downlink_ms: float = 2.5
    guard_ms: float = 0.5

    def __post_init__(self):
        if self.period_ms <= 0 or self.uplink_ms <= 0 or self.downlink_ms <= 0 or self.guard_ms < 0:
            raise ConfigError("TDD durations must be positive (guard may be zero)")
        if self.uplink_ms + self.downlink_ms + self.guard_ms != self.period_ms:
            raise ConfigError(
                f"uplink + downlink + guard must equal the period exactly: "
                f"{self.uplink_ms} + {self.downlink_ms} + {self.guard_ms} != {self.period_ms}"
            )


@dataclass(frozen=True)
class FadingConfig:
    """Tapped-delay-line fading parameters and the session RNG seed."""

    num_taps: int = 8
    tap_power_profile: tuple[float, ...] | None = None  # None -> exponential default
    coherence_time_ms: float = 1_000_000.0
    doppler_mode: str = "dynamic"  # "dynamic" | "static"
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_taps < 1:
            raise ConfigError("num_taps must be >= 1")
        if self.coherence_time_ms <= 0:
            raise ConfigError("coherence_time_ms must be positive")
        if self.doppler_mode not in ("dynamic", "static"):
            raise ConfigError(f"doppler_mode must be 'dynamic' or 'static', got {self.doppler_mode!r}")
        if self.tap_power_profile is None:
            object.__setattr__(self, "tap_power_profile", exponential_power_profile(self.num_taps))
        profile = np.asarray(self.tap_power_profile, dtype=float)
        if len(profile) != self.num_taps:
            raise ConfigError("tap_power_profile length must equal num_taps")
        if np.any(profile < 0):
            raise ConfigError("tap powers must be nonnegative")
        if abs(profile.sum() - 1.0) > 1e-9:
            raise ConfigError(f"tap_power_profile must sum to 1, got {profile.sum()!r}")

    def profile(self) -> np.ndarray:
        return np.asarray(self.tap_power_profile, dtype=float)


@dataclass(frozen=True)
class ImpairmentConfig:
    """Receiver-side impairments applied to the observed CSI."""

    snr_db: float = 40.0
    dc_offset_magnitude: float = 0.0
    dc_offset_node: str = ALICE
    hardware_asymmetry_db: float = 0.0  # extra gain on bob's receive chain
    probe_timing_offset_ms: float = 0.0

    def __post_init__(self):
        if self.dc_offset_magnitude < 0:
            raise ConfigError("dc_offset_magnitude must be nonnegative")
        if self.hardware_asymmetry_db < 0:
            raise ConfigError("hardware_asymmetry_db must be nonnegative")
        if self.probe_timing_offset_ms < 0:
            raise ConfigError("probe_timing_offset_ms must be nonnegative")
        if self.dc_offset_node not in NODES:
            raise ConfigError(f"dc_offset_node must be one of {NODES}")


@dataclass(frozen=True)
class EvePlacement:
    """Eavesdropper distance from the nearest legitimate node, in wavelengths."""

    distance_fraction_of_wavelength: float = 0.5

    def __post_init__(self):
        if self.distance_fraction_of_wavelength <= 0:
            raise ConfigError("eve distance must be positive")

    @property
    def tap_correlation(self) -> float:
        """Jakes factor J0(2*pi*d/lambda), clamped to [0, 1]."""
        rho = float(j0(2.0 * math.pi * self.distance_fraction_of_wavelength))
        return min(1.0, max(0.0, rho))


@dataclass(frozen=True)
class ChannelConfig:
    """Everything the probing simulator needs for one session."""

    ofdm: OfdmConfig = OfdmConfig()
    tdd: TddPattern = TddPattern()
    fading: FadingConfig = FadingConfig()
    impairments: ImpairmentConfig = ImpairmentConfig()
    eve: EvePlacement = EvePlacement()

    def __post_init__(self):
        if self.impairments.probe_timing_offset_ms >= self.tdd.period_ms:
            raise ConfigError(
                f"probe_timing_offset_ms ({self.impairments.probe_timing_offset_ms}) "
                f"must be smaller than the TDD period ({self.tdd.period_ms} ms)"
            )
        if self.fading.doppler_mode == "dynamic" and self.fading.coherence_time_ms <= self.tdd.period_ms:
            raise ConfigError(
                "coherence_time_ms must exceed the TDD period for a reciprocity-valid scenario"
            )
        if self.fading.num_taps > self.ofdm.num_subcarriers:
            raise ConfigError("num_taps cannot exceed num_subcarriers")


@dataclass(frozen=True)
class RawObservation:
    """One node's magnitude-only CSI observation for one probe."""

    probe_index: int
    node: str
    timestamp_ms: float
    magnitudes: np.ndarray


@dataclass(frozen=True)
class LinkState:
    """Evolving tap state: legitimate taps plus Eve's independent component."""

    taps: np.ndarray
    eve_taps: np.ndarray
    time_ms: float
    fading: FadingConfig
    rng: np.random.Generator


def _draw_taps(profile: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    taps = (rng.standard_normal(len(profile)) + 1j * rng.standard_normal(len(profile))) * np.sqrt(profile / 2.0)
    return taps / np.linalg.norm(taps)


def initial_link_state(fading: FadingConfig, rng: np.random.Generator | None = None) -> LinkState:
    if rng is None:
        rng = np.random.default_rng(fading.rng_seed)
    profile = fading.profile()
    return LinkState(_draw_taps(profile, rng), _draw_taps(profile, rng), 0.0, fading, rng)


def evolve_channel(state: LinkState, dt_ms: float) -> LinkState:
    """Advance the tap state by dt_ms.

    Dynamic mode uses the Gauss-Markov correlation rho = exp(-dt/Tc); static
    mode keeps rho at 1 up to the fixed STATIC_JITTER innovation floor
    (applied once per call, independent of dt). dt of exactly 0 returns the
    state unchanged without consuming any randomness.
    """
    if dt_ms < 0:
        raise ValueError("dt_ms must be nonnegative")
    if dt_ms == 0:
        return state
    fading = state.fading
    if fading.doppler_mode == "dynamic":
        rho = math.exp(-dt_ms / fading.coherence_time_ms)
    else:
        rho = math.sqrt(1.0 - STATIC_JITTER**2)
    innovation_scale = math.sqrt(max(0.0, 1.0 - rho * rho))
    profile = fading.profile()
    rng = state.rng

    def step(taps: np.ndarray) -> np.ndarray:
        w = (rng.standard_normal(len(profile)) + 1j * rng.standard_normal(len(profile))) * np.sqrt(profile / 2.0)
        out = rho * taps + innovation_scale * w
        return out / np.linalg.norm(out)

    return LinkState(step(state.taps), step(state.eve_taps), state.time_ms + dt_ms, fading, rng)


def channel_frequency_response(state: LinkState, cfg: OfdmConfig) -> np.ndarray:
    """Complex gain per subcarrier: the N-point DFT of the tap vector."""
    if len(state.taps) > cfg.num_subcarriers:
        raise ValueError("more taps than subcarriers")
    return np.fft.fft(state.taps, n=cfg.num_subcarriers)


def eve_frequency_response(state: LinkState, cfg: OfdmConfig, placement: EvePlacement) -> np.ndarray:
    """Eve's response: her taps mix the legitimate and independent components."""
    rho = placement.tap_correlation
    mixed = rho * state.taps + math.sqrt(1.0 - rho * rho) * state.eve_taps
    return np.fft.fft(mixed, n=cfg.num_subcarriers)


class ProbeSession:
    """Single-owner generator of (alice, bob, eve) observation triples.

    Probe k: the state is advanced to alice's probe instant k*probe_interval,
    alice and eve observe, the state advances by the probe timing offset, and
    bob observes. All randomness comes from one seeded generator in a fixed
    draw order, so a session is a pure function of its configuration.
    """

    def __init__(self, cfg: ChannelConfig, duration_s: float, probe_interval_ms: float):
        if duration_s < 0:
            raise ConfigError("duration_s must be nonnegative")
        if probe_interval_ms < cfg.tdd.period_ms:
            raise ConfigError(
                f"probe_interval_ms ({probe_interval_ms}) must be at least one "
                f"TDD period ({cfg.tdd.period_ms} ms)"
            )
        self.cfg = cfg
        self.probe_interval_ms = probe_interval_ms
        self.num_probes = int(duration_s * 1000.0 / probe_interval_ms + 1e-9)
        self.rng = np.random.default_rng(cfg.fading.rng_seed)
        self.state = initial_link_state(cfg.fading, self.rng)
        self._next_index = 0

    def probe_pair(self, probe_index: int) -> tuple[RawObservation, RawObservation, RawObservation]:
        if probe_index >= self.num_probes:
            raise ValueError(
                f"session exhausted: probe_index {probe_index} beyond configured "
                f"duration ({self.num_probes} probes)"
            )
        if probe_index != self._next_index:
            raise ValueError(
                f"probe_index must increase monotonically: expected {self._next_index}, got {probe_index}"
            )
        imp = self.cfg.impairments
        t_alice = probe_index * self.probe_interval_ms
        self.state = evolve_channel(self.state, t_alice - self.state.time_ms)
        legit = channel_frequency_response(self.state, self.cfg.ofdm)
        eavesdropped = eve_frequency_response(self.state, self.cfg.ofdm, self.cfg.eve)
        alice = self._measure(ALICE, probe_index, t_alice, legit)
        eve = self._measure(EVE, probe_index, t_alice, eavesdropped)
        # bob probes within the same TDD period, offset_ms later
        self.state = evolve_channel(self.state, imp.probe_timing_offset_ms)
        legit_later = channel_frequency_response(self.state, self.cfg.ofdm)
        bob = self._measure(BOB, probe_index, t_alice + imp.probe_timing_offset_ms, legit_later)
        self._next_index += 1
        return alice, bob, eve

    def _measure(self, node: str, probe_index: int, timestamp_ms: float, response: np.ndarray) -> RawObservation:
        imp = self.cfg.impairments
        if math.isinf(imp.snr_db):
            observed = response
        else:
            sigma = 10.0 ** (-imp.snr_db / 20.0)  # noise power relative to unit signal power
            n = len(response)
            noise = (self.rng.standard_normal(n) + 1j * self.rng.standard_normal(n)) * (sigma / math.sqrt(2.0))
            observed = response + noise
        gain = 10.0 ** (imp.hardware_asymmetry_db / 20.0) if node == BOB else 1.0
        magnitudes = gain * np.abs(observed)
        if node == imp.dc_offset_node and imp.dc_offset_magnitude > 0:
            magnitudes[len(magnitudes) // 2] += imp.dc_offset_magnitude
        return RawObservation(probe_index, node, timestamp_ms, magnitudes)

    def run(self) -> list[tuple[RawObservation, RawObservation, RawObservation]]:
        return [self.probe_pair(i) for i in range(self._next_index, self.num_probes)]


def run_session(
    cfg: ChannelConfig, duration_s: float, probe_interval_ms: float
) -> list[tuple[RawObservation, RawObservation, RawObservation]]:
    """Run a full probing session; deterministic for a fixed rng_seed."""
    return ProbeSession(cfg, duration_s, probe_interval_ms).run()
