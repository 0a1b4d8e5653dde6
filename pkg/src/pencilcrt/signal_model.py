"""Multifrequency complex-exponential signal model and sub-Nyquist sampling.

The model is a superposition of complex tones

    x[n] = sum_i  a_i * exp(j * (2*pi*f_i*n/rate + phi_i))

sampled at a rate that may be far below the highest tone frequency, in which
case each tone is observed at its folded (aliased) frequency ``f mod rate``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tone",
    "SignalSpec",
    "SampledStream",
    "wrap_phase",
    "phase_distance",
    "synthesize",
    "add_awgn",
    "alias_of",
]


def wrap_phase(phi: float) -> float:
    """Wrap an angle into the canonical interval [-pi, pi)."""
    return float((phi + math.pi) % (2.0 * math.pi) - math.pi)


def phase_distance(a: float, b: float) -> float:
    """Shortest angular distance between two phases, in [0, pi]."""
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


@dataclass(frozen=True)
class Tone:
    """One complex-exponential component: frequency (Hz), amplitude, phase (rad).

    The phase is canonicalized into [-pi, pi) on construction.
    """

    freq_hz: float
    amplitude: float
    phase_rad: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.freq_hz) or self.freq_hz < 0:
            raise ValueError(f"tone frequency must be finite and >= 0, got {self.freq_hz}")
        if not math.isfinite(self.amplitude) or self.amplitude <= 0:
            raise ValueError(f"tone amplitude must be finite and > 0, got {self.amplitude}")
        object.__setattr__(self, "phase_rad", wrap_phase(self.phase_rad))


@dataclass(frozen=True)
class SignalSpec:
    """Ordered set of tones making up one multifrequency signal."""

    tones: tuple[Tone, ...]

    def __init__(self, tones):
        tones = tuple(tones)
        if not tones:
            raise ValueError("signal spec needs at least one tone")
        freqs = [t.freq_hz for t in tones]
        if len(set(freqs)) != len(freqs):
            raise ValueError("tone frequencies must be pairwise distinct")
        object.__setattr__(self, "tones", tones)

    def __len__(self) -> int:
        return len(self.tones)


@dataclass(frozen=True)
class SampledStream:
    """A finite complex sample sequence together with its sampling rate.

    ``start_index`` is the absolute index of the first sample; phases reported
    by downstream estimators are always referenced to absolute index 0.
    """

    rate_hz: float
    samples: np.ndarray = field(repr=False)
    start_index: int = 0

    def __post_init__(self):
        if not math.isfinite(self.rate_hz) or self.rate_hz <= 0:
            raise ValueError(f"sampling rate must be finite and > 0, got {self.rate_hz}")
        samples = np.array(self.samples, dtype=np.complex128, copy=True)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def indices(self) -> np.ndarray:
        """Absolute sample indices covered by this stream."""
        return self.start_index + np.arange(len(self))


def synthesize(
    spec: SignalSpec,
    rate_hz: float,
    n_samples: int,
    start_index: int = 0,
) -> SampledStream:
    """Sample the exact tone superposition at the given rate.

    Returns samples x[n] for n = start_index .. start_index + n_samples - 1,
    with x[n] the noiseless sum over the spec's tones. Deterministic and
    side-effect-free.
    """
    if not math.isfinite(rate_hz) or rate_hz <= 0:
        raise ValueError(f"rate_hz must be finite and > 0, got {rate_hz}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    n = start_index + np.arange(int(n_samples))
    freqs = np.array([t.freq_hz for t in spec.tones])
    amps = np.array([t.amplitude for t in spec.tones])
    phases = np.array([t.phase_rad for t in spec.tones])
    phase_matrix = 2.0 * math.pi * np.outer(n, freqs) / rate_hz + phases[None, :]
    samples = (amps[None, :] * np.exp(1j * phase_matrix)).sum(axis=1)
    return SampledStream(rate_hz=rate_hz, samples=samples, start_index=start_index)


def add_awgn(stream: SampledStream, snr_db: float, seed: int) -> SampledStream:
    """Add circularly-symmetric complex Gaussian noise at the given SNR.

    The noise variance is set so that (mean signal power) / (noise variance)
    equals ``10**(snr_db/10)``; the SNR is measured against the total stream
    power, not per component. ``snr_db = inf`` is the noiseless sentinel and
    returns the stream unchanged. Deterministic given ``seed``; the input is
    never modified.
    """
    if len(stream) == 0:
        raise ValueError("cannot add noise to an empty stream")
    if math.isinf(snr_db) and snr_db > 0:
        return stream
    signal_power = float(np.mean(np.abs(stream.samples) ** 2))
    noise_var = signal_power / (10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    n = len(stream)
    noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    noisy = stream.samples + math.sqrt(noise_var / 2.0) * noise
    return SampledStream(rate_hz=stream.rate_hz, samples=noisy, start_index=stream.start_index)


def alias_of(freq_hz: float, rate_hz: float) -> float:
    """Folded frequency ``freq_hz mod rate_hz``, in [0, rate_hz).

    This is the apparent frequency a complex-exponential estimator observes
    when a tone at ``freq_hz`` is sampled at ``rate_hz``.
    """
    if rate_hz <= 0:
        raise ValueError(f"rate_hz must be > 0, got {rate_hz}")
    a = math.fmod(freq_hz, rate_hz)
    if a < 0:
        a += rate_hz
    if a >= rate_hz:  # fmod(-tiny, r) + r can round up to exactly r
        a = 0.0
    return a
