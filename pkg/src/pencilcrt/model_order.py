"""Component-count estimation by counting DFT magnitude peaks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamplesError
from .signal_model import SampledStream

__all__ = ["OrderConfig", "estimate_order", "combine_order"]


@dataclass(frozen=True)
class OrderConfig:
    rel_peak_threshold: float = 0.1
    min_peak_separation_bins: int = 2

    def __post_init__(self):
        if not 0.0 < self.rel_peak_threshold < 1.0:
            raise ValueError("rel_peak_threshold must lie strictly between 0 and 1")
        if self.min_peak_separation_bins < 1:
            raise ValueError("min_peak_separation_bins must be a positive integer")


def estimate_order(stream: SampledStream, cfg: OrderConfig = OrderConfig()) -> int:
    """Count spectral peaks in the stream's magnitude DFT.

    A bin counts as a peak when it is strictly greater than every neighbor
    within ``min_peak_separation_bins`` (the spectrum is treated as circular,
    since aliases live on the frequency circle [0, rate)) and its magnitude
    reaches ``rel_peak_threshold`` times the global maximum. The all-zero
    stream yields 0.
    """
    n = len(stream)
    if n < 8:
        raise InsufficientSamplesError(f"need at least 8 samples, got {n}")
    mag = np.abs(np.fft.fft(stream.samples))
    peak = mag.max()
    if peak == 0.0:
        return 0
    is_peak = mag >= cfg.rel_peak_threshold * peak
    for shift in range(1, cfg.min_peak_separation_bins + 1):
        is_peak &= mag > np.roll(mag, shift)
        is_peak &= mag > np.roll(mag, -shift)
    return int(np.count_nonzero(is_peak))


def combine_order(order1: int, order2: int) -> int:
    """Working order for both channels: an alias collision can hide a tone in
    one channel only, so take the larger of the two estimates."""
    return max(int(order1), int(order2))
