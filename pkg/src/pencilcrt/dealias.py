"""Cross-channel pairing and Chinese-Remainder-style frequency de-aliasing.

The same tone observed through two different sub-Nyquist rates keeps its
amplitude and phase but folds to two different alias frequencies. Components
are therefore paired across channels by (amplitude, phase) proximity, and the
true frequency is recovered by searching fold indices (k1, k2) such that

    k1*rate1 + alias1  ==  k2*rate2 + alias2

within a tolerance. For exact integer data this is the classic two-modulus
Chinese Remainder reconstruction, unique inside [0, lcm(rate1, rate2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    AmbiguousFrequencyError,
    InvalidComponentError,
    NoCandidateError,
    PairingSizeError,
)
from .matrix_pencil import AliasedComponent
from .signal_model import phase_distance, wrap_phase

__all__ = [
    "PairedComponent",
    "DealiasConfig",
    "ResolvedTone",
    "pair_components",
    "resolve_frequency",
    "crt_integer",
    "unambiguous_range",
]


@dataclass(frozen=True)
class PairedComponent:
    """A matched pair of per-channel components with its matching cost."""

    chan1: AliasedComponent
    chan2: AliasedComponent
    match_cost: float


@dataclass(frozen=True)
class DealiasConfig:
    """Two-channel geometry and matching tolerances.

    ``max_fold_index_n`` bounds the fold-index search k in [0, n] for both
    channels. ``freq_match_tol_hz`` defaults to max(rate1, rate2) * 1e-3.
    """

    rate1_hz: float
    rate2_hz: float
    max_fold_index_n: int
    freq_match_tol_hz: float | None = None
    amp_weight: float = 1.0
    phase_weight: float = 1.0

    def __post_init__(self):
        if self.rate1_hz <= 0 or self.rate2_hz <= 0:
            raise ValueError("sampling rates must be > 0")
        if self.rate1_hz == self.rate2_hz:
            raise ValueError("the two channel rates must differ")
        if self.max_fold_index_n < 1:
            raise ValueError("max_fold_index_n must be a positive integer")
        if self.amp_weight < 0 or self.phase_weight < 0:
            raise ValueError("pairing weights must be >= 0")
        if self.freq_match_tol_hz is None:
            object.__setattr__(
                self, "freq_match_tol_hz", max(self.rate1_hz, self.rate2_hz) * 1e-3
            )
        elif self.freq_match_tol_hz <= 0:
            raise ValueError("freq_match_tol_hz must be > 0")

    @classmethod
    def for_max_freq(cls, rate1_hz: float, rate2_hz: float, f_max_hint_hz: float, **kwargs):
        """Config with the fold bound n = ceil(f_max_hint / min(rate1, rate2))."""
        if f_max_hint_hz <= 0:
            raise ValueError("f_max_hint_hz must be > 0")
        n = max(1, math.ceil(f_max_hint_hz / min(rate1_hz, rate2_hz)))
        return cls(rate1_hz=rate1_hz, rate2_hz=rate2_hz, max_fold_index_n=n, **kwargs)


@dataclass(frozen=True)
class ResolvedTone:
    """A de-aliased tone estimate with its fold indices and residual."""

    freq_hz: float
    amplitude: float
    phase_rad: float
    k1: int
    k2: int
    residual_hz: float


def _pair_cost(c1: AliasedComponent, c2: AliasedComponent, cfg: DealiasConfig) -> float:
    amp_term = abs(math.log(c1.amplitude / c2.amplitude))
    phase_term = phase_distance(c1.phase_rad, c2.phase_rad)
    return cfg.amp_weight * amp_term + cfg.phase_weight * phase_term


def pair_components(
    set1: list[AliasedComponent],
    set2: list[AliasedComponent],
    cfg: DealiasConfig,
) -> list[PairedComponent]:
    """Minimum-total-cost perfect matching of the two channel component sets.

    Cost of matching i to j is
    ``amp_weight * |ln(a1_i / a2_j)| + phase_weight * |wrap(phi1_i - phi2_j)|``.
    The assignment is globally optimal, not greedy. Both sets must have the
    same size; a mismatch raises ``PairingSizeError`` (re-run order estimation
    rather than padding or truncating).
    """
    if not set1 or not set2:
        raise PairingSizeError("both component sets must be non-empty")
    if len(set1) != len(set2):
        raise PairingSizeError(
            f"component sets differ in size: {len(set1)} vs {len(set2)}"
        )
    m = len(set1)
    cost = np.empty((m, m))
    for i, c1 in enumerate(set1):
        for j, c2 in enumerate(set2):
            cost[i, j] = _pair_cost(c1, c2, cfg)
    if not np.all(np.isfinite(cost)):
        raise InvalidComponentError("pairing cost is non-finite; component invalid")
    rows, cols = linear_sum_assignment(cost)
    pairs = [
        PairedComponent(chan1=set1[i], chan2=set2[j], match_cost=float(cost[i, j]))
        for i, j in zip(rows, cols)
    ]
    pairs.sort(key=lambda p: p.chan1.alias_freq_hz)
    return pairs


def resolve_frequency(pair: PairedComponent, cfg: DealiasConfig) -> ResolvedTone:
    """Recover the true frequency of a matched pair by fold-index search.

    Scans k1, k2 in [0, n] for reconstructions agreeing within
    ``freq_match_tol_hz``; among agreeing pairs the one with the smallest
    residual wins (ties broken toward the smallest frequency). Raises
    ``NoCandidateError`` when nothing agrees and ``AmbiguousFrequencyError``
    when two candidates more than the tolerance apart both agree, i.e. the
    frequency lies outside the unambiguous range of the rate pair.
    """
    alias1 = pair.chan1.alias_freq_hz
    alias2 = pair.chan2.alias_freq_hz
    r1, r2 = cfg.rate1_hz, cfg.rate2_hz
    if not (0.0 <= alias1 < r1) or not (0.0 <= alias2 < r2):
        raise ValueError("alias frequencies must lie in [0, rate) of their channel")
    tol = cfg.freq_match_tol_hz
    ks = np.arange(cfg.max_fold_index_n + 1)
    recon1 = ks * r1 + alias1
    recon2 = ks * r2 + alias2
    residual = np.abs(recon1[:, None] - recon2[None, :])
    hit_k1, hit_k2 = np.nonzero(residual <= tol)
    if hit_k1.size == 0:
        raise NoCandidateError(
            f"no fold indices reconcile aliases ({alias1:.6g}, {alias2:.6g}) "
            f"within {tol:.6g} Hz"
        )
    freqs = 0.5 * (recon1[hit_k1] + recon2[hit_k2])
    if freqs.max() - freqs.min() > tol:
        raise AmbiguousFrequencyError(freqs.tolist())
    residuals = residual[hit_k1, hit_k2]
    # smallest residual wins; ties go to the smallest candidate frequency
    best = np.lexsort((freqs, residuals))[0]
    amp = 0.5 * (pair.chan1.amplitude + pair.chan2.amplitude)
    p1, p2 = pair.chan1.phase_rad, pair.chan2.phase_rad
    phase = wrap_phase(p1 + 0.5 * wrap_phase(p2 - p1))
    return ResolvedTone(
        freq_hz=float(freqs[best]),
        amplitude=float(amp),
        phase_rad=phase,
        k1=int(hit_k1[best]),
        k2=int(hit_k2[best]),
        residual_hz=float(residuals[best]),
    )


def _extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


def crt_integer(residues: list[int], moduli: list[int]) -> int:
    """Solve x = residues[i] (mod moduli[i]) for pairwise coprime moduli.

    Returns the unique solution in [0, prod(moduli)), computed with the
    extended Euclidean algorithm. This is the exact fast path of
    ``resolve_frequency`` for integer-valued rates and aliases, and the test
    oracle for the tolerance search.
    """
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli must have the same length")
    if not moduli:
        raise ValueError("need at least one congruence")
    for r, m in zip(residues, moduli):
        if m < 1:
            raise ValueError(f"modulus must be a positive integer, got {m}")
        if not 0 <= r < m:
            raise ValueError(f"residue {r} out of range for modulus {m}")
    x, modulus = residues[0], moduli[0]
    for r, m in zip(residues[1:], moduli[1:]):
        g, p, _ = _extended_gcd(modulus, m)
        if g != 1:
            raise ValueError(f"moduli {modulus} and {m} are not coprime (gcd {g})")
        # x' = x + modulus * p * (r - x)  solves both congruences
        x = (x + modulus * (p % m) * (r - x)) % (modulus * m)
        modulus *= m
    return x % modulus


def unambiguous_range(rate1_hz: float, rate2_hz: float, grid_hz: float = 1.0) -> float:
    """Width of the uniquely resolvable band [0, lcm) for the rate pair.

    Rates are expressed on a common grid of step ``grid_hz`` (they must be
    integer multiples of it) and the least common multiple is taken on that
    grid, so frequencies on the grid inside the returned band have a unique
    residue pair.
    """
    if rate1_hz <= 0 or rate2_hz <= 0:
        raise ValueError("rates must be > 0")
    if grid_hz <= 0:
        raise ValueError("grid_hz must be > 0")
    n1 = rate1_hz / grid_hz
    n2 = rate2_hz / grid_hz
    i1, i2 = round(n1), round(n2)
    if not math.isclose(n1, i1, rel_tol=0, abs_tol=1e-9) or not math.isclose(
        n2, i2, rel_tol=0, abs_tol=1e-9
    ):
        raise ValueError(
            f"rates ({rate1_hz}, {rate2_hz}) are not integer multiples of the "
            f"declared grid step {grid_hz}"
        )
    return math.lcm(i1, i2) * grid_hz
