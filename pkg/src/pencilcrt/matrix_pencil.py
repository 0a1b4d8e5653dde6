"""Aliased-component extraction from one stream via a shifted Hankel pencil.

Two Hankel matrices are built from consecutive samples, offset by one sample.
For a noiseless superposition of m complex exponentials the generalized
eigenvalues of the pair are the signal poles z_i = exp(j*2*pi*f_i/rate), so
the pole angles give the folded frequencies with resolution far beyond the
DFT bin width of the record.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasisError, InsufficientSamplesError, OrderDeficientError
from .signal_model import SampledStream, wrap_phase

__all__ = [
    "HankelPencil",
    "PencilConfig",
    "AliasedComponent",
    "build_pencil",
    "solve_pencil",
    "estimate_amplitudes",
]

# relative singular-value level regarded as numerically nonzero when checking
# whether the data can support an explicitly requested model order
_RANK_EPS = 1e-12

# estimated components below this fraction of the strongest one are numerical
# zeros from an over-specified order and are dropped
_AMPLITUDE_FLOOR = 1e-12


@dataclass(frozen=True)
class HankelPencil:
    """The pair of one-sample-shifted Hankel matrices built from a stream.

    Both matrices have shape (N - L) x L; entry (r, c) of ``x_left`` is
    ``samples[r + c]`` and of ``x_right`` is ``samples[r + c + 1]``.
    """

    x_left: np.ndarray
    x_right: np.ndarray
    pencil_param_l: int


@dataclass(frozen=True)
class PencilConfig:
    """Knobs for the pencil solve.

    Exactly one of ``model_order`` (explicit component count) and
    ``svd_rel_threshold`` (relative singular-value cutoff) governs the rank
    truncation; the threshold applies when ``model_order`` is None.
    """

    pencil_param_l: int | None = None
    model_order: int | None = None
    svd_rel_threshold: float = 1e-3
    unit_circle_tol: float = 1e-2

    def __post_init__(self):
        if self.pencil_param_l is not None and self.pencil_param_l < 1:
            raise ValueError("pencil_param_l must be a positive integer")
        if self.model_order is not None and self.model_order < 1:
            raise ValueError("model_order must be a positive integer")
        if not 0.0 < self.svd_rel_threshold < 1.0:
            raise ValueError("svd_rel_threshold must lie strictly between 0 and 1")
        if self.unit_circle_tol <= 0.0:
            raise ValueError("unit_circle_tol must be > 0")


@dataclass(frozen=True)
class AliasedComponent:
    """One extracted component of a single channel.

    ``alias_freq_hz`` is the folded frequency in [0, rate); ``pole`` is the
    generalized eigenvalue it was derived from, on the unit circle for
    noiseless data.
    """

    alias_freq_hz: float
    amplitude: float
    phase_rad: float
    pole: complex


def build_pencil(stream: SampledStream, pencil_param_l: int) -> HankelPencil:
    """Build the shifted Hankel pair for pencil parameter L.

    Requires at least L + 1 samples so that the one-sample shift fits.
    """
    n = len(stream)
    l_param = int(pencil_param_l)
    if l_param < 1:
        raise ValueError(f"pencil parameter must be >= 1, got {pencil_param_l}")
    if n < l_param + 1:
        raise InsufficientSamplesError(
            f"need at least L+1 = {l_param + 1} samples to build the pencil, got {n}"
        )
    x = stream.samples
    idx = np.arange(n - l_param)[:, None] + np.arange(l_param)[None, :]
    x_left = x[idx]
    x_right = x[idx + 1]
    return HankelPencil(x_left=x_left, x_right=x_right, pencil_param_l=l_param)


def _truncation_rank(s: np.ndarray, cfg: PencilConfig) -> int:
    """Number of retained singular values under the configured rule."""
    if s.size == 0 or s[0] == 0.0:
        return 0
    if cfg.model_order is not None:
        return cfg.model_order
    return int(np.count_nonzero(s >= cfg.svd_rel_threshold * s[0]))


def solve_pencil(stream: SampledStream, cfg: PencilConfig) -> list[AliasedComponent]:
    """Extract aliased (frequency, amplitude, phase) triples from one stream.

    Steps: build the shifted Hankel pair with L = cfg.pencil_param_l (default
    floor(N/3), clamped to [order, N - order]); truncate the left matrix's SVD
    to the working rank; solve the generalized eigenproblem of (right, left)
    on the truncated subspace, which reduces to an ordinary r x r eigensolve
    of  S^-1 U^H X_right V;  gate out poles farther than ``unit_circle_tol``
    from the unit circle; fit amplitudes and phases by least squares on the
    surviving alias frequencies.

    Returns components sorted by ascending alias frequency. Raises
    ``OrderDeficientError`` when an explicitly requested order exceeds the
    numerical rank of the data, and ``InsufficientSamplesError`` when the
    stream cannot host a pencil of the required size.
    """
    n = len(stream)
    order = cfg.model_order
    if order is not None and n < 2 * (order + 1):
        raise InsufficientSamplesError(
            f"need at least 2*(order+1) = {2 * (order + 1)} samples, got {n}"
        )
    if n < 2:
        raise InsufficientSamplesError(f"need at least 2 samples, got {n}")

    l_param = cfg.pencil_param_l if cfg.pencil_param_l is not None else n // 3
    if order is not None:
        l_param = min(max(l_param, order), n - order)
    l_param = min(max(l_param, 1), n - 1)

    pencil = build_pencil(stream, l_param)
    u, s, vh = np.linalg.svd(pencil.x_left, full_matrices=False)

    rank = _truncation_rank(s, cfg)
    achievable = 0 if (s.size == 0 or s[0] == 0.0) else int(np.count_nonzero(s >= _RANK_EPS * s[0]))
    if order is not None and achievable < order:
        raise OrderDeficientError(requested=order, achieved=achievable)
    if rank == 0:
        return []
    rank = min(rank, achievable)

    # generalized eigenproblem reduced onto the rank-r signal subspace
    u_r = u[:, :rank]
    v_r = vh[:rank, :].conj().T
    reduced = (u_r.conj().T @ pencil.x_right @ v_r) / s[:rank, None]
    poles = np.linalg.eigvals(reduced)

    keep = np.abs(np.abs(poles) - 1.0) <= cfg.unit_circle_tol
    poles = poles[keep]
    if poles.size == 0:
        return []

    alias = (np.angle(poles) % (2.0 * math.pi)) / (2.0 * math.pi) * stream.rate_hz
    fits = estimate_amplitudes(stream, alias.tolist())

    amps = np.array([a for a, _ in fits])
    floor = _AMPLITUDE_FLOOR * amps.max(initial=0.0)
    components = [
        AliasedComponent(
            alias_freq_hz=float(alias[i]),
            amplitude=float(fits[i][0]),
            phase_rad=float(fits[i][1]),
            pole=complex(poles[i]),
        )
        for i in range(poles.size)
        if fits[i][0] > floor
    ]
    components.sort(key=lambda c: c.alias_freq_hz)
    return components


def estimate_amplitudes(
    stream: SampledStream, alias_freqs: list[float]
) -> list[tuple[float, float]]:
    """Least-squares (amplitude, phase) fit at the given alias frequencies.

    Solves min_c || x - V c ||_2 with V[n, i] = exp(j*2*pi*f_i*n/rate) over
    the stream's absolute sample indices, so phases are referenced to sample
    index 0. Raises ``DegenerateBasisError`` for (near-)duplicate frequencies.
    """
    if not alias_freqs:
        return []
    n = len(stream)
    if len(alias_freqs) > n:
        raise InsufficientSamplesError(
            f"cannot fit {len(alias_freqs)} components to {n} samples"
        )
    freqs = np.asarray(alias_freqs, dtype=float)
    rate = stream.rate_hz
    diff = np.abs(freqs[:, None] - freqs[None, :]) % rate
    diff = np.minimum(diff, rate - diff)
    np.fill_diagonal(diff, np.inf)
    if np.any(diff < 1e-9 * rate):
        raise DegenerateBasisError(
            "alias frequencies coincide modulo the sampling rate; fit basis is singular"
        )
    idx = stream.indices
    basis = np.exp(1j * 2.0 * math.pi * np.outer(idx, freqs) / rate)
    coeffs, *_ = np.linalg.lstsq(basis, stream.samples, rcond=None)
    out: list[tuple[float, float]] = []
    for c in coeffs:
        amp = float(abs(c))
        phase = wrap_phase(float(np.angle(c))) if amp > 0.0 else 0.0
        out.append((amp, phase))
    return out
