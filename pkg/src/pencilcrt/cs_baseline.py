"""Compressed-sensing comparison method: random projections + OMP on a DFT grid.

The full-rate signal of length N is compressed through an M x N
row-orthonormalized Gaussian matrix and recovered by orthogonal matching
pursuit against the N-point DFT dictionary. Frequencies are therefore
quantized to the grid ``rate / N``, which is what produces the method's
SNR-independent error floor for off-grid tones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_model import Tone, wrap_phase

__all__ = [
    "CsConfig",
    "SparseRecovery",
    "min_measurements",
    "make_sensing_matrix",
    "atom_norms",
    "omp_recover",
    "extract_tones",
]


@dataclass(frozen=True)
class CsConfig:
    """Problem sizes for the compressed-sensing path."""

    full_length_n: int
    sparsity_k: int
    measurements_m: int
    seed: int = 0

    def __post_init__(self):
        if self.full_length_n < 1 or self.sparsity_k < 1 or self.measurements_m < 1:
            raise ValueError("all problem sizes must be positive")
        if not self.sparsity_k <= self.measurements_m <= self.full_length_n:
            raise ValueError(
                f"need K <= M <= N, got K={self.sparsity_k}, "
                f"M={self.measurements_m}, N={self.full_length_n}"
            )


@dataclass(frozen=True)
class SparseRecovery:
    """OMP output: selected DFT bins, their coefficients, final residual norm.

    Coefficients are in tone units: a planted on-grid tone
    ``a * exp(j*(2*pi*b*n/N + phi))`` recovers coefficient ``a * exp(j*phi)``
    at bin b.
    """

    support: tuple[int, ...]
    coefficients: tuple[complex, ...]
    residual_norm: float


def min_measurements(n_full: int, k_sparse: int) -> int:
    """Minimum compressed length M >= K*ln(N/K) (never below K).

    The log is the natural logarithm: (N, K) = (2048, 10) gives 54.
    """
    if k_sparse < 1:
        raise ValueError("K must be a positive integer")
    if k_sparse > n_full:
        raise ValueError(f"K must not exceed N, got K={k_sparse} > N={n_full}")
    return max(k_sparse, math.ceil(k_sparse * math.log(n_full / k_sparse)))


def make_sensing_matrix(m_rows: int, n_cols: int, seed: int) -> np.ndarray:
    """M x N real Gaussian matrix with orthonormalized rows.

    Deterministic given ``seed``. Rows satisfy phi @ phi.T = I to 1e-10.
    """
    if m_rows < 1 or n_cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if m_rows > n_cols:
        raise ValueError(f"need M <= N to orthonormalize rows, got {m_rows} > {n_cols}")
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((m_rows, n_cols))
    q, _ = np.linalg.qr(gaussian.T)
    return q.T


def _real_matvec(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    # real matrix times complex vector without promoting the matrix to complex
    return mat @ vec.real + 1j * (mat @ vec.imag)


def _sensed_atom(sensing: np.ndarray, bin_index: int) -> np.ndarray:
    n_cols = sensing.shape[1]
    n = np.arange(n_cols)
    return _real_matvec(sensing, np.exp(1j * 2.0 * math.pi * bin_index * n / n_cols))


def atom_norms(sensing: np.ndarray) -> np.ndarray:
    # ||sensing @ e_b||^2 = sum_m |DFT(row_m)[b]|^2; rows are real, so the
    # magnitude spectrum is symmetric and the half-spectrum rfft suffices
    n_cols = sensing.shape[1]
    power = np.sum(np.abs(np.fft.rfft(sensing, axis=1)) ** 2, axis=0)
    full = np.empty(n_cols)
    full[: power.size] = power
    full[power.size:] = power[1 : n_cols - power.size + 1][::-1]
    return np.sqrt(np.maximum(full, 1e-300))


def omp_recover(
    measurements: np.ndarray,
    sensing: np.ndarray,
    k_sparse: int,
    *,
    norms: np.ndarray | None = None,
) -> SparseRecovery:
    """Orthogonal matching pursuit on the sensed DFT dictionary.

    Runs exactly ``k_sparse`` iterations of: pick the unselected DFT atom with
    the largest norm-adjusted |correlation| against the residual (ties broken
    by the lowest bin index), least-squares re-fit on the accumulated support,
    update the residual. Stops early only when the residual is already
    (numerically) zero, so zero measurements yield an empty recovery.

    ``norms`` may carry a precomputed ``atom_norms(sensing)`` when the same
    matrix serves many recoveries.
    """
    y = np.asarray(measurements, dtype=np.complex128).ravel()
    sensing = np.asarray(sensing, dtype=float)
    m_rows, n_cols = sensing.shape
    if y.shape[0] != m_rows:
        raise ValueError(
            f"measurement length {y.shape[0]} does not match sensing rows {m_rows}"
        )
    if k_sparse > m_rows:
        raise ValueError(f"sparsity {k_sparse} exceeds measurement count {m_rows}")

    y_norm = float(np.linalg.norm(y))
    support: list[int] = []
    coeffs = np.zeros(0, dtype=np.complex128)
    residual = y.copy()
    # sensed atoms have unequal norms, so the matched filter divides by them
    if norms is None:
        norms = atom_norms(sensing)
    atoms = np.empty((m_rows, 0), dtype=np.complex128)
    for _ in range(k_sparse):
        if float(np.linalg.norm(residual)) <= 1e-14 * max(y_norm, 1.0):
            break
        # correlation of the residual with every sensed DFT atom, via FFT:
        # atoms are sensing @ exp(j*2*pi*b*n/N), so corr[b] = DFT(sensing^T r)[b]
        corr = np.fft.fft(_real_matvec(sensing.T, residual)) / norms
        if support:
            corr[support] = 0.0
        pick = int(np.argmax(np.abs(corr)))
        support.append(pick)
        atoms = np.concatenate([atoms, _sensed_atom(sensing, pick)[:, None]], axis=1)
        coeffs, *_ = np.linalg.lstsq(atoms, y, rcond=None)
        residual = y - atoms @ coeffs
    return SparseRecovery(
        support=tuple(support),
        coefficients=tuple(complex(c) for c in coeffs),
        residual_norm=float(np.linalg.norm(residual)),
    )


def extract_tones(recovery: SparseRecovery, n_full: int, nyquist_rate_hz: float) -> list[Tone]:
    """Map recovered DFT bins to tones on the grid ``nyquist_rate_hz / N``.

    Bin b becomes frequency b*rate/N; the coefficient's magnitude and angle
    are the tone amplitude and phase (an on-grid unit tone yields amplitude 1).
    Zero-amplitude coefficients are skipped.
    """
    if nyquist_rate_hz <= 0:
        raise ValueError("nyquist_rate_hz must be > 0")
    tones = []
    for b, c in zip(recovery.support, recovery.coefficients):
        amp = abs(c)
        if amp == 0.0:
            continue
        tones.append(
            Tone(
                freq_hz=b * nyquist_rate_hz / n_full,
                amplitude=amp,
                phase_rad=wrap_phase(float(np.angle(c))),
            )
        )
    return tones
