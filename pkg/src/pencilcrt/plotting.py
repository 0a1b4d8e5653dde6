"""Benchmark figure rendering (files only, no interactive backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .bench import BenchmarkResult

__all__ = ["save_benchmark_figures"]

_PANELS = (
    ("rmse_freq_hz", "frequency estimation", "frequency RMSE [Hz]"),
    ("rmse_amp_rel", "amplitude estimation", "relative amplitude RMSE"),
    ("rmse_phase_rad", "phase estimation", "phase RMSE [rad]"),
)

_METHOD_STYLE = {"gea": "o-", "cs": "s--"}


def save_benchmark_figures(result: BenchmarkResult, out_base) -> list[Path]:
    """Render one RMSE-vs-SNR figure per metric next to the CSV output.

    ``out_base`` is the benchmark CSV path; figures are written as
    ``<stem>_freq.png``, ``<stem>_amp.png`` and ``<stem>_phase.png`` in the
    same directory. Returns the written paths.
    """
    base = Path(out_base)
    cfg = result.config
    snrs = list(cfg.snr_grid_db)
    written = []
    for attr, title, ylabel in _PANELS:
        grid = getattr(result, attr)
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        for method in cfg.methods:
            for length in cfg.sample_lengths:
                values = [grid[(method, length, s)] for s in snrs]
                ax.semilogy(
                    snrs,
                    values,
                    _METHOD_STYLE.get(method, "^-"),
                    label=f"{method.upper()}, n={length}",
                    markersize=4,
                )
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, which="both", linestyle=":", alpha=0.5)
        ax.legend(fontsize=8)
        fig.tight_layout()
        suffix = attr.split("_")[1]
        path = base.with_name(f"{base.stem}_{suffix}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
