"""Command-line front end: synth, estimate and bench.

Exit codes: 0 success, 1 partial result (some component ambiguous or
unresolved), 2 config error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, bench, dealias, matrix_pencil, model_order, signal_model, streamio
from .config import ConfigError, load_config
from .errors import AmbiguousFrequencyError, EstimationError

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _fmt(x) -> str:
    """Locale-independent float formatting with 17 significant digits."""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def cmd_synth(args) -> int:
    cfg = load_config(args.config)
    if cfg.spec is None or cfg.rate1_hz is None or cfg.n_samples is None:
        raise ConfigError("synth needs signal.tones, sampling rates and sampling.n_samples")
    out_base = Path(args.out if args.out else "stream")
    seed = args.seed if args.seed is not None else cfg.seed
    paths = []
    for chan, rate in enumerate((cfg.rate1_hz, cfg.rate2_hz), start=1):
        stream = signal_model.synthesize(cfg.spec, rate, cfg.n_samples)
        stream = signal_model.add_awgn(stream, cfg.snr_db, bench.derive_seed(seed, 0, 0, chan))
        path = out_base.with_name(f"{out_base.stem}_ch{chan}.snyq")
        streamio.write_stream(path, stream)
        paths.append(path)
    print(
        f"wrote {len(paths)} streams of {cfg.n_samples} samples "
        f"({cfg.rate1_hz:g} Hz, {cfg.rate2_hz:g} Hz): " + ", ".join(str(p) for p in paths)
    )
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    try:
        stream1 = streamio.read_stream(args.stream1)
        stream2 = streamio.read_stream(args.stream2)
    except (OSError, streamio.StreamFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if stream1.rate_hz == stream2.rate_hz:
        print("error: rates must differ between the two streams", file=sys.stderr)
        return EXIT_CONFIG

    pencil_cfg = cfg.pencil
    if pencil_cfg.model_order is None:
        order = model_order.combine_order(
            model_order.estimate_order(stream1, cfg.order),
            model_order.estimate_order(stream2, cfg.order),
        )
        if order == 0:
            print("error: no spectral peaks found in either stream", file=sys.stderr)
            return EXIT_PARTIAL
        pencil_cfg = replace(pencil_cfg, model_order=order)

    dealias_cfg = cfg._dealias_for(stream1.rate_hz, stream2.rate_hz)
    set1 = matrix_pencil.solve_pencil(stream1, pencil_cfg)
    set2 = matrix_pencil.solve_pencil(stream2, pencil_cfg)
    pairs = dealias.pair_components(set1, set2, dealias_cfg)

    rows = []
    worst = EXIT_OK
    for pair in pairs:
        try:
            tone = dealias.resolve_frequency(pair, dealias_cfg)
            rows.append(
                [tone.freq_hz, tone.amplitude, tone.phase_rad, tone.k1, tone.k2,
                 tone.residual_hz, "ok"]
            )
        except AmbiguousFrequencyError as exc:
            worst = EXIT_PARTIAL
            amp = 0.5 * (pair.chan1.amplitude + pair.chan2.amplitude)
            rows.append([min(exc.candidates), amp, pair.chan1.phase_rad, -1, -1,
                         float("nan"), "ambiguous"])
        except EstimationError:
            worst = EXIT_PARTIAL
            amp = 0.5 * (pair.chan1.amplitude + pair.chan2.amplitude)
            rows.append([float("nan"), amp, pair.chan1.phase_rad, -1, -1,
                         float("nan"), "no_match"])
    rows.sort(key=lambda r: (r[0] != r[0], r[0]))  # NaNs last
    header = ["freq_hz", "amplitude", "phase_rad", "k1", "k2", "residual_hz", "status"]
    if args.out:
        _write_csv(args.out, header, rows)
        print(f"wrote {len(rows)} tones to {args.out}")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    return worst


def cmd_bench(args) -> int:
    cfg = load_config(args.config)
    if cfg.experiment is None:
        raise ConfigError("bench needs an experiment section")
    experiment = cfg.experiment
    if args.seed is not None:
        experiment = replace(experiment, master_seed=args.seed)
    result = bench.run_sweep(experiment, workers=args.workers)

    out = Path(args.out if args.out else "bench.csv")
    header = [
        "method", "sample_length", "snr_db",
        "rmse_freq_hz", "rmse_amp_rel", "rmse_phase_rad", "failures",
    ]
    rows = []
    long_rows = []
    for key in result.cells():
        method, length, snr = key
        rows.append(
            [method, length, snr, result.rmse_freq_hz[key], result.rmse_amp_rel[key],
             result.rmse_phase_rad[key], result.failure_count[key]]
        )
        for metric, grid in (
            ("rmse_freq_hz", result.rmse_freq_hz),
            ("rmse_amp_rel", result.rmse_amp_rel),
            ("rmse_phase_rad", result.rmse_phase_rad),
        ):
            long_rows.append([method, length, snr, metric, grid[key]])
    _write_csv(out, header, rows)
    long_path = out.with_name(f"{out.stem}_long{out.suffix}")
    _write_csv(long_path, ["method", "sample_length", "snr_db", "metric", "value"], long_rows)
    written = [out, long_path]
    if not args.no_figures:
        from .plotting import save_benchmark_figures

        written += save_benchmark_figures(result, out)
    print("wrote: " + ", ".join(str(p) for p in written))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pencilcrt",
        description=(
            "Dual-rate sub-Nyquist frequency estimation: matrix-pencil extraction "
            "plus CRT de-aliasing, with a compressed-sensing baseline benchmark."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="synthesize the two channel stream files")
    p_synth.add_argument("--config", required=True, help="JSON config with signal and sampling sections")
    p_synth.add_argument("--out", help="output base path (default ./stream -> stream_ch1.snyq, stream_ch2.snyq)")
    p_synth.add_argument("--seed", type=int, help="override the config master seed")
    p_synth.set_defaults(func=cmd_synth)

    p_est = sub.add_parser("estimate", help="recover tones from two stream files")
    p_est.add_argument("stream1", help="channel 1 stream file")
    p_est.add_argument("stream2", help="channel 2 stream file")
    p_est.add_argument("--config", required=True, help="JSON config with dealias (and optional pencil/order) sections")
    p_est.add_argument("--out", help="tone table CSV path (default: print to stdout)")
    p_est.set_defaults(func=cmd_estimate)

    p_bench = sub.add_parser("bench", help="run the Monte Carlo method comparison")
    p_bench.add_argument("--config", required=True, help="JSON config with an experiment section")
    p_bench.add_argument("--out", help="benchmark CSV path (default ./bench.csv)")
    p_bench.add_argument("--seed", type=int, help="override the config master seed")
    p_bench.add_argument("--workers", type=int, help="trial thread count (default $PENCILCRT_THREADS or 1)")
    p_bench.add_argument("--no-figures", action="store_true", help="skip PNG figure rendering")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EstimationError as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
