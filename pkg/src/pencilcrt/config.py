"""Strict JSON run configuration.

One JSON document configures every command; unknown keys anywhere are
rejected so typos fail loudly instead of silently using a default. An SNR of
``null`` (or the string "inf") means noiseless.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .bench import ExperimentConfig, METHODS
from .dealias import DealiasConfig
from .matrix_pencil import PencilConfig
from .model_order import OrderConfig
from .signal_model import SignalSpec, Tone

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(Exception):
    """Configuration file failed to parse or validate."""


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _check_keys(obj: dict, allowed: set[str], required: set[str], context: str):
    _require(isinstance(obj, dict), f"{context}: expected an object")
    unknown = set(obj) - allowed
    _require(not unknown, f"{context}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    _require(not missing, f"{context}: missing required keys {sorted(missing)}")


def _snr_value(value, context: str) -> float:
    if value is None:
        return math.inf
    if isinstance(value, str):
        _require(value.lower() in ("inf", "+inf", "infinity"), f"{context}: bad SNR {value!r}")
        return math.inf
    _require(isinstance(value, (int, float)), f"{context}: SNR must be a number or null")
    return float(value)


def _parse_tones(raw, context: str) -> SignalSpec:
    _require(isinstance(raw, list) and raw, f"{context}: need a non-empty tone list")
    tones = []
    for i, item in enumerate(raw):
        ctx = f"{context}[{i}]"
        _check_keys(item, {"freq_hz", "amplitude", "phase_rad"}, {"freq_hz", "amplitude"}, ctx)
        try:
            tones.append(
                Tone(
                    freq_hz=float(item["freq_hz"]),
                    amplitude=float(item["amplitude"]),
                    phase_rad=float(item.get("phase_rad", 0.0)),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{ctx}: {exc}") from exc
    try:
        return SignalSpec(tones)
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Everything a command might need; sections are None when absent."""

    spec: SignalSpec | None
    rate1_hz: float | None
    rate2_hz: float | None
    n_samples: int | None
    snr_db: float
    seed: int
    pencil: PencilConfig
    order: OrderConfig
    dealias_tol_hz: float | None
    amp_weight: float
    phase_weight: float
    max_fold_index_n: int | None
    f_max_hint_hz: float | None
    experiment: ExperimentConfig | None

    def dealias_config(self) -> DealiasConfig:
        """Dealias settings for the estimate path (rates come from streams or config)."""
        _require(self.rate1_hz is not None and self.rate2_hz is not None,
                 "config: sampling.rate1_hz/rate2_hz are required here")
        return self._dealias_for(self.rate1_hz, self.rate2_hz)

    def _dealias_for(self, rate1: float, rate2: float) -> DealiasConfig:
        kwargs = dict(
            freq_match_tol_hz=self.dealias_tol_hz,
            amp_weight=self.amp_weight,
            phase_weight=self.phase_weight,
        )
        try:
            if self.max_fold_index_n is not None:
                return DealiasConfig(rate1, rate2, self.max_fold_index_n, **kwargs)
            _require(
                self.f_max_hint_hz is not None,
                "config: dealias needs either max_fold_index_n or f_max_hint_hz",
            )
            return DealiasConfig.for_max_freq(rate1, rate2, self.f_max_hint_hz, **kwargs)
        except ValueError as exc:
            raise ConfigError(f"config.dealias: {exc}") from exc


_TOP_KEYS = {"signal", "sampling", "pencil", "order", "dealias", "cs", "experiment", "seed"}


def parse_config(doc: dict) -> RunConfig:
    """Validate a parsed JSON document into a RunConfig."""
    _check_keys(doc, _TOP_KEYS, set(), "config")

    spec = None
    if "signal" in doc:
        _check_keys(doc["signal"], {"tones"}, {"tones"}, "config.signal")
        spec = _parse_tones(doc["signal"]["tones"], "config.signal.tones")

    rate1 = rate2 = None
    n_samples = None
    snr_db = math.inf
    if "sampling" in doc:
        s = doc["sampling"]
        _check_keys(
            s,
            {"rate1_hz", "rate2_hz", "n_samples", "snr_db"},
            {"rate1_hz", "rate2_hz"},
            "config.sampling",
        )
        rate1, rate2 = float(s["rate1_hz"]), float(s["rate2_hz"])
        _require(rate1 > 0 and rate2 > 0, "config.sampling: rates must be > 0")
        if "n_samples" in s:
            n_samples = int(s["n_samples"])
            _require(n_samples >= 1, "config.sampling: n_samples must be >= 1")
        snr_db = _snr_value(s.get("snr_db"), "config.sampling.snr_db")

    seed = 0
    if "seed" in doc:
        _require(
            isinstance(doc["seed"], int) and doc["seed"] >= 0,
            "config.seed: must be a non-negative integer",
        )
        seed = doc["seed"]

    pencil = PencilConfig()
    if "pencil" in doc:
        p = doc["pencil"]
        _check_keys(
            p,
            {"pencil_param_l", "model_order", "svd_rel_threshold", "unit_circle_tol"},
            set(),
            "config.pencil",
        )
        try:
            pencil = PencilConfig(
                pencil_param_l=p.get("pencil_param_l"),
                model_order=p.get("model_order"),
                svd_rel_threshold=p.get("svd_rel_threshold", 1e-3),
                unit_circle_tol=p.get("unit_circle_tol", 1e-2),
            )
        except ValueError as exc:
            raise ConfigError(f"config.pencil: {exc}") from exc

    order = OrderConfig()
    if "order" in doc:
        o = doc["order"]
        _check_keys(o, {"rel_peak_threshold", "min_peak_separation_bins"}, set(), "config.order")
        try:
            order = OrderConfig(
                rel_peak_threshold=o.get("rel_peak_threshold", 0.1),
                min_peak_separation_bins=o.get("min_peak_separation_bins", 2),
            )
        except ValueError as exc:
            raise ConfigError(f"config.order: {exc}") from exc

    dealias_tol = None
    amp_weight = phase_weight = 1.0
    max_fold_n = None
    f_max_hint = None
    if "dealias" in doc:
        d = doc["dealias"]
        _check_keys(
            d,
            {"freq_match_tol_hz", "amp_weight", "phase_weight", "max_fold_index_n", "f_max_hint_hz"},
            set(),
            "config.dealias",
        )
        if "freq_match_tol_hz" in d:
            dealias_tol = float(d["freq_match_tol_hz"])
            _require(dealias_tol > 0, "config.dealias: freq_match_tol_hz must be > 0")
        amp_weight = float(d.get("amp_weight", 1.0))
        phase_weight = float(d.get("phase_weight", 1.0))
        _require(amp_weight >= 0 and phase_weight >= 0, "config.dealias: weights must be >= 0")
        if "max_fold_index_n" in d:
            max_fold_n = int(d["max_fold_index_n"])
            _require(max_fold_n >= 1, "config.dealias: max_fold_index_n must be >= 1")
        if "f_max_hint_hz" in d:
            f_max_hint = float(d["f_max_hint_hz"])
            _require(f_max_hint > 0, "config.dealias: f_max_hint_hz must be > 0")

    cs_n = cs_rate = None
    if "cs" in doc:
        c = doc["cs"]
        _check_keys(c, {"full_length_n", "nyquist_rate_hz"}, {"full_length_n", "nyquist_rate_hz"}, "config.cs")
        cs_n = int(c["full_length_n"])
        cs_rate = float(c["nyquist_rate_hz"])
        _require(cs_n >= 1, "config.cs: full_length_n must be >= 1")
        _require(cs_rate > 0, "config.cs: nyquist_rate_hz must be > 0")

    experiment = None
    if "experiment" in doc:
        e = doc["experiment"]
        _check_keys(
            e,
            {"snr_grid_db", "sample_lengths", "trials", "methods"},
            {"snr_grid_db", "sample_lengths", "trials"},
            "config.experiment",
        )
        _require(spec is not None, "config.experiment: a signal section is required")
        _require(rate1 is not None, "config.experiment: a sampling section is required")
        _require(cs_n is not None, "config.experiment: a cs section is required")
        _require(isinstance(e["snr_grid_db"], list) and e["snr_grid_db"],
                 "config.experiment: snr_grid_db must be a non-empty list")
        snr_grid = tuple(_snr_value(v, "config.experiment.snr_grid_db") for v in e["snr_grid_db"])
        _require(isinstance(e["sample_lengths"], list) and e["sample_lengths"],
                 "config.experiment: sample_lengths must be a non-empty list")
        methods = tuple(e.get("methods", list(METHODS)))
        try:
            experiment = ExperimentConfig(
                spec=spec,
                rate1_hz=rate1,
                rate2_hz=rate2,
                nyquist_rate_hz=cs_rate,
                full_length_n=cs_n,
                snr_grid_db=snr_grid,
                sample_lengths=tuple(int(n) for n in e["sample_lengths"]),
                trials=int(e["trials"]),
                master_seed=seed,
                methods=methods,
                f_max_hint_hz=f_max_hint,
                freq_match_tol_hz=dealias_tol,
            )
        except ValueError as exc:
            raise ConfigError(f"config.experiment: {exc}") from exc

    return RunConfig(
        spec=spec,
        rate1_hz=rate1,
        rate2_hz=rate2,
        n_samples=n_samples,
        snr_db=snr_db,
        seed=seed,
        pencil=pencil,
        order=order,
        dealias_tol_hz=dealias_tol,
        amp_weight=amp_weight,
        phase_weight=phase_weight,
        max_fold_index_n=max_fold_n,
        f_max_hint_hz=f_max_hint,
        experiment=experiment,
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(doc)
