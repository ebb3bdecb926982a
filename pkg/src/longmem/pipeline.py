"""CSV ingestion, run configuration, and the end-to-end analysis pipeline.

One input file yields three outputs in the configured directory:
``<label>_stats.json`` (descriptive statistics of the returns and of the
rolling Hurst estimates), ``<label>_rolling.csv`` (the per-window estimates),
and ``<label>_report.json`` (the before/after test battery). Files are
written atomically and runs are byte-for-byte deterministic.
"""

from __future__ import annotations

import csv
import json
import os
import sys
import tempfile
from dataclasses import dataclass, replace
from datetime import date as Date
from datetime import timedelta
from pathlib import Path

import numpy as np

from .estimators import DEFAULT_LADDER_SIZES, BlockLadder
from .rolling import (
    WINDOW_COUNT_RULE,
    RollingProtocol,
    RollingResult,
    rolling_hurst,
    split_at,
)
from .series import DescriptiveStats, PriceSeries, describe, log_returns
from .stattests import TestReport, build_report
from .synth import GENERATOR_ID, FgnSpec, generate_fgn

__all__ = [
    "PipelineError",
    "RunConfig",
    "ingest_csv",
    "emit_synth",
    "run_pipeline",
    "process_series",
    "load_config_file",
    "config_from_mapping",
    "parse_input_spec",
    "DEFAULT_SPLIT_DATE",
    "SYNTH_EPOCH",
]

DEFAULT_SPLIT_DATE = Date(2008, 9, 15)

# First price date of generated synthetic series; one observation per day.
SYNTH_EPOCH = Date(2000, 1, 3)

COUNT_NOTE = (
    "a 4203-return series at window 500, step 7 yields 530 windows under this "
    "rule; endpoint conventions that drop the final complete window yield 529"
)


class PipelineError(Exception):
    """Raised for configuration or environment failures that abort a run."""


@dataclass(frozen=True)
class RunConfig:
    """Full pipeline configuration; the defaults replay the reference protocol
    (two-year window of 500 datapoints advanced by 7, DFA-1 over the
    octave ladder, split at 2008-09-15, 0.999 confidence level)."""

    inputs: tuple[tuple[Path, str], ...] = ()
    estimator: str = "dfa"
    window: int = 500
    step: int = 7
    ladder: tuple[int, ...] = DEFAULT_LADDER_SIZES
    detrend_order: int = 1
    split_date: Date = DEFAULT_SPLIT_DATE
    split_by: str = "start"
    confidence_level: float = 0.999
    output_dir: Path = Path(".")
    formats: frozenset[str] = frozenset({"json", "csv"})

    def __post_init__(self) -> None:
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        object.__setattr__(
            self,
            "inputs",
            tuple((Path(p), str(label)) for p, label in self.inputs),
        )
        object.__setattr__(self, "formats", frozenset(self.formats))
        if not self.formats <= {"json", "csv"}:
            raise PipelineError(f"unknown formats: {sorted(self.formats - {'json', 'csv'})}")
        if not self.formats:
            raise PipelineError("at least one output format is required")
        if not 0.5 < self.confidence_level < 1.0:
            raise PipelineError("confidence_level must lie in (0.5, 1)")
        if self.split_by not in ("start", "end"):
            raise PipelineError("split_by must be 'start' or 'end'")
        # window/step/ladder validated together at load time
        self.protocol()

    def protocol(self) -> RollingProtocol:
        try:
            return RollingProtocol(
                window=self.window,
                step=self.step,
                estimator=self.estimator,
                ladder=BlockLadder(self.ladder),
                detrend_order=self.detrend_order,
            )
        except ValueError as exc:
            raise PipelineError(str(exc)) from exc

    def protocol_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "window": self.window,
            "step": self.step,
            "ladder": list(self.ladder),
            "detrend_order": self.detrend_order,
        }


def parse_input_spec(spec: str) -> tuple[Path, str]:
    """``path`` or ``path:label``; the default label is the file stem."""
    path_part, sep, label = spec.rpartition(":")
    if sep and path_part and not label:
        raise PipelineError(f"empty label in input spec {spec!r}")
    if sep and path_part and "/" not in label and os.sep not in label:
        return Path(path_part), label
    return Path(spec), Path(spec).stem


def load_config_file(path: Path) -> dict[str, str]:
    """Flat ``key = value`` config format; '#' starts a comment line."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PipelineError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def config_from_mapping(mapping: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    """Apply flat string key/values (config file fields) onto a RunConfig."""
    cfg = base or RunConfig()
    known = {
        "inputs",
        "estimator",
        "window",
        "step",
        "ladder",
        "detrend_order",
        "split_date",
        "split_by",
        "confidence_level",
        "output_dir",
        "formats",
    }
    unknown = set(mapping) - known
    if unknown:
        raise PipelineError(f"unknown config keys: {sorted(unknown)}")
    kwargs: dict = {}
    try:
        if "inputs" in mapping:
            kwargs["inputs"] = tuple(
                parse_input_spec(s.strip())
                for s in mapping["inputs"].split(",")
                if s.strip()
            )
        for key in ("window", "step", "detrend_order"):
            if key in mapping:
                kwargs[key] = int(mapping[key])
        if "ladder" in mapping:
            kwargs["ladder"] = tuple(int(s) for s in mapping["ladder"].split(","))
        if "estimator" in mapping:
            kwargs["estimator"] = mapping["estimator"].lower()
        if "split_date" in mapping:
            kwargs["split_date"] = Date.fromisoformat(mapping["split_date"])
        if "split_by" in mapping:
            kwargs["split_by"] = mapping["split_by"]
        if "confidence_level" in mapping:
            kwargs["confidence_level"] = float(mapping["confidence_level"])
        if "output_dir" in mapping:
            kwargs["output_dir"] = Path(mapping["output_dir"])
        if "formats" in mapping:
            kwargs["formats"] = frozenset(
                s.strip() for s in mapping["formats"].split(",") if s.strip()
            )
    except ValueError as exc:
        raise PipelineError(f"bad config value: {exc}") from exc
    return replace(cfg, **kwargs)


def ingest_csv(path: Path | str, label: str | None = None) -> PriceSeries:
    """Read a dated price CSV into a PriceSeries.

    The header row must name ``date`` and ``price`` columns; '#' lines are
    comments. Rows must be ISO-8601 dated, strictly increasing, with positive
    decimal prices; violations are rejected with the physical row number.
    """
    path = Path(path)
    if label is None:
        label = path.stem
    rows: list[tuple[int, list[str]]] = []
    with path.open(newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            rows.append((lineno, next(csv.reader([raw]))))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    header_line, header = rows[0]
    columns = [c.strip().lower() for c in header]
    if "date" not in columns or "price" not in columns:
        raise ValueError(
            f"{path}: row {header_line}: header must name 'date' and 'price' columns"
        )
    date_idx, price_idx = columns.index("date"), columns.index("price")

    dates: list[Date] = []
    prices: list[float] = []
    for lineno, cells in rows[1:]:
        if len(cells) <= max(date_idx, price_idx):
            raise ValueError(f"{path}: row {lineno}: expected at least "
                             f"{max(date_idx, price_idx) + 1} columns")
        try:
            d = Date.fromisoformat(cells[date_idx].strip())
        except ValueError as exc:
            raise ValueError(
                f"{path}: row {lineno}: unparsable date {cells[date_idx]!r}"
            ) from exc
        raw_price = cells[price_idx].strip()
        if raw_price == "":
            raise ValueError(f"{path}: row {lineno}: blank price")
        try:
            p = float(raw_price)
        except ValueError as exc:
            raise ValueError(
                f"{path}: row {lineno}: unparsable price {raw_price!r}"
            ) from exc
        if not np.isfinite(p) or p <= 0:
            raise ValueError(f"{path}: row {lineno}: non-positive price {raw_price}")
        if dates:
            if d == dates[-1]:
                raise ValueError(f"{path}: row {lineno}: duplicate date {d.isoformat()}")
            if d < dates[-1]:
                raise ValueError(
                    f"{path}: row {lineno}: dates not increasing ({d.isoformat()} "
                    f"after {dates[-1].isoformat()})"
                )
        dates.append(d)
        prices.append(p)
    return PriceSeries(label, tuple(dates), tuple(prices))


def _atomic_write(path: Path, data: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_synth(spec: FgnSpec, path: Path | str) -> Path:
    """Write a synthetic price CSV derived from generated fGn.

    Prices follow p[0] = 1, p[t+1] = p[t] * exp(x[t]/100), so re-ingesting the
    file and taking log returns recovers the generated noise. The seed and H
    are recorded in '#' header comments.
    """
    path = Path(path)
    noise = generate_fgn(spec)
    log_prices = np.concatenate([[0.0], np.cumsum(noise / 100.0)])
    prices = np.exp(log_prices)
    lines = [
        "# synthetic fractional Gaussian noise price series",
        f"# h={spec.h!r} n={spec.n} sigma={spec.sigma!r} seed={spec.seed}",
        f"# generator={GENERATOR_ID}",
        "# price rule: p[0]=1; p[t+1]=p[t]*exp(x[t]/100)",
        "date,price",
    ]
    for i, p in enumerate(prices):
        day = SYNTH_EPOCH + timedelta(days=i)
        lines.append(f"{day.isoformat()},{float(p)!r}")
    try:
        _atomic_write(path, "\n".join(lines) + "\n")
    except OSError as exc:
        raise PipelineError(f"cannot write {path}: {exc}") from exc
    return path


def _rolling_csv(result: RollingResult, n_returns: int) -> str:
    proto = result.protocol
    lines = [
        f"# series: {result.id}",
        f"# estimator: {proto.estimator}",
        f"# detrend_order: {proto.detrend_order if proto.estimator == 'dfa' else 'n/a'}",
        f"# window: {proto.window}",
        f"# step: {proto.step}",
        f"# ladder: {','.join(str(s) for s in proto.ladder.sizes)}",
        f"# returns: {n_returns}",
        f"# windows: {len(result.estimates)}",
        f"# window_count_rule: {WINDOW_COUNT_RULE}",
        f"# note: {COUNT_NOTE}",
        "window_start_date,window_end_date,h,r_squared",
    ]
    for w in result.estimates:
        lines.append(
            f"{w.start_date.isoformat()},{w.end_date.isoformat()},"
            f"{w.estimate.h:.10f},{w.estimate.r_squared:.10f}"
        )
    return "\n".join(lines) + "\n"


def _stats_payload(
    label: str,
    config: RunConfig,
    returns_stats: DescriptiveStats,
    hurst_stats: DescriptiveStats,
    n_windows: int,
) -> dict:
    return {
        "label": label,
        "returns": returns_stats.to_dict(),
        "hurst": hurst_stats.to_dict(),
        "protocol": config.protocol_dict(),
        "window_count": n_windows,
        "window_count_rule": WINDOW_COUNT_RULE,
    }


def _report_payload(
    label: str,
    config: RunConfig,
    report: TestReport | None,
    counts: tuple[int, int],
    note: str | None = None,
) -> dict:
    payload: dict = {
        "label": label,
        "protocol": config.protocol_dict(),
        "split_date": config.split_date.isoformat(),
        "split_by": config.split_by,
        "counts": {"before": counts[0], "after": counts[1]},
    }
    if report is not None:
        body = report.to_dict()
        body.pop("label")
        payload["tests"] = body
    else:
        payload["tests"] = None
        payload["note"] = note
    return payload


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def process_series(prices: PriceSeries, config: RunConfig) -> list[Path]:
    """Run the full analysis for one ingested series and write its reports."""
    out = Path(config.output_dir)
    returns = log_returns(prices)
    rets_stats = describe(returns.values)
    protocol = config.protocol()
    result = rolling_hurst(returns, protocol)
    hurst_stats = describe(result.h_values)
    before, after = split_at(result, config.split_date, by=config.split_by)

    if before and after:
        report = build_report(
            [w.estimate.h for w in before],
            [w.estimate.h for w in after],
            prices.id,
            level=config.confidence_level,
        )
        note = None
    else:
        report = None
        side = "before" if not before else "after"
        note = f"split at {config.split_date.isoformat()} leaves the "\
               f"'{side}' subsample empty; test battery skipped"

    written: list[Path] = []
    if "json" in config.formats:
        stats_path = out / f"{prices.id}_stats.json"
        _atomic_write(stats_path, _dump_json(_stats_payload(
            prices.id, config, rets_stats, hurst_stats, len(result.estimates))))
        written.append(stats_path)
        report_path = out / f"{prices.id}_report.json"
        _atomic_write(report_path, _dump_json(_report_payload(
            prices.id, config, report, (len(before), len(after)), note)))
        written.append(report_path)
    if "csv" in config.formats:
        rolling_path = out / f"{prices.id}_rolling.csv"
        _atomic_write(rolling_path, _rolling_csv(result, len(returns)))
        written.append(rolling_path)
    return written


def _check_output_dir(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = tempfile.TemporaryFile(dir=out)
        probe.close()
    except OSError as exc:
        raise PipelineError(f"output directory {out} is not writable: {exc}") from exc


def run_pipeline(config: RunConfig, *, log=sys.stderr) -> int:
    """Process every configured input series; returns the process exit status.

    0 on full success; 2 when at least one series failed (the remaining
    series are still processed). Raises PipelineError before any computation
    when the configuration itself is unusable (no inputs, unwritable output
    directory).
    """
    if not config.inputs:
        raise PipelineError("no input series configured")
    _check_output_dir(Path(config.output_dir))
    failures = 0
    for path, label in config.inputs:
        try:
            prices = ingest_csv(path, label)
            written = process_series(prices, config)
        except (ValueError, PipelineError, OSError) as exc:
            failures += 1
            print(f"error: {label}: {exc}", file=log)
            continue
        for p in written:
            print(f"wrote {p}", file=log)
    return 2 if failures else 0
