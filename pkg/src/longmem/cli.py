"""Command line interface: describe, hurst, rolling, test, synth, run."""

from __future__ import annotations

from dataclasses import replace
from datetime import date as Date
from pathlib import Path

import click

from .estimators import BlockLadder, hurst_dfa, hurst_rs
from .pipeline import (
    PipelineError,
    RunConfig,
    config_from_mapping,
    emit_synth,
    ingest_csv,
    load_config_file,
    parse_input_spec,
    run_pipeline,
)
from .rolling import rolling_hurst, split_at
from .series import describe as describe_values
from .series import log_returns
from .stattests import build_report
from .synth import FgnSpec


def _parse_ladder(_ctx, _param, value: str | None):
    if value is None:
        return None
    try:
        return tuple(int(s) for s in value.split(","))
    except ValueError:
        raise click.BadParameter(f"ladder must be comma-separated integers, got {value!r}")


def _parse_date(_ctx, _param, value: str | None):
    if value is None:
        return None
    try:
        return Date.fromisoformat(value)
    except ValueError:
        raise click.BadParameter(f"expected ISO-8601 date, got {value!r}")


_estimator_opt = click.option(
    "--estimator", type=click.Choice(["dfa", "rs"]), default=None,
    help="Hurst estimator [default: dfa].")
_window_opt = click.option(
    "--window", type=int, default=None,
    help="Sliding window length in datapoints [default: 500].")
_step_opt = click.option(
    "--step", type=int, default=None, help="Window advance in datapoints [default: 7].")
_ladder_opt = click.option(
    "--ladder", callback=_parse_ladder, default=None,
    help="Comma-separated block sizes [default: 4,8,16,32,64,128].")
_order_opt = click.option(
    "--detrend-order", type=int, default=None, help="DFA polynomial order [default: 1].")
_split_opt = click.option(
    "--split-date", callback=_parse_date, default=None,
    help="ISO date splitting the subsamples [default: 2008-09-15].")
_split_by_opt = click.option(
    "--split-by", type=click.Choice(["start", "end"]), default=None,
    help="Classify windows by start or end date [default: start].")
_level_opt = click.option(
    "--confidence-level", type=float, default=None,
    help="One-sided t confidence level for the bounds [default: 0.999].")
_outdir_opt = click.option(
    "--output-dir", type=click.Path(path_type=Path), default=None,
    help="Directory for report files [default: .].")
_formats_opt = click.option(
    "--formats", default=None,
    help="Comma-separated subset of json,csv [default: json,csv].")


def _build_config(inputs, config_file, **overrides) -> RunConfig:
    cfg = RunConfig()
    if config_file is not None:
        cfg = config_from_mapping(load_config_file(config_file), cfg)
    direct = {k: v for k, v in overrides.items() if v is not None}
    if "formats" in direct and isinstance(direct["formats"], str):
        direct["formats"] = frozenset(
            s.strip() for s in direct["formats"].split(",") if s.strip())
    if direct:
        cfg = replace(cfg, **direct)
    if inputs:
        cfg = replace(cfg, inputs=tuple(parse_input_spec(s) for s in inputs))
    return cfg


def _require_inputs(ctx: click.Context, inputs) -> None:
    if not inputs:
        click.echo(ctx.get_help(), err=True)
        click.echo("\nerror: no input files given", err=True)
        ctx.exit(1)


@click.group()
@click.version_option(package_name="longmem")
def main() -> None:
    """Long-memory analysis of financial return series.

    Estimates time-varying Hurst exponents over sliding windows (DFA or R/S)
    and runs the before/after-crisis test battery. Input files are CSVs with
    a 'date,price' header; '#' lines are comments.
    """


@main.command("describe")
@click.argument("inputs", nargs=-1)
@click.pass_context
def describe_cmd(ctx: click.Context, inputs) -> None:
    """Descriptive statistics of each file's log returns."""
    _require_inputs(ctx, inputs)
    status = 0
    for spec in inputs:
        path, label = parse_input_spec(spec)
        try:
            stats = describe_values(log_returns(ingest_csv(path, label)).values)
        except (ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            status = 2
            continue
        click.echo(f"{label}:")
        for key, value in stats.to_dict().items():
            click.echo(f"  {key}: {value}")
    ctx.exit(status)


@main.command("hurst")
@click.argument("inputs", nargs=-1)
@_estimator_opt
@_ladder_opt
@_order_opt
@click.pass_context
def hurst_cmd(ctx: click.Context, inputs, estimator, ladder, detrend_order) -> None:
    """Whole-series Hurst estimate for each file."""
    _require_inputs(ctx, inputs)
    status = 0
    try:
        lad = BlockLadder(ladder) if ladder else BlockLadder.default()
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)
    est = estimator or "dfa"
    order = detrend_order if detrend_order is not None else 1
    for spec in inputs:
        path, label = parse_input_spec(spec)
        try:
            values = log_returns(ingest_csv(path, label)).values
            if est == "dfa":
                h = hurst_dfa(values, lad, order)
            else:
                h = hurst_rs(values, lad)
        except (ValueError, OSError) as exc:
            click.echo(f"error: {label}: {exc}", err=True)
            status = 2
            continue
        click.echo(
            f"{label}: h={h.h:.6f} r_squared={h.r_squared:.6f} "
            f"method={h.method} points={len(h.points)}"
        )
    ctx.exit(status)


@main.command("rolling")
@click.argument("inputs", nargs=-1)
@_estimator_opt
@_window_opt
@_step_opt
@_ladder_opt
@_order_opt
@_outdir_opt
@click.pass_context
def rolling_cmd(ctx, inputs, estimator, window, step, ladder, detrend_order, output_dir):
    """Rolling-window Hurst estimates, written to <label>_rolling.csv."""
    _require_inputs(ctx, inputs)
    try:
        cfg = _build_config(
            inputs, None, estimator=estimator, window=window, step=step,
            ladder=ladder, detrend_order=detrend_order, output_dir=output_dir,
            formats="csv",
        )
        ctx.exit(run_pipeline(cfg))
    except PipelineError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)


@main.command("test")
@click.argument("inputs", nargs=-1)
@_estimator_opt
@_window_opt
@_step_opt
@_ladder_opt
@_order_opt
@_split_opt
@_split_by_opt
@_level_opt
@click.pass_context
def test_cmd(ctx, inputs, estimator, window, step, ladder, detrend_order,
             split_date, split_by, confidence_level):
    """Before/after test battery, printed as a summary per series."""
    _require_inputs(ctx, inputs)
    try:
        cfg = _build_config(
            inputs, None, estimator=estimator, window=window, step=step,
            ladder=ladder, detrend_order=detrend_order, split_date=split_date,
            split_by=split_by, confidence_level=confidence_level,
        )
    except PipelineError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)

    status = 0
    for path, label in cfg.inputs:
        try:
            returns = log_returns(ingest_csv(path, label))
            result = rolling_hurst(returns, cfg.protocol())
            before, after = split_at(result, cfg.split_date, by=cfg.split_by)
            if not before or not after:
                click.echo(f"{label}: split leaves an empty subsample; skipped", err=True)
                status = 2
                continue
            report = build_report(
                [w.estimate.h for w in before],
                [w.estimate.h for w in after],
                label,
                level=cfg.confidence_level,
            )
        except (ValueError, PipelineError, OSError) as exc:
            click.echo(f"error: {label}: {exc}", err=True)
            status = 2
            continue
        mw, lev = report.mann_whitney, report.levene
        click.echo(f"{label}: n_before={len(before)} n_after={len(after)}")
        click.echo(f"  mean before/after: {report.mean_before:.4f} / {report.mean_after:.4f}")
        click.echo(f"  mann-whitney: u1={mw.u1:.1f} u2={mw.u2:.1f} p={mw.p:.4g} ({mw.method})")
        w_str = "undefined" if lev.w is None else f"{lev.w:.4f}"
        p_str = "undefined" if lev.p is None else f"{lev.p:.4g}"
        click.echo(f"  levene: w={w_str} p={p_str}")
        for key, b in report.bounds.items():
            click.echo(
                f"  {key}: mean={b.mean:.4f} bounds=({b.lower:.4f}, {b.upper:.4f}) "
                f"inefficient={b.inefficient}"
            )
    ctx.exit(status)


@main.command("synth")
@click.argument("output", type=click.Path(path_type=Path))
@click.option("--h", "hurst_h", type=float, required=True,
              help="Target Hurst exponent in (0,1).")
@click.option("--n", type=int, required=True,
              help="Number of noise points (file gets n+1 prices).")
@click.option("--sigma", type=float, default=1.0, show_default=True, help="Noise scale.")
@click.option("--seed", type=int, default=0, show_default=True, help="Generator seed.")
def synth_cmd(output, hurst_h, n, sigma, seed) -> None:
    """Write a synthetic fGn-derived price CSV for pipeline validation."""
    path = emit_synth(FgnSpec(h=hurst_h, n=n, sigma=sigma, seed=seed), output)
    click.echo(f"wrote {path}")


@main.command("run")
@click.argument("inputs", nargs=-1)
@click.option("--config", "config_file", type=click.Path(exists=True, path_type=Path),
              default=None, help="Flat key=value config file; flags override it.")
@_estimator_opt
@_window_opt
@_step_opt
@_ladder_opt
@_order_opt
@_split_opt
@_split_by_opt
@_level_opt
@_outdir_opt
@_formats_opt
@click.pass_context
def run_cmd(ctx, inputs, config_file, estimator, window, step, ladder, detrend_order,
            split_date, split_by, confidence_level, output_dir, formats):
    """Full pipeline: stats, rolling estimates, and test report per series."""
    try:
        cfg = _build_config(
            inputs, config_file, estimator=estimator, window=window, step=step,
            ladder=ladder, detrend_order=detrend_order, split_date=split_date,
            split_by=split_by, confidence_level=confidence_level,
            output_dir=output_dir, formats=formats,
        )
        if not cfg.inputs:
            _require_inputs(ctx, ())
        ctx.exit(run_pipeline(cfg))
    except PipelineError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)


if __name__ == "__main__":
    main()
