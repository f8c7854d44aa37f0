"""Command line front end: simulate, fit, predict, monitor, report.

Exit codes are a stable contract: 0 success (or final monitor state
Healthy), 2 input or validation error, 3 final state Warning, 4 final
state Burn.
"""

from __future__ import annotations

import dataclasses
import functools
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .errors import GrindmonError
from .lda import DEFAULT_RIDGE
from .monitor import (
    BURN,
    WARNING,
    MonitorConfig,
    format_event,
    load_model,
    observe,
    save_model,
    start_monitor,
)
from .pipeline import (
    build_report,
    confusion_matrix,
    fit_bundle,
    predict_campaign,
    report_to_csv,
)
from .simulate import PRESETS, generate_campaign, make_preset
from .traces import load_manifest, load_trace

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_WARNING = 3
EXIT_BURN = 4


@dataclass(frozen=True)
class RunConfig:
    """Validated per-invocation overrides shared by the fitting pipeline."""

    manifest_path: str
    model_path: str
    resample_length: int = 512
    components: int | None = None
    variance_target: float | None = None
    priors: tuple[float, float] | None = None
    ridge: float = DEFAULT_RIDGE
    warning_fraction: float = 0.8
    hold_count: int = 1


def _exit_2_on_bad_input(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (GrindmonError, OSError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _parse_priors(text: str) -> tuple[float, float] | None:
    text = text.strip().lower()
    if text == "proportional":
        return None
    if text == "equal":
        return (0.5, 0.5)
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(
            "priors must be 'proportional', 'equal', or 'p_noburn,p_burn'"
        )
    return (float(parts[0]), float(parts[1]))


@click.group()
def main():
    """Grinding-burn detection from spindle power traces."""


@main.command()
@click.option("--preset", "preset_name", default="default", show_default=True,
              type=click.Choice(sorted(PRESETS)))
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False), help="Campaign output directory.")
@click.option("--seed", default=42, show_default=True, type=int)
@_exit_2_on_bad_input
def simulate(preset_name: str, out_dir: str, seed: int):
    """Generate a synthetic campaign: trace CSVs plus manifests."""
    preset = make_preset(preset_name, seed)
    manifest = generate_campaign(preset, out_dir)
    click.echo(f"wrote {len(manifest.entries)} traces under {out_dir}")
    for wheel in preset.wheels:
        n_units = sum(count for _, count in wheel.checkpoints)
        click.echo(
            f"  {wheel.wheel_id}: {n_units} units, "
            f"burn onset at {wheel.burn_onset_parts} parts"
        )
    click.echo(f"combined manifest: {Path(out_dir) / 'manifest.csv'}")


@main.command()
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", required=True,
              type=click.Path(dir_okay=False), help="Output model file.")
@click.option("--resample-length", default=512, show_default=True, type=int)
@click.option("--components", type=int, default=None,
              help="Fixed PC count; default picks by variance target.")
@click.option("--variance-target", type=float, default=None,
              help="Cumulative explained-variance target in (0, 1].")
@click.option("--priors", default="proportional", show_default=True,
              help="'proportional', 'equal', or 'p_noburn,p_burn'.")
@click.option("--ridge", default=DEFAULT_RIDGE, show_default=True, type=float)
@click.option("--warning-fraction", default=0.8, show_default=True, type=float)
@click.option("--hold-count", default=1, show_default=True, type=int)
@_exit_2_on_bad_input
def fit(manifest_path, model_path, resample_length, components, variance_target,
        priors, ridge, warning_fraction, hold_count):
    """Fit the burn classifier on a fully labeled campaign."""
    config = RunConfig(
        manifest_path=manifest_path,
        model_path=model_path,
        resample_length=resample_length,
        components=components,
        variance_target=variance_target,
        priors=_parse_priors(priors),
        ridge=ridge,
        warning_fraction=warning_fraction,
        hold_count=hold_count,
    )
    manifest = load_manifest(config.manifest_path)
    bundle, summary = fit_bundle(
        manifest,
        resample_length=config.resample_length,
        components=config.components,
        variance_target=config.variance_target,
        priors=config.priors,
        ridge=config.ridge,
        monitor_config=MonitorConfig(
            warning_fraction=config.warning_fraction,
            hold_count=config.hold_count,
        ),
    )
    save_model(bundle, config.model_path)
    click.echo(f"observations: {summary.n_observations}")
    click.echo(f"samples per trace: {summary.n_samples_per_trace}")
    click.echo(f"components: {summary.n_components}")
    click.echo(f"cumulative explained variance: {summary.cumulative_variance:.6f}")
    click.echo(f"class counts: NoBurn={summary.n_noburn} Burn={summary.n_burn}")
    click.echo(f"threshold: {summary.threshold!r}")
    click.echo(f"warning limit: {summary.warning_limit!r}")
    click.echo(f"model written to {config.model_path}")


def _predictions_csv(manifest, verdicts) -> str:
    lines = ["unit_id,wheel_id,parts_ground,ld1,predicted,label"]
    for entry, verdict in zip(manifest.entries, verdicts):
        lines.append(
            f"{entry.unit_id},{entry.wheel_id},{entry.parts_ground},"
            f"{verdict.ld1!r},{verdict.label},{entry.label or ''}"
        )
    return "\n".join(lines) + "\n"


def _echo_confusion(counts) -> None:
    click.echo("confusion matrix (rows actual, cols predicted; order NoBurn, Burn):")
    click.echo(f"  NoBurn {counts[0, 0]:5d} {counts[0, 1]:5d}")
    click.echo(f"  Burn   {counts[1, 0]:5d} {counts[1, 1]:5d}")
    correct = int(counts[0, 0] + counts[1, 1])
    click.echo(f"accuracy: {correct}/{int(counts.sum())}")


@main.command()
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the predictions table here instead of stdout.")
@_exit_2_on_bad_input
def predict(model_path, manifest_path, out_path):
    """Classify every unit in a campaign against a fitted model."""
    bundle = load_model(model_path)
    manifest = load_manifest(manifest_path)
    verdicts = predict_campaign(bundle, manifest)
    table = _predictions_csv(manifest, verdicts)
    if out_path is None:
        click.echo(table, nl=False)
    else:
        Path(out_path).write_text(table, encoding="utf-8")
        click.echo(f"predictions written to {out_path}")
    counts = confusion_matrix(verdicts, manifest.labels())
    if counts is not None:
        _echo_confusion(counts)


@main.command()
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.argument("traces", nargs=-1, type=click.Path(dir_okay=False))
@_exit_2_on_bad_input
def monitor(model_path, traces):
    """Stream traces through the three-state health monitor.

    Trace file paths come as arguments, or line-delimited on stdin when
    no arguments are given.  Emits one JSON event per trace; the exit
    code reflects the final state (0 Healthy, 3 Warning, 4 Burn).
    """
    bundle = load_model(model_path)
    state = start_monitor(bundle)
    paths = list(traces)
    if not paths:
        paths = [line.strip() for line in sys.stdin if line.strip()]
    for path in paths:
        trace = load_trace(path)
        if not trace.unit_id:
            trace = dataclasses.replace(trace, unit_id=Path(path).stem)
        event, state = observe(state, bundle, trace)
        click.echo(format_event(event))
    if state.state == BURN:
        sys.exit(EXIT_BURN)
    if state.state == WARNING:
        sys.exit(EXIT_WARNING)


@main.command()
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the score table here instead of stdout.")
@_exit_2_on_bad_input
def report(model_path, manifest_path, out_path):
    """Tabulate PC scores and LD1 per unit, flagging the wear axis."""
    bundle = load_model(model_path)
    manifest = load_manifest(manifest_path)
    rep = build_report(bundle, manifest)
    csv_text = report_to_csv(rep)

    def summary(line: str, to_stderr: bool):
        click.echo(line, err=to_stderr)

    to_stderr = out_path is None
    if out_path is None:
        click.echo(csv_text, nl=False)
    else:
        Path(out_path).write_text(csv_text, encoding="utf-8")
        click.echo(f"score table written to {out_path}")
    for j in range(rep.n_components):
        summary(f"pc_{j + 1} |spearman vs order| = {rep.pc_spearman[j]:.4f}",
                to_stderr)
    summary(f"ld1 |spearman vs order| = {rep.ld1_spearman:.4f}", to_stderr)
    summary(f"wear axis: pc_{rep.wear_axis}", to_stderr)
    summary(f"threshold = {rep.threshold!r}", to_stderr)
    summary(f"warning_limit = {rep.warning_limit!r}", to_stderr)


if __name__ == "__main__":
    main()
