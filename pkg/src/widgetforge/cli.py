"""Command-line interface: service, mock monitoring API, evaluation."""

from __future__ import annotations

import json
import logging
import os
import sys

import click

from .errors import WidgetForgeError
from .evaluation.harness import RunConfig, render_table, run_eval
from .evaluation.datasetgen import DATASET_SEED, write_dataset
from .evaluation.records import load_dataset
from .evaluation.replayfix import (
    build_corrupt_grouping_fixture,
    build_corrupt_widget_type_fixture,
    build_oracle_fixture,
)
from .evaluation.significance import compare_runs
from .prompts import build_prompts
from .vocabulary import load_global_vocabulary
from .widgets import validate_widget_json

log = logging.getLogger(__name__)


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--port", type=int, default=lambda: int(os.environ.get("PORT", "8000")), help="Listen port (PORT env).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--replay-file", type=click.Path(exists=True), default=None, help="Run offline against a replay fixture instead of a live LLM.")
@click.option("--few-shot", type=click.Choice(["on", "off"]), default="on", show_default=True)
def serve(port: int, host: str, replay_file: str | None, few_shot: str):
    """Run the widget-generation HTTP service."""
    import uvicorn

    from .server import create_app_from_env

    app = create_app_from_env(replay_file=replay_file, few_shot=few_shot == "on")
    uvicorn.run(app, host=host, port=port)


@main.command("mock-server")
@click.option("--fixtures", type=click.Path(exists=True), required=True, help="Directory with services/applications/endpoints/slo-configs JSON fixtures.")
@click.option("--port", type=int, default=0, show_default=True, help="Listen port (0 picks a free one).")
@click.option("--latency-ms", type=int, default=0, show_default=True)
@click.option("--auth-token", default=None)
def mock_server(fixtures: str, port: int, latency_ms: int, auth_token: str | None):
    """Run the fixture-backed mock monitoring API."""
    from .mockapi import MockMonitoringServer

    server = MockMonitoringServer(
        fixtures, port=port, auth_token=auth_token, latency_ms=latency_ms
    ).start()
    click.echo(f"mock monitoring API listening on {server.base_url}")
    try:
        import signal

        signal.pause()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()


@main.group("eval")
def eval_group():
    """Evaluation harness commands."""


@eval_group.command("run")
@click.option("--dataset", type=click.Path(exists=True), required=True)
@click.option("--mode", type=click.Choice(["live", "replay"]), default="replay", show_default=True)
@click.option("--replay-file", type=click.Path(exists=True), default=None)
@click.option("--few-shot", type=click.Choice(["on", "off"]), default="on", show_default=True)
@click.option("--threshold", type=float, default=0.8, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write the JSON report here.")
@click.option("--workers", type=int, default=1, show_default=True, help="Parallel records in live mode.")
def eval_run(dataset, mode, replay_file, few_shot, threshold, out, workers):
    """Score a dataset and print the accuracy table."""
    config = RunConfig(
        dataset_path=dataset,
        llm_mode=mode,
        replay_file=replay_file,
        few_shot=few_shot == "on",
        threshold=threshold,
        output_path=out,
        max_workers=workers,
    )
    try:
        report = run_eval(config)
    except WidgetForgeError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(render_table(report))
    if out:
        click.echo(f"report written to {out}")


@eval_group.command("compare")
@click.argument("report_a", type=click.Path(exists=True))
@click.argument("report_b", type=click.Path(exists=True))
def eval_compare(report_a, report_b):
    """Exact McNemar comparison of two run reports."""
    with open(report_a, encoding="utf-8") as handle:
        a = json.load(handle)
    with open(report_b, encoding="utf-8") as handle:
        b = json.load(handle)
    try:
        summary = compare_runs(a, b)
    except WidgetForgeError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@eval_group.command("make-replay")
@click.option("--dataset", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option(
    "--variant",
    type=click.Choice(["oracle", "corrupt-widget-type", "corrupt-grouping"]),
    default="oracle",
    show_default=True,
)
@click.option("--few-shot", type=click.Choice(["on", "off"]), default="on", show_default=True)
def eval_make_replay(dataset, out, variant, few_shot):
    """Build a replay fixture for a dataset."""
    vocab = load_global_vocabulary()
    records = load_dataset(dataset, vocab)
    prompts = build_prompts(vocab, few_shot=few_shot == "on")
    builder = {
        "oracle": build_oracle_fixture,
        "corrupt-widget-type": build_corrupt_widget_type_fixture,
        "corrupt-grouping": build_corrupt_grouping_fixture,
    }[variant]
    client = builder(records, prompts, out)
    click.echo(f"wrote {len(client)} replay entries to {out}")


@eval_group.command("synth")
@click.option("--out", type=click.Path(), required=True)
@click.option("--seed", type=int, default=DATASET_SEED, show_default=True)
def eval_synth(out, seed):
    """Regenerate the synthetic evaluation dataset."""
    count = write_dataset(out, seed=seed)
    click.echo(f"wrote {count} records to {out}")


@main.command()
@click.argument("document", type=click.Path(exists=True))
def validate(document):
    """Validate a widget JSON document against the published schema."""
    with open(document, encoding="utf-8") as handle:
        text = handle.read()
    report = validate_widget_json(text)
    if report.ok:
        click.echo("valid")
        return
    for issue in report.issues:
        click.echo(f"{issue.path or '/'}: {issue.message}")
    sys.exit(1)


if __name__ == "__main__":
    main()
