"""reqplumb command line: staged pipeline runs and the review server."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .pipeline.config import PipelineConfig, load_config
from .pipeline.stages import STAGES, StageError, run_all, run_stage
from .pipeline.server import serve_review
from .pipeline.workspace import Workspace


def _parse_hierarchy_predicates(values: tuple[str, ...]) -> list[list]:
    out = []
    for v in values:
        name, _, direction = v.partition(":")
        if direction not in ("up", "down"):
            raise click.BadParameter(
                f"{v!r}: expected NAME:up (child->parent) or NAME:down (parent->child)"
            )
        out.append([name, direction == "up"])
    return out


def _load(config_path: str, hierarchy_predicate: tuple[str, ...]) -> PipelineConfig:
    cfg = load_config(config_path)
    if hierarchy_predicate:
        cfg.hierarchy_predicates = _parse_hierarchy_predicates(hierarchy_predicate)
    return cfg


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log stage progress.")
def main(verbose: bool) -> None:
    """Map requirements onto an open domain model and recommend missing concepts."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _stage_command(stage: str):
    @main.command(name=stage, help=f"Run the {stage} stage.")
    @click.option("--config", "config_path", required=True,
                  type=click.Path(exists=True, dir_okay=False))
    @click.option("--workspace", "workspace_dir", required=True, type=click.Path(file_okay=False))
    @click.option("--hierarchy-predicate", multiple=True,
                  help="Hierarchy predicate as NAME:up or NAME:down (repeatable).")
    @click.option("--force", is_flag=True, help="Re-run even if inputs are unchanged.")
    def _cmd(config_path: str, workspace_dir: str, hierarchy_predicate: tuple[str, ...],
             force: bool) -> None:
        cfg = _load(config_path, hierarchy_predicate)
        ws = Workspace(workspace_dir)
        try:
            files = run_stage(stage, cfg, ws, force=force)
        except StageError as exc:
            raise click.ClickException(str(exc)) from exc
        for f in files:
            click.echo(f)

    return _cmd


for _stage_name in STAGES:
    _stage_command(_stage_name)


@main.command(name="run-all")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--workspace", "workspace_dir", required=True, type=click.Path(file_okay=False))
@click.option("--hierarchy-predicate", multiple=True)
@click.option("--batch/--interactive", "batch", default=None,
              help="Override the configured curation mode.")
def run_all_cmd(config_path: str, workspace_dir: str,
                hierarchy_predicate: tuple[str, ...], batch: bool | None) -> None:
    """Run every stage; interactive mode pauses for curation decisions."""
    cfg = _load(config_path, hierarchy_predicate)
    if batch is not None:
        cfg.curation_mode = "batch" if batch else "interactive"
    ws = Workspace(workspace_dir)
    try:
        result = run_all(cfg, ws)
    except StageError as exc:
        raise click.ClickException(str(exc)) from exc
    if result["status"] == "awaiting-curation":
        click.echo(f"paused after {result['stage']}: record curation decisions "
                   f"(reqplumb serve) and run again")
        sys.exit(3)
    avgs = result["report"]["averages"]
    click.echo("strategy averages (original model):")
    for strategy, metrics in avgs["original"].items():
        click.echo(f"  {strategy:16s} R={metrics['recall']:.3f} "
                   f"P={metrics['precision']:.3f} F2={metrics['f2']:.3f}")
    if avgs.get("completed"):
        click.echo("strategy averages (completed model):")
        for strategy, metrics in avgs["completed"].items():
            click.echo(f"  {strategy:16s} R={metrics['recall']:.3f} "
                       f"P={metrics['precision']:.3f} F2={metrics['f2']:.3f}")


@main.command(name="serve")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--workspace", "workspace_dir", required=True, type=click.Path(file_okay=False))
@click.option("--port", default=8400, show_default=True)
@click.option("--static-dir", default=None, type=click.Path(file_okay=False),
              help="Directory with the review UI bundle (default: frontend/dist if present).")
def serve_cmd(config_path: str, workspace_dir: str, port: int, static_dir: str | None) -> None:
    """Serve the curation/review HTTP API (and UI bundle when available)."""
    cfg = load_config(config_path)
    ws = Workspace(workspace_dir)
    if static_dir is None:
        default_bundle = Path.cwd() / "frontend" / "dist"
        static_dir = str(default_bundle) if default_bundle.is_dir() else None
    click.echo(f"serving on http://127.0.0.1:{port} (workspace: {ws.root})")
    serve_review(ws, cfg, port=port, static_dir=static_dir)


if __name__ == "__main__":
    main()
