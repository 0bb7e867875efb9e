"""Operator CLI: ingest, query, serve, eval, export-finetune, feedback-list.

Exit codes: 0 success, 1 usage error, 2 runtime error. Machine output
(--json) goes to stdout as exactly one JSON document; logs go to stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import errors, evaluation
from .engine import Engine, EngineConfig, load_benchmark_dataset, provider_from_section
from .evaluation import RuleJudge
from .llm import ModelConfig, StaticProvider
from .rag import RagConfig


def _build_engine(config_path: str | None) -> Engine:
    if config_path:
        config, raw = EngineConfig.from_file(config_path)
        provider = provider_from_section(raw.get("provider", {"type": "static"}))
        engine = Engine(config, provider=provider)
    else:
        engine = Engine(EngineConfig(), provider=StaticProvider("No provider configured."))
    return engine


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Path to the engine config file (JSON).")
@click.pass_context
def cli(ctx, config_path):
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@cli.command()
@click.option("--path", "path", required=True, help="File or directory to ingest.")
@click.option("--chunk-size", type=int, default=None)
@click.option("--overlap", type=int, default=None)
@click.pass_context
def ingest(ctx, path, chunk_size, overlap):
    """Load documents, split, embed and index them."""
    engine = _build_engine(ctx.obj["config_path"])
    if chunk_size is not None:
        engine.config.chunk_size = chunk_size
    if overlap is not None:
        engine.config.overlap = overlap
    if engine.config.overlap >= engine.config.chunk_size or engine.config.chunk_size <= 0:
        raise click.UsageError("overlap must be smaller than chunk-size")
    counts = engine.ingest_path(path)
    click.echo(json.dumps(counts))


@cli.command()
@click.option("--q", "question", required=True, help="Question to answer.")
@click.option("--chain", type=click.Choice(["stuff", "map_reduce", "refine"]), default=None)
@click.option("--k", type=int, default=None)
@click.option("--json", "as_json", is_flag=True, help="Emit the full AnswerPayload as JSON.")
@click.pass_context
def query(ctx, question, chain, k, as_json):
    """Answer a one-off question against the indexed corpus."""
    if not question.strip():
        raise click.UsageError("question must be non-empty")
    engine = _build_engine(ctx.obj["config_path"])
    overrides = {}
    if chain:
        overrides["chain"] = chain
    if k:
        overrides["k"] = k
    _, payload = engine.answer(question, overrides or None)
    if as_json:
        click.echo(json.dumps(payload.to_dict(), ensure_ascii=False))
    else:
        click.echo(payload.answer)
        for source in payload.sources:
            click.echo(f"  [{source['chunk_key']}] {source['source_uri']} ({source['score']:.3f})",
                       err=True)


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--token", default=None, help="Optional static bearer token.")
@click.pass_context
def serve(ctx, host, port, token):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    engine = _build_engine(ctx.obj["config_path"])
    app = create_app(engine, bearer_token=token)
    uvicorn.run(app, host=host, port=port)


@cli.command("eval")
@click.option("--dataset", required=True, help="JSONL benchmark dataset.")
@click.option("--configs", "configs_path", default=None,
              help="JSON file with a list of {name, k, chain, ...} entries.")
@click.option("--out-dir", default=None, help="Where to write report files.")
@click.pass_context
def eval_command(ctx, dataset, configs_path, out_dir):
    """Run the benchmark and print the metrics table."""
    if not Path(dataset).is_file():
        raise errors.NotFound(f"dataset not found: {dataset}")
    engine = _build_engine(ctx.obj["config_path"])
    items = load_benchmark_dataset(dataset)

    specs = [{"name": "default"}]
    if configs_path:
        specs = json.loads(Path(configs_path).read_text(encoding="utf-8"))
    configs = []
    for spec in specs:
        overrides = {kk: vv for kk, vv in spec.items() if kk != "name"}
        rag_config = RagConfig(model=engine.config.rag.model, **{
            "k": engine.config.rag.k, "chain": engine.config.rag.chain, **overrides,
        })
        configs.append(engine.benchmark_config(spec.get("name", "default"), rag_config))

    out = Path(out_dir) if out_dir else (
        Path(engine.config.eval_out_dir) if engine.config.eval_out_dir else None)
    report = evaluation.run_benchmark(configs, items, RuleJudge(), out_dir=out)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(
            json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
        (out / "report.txt").write_text(evaluation.render_text_table(report, extended=True))
    click.echo(evaluation.render_text_table(report))


@cli.command("export-finetune")
@click.option("--out", "out_path", required=True, help="Output JSONL path.")
@click.pass_context
def export_finetune(ctx, out_path):
    """Export approved feedback entries as a fine-tune dataset."""
    engine = _build_engine(ctx.obj["config_path"])
    manifest = engine.feedback.export_finetune(out_path)
    click.echo(json.dumps(manifest))


@cli.command("feedback-list")
@click.option("--disposition", type=click.Choice(
    ["pending", "approve_finetune", "approve_corpus", "rejected"]), default=None)
@click.pass_context
def feedback_list(ctx, disposition):
    """List feedback entries as JSON lines."""
    engine = _build_engine(ctx.obj["config_path"])
    for entry in engine.feedback.list_entries(disposition):
        click.echo(json.dumps({
            "id": entry.id,
            "response_id": entry.response_id,
            "rating": entry.rating,
            "comment": entry.comment,
            "created_at": entry.created_at,
            "disposition": entry.disposition,
        }, ensure_ascii=False))


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.UsageError as e:
        click.echo(f"usage error: {e.format_message()}", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except errors.GovQAError as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except click.exceptions.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
