"""Command-line client for the stylometry service.

The CLI is a thin client: it reads and writes files, and sends all actual
computation to the HTTP API. By default the service runs in-process (no
server needed); pass --server to talk to a remote instance started with
`uvicorn serifu.service.app:app`.

Exit codes: 0 success, 2 validation error, 1 internal error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import httpx

from .config import PipelineConfig, load_config
from .errors import ConfigError, InputError


def _make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app
    return TestClient(app)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    try:
        response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        sys.exit(1)
    if response.status_code == 422:
        detail = response.json().get("detail", response.text)
        click.echo(f"error: {detail}", err=True)
        sys.exit(2)
    if response.status_code != 200:
        click.echo(f"error: service returned {response.status_code}: "
                   f"{response.text}", err=True)
        sys.exit(1)
    return response.json()


_SETTING_OPTIONS = [
    ("basic_vs", int, "Base vocabulary size for per-speaker targets"),
    ("eta_keep", float, "Fraction of multi-character pieces kept per prune"),
    ("em_subiters", int, "EM iterations per prune round"),
    ("max_piece_len", int, "Maximum piece length"),
    ("seed_multiplier", int, "Seed vocabulary size as a multiple of the target"),
    ("top_k", int, "Patterns reported per document"),
    ("svm_lambda", float, "Classifier regularization strength"),
    ("svm_epochs", int, "Classifier training epochs"),
    ("folds", int, "Cross-validation folds"),
    ("seed", int, "Root random seed"),
]


def settings_options(command):
    command = click.option("--config", "config_path", type=click.Path(),
                           default=None, help="Flat key-value config file.")(command)
    for name, kind, help_text in _SETTING_OPTIONS:
        flag = "--" + name.replace("_", "-")
        command = click.option(flag, name, type=kind, default=None,
                               help=help_text)(command)
    command = click.option("--log-prob-filter/--no-log-prob-filter",
                           "log_prob_filter", default=None,
                           help="Toggle the bottom-fifth word-list filter.")(command)
    return command


def build_settings(config_path, **overrides) -> dict:
    try:
        cfg = load_config(config_path) if config_path else PipelineConfig()
        names = [name for name, _, _ in _SETTING_OPTIONS] + ["log_prob_filter"]
        values = {name: getattr(cfg, name) for name in names}
        for name in names:
            if overrides.get(name) is not None:
                values[name] = overrides[name]
        PipelineConfig(**values).validate()
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    return values


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _read_models(models_dir) -> dict[str, str]:
    directory = Path(models_dir)
    if not directory.is_dir():
        click.echo(f"error: not a directory: {models_dir}", err=True)
        sys.exit(2)
    models = {path.stem: _read_text(path)
              for path in sorted(directory.glob("*.model"))}
    if not models:
        click.echo(f"error: no *.model files in {models_dir}", err=True)
        sys.exit(2)
    return models


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Speaker stylometry: subword models, speech patterns, classification."""
    ctx.obj = _make_client(server)


@main.command()
@click.argument("spec_file", type=click.Path())
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Corpus file to write.")
@click.pass_obj
def synth(client, spec_file, output):
    """Generate a synthetic corpus from a spec file."""
    data = _post(client, "/synth", {"spec_text": _read_text(spec_file)})
    Path(output).write_text(data["corpus_text"], encoding="utf-8")
    click.echo(f"wrote {data['lines']} lines for {data['speakers']} speakers "
               f"to {output}")


@main.command()
@click.argument("corpus_file", type=click.Path())
@click.option("-o", "--out-dir", required=True, type=click.Path(),
              help="Directory for model files and the manifest.")
@settings_options
@click.pass_obj
def train(client, corpus_file, out_dir, config_path, **overrides):
    """Train one subword model per speaker."""
    settings = build_settings(config_path, **overrides)
    data = _post(client, "/train", {"corpus_text": _read_text(corpus_file),
                                    "settings": settings})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for sid, text in sorted(data["models"].items()):
        (out / f"{sid}.model").write_text(text, encoding="utf-8")
    (out / "manifest.tsv").write_text(data["manifest_tsv"], encoding="utf-8")
    click.echo(f"trained {len(data['models'])} models into {out_dir}")


@main.command()
@click.argument("corpus_file", type=click.Path())
@click.option("--models", "models_dir", required=True, type=click.Path(),
              help="Directory of trained *.model files.")
@click.option("--scheme", required=True,
              type=click.Choice(["gender", "age", "character"]))
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Pattern report TSV to write.")
@click.option("--table", "table_path", type=click.Path(), default=None,
              help="Also write the full TF/IDF table as sparse triplets.")
@settings_options
@click.pass_obj
def extract(client, corpus_file, models_dir, scheme, output, table_path,
            config_path, **overrides):
    """Extract top-k characterizing patterns per document group."""
    settings = build_settings(config_path, **overrides)
    data = _post(client, "/extract", {"corpus_text": _read_text(corpus_file),
                                      "models": _read_models(models_dir),
                                      "scheme": scheme, "settings": settings})
    Path(output).write_text(data["report_tsv"], encoding="utf-8")
    if table_path:
        Path(table_path).write_text(data["table_tsv"], encoding="utf-8")
    for warning in data["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"wrote {scheme} pattern report to {output} "
               f"(word list size {data['word_list_size']})")


@main.command("extract-external")
@click.argument("segmented_file", type=click.Path())
@click.option("--scheme", required=True,
              type=click.Choice(["gender", "age", "character"]))
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Pattern report TSV to write.")
@click.option("--table", "table_path", type=click.Path(), default=None,
              help="Also write the full TF/IDF table as sparse triplets.")
@settings_options
@click.pass_obj
def extract_external(client, segmented_file, scheme, output, table_path,
                     config_path, **overrides):
    """Extract patterns from an externally segmented corpus."""
    settings = build_settings(config_path, **overrides)
    data = _post(client, "/extract-external",
                 {"segmented_text": _read_text(segmented_file),
                  "scheme": scheme, "settings": settings})
    Path(output).write_text(data["report_tsv"], encoding="utf-8")
    if table_path:
        Path(table_path).write_text(data["table_tsv"], encoding="utf-8")
    click.echo(f"wrote {scheme} pattern report to {output}")


@main.command()
@click.argument("corpus_file", type=click.Path())
@click.option("--models", "models_dir", required=True, type=click.Path(),
              help="Directory of trained *.model files.")
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Cross-validation result TSV to write.")
@settings_options
@click.pass_obj
def classify(client, corpus_file, models_dir, output, config_path, **overrides):
    """Five-group speaker classification with cross-validation."""
    settings = build_settings(config_path, **overrides)
    data = _post(client, "/classify", {"corpus_text": _read_text(corpus_file),
                                       "models": _read_models(models_dir),
                                       "settings": settings})
    Path(output).write_text(data["result_tsv"], encoding="utf-8")
    click.echo(f"mean accuracy {data['mean_accuracy']:.3f} over "
               f"{len(data['fold_accuracies'])} folds; wrote {output}")


if __name__ == "__main__":
    main()
