"""Command-line batch annotator: raw text in, interchange records out."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .engine import ENGINE_NAME, ENGINE_VERSION, AnnotationError, annotate_text


@click.group()
def main():
    """Biomedical text annotation tools."""


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--doc-id", default="", help="document id (defaults to the input file stem)")
def annotate(in_path, out_path, doc_id):
    """Annotate one document into newline-delimited interchange records."""
    doc_id = doc_id or Path(in_path).stem
    text = Path(in_path).read_text(encoding="utf-8")
    try:
        records = annotate_text(doc_id, text)
    except AnnotationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(out_path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    click.echo(
        f"{len(records)} records ({ENGINE_NAME} {ENGINE_VERSION}, "
        f"deer-annotator {__version__})"
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8100, show_default=True, type=int)
def serve(host, port):
    """Start the HTTP annotation service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
