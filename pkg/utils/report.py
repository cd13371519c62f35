import logging
from pathlib import Path

import click
from flask import current_app


logger = logging.getLogger(__name__)


def render(payload):
    """One report document: sorted keys, two-space indent, trailing newline."""
    return current_app.json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit(payload, out=None):
    text = render(payload)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        click.echo(text, nl=False)
    return text
