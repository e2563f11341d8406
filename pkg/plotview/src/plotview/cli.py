"""Command line entry point: plotview render --spec PATH."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import SpecError
from .figures import FigureSpec, render

EXIT_OK = 0
EXIT_SPEC = 2


@click.group()
def main():
    """Render figures from offshell run CSVs."""


@main.command("render")
@click.option("--spec", "spec_path", required=True,
              type=click.Path(dir_okay=False),
              help="Figure spec JSON: one spec object or a list of them.")
def render_cmd(spec_path):
    """Render every figure described by the spec file."""
    try:
        try:
            with open(spec_path) as f:
                raw = json.load(f)
        except FileNotFoundError as exc:
            raise SpecError(f"spec file not found: {spec_path}") from exc
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec file does not parse: {exc}") from exc
        specs = raw if isinstance(raw, list) else [raw]
        base = Path(spec_path).parent
        for mapping in specs:
            spec = FigureSpec.from_mapping(mapping)
            # relative paths resolve against the spec file's directory
            spec = FigureSpec(
                kind=spec.kind,
                inputs=tuple(str(_resolve(base, p)) for p in spec.inputs),
                columns=spec.columns,
                output=str(_resolve(base, spec.output)),
                x=spec.x, scales=spec.scales, title=spec.title)
            out = render(spec)
            click.echo(f"wrote {out}")
    except SpecError as exc:
        click.echo(f"spec error: {exc}", err=True)
        sys.exit(EXIT_SPEC)


def _resolve(base: Path, p) -> Path:
    p = Path(p)
    return p if p.is_absolute() else base / p


if __name__ == "__main__":
    main()
