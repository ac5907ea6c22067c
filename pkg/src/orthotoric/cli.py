"""Command-line front end: run the verification suite or classify families.

Exit codes: 0 all checks PASS, 1 some check FAILs, 2 configuration error,
3 internal error (including degenerate-frame saturation of the grid).
"""
from __future__ import annotations

import csv
import io
import sys

import click

from .chart import ChartError, DomainError
from .checks import DegenerateSaturationError, emit, run_suite
from .config import ConfigError, build_family, load_config
from .metrics import FamilyError
from .qch import ContradictionError, classify, diagnostics
from .sampling import lattice_points

EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


@click.group()
def main():
    """Verification suite for orthotoric Kahler-surface geometry."""


def _bail_config(msg: str):
    click.echo(f"config error: {msg}", err=True)
    sys.exit(EXIT_CONFIG)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=False), help="TOML run configuration")
@click.option("--format", "fmt", default="summary",
              type=click.Choice(["json", "csv", "summary"]), show_default=True)
@click.option("--suite", "suite", default=None,
              help="comma-separated check names (overrides [suite] in the config)")
@click.option("--seed", type=int, default=None, help="override grid.seed")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write the report here instead of stdout")
def verify(config_path, fmt, suite, seed, out_path):
    """Run the configured checks and emit a report."""
    try:
        cfg = load_config(config_path)
        if seed is not None:
            cfg.seed = seed
        if suite:
            cfg.suite = tuple(s.strip() for s in suite.split(",") if s.strip())
    except (ConfigError, FamilyError, DomainError) as exc:
        _bail_config(str(exc))
    try:
        report = run_suite(cfg)
        payload = emit(report, fmt)
    except ConfigError as exc:
        _bail_config(str(exc))
    except DegenerateSaturationError as exc:
        click.echo(f"degenerate_frame_saturation: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    except (ChartError, FamilyError) as exc:
        click.echo(f"domain_violation: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal_error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(payload)
    else:
        click.echo(payload.decode(), nl=False)
    sys.exit(0 if report.status == "PASS" else EXIT_FAIL)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=False))
@click.option("--out", "out_path", type=click.Path(), default=None)
def scan(config_path, out_path):
    """Classify every family in the config's [scan] table; emit CSV."""
    try:
        cfg = load_config(config_path)
        specs = cfg.scan_families or ([cfg.family_spec] if cfg.family_spec else [])
        if not specs:
            raise ConfigError("scan needs [[scan.families]] entries or a [family]")
    except ConfigError as exc:
        _bail_config(str(exc))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "kind", "label", "ricci_max", "dphi_max",
                     "f_coeffs", "g_coeffs"])
    status = 0
    for i, spec in enumerate(specs):
        try:
            family = build_family(dict(spec))
            points = lattice_points(family.domain, cfg.grid_counts)
            d = diagnostics(family, points)
            label = classify(family, points)
        except ContradictionError as exc:
            writer.writerow([i, spec.get("kind", "?"), "CONTRADICTION",
                             "", "", "", str(exc)])
            status = EXIT_FAIL
            continue
        except (ConfigError, FamilyError, ChartError) as exc:
            _bail_config(f"scan entry {i}: {exc}")
        params = getattr(family, "params", None)
        writer.writerow([
            i, family.kind, label,
            repr(d.ricci_max), repr(d.dphi_max),
            " ".join(repr(c) for c in params.f_coeffs) if params else "",
            " ".join(repr(c) for c in params.g_coeffs) if params else "",
        ])
    payload = buf.getvalue().encode()
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(payload)
    else:
        click.echo(payload.decode(), nl=False)
    sys.exit(status)


if __name__ == "__main__":
    main()
