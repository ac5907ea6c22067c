"""Run configuration: a single TOML file with family, grid, suite and
tolerance tables."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - py310 path
    import tomli as tomllib

from .metrics import (DomainRect, FamilyError, FlatFamily, HyperkahlerParams,
                      MetricFamily, OrthotoricFamily, OrthotoricParams,
                      PerturbedOrthotoricFamily)


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


DEFAULT_GRID_COUNTS = (4, 4, 2, 2)
DEFAULT_SEED = 20240801


@dataclass
class RunConfig:
    """Validated run configuration."""

    family_spec: dict
    grid_counts: tuple[int, ...] = DEFAULT_GRID_COUNTS
    seed: int = DEFAULT_SEED
    suite: tuple[str, ...] = ("all",)
    tolerances: dict = dc_field(default_factory=dict)
    corruption: float | None = None
    scan_families: list[dict] = dc_field(default_factory=list)

    def canonical(self) -> dict:
        return {
            "family": self.family_spec,
            "grid": {"counts": list(self.grid_counts), "seed": self.seed},
            "suite": list(self.suite),
            "tolerances": dict(sorted(self.tolerances.items())),
            "corruption": self.corruption,
            "scan": self.scan_families,
        }

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _parse_domain(raw: dict) -> DomainRect:
    def rng(name, default):
        v = raw.get(name, default)
        if not (isinstance(v, (list, tuple)) and len(v) == 2):
            raise ConfigError(f"domain.{name} must be a [lo, hi] pair")
        return (float(v[0]), float(v[1]))

    try:
        return DomainRect(rng("x", None) if "x" in raw else _missing("domain.x"),
                          rng("y", None) if "y" in raw else _missing("domain.y"),
                          rng("z", (-1.0, 1.0)), rng("t", (-1.0, 1.0)))
    except FamilyError as exc:
        raise ConfigError(str(exc)) from exc


def _missing(what):
    raise ConfigError(f"missing required key {what}")


def build_family(spec: dict) -> MetricFamily:
    """Construct the metric family a config section describes."""
    kind = spec.get("kind")
    if kind == "flat":
        dom = _parse_domain(spec.get("domain", {"x": [-1, 1], "y": [-1, 1]}))
        return FlatFamily(dom)
    if kind in ("orthotoric", "perturbed"):
        if "f_coeffs" not in spec or "g_coeffs" not in spec:
            raise ConfigError(f"{kind} family needs f_coeffs and g_coeffs")
        dom = _parse_domain(spec.get("domain") or _missing("family.domain"))
        try:
            params = OrthotoricParams(tuple(spec["f_coeffs"]), tuple(spec["g_coeffs"]), dom)
        except FamilyError as exc:
            raise ConfigError(str(exc)) from exc
        if kind == "perturbed":
            return PerturbedOrthotoricFamily(params, float(spec.get("eps", 1e-2)))
        return OrthotoricFamily(params)
    if kind == "hyperkahler":
        for key in ("c", "a", "b1", "b2"):
            if key not in spec:
                raise ConfigError(f"hyperkahler family needs parameter {key}")
        dom = _parse_domain(spec.get("domain") or _missing("family.domain"))
        try:
            hk = HyperkahlerParams(float(spec["c"]), float(spec["a"]),
                                   float(spec["b1"]), float(spec["b2"]), dom)
            return OrthotoricFamily(hk.to_orthotoric())
        except FamilyError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown family kind {kind!r}")


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = tomllib.loads(Path(path).read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    if "family" not in raw and not raw.get("scan"):
        raise ConfigError("config needs a [family] table")
    fam = dict(raw.get("family", {}))
    corruption = fam.pop("corruption", None)
    grid = raw.get("grid", {})
    counts = tuple(int(n) for n in grid.get("counts", DEFAULT_GRID_COUNTS))
    if len(counts) != 4 or any(n < 2 for n in counts[:2]) or any(n < 1 for n in counts):
        raise ConfigError("grid.counts must be 4 entries with at least 2 per sampled axis")
    seed = int(grid.get("seed", DEFAULT_SEED))
    suite = raw.get("suite", {}).get("checks", ["all"])
    if not isinstance(suite, list) or not suite:
        raise ConfigError("suite.checks must be a non-empty list")
    tolerances = {str(k): float(v) for k, v in raw.get("tolerances", {}).items()}
    for v in tolerances.values():
        if v <= 0:
            raise ConfigError("tolerance overrides must be positive")
    scan = raw.get("scan", {}).get("families", [])
    cfg = RunConfig(family_spec=fam, grid_counts=counts, seed=seed,
                    suite=tuple(str(s) for s in suite), tolerances=tolerances,
                    corruption=None if corruption is None else float(corruption),
                    scan_families=list(scan))
    if fam:
        build_family(fam)  # validate eagerly so bad configs exit early
    return cfg
