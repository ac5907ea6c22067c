"""Deterministic point sampling over a family's domain box."""
from __future__ import annotations

import numpy as np

from .chart import Point
from .metrics import DomainRect, FramePackage, MetricFamily


def _inset(lo: float, hi: float, margin: float) -> tuple[float, float]:
    pad = (hi - lo) * margin
    return lo + pad, hi - pad


def lattice_points(domain: DomainRect, counts, margin: float = 0.05) -> list[Point]:
    """Cartesian lattice inset from the box boundary; fully deterministic."""
    axes = []
    for (lo, hi), n in zip(domain.ranges, counts):
        lo, hi = _inset(lo, hi, margin)
        axes.append(np.linspace(lo, hi, int(n)))
    pts = []
    for x in axes[0]:
        for y in axes[1]:
            for z in axes[2]:
                for t in axes[3]:
                    pts.append(Point(float(x), float(y), float(z), float(t)))
    return pts


def sample_points(domain: DomainRect, n: int, rng: np.random.Generator,
                  margin: float = 0.02) -> list[Point]:
    """n points uniform over the (inset) box, reproducible from the generator."""
    bounds = [_inset(lo, hi, margin) for (lo, hi) in domain.ranges]
    raw = rng.uniform([b[0] for b in bounds], [b[1] for b in bounds], size=(n, 4))
    return [Point.of(row) for row in raw]


def usable_points(points: list[Point], family: MetricFamily,
                  frame: FramePackage | None = None):
    """Split points into (usable, skipped): inadmissible points are dropped
    silently, degenerate-frame points with a warning."""
    from .metrics import warn_if_degenerate

    good, skipped = [], []
    for p in points:
        if not family.admissible(p):
            skipped.append(p)
            continue
        if frame is not None and warn_if_degenerate(frame, p):
            skipped.append(p)
            continue
        good.append(p)
    return good, skipped


def check_rng(seed: int, name: str) -> np.random.Generator:
    """Per-check generator: reproducible and independent across check names."""
    import zlib

    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(name.encode())]))
