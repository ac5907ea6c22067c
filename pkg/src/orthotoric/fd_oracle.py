"""Finite-difference derivative path, kept as an independent oracle.

Central differences replace the dual-number jets wherever the production
pipeline differentiates; feeding the resulting jets through the same tensor
algebra gives an independent check of every derivative the toolkit takes.
Steps: 1e-5 for gradients (error ~1e-10) and 8e-5 for Hessians, which
balances truncation against roundoff for the stiff (x - y)^(-k) metric
components near the narrow end of the domain.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .chart import Point
from .curvature import CurvaturePackage
from .metrics import MetricAtPoint, MetricFamily

STEP_GRAD = 1e-5
STEP_HESS = 8e-5


def fd_scalar_jet(fn: Callable[[Point], float], p: Point,
                  h1: float = STEP_GRAD, h2: float = STEP_HESS):
    """(value, gradient, Hessian) of a scalar function by central differences."""
    c = p.coords
    val = fn(p)
    grad = np.zeros(4)
    hess = np.zeros((4, 4))
    for i in range(4):
        cp, cm = c.copy(), c.copy()
        cp[i] += h1
        cm[i] -= h1
        grad[i] = (fn(Point.of(cp)) - fn(Point.of(cm))) / (2 * h1)
    for i in range(4):
        cp, cm = c.copy(), c.copy()
        cp[i] += h2
        cm[i] -= h2
        hess[i, i] = (fn(Point.of(cp)) - 2 * val + fn(Point.of(cm))) / h2 ** 2
        for j in range(i + 1, 4):
            cpp, cpm, cmp_, cmm = c.copy(), c.copy(), c.copy(), c.copy()
            cpp[[i, j]] += h2
            cmm[[i, j]] -= h2
            cpm[i] += h2
            cpm[j] -= h2
            cmp_[i] -= h2
            cmp_[j] += h2
            hess[i, j] = hess[j, i] = (
                fn(Point.of(cpp)) - fn(Point.of(cpm))
                - fn(Point.of(cmp_)) + fn(Point.of(cmm))) / (4 * h2 ** 2)
    return val, grad, hess


def fd_metric_jet(family: MetricFamily, p: Point,
                  h1: float = STEP_GRAD, h2: float = STEP_HESS) -> MetricAtPoint:
    """Metric 2-jet with all derivatives taken by central differences."""
    c = p.coords
    g = family.metric(p)
    dg = np.zeros((4, 4, 4))
    d2g = np.zeros((4, 4, 4, 4))
    for k in range(4):
        cp, cm = c.copy(), c.copy()
        cp[k] += h1
        cm[k] -= h1
        dg[k] = (family.metric(Point.of(cp)) - family.metric(Point.of(cm))) / (2 * h1)
    for k in range(4):
        cp, cm = c.copy(), c.copy()
        cp[k] += h2
        cm[k] -= h2
        d2g[k, k] = (family.metric(Point.of(cp)) - 2 * g
                     + family.metric(Point.of(cm))) / h2 ** 2
        for l in range(k + 1, 4):
            cpp, cpm, cmp_, cmm = c.copy(), c.copy(), c.copy(), c.copy()
            cpp[[k, l]] += h2
            cmm[[k, l]] -= h2
            cpm[k] += h2
            cpm[l] -= h2
            cmp_[k] -= h2
            cmp_[l] += h2
            d2g[k, l] = d2g[l, k] = (
                family.metric(Point.of(cpp)) - family.metric(Point.of(cpm))
                - family.metric(Point.of(cmp_)) + family.metric(Point.of(cmm))) / (4 * h2 ** 2)
    return MetricAtPoint(p, g, dg, d2g)


def fd_curvature(family: MetricFamily, p: Point) -> CurvaturePackage:
    """Curvature package whose metric derivatives come from finite differences."""
    return CurvaturePackage(fd_metric_jet(family, p))


def metric_jet_agreement(family: MetricFamily, p: Point) -> float:
    """Largest relative disagreement between exact and FD metric derivatives,
    each derivative order normalized by its own magnitude."""
    exact = family.metric_jet(p)
    fd = fd_metric_jet(family, p)
    r1 = np.abs(exact.dg - fd.dg).max() / max(1.0, float(np.abs(exact.dg).max()))
    r2 = np.abs(exact.d2g - fd.d2g).max() / max(1.0, float(np.abs(exact.d2g).max()))
    return float(max(r1, r2))


def curvature_agreement(family: MetricFamily, p: Point,
                        exact: "CurvaturePackage | None" = None) -> float:
    """Relative disagreement of Christoffel and Riemann between the exact-jet
    and finite-difference paths."""
    if exact is None:
        exact = CurvaturePackage(family.metric_jet(p))
    fd = fd_curvature(family, p)
    r1 = (np.abs(exact.gamma - fd.gamma).max()
          / max(1.0, float(np.abs(exact.gamma).max())))
    r2 = (np.abs(exact.riemann - fd.riemann).max()
          / max(1.0, float(np.abs(exact.riemann).max())))
    return float(max(r1, r2))
