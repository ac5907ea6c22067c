"""Holomorphic sectional curvature quasi-constancy and family classification.

The defining property under test: K(X) = R(X, JX, JX, X) for unit X depends
only on the base point and on r = |X_D|, the norm of the projection of X
onto the J-invariant plane D = span{E1, E3}.  Unit vectors with fixed r are
sampled as

    X = r (cos s E1 + sin s E3) + sqrt(1 - r^2) (cos u E2 + sin u E4)

over a deterministic (s, u) lattice, and the spread of K within each
(point, r) level set is reported.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import ChartError, Point
from .curvature import CurvaturePackage, curvature_at
from .metrics import (FlatFamily, MetricFamily, OrthotoricFamily,
                      hyperkahler_parameters)

UNIT_TOL = 1e-12


@dataclass
class QCHSample:
    """One sampled holomorphic curvature value."""

    point: Point
    X: np.ndarray
    r: float
    K: float


def holomorphic_curvature(curv: CurvaturePackage, J_vals: np.ndarray,
                          X: np.ndarray) -> float:
    """R(X, JX, JX, X) for a unit tangent vector X in coordinate components."""
    g = curv.metric.g
    norm2 = float(X @ g @ X)
    if abs(norm2 - 1.0) > UNIT_TOL:
        raise ChartError(f"|X|^2 = {norm2} is not 1")
    jx = J_vals @ X
    return float(np.einsum("ijkl,i,j,k,l->", curv.riemann, X, jx, jx, X))


def _oriented_tetrad(family: MetricFamily, p: Point) -> tuple[np.ndarray, CurvaturePackage]:
    """Tetrad columns (v1, v2) spanning D and (v3, v4) spanning its orthogonal
    complement, Gram-Schmidt corrected so it stays orthonormal for perturbed
    metrics."""
    curv = curvature_at(family, p)
    g = curv.metric.g
    fr = family.frame().at(p)
    cols = [fr.E[0], fr.E[2], fr.E[1], fr.E[3]]  # (E1, E3, E2, E4)
    out = []
    for v in cols:
        w = v.copy()
        for u in out:
            w = w - (u @ g @ w) * u
        out.append(w / np.sqrt(w @ g @ w))
    return np.stack(out, axis=1), curv


def _phase_lattice(n_phases: int) -> tuple[np.ndarray, np.ndarray]:
    ns = int(round(np.sqrt(n_phases)))
    nu = max(1, n_phases // ns)
    s = np.linspace(0.0, 2 * np.pi, ns, endpoint=False)
    u = np.linspace(0.0, 2 * np.pi, nu, endpoint=False)
    return s, u


def qch_samples(family: MetricFamily, p: Point, r: float,
                n_phases: int = 16) -> list[QCHSample]:
    """Holomorphic curvature samples at one point and one |X_D| level."""
    s_grid, u_grid = _phase_lattice(n_phases)
    V, curv = _oriented_tetrad(family, p)
    g = curv.metric.g
    rf = np.einsum("ijkl,ia,jb,kc,ld->abcd", curv.riemann, V, V, V, V)
    rho = np.sqrt(max(0.0, 1.0 - r * r))
    out = []
    for s in s_grid:
        for u in u_grid:
            Xf = np.array([r * np.cos(s), r * np.sin(s),
                           rho * np.cos(u), rho * np.sin(u)])
            JXf = np.array([-r * np.sin(s), r * np.cos(s),
                            -rho * np.sin(u), rho * np.cos(u)])
            K = float(np.einsum("abcd,a,b,c,d->", rf, Xf, JXf, JXf, Xf))
            out.append(QCHSample(point=p, X=V @ Xf, r=r, K=K))
    return out


@dataclass
class QCHReport:
    max_spread: float
    worst_point: Point
    worst_r: float
    n_samples: int


def qch_spread(family: MetricFamily, points: list[Point],
               r_values=(0.0, 0.25, 0.5, 0.75, 1.0),
               n_phases: int = 16) -> QCHReport:
    """Largest within-level-set spread of K over the grid.

    Frames too close to degenerate (phi near a multiple of pi/2) are skipped
    by the caller's sampling; here the tetrad is rebuilt by Gram-Schmidt at
    every point so the same scan runs on perturbed metrics.
    """
    s_grid, u_grid = _phase_lattice(n_phases)
    worst, worst_p, worst_r, count = -1.0, points[0], 0.0, 0
    for p in points:
        V, curv = _oriented_tetrad(family, p)
        rf = np.einsum("ijkl,ia,jb,kc,ld->abcd", curv.riemann, V, V, V, V)
        for r in r_values:
            rho = np.sqrt(max(0.0, 1.0 - r * r))
            ks = []
            for s in s_grid:
                for u in u_grid:
                    X = np.array([r * np.cos(s), r * np.sin(s),
                                  rho * np.cos(u), rho * np.sin(u)])
                    JX = np.array([-r * np.sin(s), r * np.cos(s),
                                   -rho * np.sin(u), rho * np.cos(u)])
                    ks.append(float(np.einsum("abcd,a,b,c,d->", rf, X, JX, JX, X)))
                    count += 1
            spread = max(ks) - min(ks)
            if spread > worst:
                worst, worst_p, worst_r = spread, p, r
    return QCHReport(max_spread=worst, worst_point=worst_p, worst_r=worst_r,
                     n_samples=count)


# -- classification ---------------------------------------------------------------

LABEL_FLAT = "FLAT"
LABEL_HK_ALL_ORTHOTORIC = "HYPERKAHLER_ALL_ORTHOTORIC"
LABEL_HK_UNIQUE_ORTHOTORIC = "HYPERKAHLER_UNIQUE_ORTHOTORIC"
LABEL_HK_CALABI = "HYPERKAHLER_CALABI"
LABEL_GENERIC = "GENERIC_ORTHOTORIC"


class ContradictionError(ChartError):
    """Diagnostics disagree with the classification dichotomy; either the
    implementation or the tolerance table is wrong."""


RICCI_ZERO_TOL = 1e-8
PHI_CONSTANT_TOL = 1e-8


@dataclass
class Diagnostics:
    ricci_max: float
    dphi_max: float
    hk_fit: tuple[float, float, float, float] | None
    kind: str


def classify_from_diagnostics(d: Diagnostics) -> str:
    """The dichotomy on precomputed diagnostics (unit-testable)."""
    if d.kind == "flat":
        return LABEL_FLAT
    if d.ricci_max <= RICCI_ZERO_TOL:
        if d.dphi_max <= PHI_CONSTANT_TOL:
            return LABEL_HK_CALABI
        if d.hk_fit is None:
            raise ContradictionError(
                f"Ricci vanishes (max {d.ricci_max:.2e}) but the profiles are "
                "not of the Ricci-flat polynomial shape")
        c = d.hk_fit[0]
        return LABEL_HK_ALL_ORTHOTORIC if c == 0.0 else LABEL_HK_UNIQUE_ORTHOTORIC
    return LABEL_GENERIC


def diagnostics(family: MetricFamily, points: list[Point]) -> Diagnostics:
    if isinstance(family, FlatFamily):
        return Diagnostics(0.0, 0.0, None, "flat")
    if not isinstance(family, OrthotoricFamily) or family.kind == "perturbed":
        raise ChartError(f"cannot classify family kind {family.kind}")
    frame = family.frame()
    ricci_max = max(float(np.abs(curvature_at(family, p).ricci).max())
                    for p in points)
    dphi_max = max(float(np.linalg.norm(frame.phi(p).grad)) for p in points)
    return Diagnostics(ricci_max=ricci_max, dphi_max=dphi_max,
                       hk_fit=hyperkahler_parameters(family.params),
                       kind=family.kind)


def classify(family: MetricFamily, points: list[Point]) -> str:
    """Label the family from Ricci norm, phi-constancy and profile shape."""
    return classify_from_diagnostics(diagnostics(family, points))
