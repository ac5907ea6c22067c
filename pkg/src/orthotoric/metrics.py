"""Explicit metric families on a single chart.

The central family is the orthotoric metric built from two positive
polynomial profiles F(x), G(y) on a rectangle with x > y:

    g = (x-y) (dx^2/F + dy^2/G) + (F (dz - y dt)^2 + G (dz - x dt)^2) / (x-y)

with the distinguished orthonormal frame (h = (x-y)^(-1/2), a = sqrt F,
b = sqrt G)

    E1 = h a dx,                      theta1 =  dx / (h a)
    E2 = -h b dy,                     theta2 = -dy / (h b)
    E3 = (h x / a) dz + (h / a) dt,   theta3 =  a h (dz - y dt)
    E4 = (h y / b) dz + (h / b) dt,   theta4 = -b h (dz - x dt)

The signs on E2, E4 put the frame angle phi in the first quadrant:
alpha cos(phi) = a h^3 and alpha sin(phi) = b h^3 with alpha > 0, so
alpha = sqrt(F + G) (x-y)^(-3/2) and tan(phi) = b/a.  The structure
equations of the coframe are sign-sensitive and hold verbatim in this
convention (they are checked, not assumed).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chart import (DIM, ChartError, DomainError, Jet, OneForm, Point,
                    ScalarField, VectorField, jatan, jlog, jsqrt)

POSITIVITY_GRID = 32
DEGENERATE_PHI_TOL = 1e-6


class FamilyError(ChartError):
    """Invalid metric-family parameters."""


class DegenerateFrameWarning(UserWarning):
    """Frame angle too close to a multiple of pi/2 at a sample point."""


def poly_eval(coeffs: Sequence[float], u):
    """Evaluate a polynomial (coefficients lowest degree first) on a Jet or float."""
    acc = Jet.constant(0.0) if isinstance(u, Jet) else 0.0
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


@dataclass(frozen=True)
class DomainRect:
    """Axis-aligned sampling box; admissibility constraints act on (x, y)."""

    x: tuple[float, float]
    y: tuple[float, float]
    z: tuple[float, float] = (-1.0, 1.0)
    t: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        for name in ("x", "y", "z", "t"):
            lo, hi = getattr(self, name)
            if not (lo < hi):
                raise FamilyError(f"empty {name}-range [{lo}, {hi}]")

    @property
    def ranges(self) -> tuple[tuple[float, float], ...]:
        return (self.x, self.y, self.z, self.t)

    def contains_xy(self, p: Point) -> bool:
        return (self.x[0] <= p.x <= self.x[1]) and (self.y[0] <= p.y <= self.y[1])


@dataclass(frozen=True)
class OrthotoricParams:
    """Profiles F, G as coefficient lists (lowest degree first) plus the domain.

    Construction rejects parameter sets whose rectangle violates x > y at a
    corner or whose profiles fail positivity on a 32-point sub-grid per axis.
    """

    f_coeffs: tuple[float, ...]
    g_coeffs: tuple[float, ...]
    domain: DomainRect

    def __post_init__(self):
        object.__setattr__(self, "f_coeffs", tuple(float(c) for c in self.f_coeffs))
        object.__setattr__(self, "g_coeffs", tuple(float(c) for c in self.g_coeffs))
        if self.domain.x[0] <= self.domain.y[1]:
            raise FamilyError(
                f"x > y fails on the rectangle: x_min={self.domain.x[0]} "
                f"<= y_max={self.domain.y[1]}")
        for xs in np.linspace(*self.domain.x, POSITIVITY_GRID):
            if poly_eval(self.f_coeffs, float(xs)) <= 0.0:
                raise FamilyError(f"F not positive at x={xs}")
        for ys in np.linspace(*self.domain.y, POSITIVITY_GRID):
            if poly_eval(self.g_coeffs, float(ys)) <= 0.0:
                raise FamilyError(f"G not positive at y={ys}")


@dataclass(frozen=True)
class HyperkahlerParams:
    """Profile parameters of the Ricci-flat sub-family.

    Expands exactly to F(x) = c x^2 + 2 a x + b2 and
    G(y) = -c y^2 - 2 a y + b1.
    """

    c: float
    a: float
    b1: float
    b2: float
    domain: DomainRect

    def to_orthotoric(self) -> OrthotoricParams:
        f = (self.b2, 2.0 * self.a, self.c)
        g = (self.b1, -2.0 * self.a, -self.c)
        return OrthotoricParams(_trim(f), _trim(g), self.domain)


def _trim(coeffs: tuple[float, ...]) -> tuple[float, ...]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0.0:
        out.pop()
    return tuple(out)


def hyperkahler_profiles(hk: HyperkahlerParams) -> OrthotoricParams:
    """Exact polynomial expansion of the Ricci-flat profile shape."""
    return hk.to_orthotoric()


def hyperkahler_parameters(params: OrthotoricParams,
                           atol: float = 1e-12) -> tuple[float, float, float, float] | None:
    """(c, a, b1, b2) when the profiles match F = c x^2 + 2 a x + b2,
    G = -c y^2 - 2 a y + b1; None otherwise."""
    if len(params.f_coeffs) > 3 or len(params.g_coeffs) > 3:
        return None
    f = list(params.f_coeffs) + [0.0] * (3 - len(params.f_coeffs))
    g = list(params.g_coeffs) + [0.0] * (3 - len(params.g_coeffs))
    c, a, b2, b1 = f[2], f[1] / 2.0, f[0], g[0]
    scale = max(1.0, max(abs(v) for v in f + g))
    if abs(g[1] + 2.0 * a) <= atol * scale and abs(g[2] + c) <= atol * scale:
        return (c, a, b1, b2)
    return None


class MetricAtPoint:
    """Metric value with its full 2-jet at a point.

    dg[k, i, j] = d_k g_ij and d2g[k, l, i, j] = d_k d_l g_ij.
    """

    __slots__ = ("point", "g", "dg", "d2g", "_inv")

    def __init__(self, point: Point, g: np.ndarray, dg: np.ndarray, d2g: np.ndarray):
        self.point = point
        self.g = g
        self.dg = dg
        self.d2g = d2g
        self._inv = None

    @property
    def inverse(self) -> np.ndarray:
        if self._inv is None:
            try:
                np.linalg.cholesky(self.g)
            except np.linalg.LinAlgError as exc:
                raise ChartError("metric not positive definite") from exc
            self._inv = np.linalg.inv(self.g)
        return self._inv


class MetricFamily:
    """Base for chart metric families: a domain plus metric component fields."""

    kind = "abstract"

    def __init__(self, domain: DomainRect):
        self.domain = domain
        self._g_fields: list[list[ScalarField | None]] = [[None] * DIM for _ in range(DIM)]
        self._jet_cache: dict[Point, MetricAtPoint] = {}

    def admissible(self, p: Point) -> bool:
        return self.domain.contains_xy(p)

    def require(self, p: Point) -> None:
        if not self.admissible(p):
            raise DomainError(
                f"point {tuple(p.coords)} outside the {self.kind} family domain")

    def _set_component(self, i: int, j: int, f: ScalarField) -> None:
        self._g_fields[i][j] = f
        if i != j:
            self._g_fields[j][i] = f

    def metric_jet(self, p: Point) -> MetricAtPoint:
        cached = self._jet_cache.get(p)
        if cached is not None:
            return cached
        self.require(p)
        g = np.zeros((DIM, DIM))
        dg = np.zeros((DIM, DIM, DIM))
        d2g = np.zeros((DIM, DIM, DIM, DIM))
        for i in range(DIM):
            for j in range(i, DIM):
                f = self._g_fields[i][j]
                if f is None:
                    continue
                jet = f(p)
                g[i, j] = g[j, i] = jet.value
                dg[:, i, j] = dg[:, j, i] = jet.grad
                d2g[:, :, i, j] = d2g[:, :, j, i] = jet.hess
        out = MetricAtPoint(p, g, dg, d2g)
        if len(self._jet_cache) < 4096:
            self._jet_cache[p] = out
        return out

    def metric(self, p: Point) -> np.ndarray:
        return self.metric_jet(p).g

    def describe(self) -> dict:
        return {"kind": self.kind}


class FlatFamily(MetricFamily):
    """Euclidean chart baseline: identity metric, vanishing jet."""

    kind = "flat"

    def __init__(self, domain: DomainRect | None = None):
        super().__init__(domain or DomainRect((-2.0, 2.0), (-2.0, 2.0)))
        one = ScalarField.constant(1.0)
        for i in range(DIM):
            self._set_component(i, i, one)

    def admissible(self, p: Point) -> bool:
        return True

    def frame(self) -> "FramePackage":
        cached = getattr(self, "_frame", None)
        if cached is not None:
            return cached
        E = [VectorField.coordinate_basis(i) for i in range(DIM)]
        theta = [OneForm.constant(np.eye(DIM)[i]) for i in range(DIM)]
        zero = ScalarField.constant(0.0)
        self._frame = FramePackage(self, E, theta, alpha=zero, phi=zero,
                                   alpha_cos=zero, alpha_sin=zero,
                                   ln_alpha_cos=None, ln_alpha_sin=None)
        return self._frame


class OrthotoricFamily(MetricFamily):
    """The orthotoric metric family with its distinguished frame."""

    kind = "orthotoric"

    def __init__(self, params: OrthotoricParams):
        super().__init__(params.domain)
        self.params = params
        fc, gc = params.f_coeffs, params.g_coeffs
        dom = self.admissible

        def sf(fn):
            return ScalarField(fn, dom)

        F = sf(lambda x, y, z, t: poly_eval(fc, x))
        G = sf(lambda x, y, z, t: poly_eval(gc, y))
        w = sf(lambda x, y, z, t: x - y)
        self.F, self.G, self.w = F, G, w
        xf = sf(lambda x, y, z, t: x)
        yf = sf(lambda x, y, z, t: y)
        self._set_component(0, 0, w / F)
        self._set_component(1, 1, w / G)
        self._set_component(2, 2, (F + G) / w)
        self._set_component(2, 3, (yf * F + xf * G) / w * -1.0 + self._zt_extra())
        self._set_component(3, 3, (yf * yf * F + xf * xf * G) / w)

    def _zt_extra(self) -> ScalarField:
        return ScalarField.constant(0.0)

    def admissible(self, p: Point) -> bool:
        return (self.domain.contains_xy(p) and p.x > p.y
                and poly_eval(self.params.f_coeffs, p.x) > 0.0
                and poly_eval(self.params.g_coeffs, p.y) > 0.0)

    def frame(self) -> "FramePackage":
        cached = getattr(self, "_frame", None)
        if cached is not None:
            return cached
        fc, gc = self.params.f_coeffs, self.params.g_coeffs
        dom = self.admissible

        def sf(fn):
            return ScalarField(fn, dom)

        def h_of(x, y):
            return (x - y) ** -0.5

        a = sf(lambda x, y, z, t: jsqrt(poly_eval(fc, x)))
        b = sf(lambda x, y, z, t: jsqrt(poly_eval(gc, y)))
        h = sf(lambda x, y, z, t: h_of(x, y))
        zero = ScalarField.constant(0.0)

        E1 = VectorField([h * a, zero, zero, zero])
        E2 = VectorField([zero, -(h * b), zero, zero])
        E3 = VectorField([zero, zero,
                          sf(lambda x, y, z, t: h_of(x, y) * x / jsqrt(poly_eval(fc, x))),
                          h / a])
        E4 = VectorField([zero, zero,
                          sf(lambda x, y, z, t: h_of(x, y) * y / jsqrt(poly_eval(gc, y))),
                          h / b])
        th1 = OneForm([1.0 / (h * a), zero, zero, zero])
        th2 = OneForm([zero, -1.0 / (h * b), zero, zero])
        th3 = OneForm([zero, zero, a * h,
                       sf(lambda x, y, z, t: -jsqrt(poly_eval(fc, x)) * h_of(x, y) * y)])
        th4 = OneForm([zero, zero, -(b * h),
                       sf(lambda x, y, z, t: jsqrt(poly_eval(gc, y)) * h_of(x, y) * x)])

        alpha = sf(lambda x, y, z, t:
                   jsqrt(poly_eval(fc, x) + poly_eval(gc, y)) * (x - y) ** -1.5)
        phi = (b / a).map(jatan)
        alpha_cos = a * (h ** 3)
        alpha_sin = b * (h ** 3)
        ln_alpha_cos = sf(lambda x, y, z, t:
                          0.5 * jlog(poly_eval(fc, x)) - 1.5 * jlog(x - y))
        ln_alpha_sin = sf(lambda x, y, z, t:
                          0.5 * jlog(poly_eval(gc, y)) - 1.5 * jlog(x - y))
        self._frame = FramePackage(self, [E1, E2, E3, E4], [th1, th2, th3, th4],
                                   alpha=alpha, phi=phi,
                                   alpha_cos=alpha_cos, alpha_sin=alpha_sin,
                                   ln_alpha_cos=ln_alpha_cos,
                                   ln_alpha_sin=ln_alpha_sin)
        return self._frame

    def describe(self) -> dict:
        return {"kind": self.kind,
                "f_coeffs": list(self.params.f_coeffs),
                "g_coeffs": list(self.params.g_coeffs)}


class PerturbedOrthotoricFamily(OrthotoricFamily):
    """Orthotoric metric with a symmetric eps * x^2 dz dt defect.

    Breaks the Kahler and QCH identities by a controlled amount; used as the
    negative control in spread and residual tests.
    """

    kind = "perturbed"

    def __init__(self, params: OrthotoricParams, eps: float):
        self.eps = float(eps)
        super().__init__(params)

    def _zt_extra(self) -> ScalarField:
        eps = self.eps
        return ScalarField(lambda x, y, z, t: x * x * eps)

    def describe(self) -> dict:
        out = super().describe()
        out["eps"] = self.eps
        return out


@dataclass
class FramePackage:
    """Orthonormal frame fields with the coframe and the scalars alpha, phi.

    For orthotoric families the fields satisfy theta_i(E_j) = delta_ij and
    g(E_i, E_j) = delta_ij on the domain; connection forms are computed from
    the metric, not stored.
    """

    family: MetricFamily
    E: list[VectorField]
    theta: list[OneForm]
    alpha: ScalarField
    phi: ScalarField
    alpha_cos: ScalarField
    alpha_sin: ScalarField
    ln_alpha_cos: ScalarField | None
    ln_alpha_sin: ScalarField | None
    label: str = ""

    def __post_init__(self):
        self._at_cache: dict[Point, FrameAtPoint] = {}

    def at(self, p: Point) -> "FrameAtPoint":
        cached = self._at_cache.get(p)
        if cached is not None:
            return cached
        self.family.require(p)
        E_val = np.zeros((DIM, DIM))
        E_jac = np.zeros((DIM, DIM, DIM))
        th_val = np.zeros((DIM, DIM))
        th_jac = np.zeros((DIM, DIM, DIM))
        for j in range(DIM):
            v, jac = self.E[j].values_jac(p)
            E_val[j], E_jac[j] = v, jac
            v, jac = self.theta[j].values_jac(p)
            th_val[j], th_jac[j] = v, jac
        out = FrameAtPoint(
            point=p,
            E=E_val, dE=E_jac, theta=th_val, dtheta=th_jac,
            alpha=self.alpha(p), phi=self.phi(p),
            alpha_cos=self.alpha_cos(p), alpha_sin=self.alpha_sin(p),
            ln_alpha_cos=None if self.ln_alpha_cos is None else self.ln_alpha_cos(p),
            ln_alpha_sin=None if self.ln_alpha_sin is None else self.ln_alpha_sin(p),
        )
        if len(self._at_cache) < 4096:
            self._at_cache[p] = out
        return out

    def is_degenerate(self, p: Point, tol: float = DEGENERATE_PHI_TOL) -> bool:
        """True when phi sits within tol of a multiple of pi/2."""
        phi = self.phi(p).value
        k = round(phi / (np.pi / 2))
        return abs(phi - k * np.pi / 2) < tol

    def connection_form_table(self, p: Point) -> np.ndarray:
        """om[i, j, m] = theta_i(nabla_{d_m} E_j), the connection forms of the
        metric connection expressed in this frame."""
        from .curvature import curvature_at
        from .hermitian import connection_forms
        return connection_forms(self.at(p), curvature_at(self.family, p).gamma)

    def corrupted(self, factor: float = 1.01) -> "FramePackage":
        """Negative-control copy with E1 scaled; no longer orthonormal."""
        E = [self.E[0].scaled(factor)] + list(self.E[1:])
        return FramePackage(self.family, E, self.theta, self.alpha, self.phi,
                            self.alpha_cos, self.alpha_sin,
                            self.ln_alpha_cos, self.ln_alpha_sin,
                            label=self.label + f"+corrupt({factor})")


@dataclass
class FrameAtPoint:
    """Evaluated frame data: E[j] are frame-vector components, dE[j, i, m]
    = d_m E_j^i, same layout for the coframe."""

    point: Point
    E: np.ndarray
    dE: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    alpha: Jet
    phi: Jet
    alpha_cos: Jet
    alpha_sin: Jet
    ln_alpha_cos: Jet | None
    ln_alpha_sin: Jet | None

    def directional(self, j: int, jet: Jet) -> float:
        """E_j(f) for a scalar with the given jet at the point."""
        return float(self.E[j] @ jet.grad)


def orthotoric_metric(params: OrthotoricParams, p: Point) -> MetricAtPoint:
    """The orthotoric metric with its full 2-jet at p."""
    return OrthotoricFamily(params).metric_jet(p)


def orthotoric_frame(params: OrthotoricParams) -> FramePackage:
    """Distinguished-frame fields for the orthotoric family."""
    return OrthotoricFamily(params).frame()


def flat_metric(p: Point) -> MetricAtPoint:
    """Identity metric with vanishing jet."""
    return FlatFamily().metric_jet(p)


def warn_if_degenerate(pkg: FramePackage, p: Point) -> bool:
    """Emit a DegenerateFrameWarning and report True for near-degenerate phi."""
    if pkg.is_degenerate(p):
        warnings.warn(f"frame angle degenerate at {tuple(p.coords)}",
                      DegenerateFrameWarning, stacklevel=2)
        return True
    return False
