"""Single-chart tensor calculus with exact first and second derivatives.

Scalar fields are evaluated through forward-mode dual numbers carrying a
value, a gradient and a Hessian (a second-order jet), so derivatives of the
closed-form metric components are exact to machine precision.  Coordinates
are a fixed 4-tuple (x, y, z, t) mapped to indices 0..3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DIM = 4
COORD_NAMES = ("x", "y", "z", "t")


class ChartError(ValueError):
    """Invalid input to a chart operation."""


class DomainError(ChartError):
    """Point lies outside the declared chart domain."""


class SingularMetricError(ChartError):
    """Metric is singular or not positive definite at the point."""


@dataclass(frozen=True)
class Point:
    """A point of the coordinate patch."""

    x: float
    y: float
    z: float
    t: float

    def __post_init__(self):
        for name in COORD_NAMES:
            if not math.isfinite(getattr(self, name)):
                raise ChartError(f"non-finite coordinate {name}")

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.t])

    @staticmethod
    def of(coords: Sequence[float]) -> "Point":
        x, y, z, t = coords
        return Point(float(x), float(y), float(z), float(t))


_ZERO_G = np.zeros(DIM)
_ZERO_G.setflags(write=False)
_ZERO_H = np.zeros((DIM, DIM))
_ZERO_H.setflags(write=False)


class Jet:
    """Second-order jet of a scalar: value, gradient (4,) and Hessian (4,4).

    The Hessian is symmetric by construction; every arithmetic rule below
    produces a symmetric Hessian from symmetric inputs.  Jets are immutable:
    no operation writes into grad or hess, so results may alias inputs.
    """

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray | None = None,
                 hess: np.ndarray | None = None):
        self.value = float(value)
        self.grad = _ZERO_G if grad is None else grad
        self.hess = _ZERO_H if hess is None else hess

    @staticmethod
    def variable(i: int, value: float) -> "Jet":
        g = np.zeros(DIM)
        g[i] = 1.0
        return Jet(value, g)

    @staticmethod
    def constant(value: float) -> "Jet":
        return Jet(value)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.value + other.value, self.grad + other.grad,
                       self.hess + other.hess)
        return Jet(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.value - other.value, self.grad - other.grad,
                       self.hess - other.hess)
        return Jet(self.value - other, self.grad, self.hess)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            outer = self.grad[:, None] * other.grad[None, :]
            return Jet(self.value * other.value,
                       self.value * other.grad + other.value * self.grad,
                       self.value * other.hess + other.value * self.hess
                       + outer + outer.T)
        return Jet(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        if self.value == 0.0:
            raise ChartError("division by a vanishing scalar")
        v = 1.0 / self.value
        g = -v * v * self.grad
        outer = self.grad[:, None] * self.grad[None, :]
        h = -v * v * self.hess + 2.0 * v ** 3 * outer
        return Jet(v, g, h)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, q):
        if isinstance(q, int) and q >= 0:
            if q == 2:
                return self * self
            result = Jet.constant(1.0)
            for _ in range(q):
                result = result * self
            return result
        if self.value <= 0.0:
            raise ChartError("fractional power of a non-positive scalar")
        return _unary(self, self.value ** q,
                      q * self.value ** (q - 1),
                      q * (q - 1) * self.value ** (q - 2))


def _unary(u: Jet, f: float, fp: float, fpp: float) -> Jet:
    outer = u.grad[:, None] * u.grad[None, :]
    return Jet(f, fp * u.grad, fp * u.hess + fpp * outer)


def _lift(fn):
    """Apply a chain-rule unary function to a Jet or a plain float."""

    def wrapped(u):
        if isinstance(u, Jet):
            return fn(u)
        return fn(Jet.constant(u)).value

    return wrapped


@_lift
def jsqrt(u: Jet) -> Jet:
    if u.value <= 0.0:
        raise ChartError("sqrt of a non-positive scalar")
    r = math.sqrt(u.value)
    return _unary(u, r, 0.5 / r, -0.25 / (r * u.value))


@_lift
def jlog(u: Jet) -> Jet:
    if u.value <= 0.0:
        raise ChartError("log of a non-positive scalar")
    return _unary(u, math.log(u.value), 1.0 / u.value, -1.0 / u.value ** 2)


@_lift
def jexp(u: Jet) -> Jet:
    e = math.exp(u.value)
    return _unary(u, e, e, e)


@_lift
def jsin(u: Jet) -> Jet:
    s, c = math.sin(u.value), math.cos(u.value)
    return _unary(u, s, c, -s)


@_lift
def jcos(u: Jet) -> Jet:
    s, c = math.sin(u.value), math.cos(u.value)
    return _unary(u, c, -s, -c)


@_lift
def jatan(u: Jet) -> Jet:
    d = 1.0 + u.value ** 2
    return _unary(u, math.atan(u.value), 1.0 / d, -2.0 * u.value / d ** 2)


def seed_jets(p: Point) -> tuple[Jet, Jet, Jet, Jet]:
    """Coordinate jets (the identity chart map) at p."""
    return tuple(Jet.variable(i, c) for i, c in enumerate(p.coords))


# -- fields ------------------------------------------------------------------

DomainPredicate = Callable[[Point], bool]


class ScalarField:
    """A scalar field given as a jet-valued function of the coordinate jets.

    ``fn`` receives the four coordinate jets and must return a Jet built from
    them with jet arithmetic, which makes every evaluation carry exact first
    and second derivatives.  Evaluations are memoized per point (jets are
    immutable, so sharing is safe); repeated sweeps over a fixed grid pay for
    each expression tree once.
    """

    __slots__ = ("fn", "domain", "_cache")

    def __init__(self, fn: Callable[..., Jet], domain: DomainPredicate | None = None):
        self.fn = fn
        self.domain = domain
        self._cache: dict[Point, Jet] = {}

    def __call__(self, p: Point) -> Jet:
        cached = self._cache.get(p)
        if cached is not None:
            return cached
        if self.domain is not None and not self.domain(p):
            raise DomainError(f"point {tuple(p.coords)} outside the chart domain")
        out = self.fn(*seed_jets(p))
        if not isinstance(out, Jet):
            out = Jet.constant(out)
        if len(self._cache) < 8192:
            self._cache[p] = out
        return out

    # field algebra: the result inherits the left operand's domain predicate
    def _bin(self, other, op):
        dom = self.domain or (other.domain if isinstance(other, ScalarField) else None)
        if isinstance(other, ScalarField):
            return ScalarField(lambda *c: op(self.fn(*c), other.fn(*c)), dom)
        return ScalarField(lambda *c: op(self.fn(*c), other), dom)

    def __add__(self, other):
        return self._bin(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._bin(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._bin(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._bin(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._bin(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._bin(other, lambda a, b: b / a)

    def __neg__(self):
        return ScalarField(lambda *c: -self.fn(*c), self.domain)

    def __pow__(self, q):
        return ScalarField(lambda *c: self.fn(*c) ** q, self.domain)

    def map(self, jet_fn) -> "ScalarField":
        """Compose with a unary jet function such as jsqrt or jlog."""
        return ScalarField(lambda *c: jet_fn(self.fn(*c)), self.domain)

    @staticmethod
    def constant(value: float) -> "ScalarField":
        return ScalarField(lambda *c: Jet.constant(value))

    @staticmethod
    def coordinate(i: int) -> "ScalarField":
        return ScalarField(lambda *c: c[i])


def eval_jet(field: ScalarField, p: Point) -> Jet:
    """Evaluate a scalar field at p with exact value, gradient and Hessian."""
    return field(p)


class _ComponentBundle:
    """Shared evaluation for 4-component field objects."""

    __slots__ = ("comps",)

    def __init__(self, comps: Sequence[ScalarField]):
        if len(comps) != DIM:
            raise ChartError("expected 4 component fields")
        self.comps = tuple(comps)

    def values(self, p: Point) -> np.ndarray:
        return np.array([c(p).value for c in self.comps])

    def jets(self, p: Point) -> list[Jet]:
        return [c(p) for c in self.comps]

    def values_jac(self, p: Point) -> tuple[np.ndarray, np.ndarray]:
        """Component values (4,) and Jacobian jac[i, m] = d_m comp_i."""
        jets = self.jets(p)
        return (np.array([j.value for j in jets]),
                np.stack([j.grad for j in jets]))

    def values_jac_hess(self, p: Point):
        jets = self.jets(p)
        return (np.array([j.value for j in jets]),
                np.stack([j.grad for j in jets]),
                np.stack([j.hess for j in jets]))


class VectorField(_ComponentBundle):
    """Vector field with components in the coordinate basis."""

    @staticmethod
    def constant(values: Sequence[float]) -> "VectorField":
        return VectorField([ScalarField.constant(v) for v in values])

    @staticmethod
    def coordinate_basis(i: int) -> "VectorField":
        return VectorField.constant(np.eye(DIM)[i])

    def scaled(self, factor: float) -> "VectorField":
        return VectorField([c * factor for c in self.comps])


class OneForm(_ComponentBundle):
    """One-form with covariant components in the coordinate basis."""

    @staticmethod
    def constant(values: Sequence[float]) -> "OneForm":
        return OneForm([ScalarField.constant(v) for v in values])


class TwoForm:
    """Antisymmetric 2-form field; only the upper triangle is stored.

    Component (i, j) with i < j is a ScalarField; (j, i) evaluates to its
    exact negation, so antisymmetry holds to the last bit.
    """

    __slots__ = ("upper",)

    def __init__(self, upper: dict[tuple[int, int], ScalarField]):
        self.upper = {k: v for k, v in upper.items() if k[0] < k[1]}

    @staticmethod
    def from_wedge(a: OneForm, b: OneForm) -> "TwoForm":
        upper = {}
        for i in range(DIM):
            for j in range(i + 1, DIM):
                upper[(i, j)] = a.comps[i] * b.comps[j] - a.comps[j] * b.comps[i]
        return TwoForm(upper)

    def __add__(self, other: "TwoForm") -> "TwoForm":
        upper = {}
        for i in range(DIM):
            for j in range(i + 1, DIM):
                fa = self.upper.get((i, j))
                fb = other.upper.get((i, j))
                if fa is None and fb is None:
                    continue
                if fa is None:
                    upper[(i, j)] = fb
                elif fb is None:
                    upper[(i, j)] = fa
                else:
                    upper[(i, j)] = fa + fb
        return TwoForm(upper)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + other.scaled(-1.0)

    def scaled(self, factor) -> "TwoForm":
        return TwoForm({k: v * factor for k, v in self.upper.items()})

    def values(self, p: Point) -> np.ndarray:
        out = np.zeros((DIM, DIM))
        for (i, j), f in self.upper.items():
            v = f(p).value
            out[i, j] = v
            out[j, i] = -v
        return out

    def values_jac(self, p: Point) -> tuple[np.ndarray, np.ndarray]:
        """Values (4,4) and jac[m, i, j] = d_m omega_ij."""
        vals = np.zeros((DIM, DIM))
        jac = np.zeros((DIM, DIM, DIM))
        for (i, j), f in self.upper.items():
            jet = f(p)
            vals[i, j] = jet.value
            vals[j, i] = -jet.value
            jac[:, i, j] = jet.grad
            jac[:, j, i] = -jet.grad
        return vals, jac


# -- pointwise exterior calculus ----------------------------------------------


def exterior_derivative(form: OneForm | TwoForm, p: Point) -> np.ndarray:
    """d of a 1-form (result (4,4)) or of a 2-form (result (4,4,4)) at p."""
    if isinstance(form, OneForm):
        _, jac = form.values_jac(p)
        return jac.T - jac  # (d w)_ij = d_i w_j - d_j w_i
    if isinstance(form, TwoForm):
        _, jac = form.values_jac(p)
        # (d w)_{ijk} = d_i w_jk + d_j w_ki + d_k w_ij
        return (jac + np.einsum("jki->ijk", jac) + np.einsum("kij->ijk", jac))
    raise ChartError(f"cannot take d of {type(form).__name__}")


def dd_one_form(omega: OneForm, p: Point) -> np.ndarray:
    """d(d omega) assembled from exact second derivatives; vanishes identically."""
    _, jac, hess = omega.values_jac_hess(p)
    # (d w)_jk as a function has gradient d_i(d w)_jk = hess[k][i,j] - hess[j][i,k]
    g = np.einsum("kij->ijk", hess) - np.einsum("jik->ijk", hess)
    return g + np.einsum("jki->ijk", g) + np.einsum("kij->ijk", g)


def lie_bracket(X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """[X, Y] componentwise at p."""
    xv, xj = X.values_jac(p)
    yv, yj = Y.values_jac(p)
    return yj @ xv - xj @ yv


def lie_bracket_jet(X: VectorField, Y: VectorField, p: Point) -> tuple[np.ndarray, np.ndarray]:
    """Bracket values and their first derivatives, jac[i, m] = d_m [X,Y]^i."""
    xv, xj, xh = X.values_jac_hess(p)
    yv, yj, yh = Y.values_jac_hess(p)
    vals = yj @ xv - xj @ yv
    jac = (np.einsum("jm,ij->im", xj, yj) + np.einsum("j,ijm->im", xv, yh)
           - np.einsum("jm,ij->im", yj, xj) - np.einsum("j,ijm->im", yv, xh))
    return vals, jac


def sharp(omega: OneForm | np.ndarray, g: np.ndarray, p: Point | None = None) -> np.ndarray:
    """Index raise: the vector dual to a 1-form under the metric g at a point."""
    vals = omega.values(p) if isinstance(omega, OneForm) else np.asarray(omega, float)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError("metric not positive definite") from exc
    return np.linalg.solve(g, vals)


def flat(X: VectorField | np.ndarray, g: np.ndarray, p: Point | None = None) -> np.ndarray:
    """Index lower: covariant components of a vector under the metric g."""
    vals = X.values(p) if isinstance(X, VectorField) else np.asarray(X, float)
    return g @ vals


# -- pointwise wedge and norm helpers -----------------------------------------


def wedge_1_1(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.outer(u, v) - np.outer(v, u)


def wedge_1_2(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(u ^ w)_{ijk} for a covector u and an antisymmetric matrix w."""
    t = np.einsum("i,jk->ijk", u, w)
    return t + np.einsum("jki->ijk", t) + np.einsum("kij->ijk", t)


def wedge_2_2(w1: np.ndarray, w2: np.ndarray) -> float:
    """Coefficient of dx^dy^dz^dt in w1 ^ w2 for antisymmetric matrices."""
    return (w1[0, 1] * w2[2, 3] - w1[0, 2] * w2[1, 3] + w1[0, 3] * w2[1, 2]
            + w1[2, 3] * w2[0, 1] - w1[1, 3] * w2[0, 2] + w1[1, 2] * w2[0, 3])


def frob(arr: np.ndarray) -> float:
    """Frobenius norm over all components."""
    return float(np.sqrt(np.sum(np.asarray(arr) ** 2)))
