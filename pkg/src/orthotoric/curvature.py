"""Pointwise curvature pipeline.

Conventions (all validated against textbook cases in the test suite):

* Gamma[k, i, j] = Gamma^k_ij, the Levi-Civita connection coefficients.
* riemann_up[l, i, j, k] is the l-component of R(d_i, d_j) d_k with
  R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y].
* riemann[i, j, k, l] = g(R(d_i, d_j) d_k, d_l), antisymmetric in (i, j) and
  (k, l), symmetric under pair swap.
* ricci[j, k] = sum_l riemann_up[l, l, j, k]; the round sphere comes out
  positive.
* The curvature operator on 2-forms uses the inner product
  <w, e> = (1/2) w_ab e_ab in orthonormal frame components and the matrix
  M[I, J] = -(1/4) sigma_I : R : sigma_J, which has trace s/2.
* Orientation: the coordinate volume dx^dy^dz^dt is positive.  For the
  distinguished frame the ordered tetrad (E1, E3, E2, E4) is positively
  oriented and theta1^theta3 + theta2^theta4 is self-dual.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .chart import ChartError, Point, SingularMetricError, frob
from .metrics import MetricAtPoint, MetricFamily

SQ2 = np.sqrt(2.0)
DEGENERATE_DISCRIMINANT_TOL = 1e-12


def _grad_combination(dg: np.ndarray) -> np.ndarray:
    """t[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij."""
    return (np.einsum("ijl->ijl", dg) + np.einsum("jil->ijl", dg)
            - np.einsum("lij->ijl", dg))


def christoffel(m: MetricAtPoint) -> np.ndarray:
    """Levi-Civita Gamma^k_ij from the metric 1-jet."""
    return 0.5 * np.einsum("kl,ijl->kij", m.inverse, _grad_combination(m.dg))


def christoffel_jet(m: MetricAtPoint) -> tuple[np.ndarray, np.ndarray]:
    """Gamma and its exact coordinate derivatives dGamma[m, k, i, j]."""
    gi = m.inverse
    gamma = christoffel(m)
    dgi = -np.einsum("ka,mab,bl->mkl", gi, m.dg, gi)
    t = _grad_combination(m.dg)
    dt = (np.einsum("mijl->mijl", m.d2g) + np.einsum("mjil->mijl", m.d2g)
          - np.einsum("mlij->mijl", m.d2g))
    dgamma = 0.5 * (np.einsum("mkl,ijl->mkij", dgi, t)
                    + np.einsum("kl,mijl->mkij", gi, dt))
    return gamma, dgamma


class CurvaturePackage:
    """Curvature tensors of a metric 2-jet at one point, computed lazily."""

    def __init__(self, m: MetricAtPoint):
        self.metric = m

    @cached_property
    def gamma(self) -> np.ndarray:
        return christoffel_jet(self.metric)[0]

    @cached_property
    def _gamma_pair(self):
        return christoffel_jet(self.metric)

    @cached_property
    def riemann_up(self) -> np.ndarray:
        gamma, dgamma = self._gamma_pair
        return (np.einsum("iljk->lijk", dgamma) - np.einsum("jlik->lijk", dgamma)
                + np.einsum("lim,mjk->lijk", gamma, gamma)
                - np.einsum("ljm,mik->lijk", gamma, gamma))

    @cached_property
    def riemann(self) -> np.ndarray:
        return np.einsum("lm,mijk->ijkl", self.metric.g, self.riemann_up)

    @cached_property
    def ricci(self) -> np.ndarray:
        return np.einsum("lljk->jk", self.riemann_up)

    @cached_property
    def scalar(self) -> float:
        return float(np.einsum("jk,jk->", self.metric.inverse, self.ricci))


def curvature_at(family: MetricFamily, p: Point) -> CurvaturePackage:
    """Per-family memoized curvature package (pure data, safe to share)."""
    cache = getattr(family, "_curvature_cache", None)
    if cache is None:
        cache = family._curvature_cache = {}
    pkg = cache.get(p)
    if pkg is None:
        pkg = CurvaturePackage(family.metric_jet(p))
        if len(cache) < 4096:
            cache[p] = pkg
    return pkg


def riemann(m: MetricAtPoint) -> np.ndarray:
    return CurvaturePackage(m).riemann


def ricci(m: MetricAtPoint) -> np.ndarray:
    return CurvaturePackage(m).ricci


def scalar_curvature(m: MetricAtPoint) -> float:
    return CurvaturePackage(m).scalar


# -- covariant derivatives (pointwise) ----------------------------------------


def cov_deriv_one_form(vals: np.ndarray, jac: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """(nabla w)[m, n] = d_m w_n - Gamma^k_mn w_k; jac[n, m] = d_m w_n."""
    return jac.T - np.einsum("kmn,k->mn", gamma, vals)


def cov_deriv_vector(vals: np.ndarray, jac: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """(nabla X)[m, i] = d_m X^i + Gamma^i_mk X^k; jac[i, m] = d_m X^i."""
    return jac.T + np.einsum("imk,k->mi", gamma, vals)


def cov_deriv_two_form(vals: np.ndarray, jac: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """(nabla w)[m, i, j] with jac[m, i, j] = d_m w_ij."""
    return (jac - np.einsum("kmi,kj->mij", gamma, vals)
            - np.einsum("kmj,ik->mij", gamma, vals))


def metric_compat_residual(m: MetricAtPoint, gamma: np.ndarray | None = None) -> float:
    """max |nabla g|; vanishes for the Levi-Civita connection."""
    if gamma is None:
        gamma = christoffel(m)
    nab = (m.dg - np.einsum("kmi,kj->mij", gamma, m.g)
           - np.einsum("kmj,ik->mij", gamma, m.g))
    return float(np.abs(nab).max())


# -- two-form bases, Hodge star, Weyl blocks -----------------------------------


def cholesky_tetrad(g: np.ndarray) -> np.ndarray:
    """Orthonormal tetrad (columns) aligned with the coordinate orientation."""
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError("metric not positive definite") from exc
    return np.linalg.inv(L.T)


def _wedge_unit(a: int, b: int) -> np.ndarray:
    w = np.zeros((4, 4))
    w[a, b] = 1.0
    w[b, a] = -1.0
    return w


_SIGMA_PLUS = np.stack([
    (_wedge_unit(0, 1) + _wedge_unit(2, 3)) / SQ2,
    (_wedge_unit(0, 2) + _wedge_unit(3, 1)) / SQ2,
    (_wedge_unit(0, 3) + _wedge_unit(1, 2)) / SQ2,
])
_SIGMA_MINUS = np.stack([
    (_wedge_unit(0, 1) - _wedge_unit(2, 3)) / SQ2,
    (_wedge_unit(0, 2) - _wedge_unit(3, 1)) / SQ2,
    (_wedge_unit(0, 3) - _wedge_unit(1, 2)) / SQ2,
])


@dataclass
class TwoFormBasis:
    """Orthonormal SD/ASD 2-form triples attached to an oriented tetrad.

    ``tetrad`` holds the frame vectors as columns (coordinate components);
    ``sd``/``asd`` are the six basis forms in tetrad (frame) components, where
    the Hodge star is exactly diag(+1, +1, +1, -1, -1, -1).
    """

    tetrad: np.ndarray
    sd: np.ndarray = None
    asd: np.ndarray = None

    def __post_init__(self):
        if np.linalg.det(self.tetrad) <= 0:
            raise ChartError("tetrad must be positively oriented")
        self.sd = _SIGMA_PLUS.copy()
        self.asd = _SIGMA_MINUS.copy()
        self._cotetrad = np.linalg.inv(self.tetrad)
        self._flipped = False

    def to_frame(self, omega: np.ndarray) -> np.ndarray:
        """Coordinate-component 2-form to tetrad components."""
        return np.einsum("ij,ia,jb->ab", omega, self.tetrad, self.tetrad)

    def to_coords(self, omega_frame: np.ndarray) -> np.ndarray:
        return np.einsum("ab,ai,bj->ij", omega_frame, self._cotetrad, self._cotetrad)

    def components(self, omega: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(SD coefficients, ASD coefficients) of a coordinate 2-form."""
        wf = self.to_frame(omega)
        plus = 0.5 * np.einsum("kab,ab->k", self.sd, wf)
        minus = 0.5 * np.einsum("kab,ab->k", self.asd, wf)
        return plus, minus

    def star_frame(self, omega_frame: np.ndarray) -> np.ndarray:
        """Hodge star in tetrad components: an exact index shuffle,
        (star w)_ab = (1/2) eps_abcd w_cd with eps_1234 = +1."""
        w = omega_frame
        out = np.zeros((4, 4))
        pairs = (((0, 1), (2, 3), 1.0), ((0, 2), (1, 3), -1.0), ((0, 3), (1, 2), 1.0))
        for (a, b), (c, d), sign in pairs:
            out[a, b], out[c, d] = sign * w[c, d], sign * w[a, b]
            out[b, a], out[d, c] = -out[a, b], -out[c, d]
        if self._flipped:
            out = -out
        return out

    def hodge_star(self, omega: np.ndarray) -> np.ndarray:
        """Hodge star of a coordinate-component 2-form."""
        return self.to_coords(self.star_frame(self.to_frame(omega)))


def frame_tetrad(frame_at_point, order=(0, 2, 1, 3)) -> np.ndarray:
    """Tetrad columns from an evaluated frame; default order (E1, E3, E2, E4)
    is the positively oriented one for which theta1^theta3 + theta2^theta4 is
    self-dual."""
    return np.stack([frame_at_point.E[j] for j in order], axis=1)


@dataclass
class WeylSplit:
    """Weyl blocks in an orthonormal SD/ASD basis, spectra sorted ascending."""

    basis: TwoFormBasis
    operator: np.ndarray       # full 6x6 curvature operator
    scalar: float
    weyl_plus: np.ndarray
    weyl_minus: np.ndarray
    spectrum_plus: np.ndarray
    spectrum_minus: np.ndarray


def curvature_operator(pkg: CurvaturePackage, basis: TwoFormBasis) -> np.ndarray:
    """The 6x6 curvature operator matrix in the given SD/ASD basis."""
    V = basis.tetrad
    rf = np.einsum("ijkl,ia,jb,kc,ld->abcd", pkg.riemann, V, V, V, V)
    sig = np.concatenate([basis.sd, basis.asd])
    return -0.25 * np.einsum("Iab,abcd,Jcd->IJ", sig, rf, sig)


def weyl_split(m: MetricAtPoint | CurvaturePackage,
               tetrad: np.ndarray | None = None,
               orientation: int = +1) -> WeylSplit:
    """Weyl SD/ASD blocks and spectra at a point.

    ``tetrad``: columns of an oriented orthonormal frame; defaults to the
    Cholesky tetrad of the metric.  ``orientation=-1`` reverses the declared
    orientation, which swaps the two blocks.
    """
    pkg = m if isinstance(m, CurvaturePackage) else CurvaturePackage(m)
    if tetrad is None:
        tetrad = cholesky_tetrad(pkg.metric.g)
    basis = TwoFormBasis(np.ascontiguousarray(tetrad))
    op = curvature_operator(pkg, basis)
    if orientation == -1:
        # reversed orientation flips the star, so the two triples swap roles
        basis.sd, basis.asd = basis.asd, basis.sd
        basis._flipped = True
        op = op[[3, 4, 5, 0, 1, 2]][:, [3, 4, 5, 0, 1, 2]]
    s = pkg.scalar
    wp = op[:3, :3] - np.eye(3) * (s / 12.0)
    wm = op[3:, 3:] - np.eye(3) * (s / 12.0)
    wp = 0.5 * (wp + wp.T)
    wm = 0.5 * (wm + wm.T)
    return WeylSplit(basis=basis, operator=op, scalar=s,
                     weyl_plus=wp, weyl_minus=wm,
                     spectrum_plus=sym3_eigenvalues(wp),
                     spectrum_minus=sym3_eigenvalues(wm))


def sym3_eigenvalues(S: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric 3x3 matrix, sorted ascending.

    Closed-form trigonometric solution of the characteristic polynomial;
    falls back to symmetric QR when the discriminant is close to zero,
    which is exactly the repeated-eigenvalue case the callers probe.
    """
    S = np.asarray(S, float)
    scale = max(1.0, float(np.abs(S).max()))
    p1 = S[0, 1] ** 2 + S[0, 2] ** 2 + S[1, 2] ** 2
    q = np.trace(S) / 3.0
    p2 = ((S[0, 0] - q) ** 2 + (S[1, 1] - q) ** 2 + (S[2, 2] - q) ** 2 + 2.0 * p1)
    if p2 <= (DEGENERATE_DISCRIMINANT_TOL * scale) ** 2:
        return np.array([q, q, q])
    p = np.sqrt(p2 / 6.0)
    B = (S - q * np.eye(3)) / p
    r = np.linalg.det(B) / 2.0
    if 1.0 - min(abs(r), 1.0) < DEGENERATE_DISCRIMINANT_TOL:
        return np.sort(np.linalg.eigvalsh(S))
    r = min(1.0, max(-1.0, r))
    phi = np.arccos(r) / 3.0
    e1 = q + 2.0 * p * np.cos(phi)
    e3 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.sort(np.array([e1, e2, e3]))


class NotAntiSelfDualError(ChartError):
    """Input 2-form has a self-dual part above tolerance."""


def eigenform_residual(split: WeylSplit, omega: np.ndarray,
                       asd_tol: float = 1e-8) -> tuple[float, float]:
    """(residual, rayleigh) of W- acting on a unit-normalized ASD 2-form.

    ``omega`` is given in coordinate components; it must be anti-self-dual
    within ``asd_tol`` relative to its norm.
    """
    plus, minus = split.basis.components(omega)
    norm = float(np.sqrt(plus @ plus + minus @ minus))
    if norm == 0.0:
        raise ChartError("zero 2-form")
    if float(np.abs(plus).max()) > asd_tol * norm:
        raise NotAntiSelfDualError(
            f"self-dual part {np.abs(plus).max():.3e} exceeds {asd_tol:.1e} * norm")
    v = minus / norm
    lam = float(v @ split.weyl_minus @ v)
    return frob(split.weyl_minus @ v - lam * v), lam


# -- identity residuals --------------------------------------------------------


def riemann_symmetry_residual(R: np.ndarray) -> float:
    return float(max(
        np.abs(R + R.transpose(1, 0, 2, 3)).max(),
        np.abs(R + R.transpose(0, 1, 3, 2)).max(),
        np.abs(R - R.transpose(2, 3, 0, 1)).max(),
    ))


def first_bianchi_residual(R: np.ndarray) -> float:
    return float(np.abs(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)).max())


def contracted_second_bianchi_residual(family: MetricFamily, p: Point,
                                       h: float = 4e-4) -> float:
    """max |div Ric - (1/2) d scalar|, relative to the size of the two sides.

    The Ricci tensor is exact per point (dual-number jets); its coordinate
    derivative is a Richardson-extrapolated central difference, accurate to
    O(h^4).  Near the narrow end of the domain both sides grow like inverse
    powers of (x - y), so the comparison is normalized by their magnitude.
    """
    base = curvature_at(family, p)
    gi = base.metric.inverse
    gamma = base.gamma

    def ric_scal(coords):
        pkg = CurvaturePackage(family.metric_jet(Point.of(coords)))
        return pkg.ricci, pkg.scalar

    dric = np.zeros((4, 4, 4))
    ds = np.zeros(4)
    for m_ in range(4):
        def central(step):
            cp = np.array(p.coords)
            cm = cp.copy()
            cp[m_] += step
            cm[m_] -= step
            r_hi, s_hi = ric_scal(cp)
            r_lo, s_lo = ric_scal(cm)
            return (r_hi - r_lo) / (2 * step), (s_hi - s_lo) / (2 * step)

        d1, s1 = central(h)
        d2, s2 = central(h / 2)
        dric[m_] = (4.0 * d2 - d1) / 3.0
        ds[m_] = (4.0 * s2 - s1) / 3.0
    nab = (dric - np.einsum("kmi,kj->mij", gamma, base.ricci)
           - np.einsum("kmj,ik->mij", gamma, base.ricci))
    div = np.einsum("mi,mij->j", gi, nab)
    scale = max(1.0, float(np.abs(div).max()), float(np.abs(ds).max() / 2))
    return float(np.abs(div - 0.5 * ds).max() / scale)
