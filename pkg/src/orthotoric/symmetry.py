"""Killing fields, holomorphy, the sphere of parallel Kahler forms on the
Ricci-flat family, and the map from isometries to so(3) rotation matrices.

On the Ricci-flat profiles F = c x^2 + 2 a x + b2, G = -c y^2 - 2 a y + b1
the plane of parallel 2-forms orthogonal to omega_J is spanned by

    P = theta3 ^ theta4 - theta1 ^ theta2,
    Q = theta1 ^ theta4 + theta3 ^ theta2,

and the parallel sections are gamma(psi0) = cos(psi) P + sin(psi) Q with
phase psi = c z + a t + psi0.  The pair (P, Q) is oriented so that the
recovered rotation rate of d_z is +c; with this orientation the rate of d_t
comes out +a, and the triholomorphic combination of the two coordinate
Killing fields is proportional to a d_z - c d_t.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import (ChartError, Point, ScalarField, TwoForm, VectorField,
                    frob, lie_bracket)
from .curvature import cov_deriv_two_form, curvature_at
from .hermitian import AlmostComplexStructure, _endo_from_frame, kahler_forms
from .metrics import (FramePackage, HyperkahlerParams, MetricFamily,
                      OrthotoricFamily, hyperkahler_parameters)


class NotHyperkahlerError(ChartError):
    """Family profiles are not of the Ricci-flat shape."""


@dataclass
class KillingCandidate:
    """A vector field to be tested as an isometry generator."""

    field: VectorField
    tag: str


def coordinate_killing_fields() -> list[KillingCandidate]:
    return [KillingCandidate(VectorField.coordinate_basis(2), "d_z"),
            KillingCandidate(VectorField.coordinate_basis(3), "d_t")]


# -- Lie derivatives (from jets, never from flows) ------------------------------


def lie_derivative_metric(xi: VectorField, family: MetricFamily, p: Point) -> np.ndarray:
    """(L_xi g)_ij = xi^k d_k g_ij + g_kj d_i xi^k + g_ik d_j xi^k."""
    m = family.metric_jet(p)
    xv, xj = xi.values_jac(p)  # xj[k, i] = d_i xi^k
    return (np.einsum("k,kij->ij", xv, m.dg)
            + np.einsum("kj,ki->ij", m.g, xj)
            + np.einsum("ik,kj->ij", m.g, xj))


def killing_residual(xi: VectorField, family: MetricFamily, p: Point) -> float:
    return frob(lie_derivative_metric(xi, family, p))


def lie_derivative_endomorphism(xi: VectorField, J: AlmostComplexStructure,
                                p: Point) -> np.ndarray:
    """(L_xi J)^i_j = xi^k d_k J^i_j - J^k_j d_k xi^i + J^i_k d_j xi^k."""
    xv, xj = xi.values_jac(p)
    jv, jjac = J.values_jac(p)  # jjac[i, j, m] = d_m J^i_j
    return (np.einsum("k,ijk->ij", xv, jjac)
            - np.einsum("kj,ik->ij", jv, xj)
            + np.einsum("ik,kj->ij", jv, xj))


def holomorphy_residual(xi: VectorField, J: AlmostComplexStructure, p: Point) -> float:
    return frob(lie_derivative_endomorphism(xi, J, p))


def lie_derivative_two_form(xi: VectorField, omega: TwoForm, p: Point) -> np.ndarray:
    """(L_xi w)_ij = xi^k d_k w_ij + w_kj d_i xi^k + w_ik d_j xi^k."""
    xv, xj = xi.values_jac(p)
    vals, jac = omega.values_jac(p)
    return (np.einsum("k,kij->ij", xv, jac)
            + np.einsum("kj,ki->ij", vals, xj)
            + np.einsum("ik,kj->ij", vals, xj))


def lie_derivative_volume(xi: VectorField, family: MetricFamily, p: Point) -> float:
    """Coefficient of L_xi (vol) on dx^dy^dz^dt."""
    m = family.metric_jet(p)
    xv, xj = xi.values_jac(p)
    sqrt_det = np.sqrt(np.linalg.det(m.g))
    dv = 0.5 * sqrt_det * np.einsum("ij,kij->k", m.inverse, m.dg)
    return float(xv @ dv + sqrt_det * np.trace(xj))


# -- the sphere of Kahler forms --------------------------------------------------


def _require_hyperkahler(frame: FramePackage,
                         hk: HyperkahlerParams | None) -> tuple[float, float]:
    fam = frame.family
    if not isinstance(fam, OrthotoricFamily):
        raise NotHyperkahlerError("frame does not come from an orthotoric family")
    fit = hyperkahler_parameters(fam.params)
    if fit is None:
        raise NotHyperkahlerError(
            f"profiles F={fam.params.f_coeffs}, G={fam.params.g_coeffs} are not "
            "of the Ricci-flat shape c x^2 + 2 a x + b2 / -c y^2 - 2 a y + b1")
    c, a, b1, b2 = fit
    if hk is not None:
        if not np.allclose([c, a, b1, b2], [hk.c, hk.a, hk.b1, hk.b2],
                           rtol=0.0, atol=1e-12):
            raise NotHyperkahlerError(
                f"declared parameters {(hk.c, hk.a, hk.b1, hk.b2)} do not match "
                f"the family profiles {(c, a, b1, b2)}")
    return c, a


def _phase_field(c: float, a: float, psi0: float) -> ScalarField:
    return ScalarField(lambda x, y, z, t: z * c + t * a + psi0)


def kahler_sphere(frame: FramePackage, psi0: float,
                  hk: HyperkahlerParams | None = None) -> TwoForm:
    """Member of the parallel 2-form circle orthogonal to omega_J.

    Returns cos(psi) P + sin(psi) Q with psi = c z + a t + psi0; the caller
    checks |grad gamma| = 0.  Raises NotHyperkahlerError off the Ricci-flat
    family, where no such circle of parallel forms exists.
    """
    from .chart import jcos, jsin

    c, a = _require_hyperkahler(frame, hk)
    psi = _phase_field(c, a, psi0)
    P = TwoForm.from_wedge(frame.theta[2], frame.theta[3]) - TwoForm.from_wedge(frame.theta[0], frame.theta[1])
    Q = TwoForm.from_wedge(frame.theta[0], frame.theta[3]) + TwoForm.from_wedge(frame.theta[2], frame.theta[1])
    return P.scaled(psi.map(jcos)) + Q.scaled(psi.map(jsin))


def sphere_endomorphism(frame: FramePackage, psi0: float,
                        hk: HyperkahlerParams | None = None) -> AlmostComplexStructure:
    """The complex structure whose Kahler form is kahler_sphere(frame, psi0)."""
    from .chart import jcos, jsin

    c, a = _require_hyperkahler(frame, hk)
    psi = _phase_field(c, a, psi0)
    cosf, sinf = psi.map(jcos), psi.map(jsin)
    # g(J_P X, Y) = P(X, Y):  J_P E3 = E4, J_P E4 = -E3, J_P E1 = -E2, J_P E2 = E1
    JP = _endo_from_frame(frame, [(+1, 3, 2), (-1, 2, 3), (-1, 1, 0), (+1, 0, 1)])
    JQ = _endo_from_frame(frame, [(+1, 3, 0), (-1, 0, 3), (+1, 1, 2), (-1, 2, 1)])
    comps = [[JP.comps[i][j] * cosf + JQ.comps[i][j] * sinf for j in range(4)]
             for i in range(4)]
    return AlmostComplexStructure(comps)


@dataclass
class HyperkahlerTriple:
    """Orthogonal basis of parallel Kahler forms: omega_J and the two sphere
    members at phase offsets 0 and pi/2."""

    frame: FramePackage
    forms: list[TwoForm]
    endos: list[AlmostComplexStructure]
    c: float
    a: float

    def volume_coefficient(self, p: Point) -> float:
        return float(np.sqrt(np.linalg.det(self.frame.family.metric_jet(p).g)))


def hyperkahler_triple(frame: FramePackage,
                       hk: HyperkahlerParams | None = None) -> HyperkahlerTriple:
    c, a = _require_hyperkahler(frame, hk)
    omega_j, _ = kahler_forms(frame)
    from .hermitian import complex_structures
    J, _ = complex_structures(frame)
    forms = [omega_j, kahler_sphere(frame, 0.0, hk), kahler_sphere(frame, np.pi / 2, hk)]
    endos = [J, sphere_endomorphism(frame, 0.0, hk), sphere_endomorphism(frame, np.pi / 2, hk)]
    return HyperkahlerTriple(frame=frame, forms=forms, endos=endos, c=c, a=a)


def triple_wedge_residuals(triple: HyperkahlerTriple, p: Point) -> np.ndarray:
    """res[i, j] = |omega_i ^ omega_j - 2 delta_ij vol| coefficient at p."""
    from .chart import wedge_2_2

    vols = triple.volume_coefficient(p)
    vals = [f.values(p) for f in triple.forms]
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            target = 2.0 * vols if i == j else 0.0
            out[i, j] = abs(wedge_2_2(vals[i], vals[j]) - target)
    return out


def parallel_residual(omega: TwoForm, family: MetricFamily, p: Point) -> float:
    """max |nabla omega| at p."""
    curv = curvature_at(family, p)
    vals, jac = omega.values_jac(p)
    return float(np.abs(cov_deriv_two_form(vals, jac, curv.gamma)).max())


# -- the isometry -> so(3) map ----------------------------------------------------


KILLING_PRECONDITION_TOL = 1e-7
FIT_DIAGNOSTIC_TOL = 1e-4


@dataclass
class RotationFit:
    """Least-squares fit L_xi omega_i = sum_j A[i, j] omega_j over a grid."""

    A: np.ndarray
    fit_residual: float
    antisymmetry: float

    @property
    def rate(self) -> float:
        """Rotation rate in the (2, 3) block (the sphere-plane rotation)."""
        return float(self.A[1, 2])


def phi_homomorphism(xi: VectorField, triple: HyperkahlerTriple,
                     points: list[Point], *,
                     check_killing: bool = True) -> RotationFit:
    """Fit the constant matrix A with L_xi omega_i = sum_j A_ij omega_j.

    The fit runs jointly over the grid, so a residual above tolerance means
    the coefficients are not constant (or xi is not an isometry of the
    structure); that condition raises a diagnostic error.
    """
    fam = triple.frame.family
    if check_killing:
        worst = max(killing_residual(xi, fam, p) for p in points[:4])
        if worst > KILLING_PRECONDITION_TOL:
            raise ChartError(f"field is not Killing (residual {worst:.3e})")
    rows = []
    targets = [[] for _ in range(3)]
    for p in points:
        vals = [f.values(p) for f in triple.forms]
        lies = [lie_derivative_two_form(xi, f, p) for f in triple.forms]
        iu = np.triu_indices(4, 1)
        rows.append(np.stack([v[iu] for v in vals], axis=1))  # (6, 3)
        for i in range(3):
            targets[i].append(lies[i][iu])
    M = np.concatenate(rows, axis=0)  # (6 * npts, 3)
    A = np.zeros((3, 3))
    res_sq = 0.0
    n = M.shape[0]
    for i in range(3):
        b = np.concatenate(targets[i])
        sol, *_ = np.linalg.lstsq(M, b, rcond=None)
        A[i] = sol
        res_sq += float(np.sum((M @ sol - b) ** 2))
    fit = np.sqrt(res_sq / (3 * n))
    if fit > FIT_DIAGNOSTIC_TOL:
        raise ChartError(
            f"L_xi does not preserve the parallel triple (fit residual {fit:.3e})")
    return RotationFit(A=A, fit_residual=fit,
                       antisymmetry=float(np.abs(A + A.T).max()))


def find_holomorphic_structure(A: np.ndarray) -> np.ndarray:
    """Unit kernel vector of an antisymmetric 3x3 matrix.

    Rotations of the sphere of Kahler structures always have an axis; the
    returned coefficients combine the triple into a structure preserved by
    the isometry.  For A = 0 every direction works and e1 is returned.
    """
    axis = np.array([A[1, 2], -A[0, 2], A[0, 1]])
    norm = np.linalg.norm(axis)
    if norm == 0.0:
        return np.array([1.0, 0.0, 0.0])
    return axis / norm


def combined_form(triple: HyperkahlerTriple, coeffs: np.ndarray) -> TwoForm:
    out = triple.forms[0].scaled(float(coeffs[0]))
    for k in (1, 2):
        out = out + triple.forms[k].scaled(float(coeffs[k]))
    return out


@dataclass
class TriholomorphicScan:
    """Outcome of the search for a triholomorphic combination."""

    found: bool
    combination: np.ndarray | None       # coefficients over the candidates
    candidate_tags: list[str]
    fits: list[RotationFit]
    lie_residuals: np.ndarray | None     # max |L_xi omega_i| over the grid
    note: str = ""
    combo_field: VectorField | None = None


BRACKET_COMMUTE_TOL = 1e-8
PROPORTIONALITY_TOL = 1e-8
TRIHOLOMORPHIC_ZERO_TOL = 1e-9


def triholomorphic_scan(candidates: list[KillingCandidate],
                        triple: HyperkahlerTriple,
                        points: list[Point],
                        fits: list[RotationFit] | None = None) -> TriholomorphicScan:
    """Look for a combination of commuting Killing fields acting trivially on
    the full triple of Kahler forms.

    With the rotation matrices A_k = Phi(xi_k) all proportional to a common
    generator, the right combination is read off from the rates; images that
    are genuinely non-proportional admit none and NONE-FOUND is reported.
    """
    tags = [c.tag for c in candidates]
    if len(candidates) >= 2:
        br = max(np.abs(lie_bracket(candidates[i].field, candidates[j].field, p)).max()
                 for p in points[:3]
                 for i in range(len(candidates)) for j in range(i + 1, len(candidates)))
        if br > BRACKET_COMMUTE_TOL:
            raise ChartError(f"candidate fields do not commute (bracket {br:.3e})")
    if fits is None:
        fits = [phi_homomorphism(c.field, triple, points) for c in candidates]
    norms = [float(np.abs(f.A).max()) for f in fits]
    scale = max(1.0, max(norms))

    def finish(coeffs, note):
        combo = _linear_combination(candidates, coeffs)
        residuals = np.array([
            max(frob(lie_derivative_two_form(combo, f, p)) for p in points)
            for f in triple.forms])
        return TriholomorphicScan(found=True, combination=np.asarray(coeffs, float),
                                  candidate_tags=tags, fits=fits,
                                  lie_residuals=residuals, note=note,
                                  combo_field=combo)

    for k, nk in enumerate(norms):
        if nk <= TRIHOLOMORPHIC_ZERO_TOL * scale:
            coeffs = np.eye(len(candidates))[k]
            return finish(coeffs, f"{tags[k]} is itself triholomorphic")
    if len(candidates) < 2:
        return TriholomorphicScan(found=False, combination=None, candidate_tags=tags,
                                  fits=fits, lie_residuals=None,
                                  note="single field with nonzero rotation")
    A0, A1 = fits[0].A, fits[1].A
    lam = float(np.sum(A0 * A1) / np.sum(A1 * A1))
    if np.abs(A0 - lam * A1).max() > PROPORTIONALITY_TOL * scale:
        return TriholomorphicScan(found=False, combination=None, candidate_tags=tags,
                                  fits=fits, lie_residuals=None,
                                  note="rotation images are not proportional")
    coeffs = np.zeros(len(candidates))
    coeffs[0], coeffs[1] = 1.0, -lam
    coeffs = coeffs / np.linalg.norm(coeffs)
    return finish(coeffs, f"combination {coeffs[0]:+.6g}*{tags[0]} {coeffs[1]:+.6g}*{tags[1]}")


def _linear_combination(candidates: list[KillingCandidate],
                        coeffs) -> VectorField:
    comps = []
    for i in range(4):
        acc = ScalarField.constant(0.0)
        for c, cand in zip(coeffs, candidates):
            if c != 0.0:
                acc = acc + float(c) * cand.field.comps[i]
        comps.append(acc)
    return VectorField(comps)
