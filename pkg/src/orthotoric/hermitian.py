"""Hermitian structures J, I and the distinguished-frame identities.

The two almost complex structures act on the frame by

    J E1 = E3,  J E2 = E4,      I E1 = -E3,  I E2 = E4,

with Kahler forms omega_J = th1^th3 + th2^th4 (self-dual) and
omega_I = -th1^th3 + th2^th4 (anti-self-dual).  Everything the frame is
supposed to satisfy (coframe structure equations, bracket table, connection
form expressions, Lee form, Ricci-form identity, integrability predicates) is
evaluated here as a numerical residual; nothing is assumed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import (ChartError, OneForm, Point, ScalarField, TwoForm,
                    exterior_derivative, frob, jsqrt, lie_bracket, wedge_1_1,
                    wedge_1_2)
from .curvature import CurvaturePackage, cov_deriv_two_form
from .metrics import FrameAtPoint, FramePackage, OrthotoricFamily

# d^I f := D_I_SIGN * df o I.  The opposite sign is the one that breaks the
# Ricci-form identity rho = d(d^I ln tan phi); fixed here once, numerically.
D_I_SIGN = +1.0


class AlmostComplexStructure:
    """Endomorphism field given by a 4x4 matrix of scalar component fields."""

    def __init__(self, comps):
        self.comps = comps  # comps[i][j] = J^i_j as a ScalarField

    def values(self, p: Point) -> np.ndarray:
        return np.array([[f(p).value for f in row] for row in self.comps])

    def values_jac(self, p: Point) -> tuple[np.ndarray, np.ndarray]:
        """J^i_j values and jac[i, j, m] = d_m J^i_j."""
        vals = np.zeros((4, 4))
        jac = np.zeros((4, 4, 4))
        for i in range(4):
            for j in range(4):
                jet = self.comps[i][j](p)
                vals[i, j] = jet.value
                jac[i, j] = jet.grad
        return vals, jac


def _endo_from_frame(frame: FramePackage, pairs) -> AlmostComplexStructure:
    """Sum of sign * E_a (x) theta_b terms as component fields."""
    comps = [[ScalarField.constant(0.0) for _ in range(4)] for _ in range(4)]
    for sign, a, b in pairs:
        for i in range(4):
            for j in range(4):
                comps[i][j] = comps[i][j] + sign * (frame.E[a].comps[i] * frame.theta[b].comps[j])
    return AlmostComplexStructure(comps)


def complex_structures(frame: FramePackage) -> tuple[AlmostComplexStructure, AlmostComplexStructure]:
    """(J, I) as endomorphism fields built from the frame."""
    J = _endo_from_frame(frame, [(+1, 2, 0), (-1, 0, 2), (+1, 3, 1), (-1, 1, 3)])
    I = _endo_from_frame(frame, [(-1, 2, 0), (+1, 0, 2), (+1, 3, 1), (-1, 1, 3)])
    return J, I


def coframe_wedge(frame: FramePackage, i: int, j: int) -> TwoForm:
    return TwoForm.from_wedge(frame.theta[i], frame.theta[j])


def kahler_forms(frame: FramePackage) -> tuple[TwoForm, TwoForm]:
    """(omega_J, omega_I) built from the coframe."""
    t13 = coframe_wedge(frame, 0, 2)
    t24 = coframe_wedge(frame, 1, 3)
    return t13 + t24, t24 - t13


def lee_form(frame: FramePackage) -> OneForm:
    """alpha (cos phi theta1 + sin phi theta2); zero when alpha vanishes."""
    comps = [frame.alpha_cos * frame.theta[0].comps[i]
             + frame.alpha_sin * frame.theta[1].comps[i] for i in range(4)]
    return OneForm(comps)


def lee_form_extracted(frame: FramePackage, p: Point,
                       diagnostic_tol: float = 1e-6) -> tuple[np.ndarray, float]:
    """Least-squares Lee form from d(omega_I) = 2 eta ^ omega_I at p.

    Returns (eta components, relative fit residual).  For nondegenerate
    omega_I the wedge map is an isomorphism onto 3-forms, so a large fit
    residual means omega_I degenerated and the conformal equation has no
    solution; that condition raises.
    """
    _, omega_i = kahler_forms(frame)
    w = omega_i.values(p)
    dw = exterior_derivative(omega_i, p)
    cols = []
    for n in range(4):
        e = np.zeros(4)
        e[n] = 1.0
        cols.append(2.0 * wedge_1_2(e, w).reshape(-1))
    A = np.stack(cols, axis=1)
    b = dw.reshape(-1)
    eta, *_ = np.linalg.lstsq(A, b, rcond=None)
    fit = frob(A @ eta - b)
    scale = max(1.0, frob(w))
    if fit > diagnostic_tol * scale:
        raise ChartError(
            f"d(omega_I) is not of the form 2 eta ^ omega_I (residual {fit:.3e})")
    return eta, fit / scale


# -- connection forms ----------------------------------------------------------


def connection_forms(fr: FrameAtPoint, gamma: np.ndarray) -> np.ndarray:
    """om[i, j, m] = theta_i(nabla_{d_m} E_j) for the evaluated frame."""
    return (np.einsum("ik,jkm->ijm", fr.theta, fr.dE)
            + np.einsum("ik,kmn,jn->ijm", fr.theta, gamma, fr.E))


def connection_form_residual(frame: FramePackage, p: Point,
                             gamma: np.ndarray) -> float:
    """Residual of the closed-form expressions for om^1_2 = om^3_4 and
    om^4_1 = om^3_2 against the metric connection."""
    fr = frame.at(p)
    om = connection_forms(fr, gamma)
    ac, as_ = fr.alpha_cos.value, fr.alpha_sin.value
    rot12 = 0.5 * (-ac * fr.theta[1] + as_ * fr.theta[0])
    rot41 = 0.5 * (ac * fr.theta[3] + as_ * fr.theta[2])
    return float(max(
        np.abs(om[0, 1] - rot12).max(), np.abs(om[2, 3] - rot12).max(),
        np.abs(om[3, 0] - rot41).max(), np.abs(om[2, 1] - rot41).max(),
    ))


def alpha_from_nabla_J(frame: FramePackage, p: Point,
                       curv: CurvaturePackage) -> float:
    """|nabla omega_I| / (2 sqrt 2), the frame scalar alpha recovered from
    the covariant derivative of the opposite Kahler form."""
    _, omega_i = kahler_forms(frame)
    vals, jac = omega_i.values_jac(p)
    cov = cov_deriv_two_form(vals, jac, curv.gamma)
    fr = frame.at(p)
    V = fr.E.T  # columns = E1..E4
    covf = np.einsum("mij,ma,ib,jc->abc", cov, V, V, V)
    return frob(covf) / (2.0 * np.sqrt(2.0))


# -- structure equations and bracket table -------------------------------------


def _frame_scalars(fr: FrameAtPoint):
    ac, as_ = fr.alpha_cos.value, fr.alpha_sin.value
    if fr.ln_alpha_cos is None:
        dc = np.zeros(4)
        ds = np.zeros(4)
    else:
        dc = np.array([fr.E[j] @ fr.ln_alpha_cos.grad for j in range(4)])
        ds = np.array([fr.E[j] @ fr.ln_alpha_sin.grad for j in range(4)])
    return ac, as_, dc, ds  # dc[j] = E_j(ln(alpha cos phi)), ds likewise


def structure_equation_residuals(frame: FramePackage, p: Point) -> np.ndarray:
    """Residual of each coframe structure equation d theta_i = RHS_i at p."""
    fr = frame.at(p)
    ac, as_, dc, ds = _frame_scalars(fr)
    th = fr.theta
    w = lambda i, j: wedge_1_1(th[i], th[j])
    rhs = [
        (-0.5 * as_ * w(0, 1) + dc[3] * w(1, 2) - dc[2] * w(0, 2)
         + (1.5 * as_ + dc[1]) * w(2, 3)),
        (0.5 * ac * w(0, 1) + ds[2] * w(0, 3) - ds[3] * w(1, 3)
         - (1.5 * ac + ds[0]) * w(2, 3)),
        (0.5 * as_ * w(1, 2) + dc[3] * w(0, 1) + ac * w(1, 3)
         + (1.5 * as_ + dc[1]) * w(3, 0) + (ac + dc[0]) * w(0, 2)),
        (as_ * w(0, 2) - ds[2] * w(0, 1) + 0.5 * ac * w(0, 3)
         + (1.5 * ac + ds[0]) * w(2, 1) + (as_ + ds[1]) * w(1, 3)),
    ]
    dth = [fr.dtheta[i].T - fr.dtheta[i] for i in range(4)]
    # dtheta[i][k, m] = d_m theta_i_k, so (d theta_i)_{mn} = d_m th_n - d_n th_m
    return np.array([np.abs(dth[i] - rhs[i]).max() for i in range(4)])


_BRACKET_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def lie_bracket_residuals(frame: FramePackage, p: Point) -> np.ndarray:
    """Residuals of the six frame bracket identities at p."""
    fr = frame.at(p)
    ac, as_, dc, ds = _frame_scalars(fr)
    E = fr.E
    rhs = {
        (0, 1): 0.5 * as_ * E[0] - 0.5 * ac * E[1] - dc[3] * E[2] + ds[2] * E[3],
        (0, 2): dc[2] * E[0] - (ac + dc[0]) * E[2] - as_ * E[3],
        (0, 3): -ds[2] * E[1] + (1.5 * as_ + dc[1]) * E[2] - 0.5 * ac * E[3],
        (1, 2): -dc[3] * E[0] + (1.5 * ac + ds[0]) * E[3] - 0.5 * as_ * E[2],
        (1, 3): ds[3] * E[1] - (as_ + ds[1]) * E[3] - ac * E[2],
        (2, 3): -(1.5 * as_ + dc[1]) * E[0] + (1.5 * ac + ds[0]) * E[1],
    }
    out = []
    for (i, j) in _BRACKET_PAIRS:
        lhs = lie_bracket(frame.E[i], frame.E[j], p)
        out.append(np.abs(lhs - rhs[(i, j)]).max())
    return np.array(out)


def lee_form_derivative_residual(frame: FramePackage, p: Point) -> float:
    """Residual of the d(Lee form) expansion in the frame 2-form basis."""
    fr = frame.at(p)
    preds = integrability_predicates(frame, p)
    th = fr.theta
    rhs = (preds.h * (wedge_1_1(th[1], th[0]) + wedge_1_1(th[2], th[3]))
           + preds.k * (wedge_1_1(th[3], th[1]) + wedge_1_1(th[2], th[0]))
           + preds.l * (wedge_1_1(th[2], th[1]) + wedge_1_1(th[0], th[3])))
    dth = exterior_derivative(lee_form(frame), p)
    return float(np.abs(dth - rhs).max())


# -- Ricci form -----------------------------------------------------------------


def ricci_form(curv: CurvaturePackage, J_vals: np.ndarray) -> np.ndarray:
    """rho_mn = Ric(J d_m, d_n)."""
    return np.einsum("im,in->mn", J_vals, curv.ricci)


def d_i_one_form(u_field: ScalarField, I: AlmostComplexStructure,
                 p: Point) -> tuple[np.ndarray, np.ndarray]:
    """d^I u = D_I_SIGN * du o I: component values and jac[m, n] = d_m (d^I u)_n."""
    jet = u_field(p)
    iv, ij = I.values_jac(p)
    vals = D_I_SIGN * np.einsum("i,in->n", jet.grad, iv)
    jac = D_I_SIGN * (np.einsum("mi,in->mn", jet.hess, iv)
                      + np.einsum("i,inm->mn", jet.grad, ij))
    return vals, jac


@dataclass
class RicciFormReport:
    residual: float          # |rho - d(d^I ln tan phi)|
    j_invariance: float      # |rho(J., J.) - rho|
    i_invariance: float
    rho_norm: float
    dkappa_norm: float


def ricci_form_identity(frame: FramePackage, p: Point,
                        curv: CurvaturePackage) -> RicciFormReport:
    """Evaluate rho = d(d^I ln tan phi) and the J/I invariance of rho at p."""
    if frame.ln_alpha_sin is None:
        raise ChartError("frame has no angle data (flat baseline)")
    J, I = complex_structures(frame)
    jv = J.values(p)
    iv = I.values(p)
    rho = ricci_form(curv, jv)
    u = frame.ln_alpha_sin - frame.ln_alpha_cos  # = ln |tan phi|
    _, kjac = d_i_one_form(u, I, p)
    dkappa = kjac - kjac.T
    return RicciFormReport(
        residual=float(np.abs(rho - dkappa).max()),
        j_invariance=float(np.abs(np.einsum("mi,nj,mn->ij", jv, jv, rho) - rho).max()),
        i_invariance=float(np.abs(np.einsum("mi,nj,mn->ij", iv, iv, rho) - rho).max()),
        rho_norm=float(np.abs(rho).max()),
        dkappa_norm=float(np.abs(dkappa).max()),
    )


def nijenhuis_norm(J: AlmostComplexStructure, p: Point) -> float:
    """Frobenius norm of the Nijenhuis tensor of J at p.

    N^k_ij = J^m_i d_m J^k_j - J^m_j d_m J^k_i
             + J^k_m (d_j J^m_i - d_i J^m_j).
    """
    jv, jj = J.values_jac(p)  # jj[a, b, m] = d_m J^a_b
    n = (np.einsum("mi,kjm->kij", jv, jj)
         - np.einsum("mj,kim->kij", jv, jj)
         + np.einsum("km,mij->kij", jv, jj)
         - np.einsum("km,mji->kij", jv, jj))
    return frob(n)


# -- integrability predicates ---------------------------------------------------


@dataclass
class IntegrabilityPredicates:
    """Scalar obstructions built from alpha, phi and frame derivatives.

    f, g control integrability of span{E3, E4}; k = l = 0 is integrability of
    span{E1, E2}; h, k, l are the coefficients of d(Lee form).
    """

    f: float
    g: float
    k: float
    l: float
    h: float


def integrability_predicates(frame: FramePackage, p: Point) -> IntegrabilityPredicates:
    fr = frame.at(p)
    ac, as_ = fr.alpha_cos, fr.alpha_sin
    if abs(ac.value) < 1e-14 or abs(as_.value) < 1e-14:
        raise ChartError(f"predicates undefined at {tuple(p.coords)}: "
                         "cos phi or sin phi vanishes")
    Eac = np.array([fr.E[j] @ ac.grad for j in range(4)])
    Eas = np.array([fr.E[j] @ as_.grad for j in range(4)])
    _, _, dc, ds = _frame_scalars(fr)
    return IntegrabilityPredicates(
        f=1.5 * as_.value + dc[1],
        g=1.5 * ac.value + ds[0],
        k=Eas[3] + Eac[2],
        l=Eas[2] - Eac[3],
        h=Eac[1] - Eas[0],
    )


def transverse_dichotomy_data(frame: FramePackage, p: Point) -> dict:
    """All quantities of the hypothesis/conclusion dichotomy: the four
    transverse derivatives of (alpha cos phi, alpha sin phi), |d theta|,
    max(|f|, |g|) and |d phi|."""
    fr = frame.at(p)
    Eac = np.array([fr.E[j] @ fr.alpha_cos.grad for j in range(4)])
    Eas = np.array([fr.E[j] @ fr.alpha_sin.grad for j in range(4)])
    preds = integrability_predicates(frame, p)
    dth = exterior_derivative(lee_form(frame), p)
    return {
        "transverse": float(max(abs(Eac[2]), abs(Eac[3]), abs(Eas[2]), abs(Eas[3]))),
        "dtheta": float(np.abs(dth).max()),
        "fg": float(max(abs(preds.f), abs(preds.g))),
        "dphi": frob(fr.phi.grad),
    }


# -- special frame ---------------------------------------------------------------


def special_frame(frame: FramePackage) -> FramePackage:
    """The frame adapted to the Lee-form plane, rotated from the distinguished
    frame by the angle phi:

        E1' = -cos phi E4 - sin phi E3,   E2' =  cos phi E2 - sin phi E1,
        E3' = -cos phi E3 + sin phi E4,   E4' = -cos phi E1 - sin phi E2.
    """
    fam = frame.family
    if not isinstance(fam, OrthotoricFamily):
        raise ChartError("special frame requires an orthotoric family")
    a2 = frame.alpha_cos * frame.alpha_cos + frame.alpha_sin * frame.alpha_sin
    norm = a2.map(jsqrt)
    c = frame.alpha_cos / norm
    s = frame.alpha_sin / norm
    rot = [
        [(-1, c, 3), (-1, s, 2)],
        [(+1, c, 1), (-1, s, 0)],
        [(-1, c, 2), (+1, s, 3)],
        [(-1, c, 0), (-1, s, 1)],
    ]
    E_new, th_new = [], []
    from .chart import OneForm as _OneForm, VectorField as _VectorField
    for row in rot:
        comps_e = []
        comps_t = []
        for i in range(4):
            acc_e = ScalarField.constant(0.0)
            acc_t = ScalarField.constant(0.0)
            for sign, coef, idx in row:
                acc_e = acc_e + sign * (coef * frame.E[idx].comps[i])
                acc_t = acc_t + sign * (coef * frame.theta[idx].comps[i])
            comps_e.append(acc_e)
            comps_t.append(acc_t)
        E_new.append(_VectorField(comps_e))
        th_new.append(_OneForm(comps_t))
    zero = ScalarField.constant(0.0)
    return FramePackage(fam, E_new, th_new, alpha=frame.alpha, phi=zero,
                        alpha_cos=zero, alpha_sin=zero,
                        ln_alpha_cos=None, ln_alpha_sin=None,
                        label=frame.label + "+special")


def special_frame_residuals(frame: FramePackage, special: FramePackage,
                            p: Point, curv: CurvaturePackage) -> np.ndarray:
    """Residuals of the three connection relations the Lee-adapted frame must
    satisfy when the Ricci tensor is I-invariant:

        Gamma'3_11 = Gamma'3_22 = E3'(ln alpha),
        -Gamma'3_21 + Gamma'4_22 = alpha,
        Gamma'4_33 = -E4'(ln alpha) + alpha.
    """
    fr = special.at(p)
    om = connection_forms(fr, curv.gamma)
    gam = lambda i, k, j: float(om[i, j] @ fr.E[k])
    alpha_jet = frame.alpha(p)
    ln_grad = alpha_jet.grad / alpha_jet.value
    e3_ln = float(fr.E[2] @ ln_grad)
    e4_ln = float(fr.E[3] @ ln_grad)
    return np.array([
        abs(gam(2, 0, 0) - e3_ln),
        abs(gam(2, 1, 1) - e3_ln),
        abs(-gam(2, 1, 0) + gam(3, 1, 1) - alpha_jet.value),
        abs(gam(3, 2, 2) - (-e4_ln + alpha_jet.value)),
    ])


def frame_angle_residual(frame: FramePackage, special: FramePackage,
                         p: Point, g: np.ndarray) -> tuple[float, float]:
    """(sin gamma, |sin gamma - sin^2 phi|) where gamma is the angle between
    the J-invariant plane span{E1, E3} and the Lee plane span{E3', E4'},
    measured through the volume form."""
    fr = frame.at(p)
    sp = special.at(p)
    vol_coeff = np.sqrt(np.linalg.det(g))
    mat = np.stack([fr.E[0], fr.E[2], sp.E[2], sp.E[3]], axis=1)
    sin_gamma = abs(vol_coeff * np.linalg.det(mat))
    phi = fr.phi.value
    return sin_gamma, abs(sin_gamma - np.sin(phi) ** 2)
