"""Hermitian structures: J/I algebra, Kahler and Lee forms, the frame
identities, integrability predicates, the Lee-adapted frame."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from orthotoric.chart import ChartError, Point, exterior_derivative, frob, wedge_1_2
from orthotoric.curvature import CurvaturePackage, cov_deriv_two_form
from orthotoric.hermitian import (alpha_from_nabla_J, complex_structures,
                                  connection_form_residual,
                                  frame_angle_residual, integrability_predicates,
                                  kahler_forms, lee_form,
                                  lee_form_derivative_residual,
                                  lee_form_extracted, transverse_dichotomy_data,
                                  lie_bracket_residuals, nijenhuis_norm,
                                  ricci_form_identity, special_frame,
                                  special_frame_residuals,
                                  structure_equation_residuals)

from conftest import sample


def curv_at(family, p):
    return CurvaturePackage(family.metric_jet(p))


class TestComplexStructures:
    def test_algebra(self, generic_family):
        """J^2 = I^2 = -Id, both g-orthogonal, IJ = JI, with the product
        IJ = +Id on span{E1, E3} and -Id on span{E2, E4}."""
        frame = generic_family.frame()
        J, I = complex_structures(frame)
        for p in sample(generic_family, 25):
            jv, iv = J.values(p), I.values(p)
            g = generic_family.metric_jet(p).g
            fr = frame.at(p)
            assert np.abs(jv @ jv + np.eye(4)).max() <= 1e-10
            assert np.abs(iv @ iv + np.eye(4)).max() <= 1e-10
            assert np.abs(jv.T @ g @ jv - g).max() <= 1e-10
            assert np.abs(iv.T @ g @ iv - g).max() <= 1e-10
            ij = iv @ jv
            assert np.abs(ij - jv @ iv).max() <= 1e-10
            for idx, sign in ((0, 1), (2, 1), (1, -1), (3, -1)):
                assert np.abs(ij @ fr.E[idx] - sign * fr.E[idx]).max() <= 1e-10

    def test_frame_action(self, generic_family):
        frame = generic_family.frame()
        J, I = complex_structures(frame)
        p = Point(1.5, 0.5, 0.1, -0.2)
        fr = frame.at(p)
        assert np.abs(J.values(p) @ fr.E[0] - fr.E[2]).max() <= 1e-12
        assert np.abs(J.values(p) @ fr.E[1] - fr.E[3]).max() <= 1e-12
        assert np.abs(I.values(p) @ fr.E[0] + fr.E[2]).max() <= 1e-12
        assert np.abs(I.values(p) @ fr.E[1] - fr.E[3]).max() <= 1e-12

    def test_nijenhuis_constant_structure(self, flat_family):
        J, I = complex_structures(flat_family.frame())
        assert nijenhuis_norm(J, Point(0.2, 0.3, 0.4, 0.5)) == 0.0

    def test_nijenhuis_vanishes_on_family(self, generic_family):
        """Both structures are integrable at 100 sample points."""
        J, I = complex_structures(generic_family.frame())
        worst = max(max(nijenhuis_norm(J, p), nijenhuis_norm(I, p))
                    for p in sample(generic_family, 100))
        assert worst <= 1e-8


class TestKahlerForms:
    def test_flat_constant_coefficients(self, flat_family):
        wj, wi = kahler_forms(flat_family.frame())
        p = Point(0.1, 0.2, 0.3, 0.4)
        assert np.abs(exterior_derivative(wj, p)).max() == 0.0
        assert np.abs(exterior_derivative(wi, p)).max() == 0.0

    def test_omega_j_closed(self, generic_family):
        wj, _ = kahler_forms(generic_family.frame())
        worst = max(np.abs(exterior_derivative(wj, p)).max()
                    for p in sample(generic_family, 100))
        assert worst <= 1e-8

    def test_omega_j_parallel(self, generic_family):
        """nabla omega_J = 0: the structure is Kahler, not merely symplectic."""
        wj, _ = kahler_forms(generic_family.frame())
        worst = 0.0
        for p in sample(generic_family, 25):
            vals, jac = wj.values_jac(p)
            cov = cov_deriv_two_form(vals, jac, curv_at(generic_family, p).gamma)
            worst = max(worst, np.abs(cov).max())
        assert worst <= 1e-8

    def test_lee_equation(self, generic_family):
        """d omega_I = 2 theta ^ omega_I with the closed-form Lee form."""
        _, wi = kahler_forms(generic_family.frame())
        th = lee_form(generic_family.frame())
        worst = 0.0
        for p in sample(generic_family, 50):
            dw = exterior_derivative(wi, p)
            worst = max(worst, np.abs(dw - 2.0 * wedge_1_2(th.values(p), wi.values(p))).max())
        assert worst <= 1e-8


class TestLeeForm:
    def test_closed_on_constant_profiles(self, constant_family):
        th = lee_form(constant_family.frame())
        worst = max(np.abs(exterior_derivative(th, p)).max()
                    for p in sample(constant_family, 30))
        assert worst <= 1e-9

    def test_closed_on_generic_profiles(self, generic_family):
        th = lee_form(generic_family.frame())
        worst = max(np.abs(exterior_derivative(th, p)).max()
                    for p in sample(generic_family, 30))
        assert worst <= 1e-8

    def test_flat_structure_has_zero_lee_form(self, flat_family):
        th = lee_form(flat_family.frame())
        assert np.abs(th.values(Point(0.5, -0.5, 1.0, 2.0))).max() == 0.0

    def test_least_squares_extraction_matches(self, generic_family):
        frame = generic_family.frame()
        th = lee_form(frame)
        for p in sample(generic_family, 20):
            eta, fit = lee_form_extracted(frame, p)
            assert np.abs(eta - th.values(p)).max() <= 1e-8
            assert fit <= 1e-10

    def test_extraction_diagnoses_degenerate_form(self, generic_family):
        """With a collapsed coframe omega_I is degenerate and d(omega_I)
        leaves the image of eta ^ omega_I, which the extraction reports."""
        from orthotoric.metrics import FramePackage
        frame = generic_family.frame()
        broken = FramePackage(frame.family, frame.E,
                              [frame.theta[0], frame.theta[0],
                               frame.theta[2], frame.theta[3]],
                              frame.alpha, frame.phi, frame.alpha_cos,
                              frame.alpha_sin, frame.ln_alpha_cos,
                              frame.ln_alpha_sin)
        with pytest.raises(ChartError):
            lee_form_extracted(broken, Point(1.5, 0.5, 0.0, 0.0))

    def test_derivative_expansion(self, generic_family):
        worst = max(lee_form_derivative_residual(generic_family.frame(), p)
                    for p in sample(generic_family, 20))
        assert worst <= 1e-7


class TestStructureEquations:
    def test_residuals_on_families(self, generic_family, hk_mixed_family,
                                   constant_family):
        """All four coframe equations at 200 points across three families."""
        for fam in (generic_family, hk_mixed_family, constant_family):
            frame = fam.frame()
            worst = max(structure_equation_residuals(frame, p).max()
                        for p in sample(fam, 67))
            assert worst <= 1e-7

    def test_corrupted_frame_fails(self, generic_family):
        """Scaling E1 by 1.01 pushes the residuals above 1e-3."""
        frame = generic_family.frame().corrupted(1.01)
        worst = max(structure_equation_residuals(frame, p).max()
                    for p in sample(generic_family, 10))
        assert worst > 1e-3

    def test_flat_frame_trivial(self, flat_family):
        res = structure_equation_residuals(flat_family.frame(),
                                           Point(0.1, 0.2, 0.3, 0.4))
        assert np.abs(res).max() == 0.0

    def test_bracket_table(self, generic_family):
        worst = max(lie_bracket_residuals(generic_family.frame(), p).max()
                    for p in sample(generic_family, 50))
        assert worst <= 1e-7

    def test_e3_e4_bracket_vanishes(self, generic_family):
        """span{E3, E4} is integrable with f = g = 0, so [E3, E4] = 0."""
        from orthotoric.chart import lie_bracket
        frame = generic_family.frame()
        worst = max(np.abs(lie_bracket(frame.E[2], frame.E[3], p)).max()
                    for p in sample(generic_family, 30))
        assert worst <= 1e-8

    def test_flat_brackets_vanish(self, flat_family):
        res = lie_bracket_residuals(flat_family.frame(), Point(0, 0, 0, 0))
        assert np.abs(res).max() == 0.0

    def test_connection_form_expressions(self, generic_family):
        frame = generic_family.frame()
        worst = max(connection_form_residual(frame, p,
                                                curv_at(generic_family, p).gamma)
                    for p in sample(generic_family, 30))
        assert worst <= 1e-8

    def test_connection_form_table_accessor(self, generic_family):
        """The frame-level table matches om^1_2 = (alpha/2)(sin phi theta1
        - cos phi theta2) evaluated directly."""
        frame = generic_family.frame()
        p = Point(1.5, 0.5, 0.1, -0.2)
        om = frame.connection_form_table(p)
        fr = frame.at(p)
        expected = 0.5 * (fr.alpha_sin.value * fr.theta[0]
                          - fr.alpha_cos.value * fr.theta[1])
        assert np.abs(om[0, 1] - expected).max() <= 1e-12


class TestAlphaRecovery:
    def test_flat_vanishes(self, flat_family):
        frame = flat_family.frame()
        val = alpha_from_nabla_J(frame, Point(0, 0, 0, 0),
                                 curv_at(flat_family, Point(0, 0, 0, 0)))
        assert val == 0.0

    def test_unit_profiles_reference_value(self):
        """F = G = 1 at (2,1,0,0): alpha = sqrt(2) h^3 = sqrt(2)."""
        from orthotoric.metrics import DomainRect, OrthotoricFamily, OrthotoricParams
        fam = OrthotoricFamily(OrthotoricParams((1.0,), (1.0,),
                                                DomainRect((1.5, 2.5), (0.5, 1.4))))
        p = Point(2.0, 1.0, 0.0, 0.0)
        rec = alpha_from_nabla_J(fam.frame(), p, curv_at(fam, p))
        assert_allclose(rec, np.sqrt(2.0), rtol=1e-12)

    def test_matches_closed_form(self, generic_family):
        """|nabla omega_I|/(2 sqrt 2) = sqrt(F + G) (x - y)^(-3/2)."""
        frame = generic_family.frame()
        for p in sample(generic_family, 25):
            rec = alpha_from_nabla_J(frame, p, curv_at(generic_family, p))
            expected = np.sqrt(p.x ** 2 + 1.0 + 2.0 - p.y) * (p.x - p.y) ** -1.5
            assert abs(rec - expected) <= 1e-7


class TestRicciForm:
    def test_identity_on_generic_family(self, generic_family):
        """rho = d(d^I ln tan phi) at 100 points, invariances to 1e-8."""
        frame = generic_family.frame()
        for p in sample(generic_family, 100):
            rep = ricci_form_identity(frame, p, curv_at(generic_family, p))
            assert rep.residual <= 1e-6
            assert rep.j_invariance <= 1e-8
            assert rep.i_invariance <= 1e-8

    def test_both_sides_vanish_on_ricci_flat_family(self, hk_mixed_family):
        frame = hk_mixed_family.frame()
        for p in sample(hk_mixed_family, 30):
            rep = ricci_form_identity(frame, p, curv_at(hk_mixed_family, p))
            assert rep.rho_norm <= 1e-7
            assert rep.dkappa_norm <= 1e-7
            assert rep.residual <= 1e-7

    def test_nonzero_on_generic_family(self, generic_family):
        frame = generic_family.frame()
        p = Point(1.5, 0.5, 0.0, 0.0)
        rep = ricci_form_identity(frame, p, curv_at(generic_family, p))
        assert rep.rho_norm > 1e-2


class TestIntegrabilityPredicates:
    def test_predicates_vanish(self, generic_family):
        """f = g = 0 and E3(alpha sin phi) = E4(alpha cos phi) = 0."""
        frame = generic_family.frame()
        for p in sample(generic_family, 50):
            pr = integrability_predicates(frame, p)
            assert max(abs(pr.f), abs(pr.g), abs(pr.k), abs(pr.l)) <= 1e-8
            assert abs(pr.h) <= 1e-8

    def test_longitudinal_derivative_identity(self, generic_family):
        """E1(alpha sin phi) = E2(alpha cos phi) = -(3/2) alpha^2 sin cos."""
        frame = generic_family.frame()
        for p in sample(generic_family, 50):
            fr = frame.at(p)
            e1_as = fr.E[0] @ fr.alpha_sin.grad
            e2_ac = fr.E[1] @ fr.alpha_cos.grad
            target = -1.5 * fr.alpha_sin.value * fr.alpha_cos.value
            assert abs(e1_as - target) <= 1e-7
            assert abs(e2_ac - target) <= 1e-7

    def test_alpha_never_constant(self, constant_family):
        """Even constant profiles force d alpha != 0 along E1, E2."""
        frame = constant_family.frame()
        worst = 0.0
        for p in sample(constant_family, 30):
            worst = max(worst, frob(frame.alpha(p).grad))
        assert worst > 1e-2

    def test_transverse_hypothesis_forces_dichotomy(self, generic_family,
                                                    constant_family):
        """When the four transverse derivatives vanish and d theta = 0,
        either f = g = 0 or phi is constant."""
        for fam in (generic_family, constant_family):
            frame = fam.frame()
            for p in sample(fam, 20):
                d = transverse_dichotomy_data(frame, p)
                if d["transverse"] <= 1e-9 and d["dtheta"] <= 1e-9:
                    assert d["fg"] <= 1e-7 or d["dphi"] <= 1e-7


class TestSpecialFrame:
    def test_orthonormal(self, generic_family):
        sp = special_frame(generic_family.frame())
        for p in sample(generic_family, 20):
            fr = sp.at(p)
            g = generic_family.metric_jet(p).g
            assert np.abs(fr.E @ g @ fr.E.T - np.eye(4)).max() <= 1e-10

    def test_connection_relations(self, generic_family):
        """The Lee-adapted frame satisfies the I-invariant-Ricci connection
        relations at 30 points."""
        frame = generic_family.frame()
        sp = special_frame(frame)
        worst = max(special_frame_residuals(frame, sp, p,
                                            curv_at(generic_family, p)).max()
                    for p in sample(generic_family, 30))
        assert worst <= 1e-7

    def test_frame_angle_formula(self, generic_family):
        """sin(gamma) = sin^2(phi) through the volume form."""
        frame = generic_family.frame()
        sp = special_frame(frame)
        for p in sample(generic_family, 30):
            g = generic_family.metric_jet(p).g
            _, res = frame_angle_residual(frame, sp, p, g)
            assert res <= 1e-8

    def test_angle_endpoint(self):
        """At phi = pi/2 the rotated plane is span{E4, -E2}, so the volume
        pairing with span{E1, E3} is 1: sin(gamma) = sin^2(phi) = 1."""
        phi = np.pi / 2
        E = np.eye(4)  # stand-in orthonormal tetrad (E1, E2, E3, E4)
        e3p = -np.cos(phi) * E[2] + np.sin(phi) * E[3]
        e4p = -np.cos(phi) * E[0] - np.sin(phi) * E[1]
        mat = np.stack([E[0], E[2], e3p, e4p], axis=1)
        assert_allclose(abs(np.linalg.det(mat)), 1.0, atol=1e-15)

    def test_predicate_guard(self, constant_family):
        """Predicates report an error where sin phi or cos phi vanish."""
        frame = constant_family.frame()
        zero = frame.alpha_cos * 0.0
        broken = type(frame)(frame.family, frame.E, frame.theta, frame.alpha,
                             frame.phi, zero, frame.alpha_sin,
                             frame.ln_alpha_cos, frame.ln_alpha_sin)
        with pytest.raises(ChartError):
            integrability_predicates(broken, Point(1.5, 0.5, 0.0, 0.0))
