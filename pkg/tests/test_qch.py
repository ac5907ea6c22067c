"""Holomorphic-curvature quasi-constancy and family classification."""
import numpy as np
import pytest

from orthotoric.chart import ChartError, Point
from orthotoric.curvature import CurvaturePackage
from orthotoric.fd_oracle import fd_curvature
from orthotoric.hermitian import complex_structures
from orthotoric.qch import (ContradictionError, Diagnostics, classify,
                            classify_from_diagnostics, diagnostics,
                            holomorphic_curvature, qch_samples, qch_spread)

from conftest import sample


def unit_vector_in_plane(family, p, s=0.3):
    """A unit combination of E1, E3 (the distinguished plane)."""
    fr = family.frame().at(p)
    return np.cos(s) * fr.E[0] + np.sin(s) * fr.E[2]


class TestHolomorphicCurvature:
    def test_flat_vanishes(self, flat_family):
        p = Point(0.1, 0.2, 0.3, 0.4)
        pkg = CurvaturePackage(flat_family.metric_jet(p))
        J, _ = complex_structures(flat_family.frame())
        X = np.array([1.0, 0.0, 0.0, 0.0])
        assert holomorphic_curvature(pkg, J.values(p), X) == 0.0

    def test_non_unit_vector_rejected(self, flat_family):
        p = Point(0, 0, 0, 0)
        pkg = CurvaturePackage(flat_family.metric_jet(p))
        J, _ = complex_structures(flat_family.frame())
        with pytest.raises(ChartError):
            holomorphic_curvature(pkg, J.values(p), np.array([2.0, 0, 0, 0]))

    def test_plane_vectors_agree_on_ricci_flat_family(self, hk_linear_family):
        """Two different unit vectors of D = span{E1, E3} give the same K."""
        J, _ = complex_structures(hk_linear_family.frame())
        for p in sample(hk_linear_family, 10):
            pkg = CurvaturePackage(hk_linear_family.metric_jet(p))
            jv = J.values(p)
            k1 = holomorphic_curvature(pkg, jv, unit_vector_in_plane(hk_linear_family, p, 0.3))
            k2 = holomorphic_curvature(pkg, jv, unit_vector_in_plane(hk_linear_family, p, 1.1))
            assert abs(k1 - k2) <= 1e-7

    def test_j_rotation_invariance(self, generic_family):
        """K(X) = K(JX): the holomorphic plane is well defined."""
        J, _ = complex_structures(generic_family.frame())
        rng = np.random.default_rng(5)
        for p in sample(generic_family, 10):
            pkg = CurvaturePackage(generic_family.metric_jet(p))
            jv = J.values(p)
            g = pkg.metric.g
            v = rng.standard_normal(4)
            v = v / np.sqrt(v @ g @ v)
            assert abs(holomorphic_curvature(pkg, jv, v)
                       - holomorphic_curvature(pkg, jv, jv @ v)) <= 1e-9

    def test_value_against_finite_difference_oracle(self, generic_family):
        p = Point(1.5, 0.5, 0.0, 0.0)
        J, _ = complex_structures(generic_family.frame())
        jv = J.values(p)
        X = unit_vector_in_plane(generic_family, p)
        exact = holomorphic_curvature(CurvaturePackage(generic_family.metric_jet(p)), jv, X)
        oracle_pkg = fd_curvature(generic_family, p)
        oracle = float(np.einsum("ijkl,i,j,k,l->", oracle_pkg.riemann,
                                 X, jv @ X, jv @ X, X))
        assert abs(exact - oracle) <= 1e-5 * max(1.0, abs(exact))


class TestQCHSpread:
    def test_flat_spread_zero(self, flat_family):
        pts = sample(flat_family, 5)
        assert qch_spread(flat_family, pts).max_spread == 0.0

    def test_orthotoric_family_is_quasi_constant(self, generic_family):
        """20 points x 5 radii x 16 phases: spread within 1e-6."""
        rep = qch_spread(generic_family, sample(generic_family, 20))
        assert rep.n_samples == 20 * 5 * 16
        assert rep.max_spread <= 1e-6

    def test_ricci_flat_families_quasi_constant(self, hk_linear_family,
                                                hk_quadratic_family):
        for fam in (hk_linear_family, hk_quadratic_family):
            assert qch_spread(fam, sample(fam, 8)).max_spread <= 1e-7

    def test_sample_records_are_unit_split(self, generic_family):
        """Sampled vectors are unit and split as r^2 + (1 - r^2) exactly."""
        p = Point(1.5, 0.5, 0.1, -0.2)
        g = generic_family.metric_jet(p).g
        fr = generic_family.frame().at(p)
        proj = np.stack([fr.theta[0], fr.theta[2]])  # coframe of D
        for r in (0.0, 0.3, 1.0):
            for smp in qch_samples(generic_family, p, r):
                assert abs(smp.X @ g @ smp.X - 1.0) <= 1e-12
                d_part = proj @ smp.X
                assert abs(d_part @ d_part - r * r) <= 1e-12

    def test_perturbed_metric_fails(self, perturbed_family):
        """The eps x^2 dz dt defect shows up as a spread above 1e-4."""
        rep = qch_spread(perturbed_family, sample(perturbed_family, 8))
        assert rep.max_spread > 1e-4


class TestClassification:
    def test_linear_hyperkahler(self, hk_linear_family):
        pts = sample(hk_linear_family, 12)
        assert classify(hk_linear_family, pts) == "HYPERKAHLER_ALL_ORTHOTORIC"

    def test_quadratic_hyperkahler(self, hk_quadratic_family):
        pts = sample(hk_quadratic_family, 12)
        assert classify(hk_quadratic_family, pts) == "HYPERKAHLER_UNIQUE_ORTHOTORIC"

    def test_constant_profiles_are_calabi(self, constant_family):
        pts = sample(constant_family, 12)
        assert classify(constant_family, pts) == "HYPERKAHLER_CALABI"

    def test_generic_profiles(self, generic_family):
        pts = sample(generic_family, 12)
        assert classify(generic_family, pts) == "GENERIC_ORTHOTORIC"

    def test_flat_baseline(self, flat_family):
        assert classify(flat_family, sample(flat_family, 4)) == "FLAT"

    def test_contradiction_branch(self):
        """Ricci reported zero with non-conforming profiles is impossible;
        the classifier must refuse rather than guess."""
        d = Diagnostics(ricci_max=1e-12, dphi_max=0.3, hk_fit=None,
                        kind="orthotoric")
        with pytest.raises(ContradictionError):
            classify_from_diagnostics(d)

    def test_deterministic(self, generic_family):
        pts = sample(generic_family, 12)
        a = diagnostics(generic_family, pts)
        b = diagnostics(generic_family, pts)
        assert a == b
        assert classify(generic_family, pts) == classify(generic_family, pts)


def test_perturbed_family_refused(perturbed_family):
    """The negative-control kind is not a classification target."""
    with pytest.raises(ChartError):
        classify(perturbed_family, sample(perturbed_family, 4))
