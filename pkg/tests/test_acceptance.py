"""Acceptance criteria for the toolkit, one test per criterion.

Each test prints a single PASS/FAIL line (visible under pytest -s) with the
measured residual and its pinned tolerance, then asserts.  Criteria run in
definition order; the runtime budget is checked at the end.
"""
import time

import numpy as np
import pytest

import orthotoric.hermitian as herm
import orthotoric.symmetry as sym
from orthotoric.chart import VectorField, exterior_derivative
from orthotoric.checks import emit, run_suite
from orthotoric.config import parse_config
from orthotoric.curvature import (curvature_at, eigenform_residual,
                                  first_bianchi_residual, frame_tetrad,
                                  riemann_symmetry_residual, weyl_split)
from orthotoric.fd_oracle import curvature_agreement, metric_jet_agreement
from orthotoric.qch import qch_spread

from conftest import sample

T0 = time.perf_counter()
N_GRID = 200


def report(num, name, residual, tol, ok=None):
    ok = (residual <= tol) if ok is None else ok
    print(f"ACCEPTANCE {num} {name}: residual {residual:.3e} (tol {tol:.1e}) "
          f"{'PASS' if ok else 'FAIL'}")
    return ok


@pytest.fixture(scope="module")
def profile_trio(generic_family, cubic_family, hk_mixed_family):
    """Three distinct profile choices with their 200-point seeded grids."""
    return [(fam, sample(fam, N_GRID, seed=101 + i))
            for i, fam in enumerate((generic_family, cubic_family, hk_mixed_family))]


def test_criterion_1_kahler_property(profile_trio):
    """d omega_J = 0 on three profile choices, 200 seeded points, < 5 s."""
    start = time.perf_counter()
    worst = 0.0
    for fam, pts in profile_trio:
        wj, _ = herm.kahler_forms(fam.frame())
        worst = max(worst, max(np.abs(exterior_derivative(wj, p)).max()
                               for p in pts))
    elapsed = time.perf_counter() - start
    ok = report(1, "kahler d(omega_J) = 0", worst, 1e-8) and elapsed < 5.0
    print(f"             criterion 1 runtime {elapsed:.2f}s (< 5s)")
    assert worst <= 1e-8 and elapsed < 5.0


def test_criterion_2_structure_equations(profile_trio, generic_family):
    """Coframe equations and bracket table at 1e-7 on the same grids, with
    the corrupted-frame negative control failing above 1e-3."""
    worst = 0.0
    for fam, pts in profile_trio:
        frame = fam.frame()
        for p in pts:
            worst = max(worst,
                        herm.structure_equation_residuals(frame, p).max(),
                        herm.lie_bracket_residuals(frame, p).max())
    corrupted = generic_family.frame().corrupted(1.01)
    control = max(herm.structure_equation_residuals(corrupted, p).max()
                  for p in sample(generic_family, 20))
    ok = report(2, "structure equations + brackets", worst, 1e-7)
    print(f"             negative control residual {control:.3e} (> 1e-3)")
    assert worst <= 1e-7
    assert control > 1e-3


def test_criterion_3_ricci_form_identity(generic_family):
    """rho = d(d^I ln tan phi) at 1e-6 with J/I invariance at 1e-8 on a
    nonconstant-phi family."""
    frame = generic_family.frame()
    pts = sample(generic_family, 100, seed=303)
    worst_id, worst_inv = 0.0, 0.0
    for p in pts:
        rep = herm.ricci_form_identity(frame, p, curvature_at(generic_family, p))
        worst_id = max(worst_id, rep.residual)
        worst_inv = max(worst_inv, rep.j_invariance, rep.i_invariance)
    ok = report(3, "ricci form identity", worst_id, 1e-6)
    ok &= report(3, "ricci form invariance", worst_inv, 1e-8)
    assert worst_id <= 1e-6 and worst_inv <= 1e-8


def test_criterion_4_ricci_flat_classification(hk_linear_family,
                                               hk_quadratic_family,
                                               hk_mixed_family,
                                               generic_family, cubic_family):
    """Ric = 0 at 1e-8 exactly on the quadratic-profile shape (three tuples,
    c = 0 and c != 0) and visibly nonzero off it (two profiles)."""
    worst_flat = 0.0
    for fam in (hk_linear_family, hk_quadratic_family, hk_mixed_family):
        worst_flat = max(worst_flat,
                         max(np.abs(curvature_at(fam, p).ricci).max()
                             for p in sample(fam, N_GRID, seed=404)))
    floor_off = min(
        max(np.abs(curvature_at(fam, p).ricci).max()
            for p in sample(fam, 40, seed=405))
        for fam in (generic_family, cubic_family))
    ok = report(4, "ricci flat on conforming profiles", worst_flat, 1e-8)
    print(f"             non-conforming floor {floor_off:.3e} (> 1e-3)")
    assert worst_flat <= 1e-8
    assert floor_off > 1e-3


def test_criterion_5_weyl_minus_degeneracy(hk_linear_family, hk_mixed_family):
    """On Ricci-flat families with nonconstant phi, W- has a double
    eigenvalue (gap 1e-7, separation > 1e-4) and omega_I is an eigenform."""
    worst_pair, min_sep, worst_eig = 0.0, np.inf, 0.0
    for fam in (hk_linear_family, hk_mixed_family):
        frame = fam.frame()
        _, wi = herm.kahler_forms(frame)
        for p in sample(fam, 60, seed=505):
            split = weyl_split(curvature_at(fam, p),
                               tetrad=frame_tetrad(frame.at(p)))
            lam = split.spectrum_minus
            gaps = np.diff(lam)
            worst_pair = max(worst_pair, min(gaps))
            min_sep = min(min_sep, max(gaps))
            res, _ = eigenform_residual(split, wi.values(p))
            worst_eig = max(worst_eig, res)
    ok = report(5, "weyl minus double eigenvalue", worst_pair, 1e-7)
    ok &= report(5, "omega_I eigenform residual", worst_eig, 1e-7)
    print(f"             smallest separated gap {min_sep:.3e} (> 1e-4)")
    assert worst_pair <= 1e-7 and worst_eig <= 1e-7 and min_sep > 1e-4


def test_criterion_6_symmetry_suite(hk_linear_family, hk_linear,
                                    hk_mixed_family, hk_mixed):
    """Killing residuals at 1e-9, antisymmetric rotation matrices at 1e-9,
    triholomorphic combinations found on both c = 0 and c != 0 families with
    L_xi omega_i at 1e-7, and the d_z rotation rate recovering c at 1e-8."""
    dz = VectorField.coordinate_basis(2)
    dt = VectorField.coordinate_basis(3)
    worst_kill = max(
        max(sym.killing_residual(xi, fam, p) for xi in (dz, dt))
        for fam in (hk_linear_family, hk_mixed_family)
        for p in sample(fam, 40, seed=606))
    ok = report(6, "killing residuals d_z, d_t", worst_kill, 1e-9)
    assert worst_kill <= 1e-9

    worst_rate, worst_antisym, worst_lie = 0.0, 0.0, 0.0
    for fam, hk in ((hk_linear_family, hk_linear), (hk_mixed_family, hk_mixed)):
        triple = sym.hyperkahler_triple(fam.frame(), hk)
        pts = sample(fam, 16, seed=607)
        fit_z = sym.phi_homomorphism(dz, triple, pts)
        fit_t = sym.phi_homomorphism(dt, triple, pts)
        worst_antisym = max(worst_antisym, fit_z.antisymmetry, fit_t.antisymmetry)
        worst_rate = max(worst_rate, abs(fit_z.rate - hk.c))
        scan = sym.triholomorphic_scan(sym.coordinate_killing_fields(), triple,
                                       pts, fits=[fit_z, fit_t])
        assert scan.found, scan.note
        worst_lie = max(worst_lie, float(scan.lie_residuals.max()))
        # the combination annihilates the fitted rotation rates
        u, v = scan.combination
        assert abs(fit_z.rate * u + fit_t.rate * v) <= 1e-8
        if hk.c == 0.0:
            assert np.allclose(scan.combination, [1.0, 0.0], atol=1e-12)
        else:
            assert abs(u) > 0.1 and abs(v) > 0.1
    ok &= report(6, "phi antisymmetry", worst_antisym, 1e-9)
    ok &= report(6, "triholomorphic L_xi omega_i", worst_lie, 1e-7)
    ok &= report(6, "d_z rotation rate recovers c", worst_rate, 1e-8)
    assert worst_antisym <= 1e-9 and worst_lie <= 1e-7 and worst_rate <= 1e-8


def test_criterion_7_qch_property(generic_family, perturbed_family):
    """Holomorphic-curvature spread within (point, |X_D|) level sets at 1e-6
    over 20 x 5 x 16 samples; the perturbed metric exceeds 1e-4."""
    rep = qch_spread(generic_family, sample(generic_family, 20, seed=707))
    assert rep.n_samples == 20 * 5 * 16
    control = qch_spread(perturbed_family,
                         sample(perturbed_family, 8, seed=708)).max_spread
    ok = report(7, "qch phase spread", rep.max_spread, 1e-6)
    print(f"             perturbed-metric control spread {control:.3e} (> 1e-4)")
    assert rep.max_spread <= 1e-6
    assert control > 1e-4


def test_criterion_8_oracle_cross_checks(generic_family, hk_mixed_family):
    """Jet-vs-finite-difference agreement (1e-6 relative on metric jets,
    1e-5 on Christoffel/Riemann) and the algebraic Bianchi identities at
    1e-9."""
    worst_jets, worst_curv, worst_bianchi = 0.0, 0.0, 0.0
    for fam in (generic_family, hk_mixed_family):
        for p in sample(fam, 6, seed=808):
            worst_jets = max(worst_jets, metric_jet_agreement(fam, p))
            worst_curv = max(worst_curv, curvature_agreement(fam, p))
        for p in sample(fam, 40, seed=809):
            R = curvature_at(fam, p).riemann
            worst_bianchi = max(worst_bianchi, first_bianchi_residual(R),
                                riemann_symmetry_residual(R))
    ok = report(8, "metric jets vs finite differences", worst_jets, 1e-6)
    ok &= report(8, "christoffel/riemann vs oracle", worst_curv, 1e-5)
    ok &= report(8, "bianchi identities", worst_bianchi, 1e-9)
    assert worst_jets <= 1e-6 and worst_curv <= 1e-5 and worst_bianchi <= 1e-9


def test_criterion_9_determinism():
    """Two runs with the same config and seed emit byte-identical JSON."""
    cfg = {
        "family": {"kind": "hyperkahler", "c": 1.0, "a": 0.5, "b1": 4.0,
                   "b2": 0.5,
                   "domain": {"x": [1.2, 1.8], "y": [0.2, 0.8],
                              "z": [-0.5, 0.5], "t": [-0.5, 0.5]}},
        "grid": {"counts": [2, 2, 2, 2], "seed": 2024},
    }
    a = emit(run_suite(parse_config(cfg)), "json")
    b = emit(run_suite(parse_config(cfg)), "json")
    ok = report(9, "byte-identical reports", 0.0 if a == b else 1.0, 0.5,
                ok=(a == b))
    assert a == b


def test_total_runtime_budget():
    """The whole acceptance module stays under the 60 s budget."""
    elapsed = time.perf_counter() - T0
    print(f"ACCEPTANCE runtime: {elapsed:.1f}s (< 60s) "
          f"{'PASS' if elapsed < 60 else 'FAIL'}")
    assert elapsed < 60.0
