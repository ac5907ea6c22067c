"""Named verification checks, the suite runner and report emission.

Every check evaluates one geometric identity over the configured point grid
and reports its worst residual against a declared tolerance.  The anchor
string states the identity itself, so reports are readable standalone.
"""
from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import __version__
from .chart import ChartError, Point, VectorField, exterior_derivative, wedge_1_2
from .config import ConfigError, RunConfig, build_family
from .curvature import (CurvaturePackage, curvature_at, eigenform_residual,
                        frame_tetrad,
                        contracted_second_bianchi_residual, first_bianchi_residual,
                        metric_compat_residual, riemann_symmetry_residual,
                        weyl_split)
from .fd_oracle import curvature_agreement, metric_jet_agreement
from .hermitian import (alpha_from_nabla_J, complex_structures,
                        connection_form_residual, integrability_predicates,
                        kahler_forms, lee_form, lee_form_derivative_residual,
                        lee_form_extracted, nijenhuis_norm, ricci_form_identity,
                        special_frame, special_frame_residuals,
                        frame_angle_residual, structure_equation_residuals,
                        lie_bracket_residuals)
from .metrics import FlatFamily, MetricFamily, hyperkahler_parameters
from .qch import qch_spread
from .sampling import check_rng, lattice_points, usable_points
from .symmetry import (coordinate_killing_fields, holomorphy_residual,
                       hyperkahler_triple, kahler_sphere, killing_residual,
                       lie_derivative_volume, parallel_residual,
                       triple_wedge_residuals, triholomorphic_scan)


class DegenerateSaturationError(RuntimeError):
    """More than half of the grid was skipped as degenerate or inadmissible."""


@dataclass
class CheckResult:
    name: str
    anchor: str
    residual: float
    tolerance: float
    status: str
    worst_point: list[float]
    detail: str = ""


@dataclass
class Report:
    config_hash: str
    seed: int
    version: str
    checks: list[CheckResult]
    status: str
    family: dict
    elapsed_s: float


@dataclass
class CheckContext:
    family: MetricFamily
    points: list[Point]
    seed: int
    tolerances: dict
    corruption: float | None = None
    _frame: object = None
    _weyl: dict = dc_field(default_factory=dict)
    _rho: dict = dc_field(default_factory=dict)

    @property
    def frame(self):
        if self._frame is None:
            fr = self.family.frame()
            if self.corruption is not None:
                fr = fr.corrupted(self.corruption)
            self._frame = fr
        return self._frame

    def curv(self, p: Point) -> CurvaturePackage:
        return curvature_at(self.family, p)

    def weyl(self, p: Point):
        if p not in self._weyl:
            tet = None
            if not isinstance(self.family, FlatFamily):
                # always the true metric frame: a corrupted frame fixture
                # should trip the frame checks, not the curvature ones
                tet = frame_tetrad(self.family.frame().at(p))
            self._weyl[p] = weyl_split(self.curv(p), tetrad=tet)
        return self._weyl[p]

    def rng(self, name: str):
        return check_rng(self.seed, name)

    def subset(self, n: int, name: str) -> list[Point]:
        if len(self.points) <= n:
            return self.points
        idx = self.rng(name).choice(len(self.points), size=n, replace=False)
        return [self.points[i] for i in sorted(idx)]

    @property
    def special(self):
        if getattr(self, "_special", None) is None:
            self._special = special_frame(self.frame)
        return self._special

    def sphere_bundle(self):
        """Triple and d_z / d_t rotation fits, computed once per run."""
        if getattr(self, "_sphere", None) is None:
            triple = hyperkahler_triple(self.frame)
            pts = self.subset(16, "sphere_fits")
            from .symmetry import phi_homomorphism
            fit_z = phi_homomorphism(VectorField.coordinate_basis(2), triple, pts)
            fit_t = phi_homomorphism(VectorField.coordinate_basis(3), triple, pts)
            self._sphere = (triple, pts, fit_z, fit_t)
        return self._sphere

    def rho_report(self, p: Point):
        if p not in self._rho:
            self._rho[p] = ricci_form_identity(self.frame, p, self.curv(p))
        return self._rho[p]

    @property
    def hk_fit(self):
        params = getattr(self.family, "params", None)
        if params is None or self.family.kind == "perturbed":
            return None
        return hyperkahler_parameters(params)


@dataclass
class CheckSpec:
    name: str
    anchor: str
    requires: str          # any | orthotoric | hyperkahler
    tolerance: float
    fn: object


REGISTRY: dict[str, CheckSpec] = {}


def register(name: str, anchor: str, requires: str, tolerance: float):
    def deco(fn):
        REGISTRY[name] = CheckSpec(name, anchor, requires, tolerance, fn)
        return fn

    return deco


def _worst(ctx: CheckContext, points, fn) -> tuple[float, Point]:
    worst, wp = -1.0, points[0]
    for p in points:
        r = float(fn(p))
        if r > worst:
            worst, wp = r, p
    return worst, wp


# -- generic curvature checks ----------------------------------------------------


@register("metric_compat", "nabla g = 0 for the Levi-Civita connection",
          "any", 1e-10)
def _check_metric_compat(ctx):
    return _worst(ctx, ctx.points,
                  lambda p: metric_compat_residual(ctx.curv(p).metric, ctx.curv(p).gamma))


@register("riemann_symmetries",
          "R_ijkl = -R_jikl = -R_ijlk = R_klij", "any", 1e-9)
def _check_riemann_sym(ctx):
    return _worst(ctx, ctx.points, lambda p: riemann_symmetry_residual(ctx.curv(p).riemann))


@register("bianchi_first", "R_i[jkl] = 0", "any", 1e-9)
def _check_bianchi1(ctx):
    return _worst(ctx, ctx.points, lambda p: first_bianchi_residual(ctx.curv(p).riemann))


@register("bianchi_second", "div Ric = (1/2) d scal (contracted)", "any", 1e-6)
def _check_bianchi2(ctx):
    pts = ctx.subset(6, "bianchi_second")
    return _worst(ctx, pts, lambda p: contracted_second_bianchi_residual(ctx.family, p))


@register("operator_symmetry", "the curvature operator on 2-forms is symmetric",
          "any", 1e-9)
def _check_op_sym(ctx):
    def res(p):
        op = ctx.weyl(p).operator
        return np.abs(op - op.T).max()

    return _worst(ctx, ctx.points, res)


@register("weyl_trace", "tr W+ = tr W- = 0", "any", 1e-9)
def _check_weyl_trace(ctx):
    def res(p):
        w = ctx.weyl(p)
        return max(abs(np.trace(w.weyl_plus)), abs(np.trace(w.weyl_minus)))

    return _worst(ctx, ctx.points, res)


@register("hodge_star_involution",
          "star is +1 on the SD triple and -1 on the ASD triple, exactly",
          "any", 1e-12)
def _check_star(ctx):
    def res(p):
        basis = ctx.weyl(p).basis
        worst = 0.0
        for k in range(3):
            worst = max(worst,
                        np.abs(basis.star_frame(basis.sd[k]) - basis.sd[k]).max(),
                        np.abs(basis.star_frame(basis.asd[k]) + basis.asd[k]).max())
        return worst

    return _worst(ctx, ctx.points, res)


@register("oracle_metric_jets",
          "dual-number metric derivatives agree with central differences "
          "(relative)",
          "any", 1e-6)
def _check_oracle_jets(ctx):
    pts = ctx.subset(6, "oracle_metric_jets")
    return _worst(ctx, pts, lambda p: metric_jet_agreement(ctx.family, p))


@register("oracle_curvature",
          "Christoffel and Riemann agree with the finite-difference path "
          "(relative)",
          "any", 1e-5)
def _check_oracle_curv(ctx):
    pts = ctx.subset(4, "oracle_curvature")
    return _worst(ctx, pts,
                  lambda p: curvature_agreement(ctx.family, p, ctx.curv(p)))


# -- frame and Hermitian-structure checks -----------------------------------------


@register("frame_orthonormal", "g(E_i, E_j) = delta_ij", "orthotoric", 1e-10)
def _check_frame_on(ctx):
    def res(p):
        fr = ctx.frame.at(p)
        g = ctx.curv(p).metric.g
        return np.abs(fr.E @ g @ fr.E.T - np.eye(4)).max()

    return _worst(ctx, ctx.points, res)


@register("coframe_duality", "theta_i(E_j) = delta_ij", "orthotoric", 1e-10)
def _check_duality(ctx):
    def res(p):
        fr = ctx.frame.at(p)
        return np.abs(fr.theta @ fr.E.T - np.eye(4)).max()

    return _worst(ctx, ctx.points, res)


@register("kahler_domega", "d omega_J = 0 (the structure is Kahler)",
          "orthotoric", 1e-8)
def _check_domega(ctx):
    wj, _ = kahler_forms(ctx.frame)
    return _worst(ctx, ctx.points, lambda p: np.abs(exterior_derivative(wj, p)).max())


@register("complex_structure_algebra",
          "J^2 = I^2 = -Id, g(J., J.) = g, IJ = JI with eigenplanes span{E1,E3}, span{E2,E4}",
          "orthotoric", 1e-10)
def _check_acs(ctx):
    J, I = complex_structures(ctx.frame)

    def res(p):
        jv, iv = J.values(p), I.values(p)
        g = ctx.curv(p).metric.g
        fr = ctx.frame.at(p)
        ij = iv @ jv
        vals = [np.abs(jv @ jv + np.eye(4)).max(),
                np.abs(iv @ iv + np.eye(4)).max(),
                np.abs(jv.T @ g @ jv - g).max(),
                np.abs(iv.T @ g @ iv - g).max(),
                np.abs(ij - jv @ iv).max(),
                np.abs(ij @ fr.E[0] - fr.E[0]).max(),
                np.abs(ij @ fr.E[2] - fr.E[2]).max(),
                np.abs(ij @ fr.E[1] + fr.E[1]).max(),
                np.abs(ij @ fr.E[3] + fr.E[3]).max()]
        return max(vals)

    return _worst(ctx, ctx.points, res)


@register("nijenhuis", "N_J = N_I = 0 (both structures integrable)",
          "orthotoric", 1e-8)
def _check_nijenhuis(ctx):
    J, I = complex_structures(ctx.frame)
    return _worst(ctx, ctx.points,
                  lambda p: max(nijenhuis_norm(J, p), nijenhuis_norm(I, p)))


@register("lee_form_conformal", "d omega_I = 2 theta ^ omega_I",
          "orthotoric", 1e-8)
def _check_lee_conformal(ctx):
    _, wi = kahler_forms(ctx.frame)
    th = lee_form(ctx.frame)

    def res(p):
        dw = exterior_derivative(wi, p)
        return np.abs(dw - 2.0 * wedge_1_2(th.values(p), wi.values(p))).max()

    return _worst(ctx, ctx.points, res)


@register("lee_form_closed", "d theta = 0 (the Lee form is closed)",
          "orthotoric", 1e-8)
def _check_lee_closed(ctx):
    th = lee_form(ctx.frame)
    return _worst(ctx, ctx.points, lambda p: np.abs(exterior_derivative(th, p)).max())


@register("lee_form_extraction",
          "least-squares Lee form from d omega_I matches the closed form",
          "orthotoric", 1e-8)
def _check_lee_extract(ctx):
    th = lee_form(ctx.frame)

    def res(p):
        eta, _ = lee_form_extracted(ctx.frame, p)
        return np.abs(eta - th.values(p)).max()

    return _worst(ctx, ctx.points, res)


@register("dlee_expansion",
          "d theta expands in the frame 2-form basis with coefficients h, k, l",
          "orthotoric", 1e-7)
def _check_dlee(ctx):
    return _worst(ctx, ctx.points, lambda p: lee_form_derivative_residual(ctx.frame, p))


@register("structure_equations",
          "the four coframe structure equations of the distinguished frame",
          "orthotoric", 1e-7)
def _check_structure(ctx):
    return _worst(ctx, ctx.points,
                  lambda p: structure_equation_residuals(ctx.frame, p).max())


@register("lie_brackets", "the six frame bracket identities", "orthotoric", 1e-7)
def _check_brackets(ctx):
    return _worst(ctx, ctx.points,
                  lambda p: lie_bracket_residuals(ctx.frame, p).max())


@register("connection_forms",
          "2 om^1_2 = 2 om^3_4 = alpha(sin phi theta1 - cos phi theta2) and "
          "2 om^4_1 = 2 om^3_2 = alpha(cos phi theta4 + sin phi theta3)",
          "orthotoric", 1e-8)
def _check_connection(ctx):
    return _worst(ctx, ctx.points,
                  lambda p: connection_form_residual(ctx.frame, p, ctx.curv(p).gamma))


@register("integrability",
          "f = g = 0 and E3(alpha sin phi) = E4(alpha cos phi) = 0",
          "orthotoric", 1e-8)
def _check_integrability(ctx):
    def res(p):
        pr = integrability_predicates(ctx.frame, p)
        return max(abs(pr.f), abs(pr.g), abs(pr.k), abs(pr.l))

    return _worst(ctx, ctx.points, res)


@register("alpha_from_nabla",
          "alpha = |nabla omega_I| / (2 sqrt 2)", "orthotoric", 1e-7)
def _check_alpha(ctx):
    def res(p):
        rec = alpha_from_nabla_J(ctx.frame, p, ctx.curv(p))
        return abs(rec - ctx.frame.alpha(p).value)

    return _worst(ctx, ctx.points, res)


@register("ricci_form_identity",
          "rho = d(d^I ln tan phi)", "orthotoric", 1e-6)
def _check_rho(ctx):
    return _worst(ctx, ctx.points, lambda p: ctx.rho_report(p).residual)


@register("ricci_form_invariance",
          "rho(J., J.) = rho and rho(I., I.) = rho", "orthotoric", 1e-8)
def _check_rho_inv(ctx):
    def res(p):
        rep = ctx.rho_report(p)
        return max(rep.j_invariance, rep.i_invariance)

    return _worst(ctx, ctx.points, res)


@register("special_frame_relations",
          "connection relations of the Lee-adapted frame "
          "(Gamma'3_11 = Gamma'3_22 = E3' ln alpha; -Gamma'3_21 + Gamma'4_22 = alpha; "
          "Gamma'4_33 = alpha - E4' ln alpha)",
          "orthotoric", 1e-7)
def _check_special(ctx):
    sp = ctx.special
    return _worst(ctx, ctx.points,
                  lambda p: special_frame_residuals(ctx.frame, sp, p, ctx.curv(p)).max())


@register("frame_angle", "sin(angle between D and the Lee plane) = sin^2 phi",
          "orthotoric", 1e-8)
def _check_angle(ctx):
    sp = ctx.special
    return _worst(ctx, ctx.points,
                  lambda p: frame_angle_residual(ctx.frame, sp, p,
                                                 ctx.curv(p).metric.g)[1])


@register("killing_dz", "L_{d_z} g = 0 (d_z is Killing)", "orthotoric", 1e-9)
def _check_killing_dz(ctx):
    xi = VectorField.coordinate_basis(2)
    return _worst(ctx, ctx.points, lambda p: killing_residual(xi, ctx.family, p))


@register("killing_dt", "L_{d_t} g = 0 (d_t is Killing)", "orthotoric", 1e-9)
def _check_killing_dt(ctx):
    xi = VectorField.coordinate_basis(3)
    return _worst(ctx, ctx.points, lambda p: killing_residual(xi, ctx.family, p))


@register("holomorphy_dz", "L_{d_z} J = L_{d_z} I = 0", "orthotoric", 1e-8)
def _check_holo(ctx):
    J, I = complex_structures(ctx.frame)
    xi = VectorField.coordinate_basis(2)
    return _worst(ctx, ctx.points,
                  lambda p: max(holomorphy_residual(xi, J, p),
                                holomorphy_residual(xi, I, p)))


@register("lie_volume", "L_xi vol = 0 for the coordinate Killing fields",
          "orthotoric", 1e-8)
def _check_lie_vol(ctx):
    dz = VectorField.coordinate_basis(2)
    dt = VectorField.coordinate_basis(3)
    return _worst(ctx, ctx.points,
                  lambda p: max(abs(lie_derivative_volume(dz, ctx.family, p)),
                                abs(lie_derivative_volume(dt, ctx.family, p))))


@register("qch_spread",
          "holomorphic curvature depends only on (point, |X_D|)",
          "orthotoric", 1e-6)
def _check_qch(ctx):
    pts = ctx.subset(12, "qch_spread")
    rep = qch_spread(ctx.family, pts)
    return rep.max_spread, rep.worst_point


# -- Ricci-flat-family checks ------------------------------------------------------


@register("ricci_flat", "Ric = 0 on the quadratic-profile family",
          "hyperkahler", 1e-8)
def _check_ricci_flat(ctx):
    return _worst(ctx, ctx.points, lambda p: np.abs(ctx.curv(p).ricci).max())


@register("weyl_plus_zero", "W+ = 0 (Ricci-flat Kahler is half flat)",
          "hyperkahler", 1e-8)
def _check_wp(ctx):
    return _worst(ctx, ctx.points, lambda p: np.abs(ctx.weyl(p).weyl_plus).max())


@register("weyl_minus_degenerate",
          "W- has a double eigenvalue and a separated simple one",
          "hyperkahler", 1e-7)
def _check_wm(ctx):
    sep_floor = 1e-4
    worst_pair, wp, min_sep = -1.0, ctx.points[0], np.inf
    for p in ctx.points:
        lam = ctx.weyl(p).spectrum_minus
        g1, g2 = lam[1] - lam[0], lam[2] - lam[1]
        pair, sep = min(g1, g2), max(g1, g2)
        if pair > worst_pair:
            worst_pair, wp = pair, p
        min_sep = min(min_sep, sep)
    ok = min_sep > sep_floor
    detail = f"min separated gap {min_sep:.3e} (> {sep_floor:g} required)"
    return worst_pair, wp, detail, ok


@register("omega_i_eigenform",
          "omega_I is an eigenform of W- for the simple eigenvalue",
          "hyperkahler", 1e-7)
def _check_eigenform(ctx):
    _, wi = kahler_forms(ctx.frame)

    def res(p):
        r, _lam = eigenform_residual(ctx.weyl(p), wi.values(p))
        return r

    return _worst(ctx, ctx.points, res)


@register("kahler_sphere_parallel",
          "the phase family cos(psi) P + sin(psi) Q is parallel for psi = c z + a t",
          "hyperkahler", 1e-7)
def _check_sphere(ctx):
    g0 = kahler_sphere(ctx.frame, 0.0)
    g1 = kahler_sphere(ctx.frame, np.pi / 2)
    return _worst(ctx, ctx.points,
                  lambda p: max(parallel_residual(g0, ctx.family, p),
                                parallel_residual(g1, ctx.family, p)))


@register("sphere_rotation_rate",
          "the isometry d_z rotates the sphere pair at rate c",
          "hyperkahler", 1e-8)
def _check_rate(ctx):
    c, a = ctx.hk_fit[0], ctx.hk_fit[1]
    _, pts, fit_z, fit_t = ctx.sphere_bundle()
    detail = f"rate(d_z) = {fit_z.rate:+.6g} (c = {c:+g}); rate(d_t) = {fit_t.rate:+.6g} (a = {a:+g})"
    return abs(fit_z.rate - c), pts[0], detail, None


@register("phi_antisymmetry",
          "fitted rotation matrices satisfy A + A^T = 0 with zero diagonal",
          "hyperkahler", 1e-9)
def _check_phi_antisym(ctx):
    _, pts, fit_z, fit_t = ctx.sphere_bundle()
    worst = -1.0
    for fit in (fit_z, fit_t):
        worst = max(worst, fit.antisymmetry, float(np.abs(np.diag(fit.A)).max()))
    return worst, pts[0]


@register("triple_wedge",
          "omega_i ^ omega_j = 2 delta_ij vol for the parallel triple",
          "hyperkahler", 1e-9)
def _check_triple_wedge(ctx):
    triple = ctx.sphere_bundle()[0]
    return _worst(ctx, ctx.points, lambda p: triple_wedge_residuals(triple, p).max())


@register("triholomorphic",
          "a combination of the commuting Killing fields preserves all three "
          "Kahler forms",
          "hyperkahler", 1e-7)
def _check_triholomorphic(ctx):
    triple, pts, fit_z, fit_t = ctx.sphere_bundle()
    scan = triholomorphic_scan(coordinate_killing_fields(), triple, pts,
                               fits=[fit_z, fit_t])
    if not scan.found:
        return np.inf, pts[0], scan.note, False
    return float(scan.lie_residuals.max()), pts[0], scan.note, None


# -- the runner --------------------------------------------------------------------


def applicable_checks(family: MetricFamily, hk_fit) -> list[str]:
    out = []
    for name, spec in REGISTRY.items():
        if spec.requires == "any":
            out.append(name)
        elif spec.requires == "orthotoric" and family.kind in ("orthotoric", "perturbed"):
            out.append(name)
        elif spec.requires == "hyperkahler" and family.kind == "orthotoric" and hk_fit is not None:
            out.append(name)
    return out


def resolve_suite(cfg: RunConfig, family: MetricFamily, hk_fit) -> list[str]:
    available = applicable_checks(family, hk_fit)
    if list(cfg.suite) == ["all"]:
        return available
    names = []
    for name in cfg.suite:
        if name not in REGISTRY:
            raise ConfigError(f"unknown check {name!r}")
        if name not in available:
            raise ConfigError(f"check {name!r} does not apply to a "
                              f"{family.kind} family")
        names.append(name)
    return names


def run_suite(cfg: RunConfig) -> Report:
    t0 = time.perf_counter()
    family = build_family(cfg.family_spec)
    raw_points = lattice_points(family.domain, cfg.grid_counts)
    frame = None
    if family.kind in ("orthotoric", "perturbed"):
        frame = family.frame()
    points, skipped = usable_points(raw_points, family, frame)
    if len(skipped) > 0.5 * len(raw_points):
        raise DegenerateSaturationError(
            f"{len(skipped)}/{len(raw_points)} grid points skipped as "
            "degenerate or inadmissible")
    ctx = CheckContext(family=family, points=points, seed=cfg.seed,
                       tolerances=cfg.tolerances, corruption=cfg.corruption)
    names = resolve_suite(cfg, family, ctx.hk_fit)
    workers = int(os.environ.get("ORTHOTORIC_WORKERS", "1"))

    def run_one(name: str) -> CheckResult:
        spec = REGISTRY[name]
        tol = float(ctx.tolerances.get(name, spec.tolerance))
        detail = ""
        override = None
        try:
            out = spec.fn(ctx)
            if len(out) == 2:
                residual, wp = out
            else:
                residual, wp, detail, override = out
            status = "PASS" if (residual <= tol and override is not False) else "FAIL"
            if override is True:
                status = "PASS"
        except ChartError as exc:
            residual, wp, status, detail = float("inf"), points[0], "FAIL", str(exc)
        return CheckResult(name=name, anchor=spec.anchor,
                           residual=float(residual), tolerance=tol, status=status,
                           worst_point=[float(v) for v in wp.coords], detail=detail)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, names))
    else:
        results = [run_one(n) for n in names]
    status = "PASS" if all(r.status == "PASS" for r in results) else "FAIL"
    return Report(config_hash=cfg.config_hash, seed=cfg.seed, version=__version__,
                  checks=results, status=status, family=family.describe(),
                  elapsed_s=time.perf_counter() - t0)


# -- emission -----------------------------------------------------------------------


def emit(report: Report, fmt: str) -> bytes:
    """Serialize a report; JSON output is byte-stable for a fixed config+seed."""
    if fmt == "json":
        doc = {
            "config_hash": report.config_hash,
            "seed": report.seed,
            "version": report.version,
            "status": report.status,
            "family": report.family,
            "checks": [{
                "name": c.name, "anchor": c.anchor, "residual": c.residual,
                "tolerance": c.tolerance, "status": c.status,
                "worst_point": c.worst_point, "detail": c.detail,
            } for c in report.checks],
        }
        return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "anchor", "residual", "tolerance", "status"])
        for c in report.checks:
            w.writerow([c.name, c.anchor, repr(c.residual), repr(c.tolerance), c.status])
        return buf.getvalue().encode()
    if fmt == "summary":
        lines = [f"orthotoric {report.version}  config {report.config_hash}  "
                 f"seed {report.seed}  ({report.elapsed_s:.2f}s)"]
        width = max(len(c.name) for c in report.checks) if report.checks else 10
        for c in report.checks:
            lines.append(f"  {c.status:4s}  {c.name:<{width}s}  "
                         f"residual {c.residual:10.3e}  tol {c.tolerance:8.1e}"
                         + (f"  [{c.detail}]" if c.detail else ""))
        lines.append(f"overall: {report.status}")
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown format {fmt!r}")
