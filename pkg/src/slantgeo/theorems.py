"""Numerical checkers for the structure equations and equivalence theorems.

Every checker takes an :class:`Analysis` (a map plus its sampled points, frames and
local geometry, all computed once and shared) and returns a :class:`CheckVerdict`.
Equivalence checkers report side (i) as ``lhs_residual`` and side (ii) as
``rhs_residual``; each side holds when its residual is below the tolerance, fails
above ten times the tolerance, and is indeterminate in between.

Residuals of source-side quantities are measured in the source metric on unit
frame vectors.  Target-side quantities (second fundamental form, tension) are
divided by the dilation so that both live on the same scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Callable, Optional

import numpy as np

from .expr import DomainError
from .geometry import DEFAULT_SEED, GeometryError, check_cosymplectic, sample_points
from .map_analysis import (SmoothMapSpec, conformality, d_squared_residual, frame_at,
                           gram_residuals, lemma_residuals, slant_angle, slant_decomposition)
from .oneill import LocalGeometry
from .verdict import CheckVerdict, direct, equivalence, holds, vacuous


@dataclass(frozen=True)
class Tolerances:
    angle: float = 1e-6
    identity: float = 1e-8
    derivative: float = 1e-5
    rank: float = 1e-8
    # E counts as parallel at a point when its covariant derivative is below this
    parallel: float = 1e-8

    def __post_init__(self):
        for name in ("angle", "identity", "derivative", "rank", "parallel"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")


class Analysis:
    """Shared sampling state for all checkers on one map."""

    def __init__(self, m: SmoothMapSpec, samples: int = 20, seed: int = DEFAULT_SEED,
                 tolerances: Optional[Tolerances] = None, points=None):
        if m.structure is None:
            raise GeometryError("the source carries no almost contact structure")
        self.m = m
        self.samples = samples
        self.seed = seed
        self.tol = tolerances or Tolerances()
        raw = sample_points(m.source.domain_box, samples, seed) if points is None else points
        self.domain_errors: list[str] = []
        self.points, self.frames = [], []
        for p in raw:
            try:
                self.frames.append(frame_at(m, p, self.tol.rank))
                self.points.append(np.asarray(p, dtype=float))
            except DomainError as exc:
                self.domain_errors.append(f"{list(map(float, p))}: {exc}")
        self.regular = [fr for fr in self.frames if fr.status == "regular"]

    @property
    def n_points(self) -> int:
        return len(self.points)

    @cached_property
    def slant(self):
        return slant_angle(self.m, tol_angle=self.tol.angle, points=self.points,
                           frames=self.frames)

    @cached_property
    def conformality(self):
        return conformality(self.m, tol=self.tol.identity, tol_homothety=self.tol.derivative,
                            points=self.points, frames=self.frames)

    @cached_property
    def geos(self) -> list[LocalGeometry]:
        return [LocalGeometry(self.m, fr.point, fr) for fr in self.regular]

    @cached_property
    def decompositions(self):
        return [slant_decomposition(self.m, fr) for fr in self.regular]

    @property
    def omega(self) -> float:
        return self.slant.mean

    @property
    def homothety_residual(self) -> float:
        """Largest horizontal part of ``grad ln lambda`` over the samples."""
        return max(self.conformality.grad_horizontal, default=0.0)

    @property
    def is_homothetic(self) -> Optional[bool]:
        return holds(self.homothety_residual, self.tol.derivative)

    def hypothesis(self) -> Optional[str]:
        """Why the map is not a conformal slant submersion at the samples, if it is not."""
        if not self.points:
            return "no sample point could be evaluated"
        if len(self.regular) < len(self.frames):
            return f"{len(self.frames) - len(self.regular)} sample points are not regular"
        if not all(fr.xi_vertical for fr in self.regular):
            return "xi is not vertical"
        if not self.conformality.is_conformal:
            return "the map is not horizontally conformal"
        if not self.slant.is_slant:
            return f"the map is not slant ({self.slant.classification})"
        return None

    @cached_property
    def e_parallel(self) -> list[float]:
        """Per point, the largest ``|(nabla_V E) W|`` over vertical frame fields."""
        out = []
        for geo in self.geos:
            vs = geo.vertical
            out.append(max((geo.norm(geo.nabla_E(vs[:, i], j))
                            for i in range(geo.k) for j in range(geo.k)), default=0.0))
        return out


def _max(values) -> float:
    return float(max(values, default=0.0))


# ----------------------------------------------------------------------------- algebraic

def check_structure(an: Analysis) -> CheckVerdict:
    return check_cosymplectic(an.m.source, an.m.structure, tol=an.tol.identity,
                              points=an.points)


def check_slant_angle(an: Analysis) -> CheckVerdict:
    rep = an.slant
    notes = [f"mean={rep.mean:.12f}", f"classification={rep.classification}",
             f"directions={rep.directions}", f"samples={len(rep.angles)}"]
    if not rep.angles:
        return CheckVerdict("slant-angle", an.n_points, math.inf, math.inf, False,
                            status="fail", tolerance=an.tol.angle, notes=notes)
    return direct("slant-angle", an.n_points, rep.spread, an.tol.angle, notes=notes)


def _slant_gate(an: Analysis, check_id: str, tol: float) -> Optional[CheckVerdict]:
    reason = an.hypothesis()
    if reason:
        return vacuous(check_id, an.n_points, reason, tol)
    return None


def check_lemma_blocks(an: Analysis) -> CheckVerdict:
    worst: dict[str, float] = {}
    for sd in an.decompositions:
        for key, val in lemma_residuals(sd).items():
            worst[key] = max(worst.get(key, 0.0), val)
    recon = _max(sd.residual for sd in an.decompositions)
    notes = [f"{k}={v:.3e}" for k, v in sorted(worst.items())] + [f"reconstruction={recon:.3e}"]
    return direct("lemma-3.5-3.8", len(an.decompositions), _max(worst.values()),
                  an.tol.identity, other=recon, notes=notes)


def check_d_squared(an: Analysis) -> CheckVerdict:
    gate = _slant_gate(an, "thm-D2", an.tol.identity)
    if gate:
        return gate
    res = _max(d_squared_residual(sd, an.omega) for sd in an.decompositions)
    return direct("thm-D2", len(an.decompositions), res, an.tol.identity,
                  notes=[f"omega={an.omega:.12f}"])


def check_gram(an: Analysis) -> CheckVerdict:
    gate = _slant_gate(an, "cor-3.14-3.15", an.tol.identity)
    if gate:
        return gate
    pairs = [gram_residuals(sd, an.omega) for sd in an.decompositions]
    return direct("cor-3.14-3.15", len(pairs), _max(p[0] for p in pairs), an.tol.identity,
                  other=_max(p[1] for p in pairs), notes=["lhs: D, rhs: E"])


# ----------------------------------------------------------------------------- D and E

def _unit_directions(geo: LocalGeometry) -> list[np.ndarray]:
    """Vertical frame vectors orthogonal to xi and their normalised pairwise sums."""
    w = geo.frame.slant_directions_basis
    out = [w[:, i] for i in range(w.shape[1])]
    out += [(w[:, i] + w[:, j]) / math.sqrt(2.0) for i, j in combinations(range(w.shape[1]), 2)]
    return out


def dd_fibre_residual(geo: LocalGeometry, omega: float) -> float:
    """``max |T_{DV} DV + cos^2(omega) T_V V|`` over unit vertical ``V`` orthogonal to xi."""
    c2 = math.cos(omega) ** 2
    out = 0.0
    for v in _unit_directions(geo):
        dv = geo.v(geo.phi(v))
        out = max(out, geo.norm(geo.T(dv, dv) + c2 * geo.T(v, v)))
    return out


def derivative_consistency(an: Analysis) -> tuple[float, float]:
    """``(nabla_V D)W`` and ``(nabla_V E)W`` by definition against their T-expressions."""
    rd = re = 0.0
    for geo in an.geos:
        vs = geo.vertical
        for i, j in product(range(geo.k), repeat=2):
            rd = max(rd, geo.norm(geo.nabla_D(vs[:, i], j) - geo.nabla_D_formula(vs[:, i], j)))
            re = max(re, geo.norm(geo.nabla_E(vs[:, i], j) - geo.nabla_E_formula(vs[:, i], j)))
    return rd, re


def _parallel_points(an: Analysis) -> list[LocalGeometry]:
    return [geo for geo, r in zip(an.geos, an.e_parallel) if r < an.tol.parallel]


def check_dd_fibre(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _slant_gate(an, "prop-3.16", tol)
    if gate:
        return gate
    par = _parallel_points(an)
    if not par:
        return vacuous("prop-3.16", an.n_points, "E is not parallel at any sample", tol)
    res = _max(dd_fibre_residual(geo, an.omega) for geo in par)
    rd, re = derivative_consistency(an)
    notes = [f"E parallel at {len(par)}/{len(an.geos)} points",
             f"nabla_D consistency={rd:.3e}", f"nabla_E consistency={re:.3e}"]
    return direct("prop-3.16", len(par), res, tol, other=max(rd, re), notes=notes)


def check_minimal_fibers(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _slant_gate(an, "thm-minimal-fibers", tol)
    if gate:
        return gate
    if an.omega > math.pi / 2 - an.tol.angle:
        return vacuous("thm-minimal-fibers", an.n_points, "slant angle is pi/2", tol)
    par = _parallel_points(an)
    if not par:
        return vacuous("thm-minimal-fibers", an.n_points, "E is not parallel at any sample", tol)
    h = _max(geo.norm(geo.mean_curvature()) for geo in par)
    r_dd = _max(dd_fibre_residual(geo, an.omega) for geo in par)
    return direct("thm-minimal-fibers", len(par), h, tol, other=r_dd,
                  notes=[f"E parallel at {len(par)}/{len(an.geos)} points",
                         "lhs: |H|, rhs: T_DV DV + cos^2 T_V V"])


# ----------------------------------------------------------------------------- sides (ii)

def _dil_mixed(geo: LocalGeometry, x1, ex2) -> np.ndarray:
    """``-X1(l) eX2 - eX2(l) X1 + g(X1, eX2) grad l``."""
    dl = geo.directional_ln_lambda
    return -dl(x1) * ex2 - dl(ex2) * x1 + geo.inner(x1, ex2) * geo.grad_ln_lambda


def integrability_terms(geo: LocalGeometry, a: int, b: int, i: int) -> dict[str, float]:
    """Pieces of the integrability identity for horizontal frame fields ``a, b`` and
    vertical frame vector ``i``.

    Returns the bracket term ``g([X1, X2], V1)``, the pullback side ``lhs`` and the
    two right-hand groups ``rhs_plain`` (no dilation) and ``rhs_dilation``.
    """
    full = geo.frame.full
    x1, x2, v1 = full[:, a], full[:, b], full[:, i]
    f1, f2 = geo.frame_field(a), geo.frame_field(b)
    ex1, ex2 = geo.h(geo.phi(x1)), geo.h(geo.phi(x2))
    dx1, dx2 = geo.v(geo.phi(x1)), geo.v(geo.phi(x2))
    dv1, ev1 = geo.v(geo.phi(v1)), geo.h(geo.phi(v1))
    gb = lambda y, z: float(y @ geo.g_target @ z)
    jev1 = geo.jac @ ev1
    lhs = gb(geo.nabla_pullback(x2, geo.hphi(f1)) - geo.nabla_pullback(x1, geo.hphi(f2)),
             jev1) / geo.lam ** 2
    rhs_d = geo.inner(geo.v(geo.nabla(x1, geo.vphi(f2))) + geo.A(x1, ex2)
                      - geo.v(geo.nabla(x2, geo.vphi(f1))) - geo.A(x2, ex1), dv1)
    rhs_a = geo.inner(geo.A(x1, dx2) - geo.A(x2, dx1), ev1)
    dl = geo.directional_ln_lambda
    dil = (-dl(x1) * ex2 + dl(x2) * ex1 - dl(ex2) * x1 + dl(ex1) * x2
           + 2.0 * geo.inner(x1, ex2) * geo.grad_ln_lambda)
    return {"bracket": geo.inner(geo.bracket(f1, f2), v1), "lhs": lhs,
            "rhs_plain": rhs_d + rhs_a, "rhs_dilation": geo.inner(dil, ev1)}


def horizontal_geodesic_terms(geo: LocalGeometry, a: int, b: int, i: int) -> dict[str, float]:
    """Pieces of the horizontal totally-geodesic identity and its homothetic refinement."""
    full = geo.frame.full
    x1, x2, v1 = full[:, a], full[:, b], full[:, i]
    f2 = geo.frame_field(b)
    ex2, dx2 = geo.h(geo.phi(x2)), geo.v(geo.phi(x2))
    ev1 = geo.h(geo.phi(v1))
    edv1 = geo.h(geo.phi(geo.v(geo.phi(v1))))
    gb = lambda y, z: float(y @ geo.g_target @ z) / geo.lam ** 2
    l1 = gb(geo.nabla_pullback(x1, f2), geo.jac @ edv1)
    l2 = gb(geo.nabla_pullback(x1, geo.hphi(f2)), geo.jac @ ev1)
    a_term = geo.inner(geo.A(x1, dx2), ev1)
    dl = geo.directional_ln_lambda
    dil_e = geo.inner(_dil_mixed(geo, x1, ex2), ev1)
    dil_ed = geo.inner(-dl(x1) * x2 - dl(x2) * x1 + geo.inner(x1, x2) * geo.grad_ln_lambda, edv1)
    return {"full": l1 - l2 - a_term - dil_e + dil_ed, "refined": l1 - l2 - a_term,
            "geodesic": geo.inner(geo.nabla(x1, f2), v1)}


def vertical_geodesic_residual(geo: LocalGeometry, i: int, j: int, a: int) -> float:
    """``g(nabla_V1 EDV2, X1) - g(T_V1 EV2, dX1) - g(h nabla_V1 EV2, eX1)``."""
    full = geo.frame.full
    v1, v2, x1 = full[:, i], full[:, j], full[:, a]
    f2 = geo.frame_field(j)
    edv2 = geo.hphi(geo.vphi(f2))
    ev2 = geo.h(geo.phi(v2))
    return (geo.inner(geo.nabla(v1, edv2), x1) - geo.inner(geo.T(v1, ev2), geo.v(geo.phi(x1)))
            - geo.inner(geo.h(geo.nabla(v1, geo.hphi(f2))), geo.h(geo.phi(x1))))


def totally_geodesic_conditions(geo: LocalGeometry) -> tuple[float, float]:
    """Largest norms of conditions (a) and (c) over frame arguments."""
    full, k, n = geo.frame.full, geo.k, geo.n
    ra = rc = 0.0
    for i, j in product(range(k), repeat=2):
        v1, f2 = full[:, i], geo.frame_field(j)
        v2 = full[:, j]
        dv2, ev2 = geo.v(geo.phi(v2)), geo.h(geo.phi(v2))
        inner_sum = (geo.T(v1, dv2) + geo.h(geo.nabla(v1, geo.hphi(f2)))
                     + geo.T(v1, ev2) + geo.v(geo.nabla(v1, geo.vphi(f2))))
        ra = max(ra, geo.norm(geo.h(geo.phi(inner_sum))))
    for a, i in product(range(k, n), range(k)):
        x1, fv = full[:, a], geo.frame_field(i)
        v1 = full[:, i]
        dv1, ev1 = geo.v(geo.phi(v1)), geo.h(geo.phi(v1))
        inner_sum = (geo.A(x1, dv1) + geo.h(geo.nabla(x1, geo.hphi(fv)))
                     + geo.A(x1, ev1) + geo.v(geo.nabla(x1, geo.vphi(fv))))
        rc = max(rc, geo.norm(geo.h(geo.phi(inner_sum))))
    return ra, rc


# ----------------------------------------------------------------------------- equivalences

def _foliation_gate(an: Analysis, check_id: str) -> Optional[CheckVerdict]:
    tol = an.tol.derivative
    gate = _slant_gate(an, check_id, tol)
    if gate:
        return gate
    if an.omega < an.tol.angle:
        # the identity is multiplied by sin^2(omega) and says nothing for invariant maps
        return vacuous(check_id, an.n_points, "slant angle is 0: side (ii) degenerates", tol)
    return None


def _horizontal_pairs(geo):
    return [(a, b) for a in range(geo.k, geo.n) for b in range(geo.k, geo.n)]


def integrability_sides(an: Analysis) -> tuple[float, float, float]:
    """(bracket side, full identity residual, dilation-free identity residual)."""
    s1 = s2 = s3 = 0.0
    for geo in an.geos:
        for (a, b), i in product(combinations(range(geo.k, geo.n), 2), range(geo.k)):
            t = integrability_terms(geo, a, b, i)
            s1 = max(s1, abs(t["bracket"]))
            s2 = max(s2, abs(t["lhs"] - t["rhs_plain"] - t["rhs_dilation"]))
            s3 = max(s3, abs(t["lhs"] - t["rhs_plain"]))
    return s1, s2, s3


def check_integrability(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _slant_gate(an, "thm-integrability", tol)
    if gate:
        return gate
    s1, s2, _ = integrability_sides(an)
    return equivalence("thm-integrability", len(an.geos), s1, s2, tol,
                       notes=["lhs: g([X1,X2],V1), rhs: pullback identity"])


def check_homothety(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _slant_gate(an, "thm-homothety", tol)
    if gate:
        return gate
    s1, _, s3 = integrability_sides(an)
    if holds(s1, tol) is not True:
        return vacuous("thm-homothety", an.n_points, "horizontal distribution not integrable", tol)
    return equivalence("thm-homothety", len(an.geos), an.homothety_residual, s3, tol,
                       notes=["lhs: |h grad ln lambda|, rhs: dilation-free identity"])


def horizontal_geodesic_sides(an: Analysis) -> tuple[float, float, float]:
    """(|A_X Y| side, full identity residual, refined identity residual)."""
    s1 = s2 = s3 = 0.0
    for geo in an.geos:
        a_arr = geo.A_frame()
        for a, b in _horizontal_pairs(geo):
            s1 = max(s1, geo.norm(a_arr[:, a, b]))
            for i in range(geo.k):
                t = horizontal_geodesic_terms(geo, a, b, i)
                s2 = max(s2, abs(t["full"]))
                s3 = max(s3, abs(t["refined"]))
    return s1, s2, s3


def check_horizontal_geodesic(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _foliation_gate(an, "thm-horiz-geodesic")
    if gate:
        return gate
    s1, s2, s3 = horizontal_geodesic_sides(an)
    verdict = equivalence("thm-horiz-geodesic", len(an.geos), s1, s2, tol,
                          notes=["lhs: |A_X Y|, rhs: pullback identity"])
    if holds(s1, tol) is True:
        # under a totally geodesic horizontal foliation: homothetic <=> refined identity
        refined = equivalence("refinement", len(an.geos), an.homothety_residual, s3, tol)
        verdict.notes.append(f"refinement: homothety={an.homothety_residual:.3e} "
                             f"identity={s3:.3e} -> {refined.status}")
        if refined.status != "pass":
            verdict.passed, verdict.status = False, refined.status
    return verdict


def vertical_geodesic_sides(an: Analysis) -> tuple[float, float, float]:
    """(|T_V W| side, identity residual, |T_V xi| slice)."""
    s1 = s2 = s3 = 0.0
    for geo in an.geos:
        t_arr = geo.T_frame()
        for i, j in product(range(geo.k), repeat=2):
            s1 = max(s1, geo.norm(t_arr[:, i, j]))
            if j == 0 and geo.frame.xi_vertical:
                s3 = max(s3, geo.norm(t_arr[:, i, j]))
            for a in range(geo.k, geo.n):
                s2 = max(s2, abs(vertical_geodesic_residual(geo, i, j, a)))
    return s1, s2, s3


def check_vertical_geodesic(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _foliation_gate(an, "thm-vert-geodesic")
    if gate:
        return gate
    s1, s2, s3 = vertical_geodesic_sides(an)
    return equivalence("thm-vert-geodesic", len(an.geos), s1, s2, tol,
                       notes=["lhs: |T_V W|, rhs: nabla EDV identity", f"T_V xi={s3:.3e}"])


def tension_residuals(an: Analysis) -> tuple[float, float]:
    """(max |tau| / lambda, max |tau - formula| / lambda)."""
    tau = agree = 0.0
    for geo in an.geos:
        t = geo.tension()
        tau = max(tau, geo.norm_target(t) / geo.lam)
        agree = max(agree, geo.norm_target(t - geo.tension_formula()) / geo.lam)
    return tau, agree


def check_harmonic(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _slant_gate(an, "cor-harmonic", tol)
    if gate:
        return gate
    if an.omega > math.pi / 2 - an.tol.angle:
        return vacuous("cor-harmonic", an.n_points, "slant angle is pi/2", tol)
    worst_parallel = _max(an.e_parallel)
    if worst_parallel >= an.tol.parallel:
        return vacuous("cor-harmonic", an.n_points,
                       f"E is not parallel (residual {worst_parallel:.3e})", tol)
    tau, agree = tension_residuals(an)
    s = an.m.target.dimension
    if s == 2:
        rhs, what = 0.0, "dim B = 2: harmonic unconditionally"
    else:
        rhs, what = an.homothety_residual, "dim B > 2: rhs is |h grad ln lambda|"
    verdict = equivalence("cor-harmonic", len(an.geos), tau, rhs, tol,
                          notes=["lhs: |tau|/lambda", what, f"trace vs formula={agree:.3e}"])
    ok = holds(agree, tol)
    if ok is not True:
        verdict.passed = False
        verdict.status = "fail" if ok is False else "indeterminate"
    return verdict


def eker_mu_side(an: Analysis) -> tuple[float, int]:
    """Largest ``|(nabla psi_*)(EV, Y)| / lambda`` for vertical V and Y in mu."""
    res, dim = 0.0, 0
    for geo in an.geos:
        mu = geo.frame.mu
        dim = max(dim, mu.shape[1])
        for i, c in product(range(geo.k), range(mu.shape[1])):
            ev = geo.h(geo.phi(geo.vertical[:, i]))
            res = max(res, geo.norm_target(geo.sff(ev, mu[:, c])) / geo.lam)
    return res, dim


def check_eker_mu(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _slant_gate(an, "thm-eker-mu", tol)
    if gate:
        return gate
    if all(fr.mu.shape[1] == 0 for fr in an.regular):
        return vacuous("thm-eker-mu", an.n_points, "dim mu = 0", tol)
    res, dim = eker_mu_side(an)
    return equivalence("thm-eker-mu", len(an.geos), an.homothety_residual, res, tol,
                       notes=["lhs: |h grad ln lambda|, rhs: |S(EV, mu)|/lambda", f"dim mu={dim}"])


def verify_totally_geodesic_map(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _slant_gate(an, "thm-tot-geodesic-map", tol)
    if gate:
        return gate
    s1 = ra = rc = 0.0
    for geo in an.geos:
        s = geo.sff_frame()
        s1 = max(s1, max(geo.norm_target(s[:, a, b]) for a in range(geo.n) for b in range(geo.n))
                 / geo.lam)
        a_, c_ = totally_geodesic_conditions(geo)
        ra, rc = max(ra, a_), max(rc, c_)
    rb = an.homothety_residual
    return equivalence("thm-tot-geodesic-map", len(an.geos), s1, max(ra, rb, rc), tol,
                       notes=["lhs: |S|/lambda", f"(a)={ra:.3e}", f"(b)={rb:.3e}", f"(c)={rc:.3e}"])


def verify_local_product(an: Analysis) -> CheckVerdict:
    tol = an.tol.derivative
    gate = _foliation_gate(an, "thm-local-product")
    if gate:
        return gate
    h1, h2, _ = horizontal_geodesic_sides(an)
    v1, v2, _ = vertical_geodesic_sides(an)
    return equivalence("thm-local-product", len(an.geos), max(h1, v1), max(h2, v2), tol,
                       notes=[f"|A|={h1:.3e}", f"|T|={v1:.3e}",
                              f"horizontal identity={h2:.3e}", f"vertical identity={v2:.3e}"])


# ----------------------------------------------------------------------------- registry

@dataclass(frozen=True)
class Check:
    check_id: str
    run: Callable[[Analysis], CheckVerdict]
    summary: str


CHECKS: dict[str, Check] = {c.check_id: c for c in (
    Check("cosym-structure", check_structure, "almost contact identities and nabla phi = nabla xi = 0"),
    Check("slant-angle", check_slant_angle, "constancy of the angle between phi V and ker psi_*"),
    Check("lemma-3.5-3.8", check_lemma_blocks, "block identities of D, E, d, e"),
    Check("thm-D2", check_d_squared, "D^2 = -cos^2(omega) (I - eta (x) xi)"),
    Check("cor-3.14-3.15", check_gram, "g(DV, DW) and g(EV, EW) in terms of omega"),
    Check("prop-3.16", check_dd_fibre, "T_DV DV = -cos^2(omega) T_V V when E is parallel"),
    Check("thm-minimal-fibers", check_minimal_fibers, "E parallel implies minimal fibres"),
    Check("thm-integrability", check_integrability, "integrability of the horizontal distribution"),
    Check("thm-homothety", check_homothety, "homothety criterion for integrable horizontal distribution"),
    Check("thm-horiz-geodesic", check_horizontal_geodesic, "totally geodesic horizontal foliation"),
    Check("thm-vert-geodesic", check_vertical_geodesic, "totally geodesic fibres"),
    Check("cor-harmonic", check_harmonic, "harmonicity for parallel E"),
    Check("thm-eker-mu", check_eker_mu, "(E ker, mu)-totally geodesic iff homothetic"),
    Check("thm-tot-geodesic-map", verify_totally_geodesic_map, "totally geodesic map criterion"),
    Check("thm-local-product", verify_local_product, "local product decomposition"),
)}

EQUIVALENCE_CHECKS = ("thm-integrability", "thm-homothety", "thm-horiz-geodesic",
                      "thm-vert-geodesic", "cor-harmonic", "thm-eker-mu",
                      "thm-tot-geodesic-map", "thm-local-product")


def run_checks(an: Analysis, ids=None) -> list[CheckVerdict]:
    ids = sorted(CHECKS) if ids is None else sorted(set(ids))
    unknown = [i for i in ids if i not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check id(s): {', '.join(unknown)}")
    return [CHECKS[i].run(an) for i in ids]


# ----------------------------------------------------------------------------- one-shot API

def _one(check_id: str, m: SmoothMapSpec, samples: int, tol: float, seed: int) -> CheckVerdict:
    an = Analysis(m, samples, seed, Tolerances(derivative=tol))
    return CHECKS[check_id].run(an)


def check_integrability_horizontal(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-integrability", m, samples, tol, seed)


def check_homothety_criterion(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-homothety", m, samples, tol, seed)


def check_horizontal_totally_geodesic(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-horiz-geodesic", m, samples, tol, seed)


def check_vertical_totally_geodesic(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-vert-geodesic", m, samples, tol, seed)


def check_minimal_fibers_parallel_E(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-minimal-fibers", m, samples, tol, seed)


def check_harmonicity(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("cor-harmonic", m, samples, tol, seed)


def check_EkerMu_totally_geodesic(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-eker-mu", m, samples, tol, seed)


def check_totally_geodesic_map(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-tot-geodesic-map", m, samples, tol, seed)


def check_local_product(m, samples=20, tol=1e-5, seed=DEFAULT_SEED):
    return _one("thm-local-product", m, samples, tol, seed)
