import math

import numpy as np
import pytest

from slantgeo import fixtures as fx
from slantgeo import theorems as th
from slantgeo.theorems import CHECKS, EQUIVALENCE_CHECKS, Analysis, Tolerances, run_checks
from slantgeo.verdict import FAIL, PASS, VACUOUS, equivalence, holds

from helpers import analysis, cosym_map

SAMPLES = 6


def _verdicts(name, **params):
    an = analysis(name, tuple(sorted(params.items())), SAMPLES)
    return {v.check_id: v for v in run_checks(an)}


def test_registry_ids():
    assert len(CHECKS) == 15 and len(EQUIVALENCE_CHECKS) == 8
    assert set(EQUIVALENCE_CHECKS) <= set(CHECKS)
    ids = [v.check_id for v in run_checks(analysis("psi2", (), SAMPLES))]
    assert ids == sorted(ids)


def test_three_valued_verdicts():
    assert holds(1e-9, 1e-8) is True
    assert holds(5e-8, 1e-8) is None
    assert holds(2e-7, 1e-8) is False
    assert holds(math.inf, 1.0) is False
    assert equivalence("x", 1, 1.0, 2.0, 1e-8).status == PASS
    assert equivalence("x", 1, 0.0, 2.0, 1e-8).status == FAIL
    assert equivalence("x", 1, 0.0, 5e-8, 1e-8).status == "indeterminate"


def test_tolerances_must_be_positive():
    with pytest.raises(ValueError):
        Tolerances(angle=0.0)


def test_linear_example_passes_everything():
    for v in _verdicts("psi2").values():
        assert v.status in (PASS, VACUOUS), (v.check_id, v.notes)


def test_anti_invariant_gates():
    v = _verdicts("psi1")
    assert v["thm-minimal-fibers"].vacuous and v["cor-harmonic"].vacuous


def test_curved_fibres_give_false_false_equivalences():
    v = _verdicts("slant_quadric")
    for cid in ("thm-integrability", "thm-horiz-geodesic", "thm-vert-geodesic",
                "thm-local-product", "thm-tot-geodesic-map"):
        assert v[cid].status == PASS, cid
        assert v[cid].lhs_holds is False and v[cid].rhs_holds is False, cid
    assert v["thm-homothety"].vacuous  # the horizontal distribution is not integrable
    assert v["thm-minimal-fibers"].status == PASS


def test_inversion_is_neither_homothetic_nor_harmonic():
    v = _verdicts("psi3_inversion")
    for cid in ("thm-homothety", "thm-eker-mu", "thm-tot-geodesic-map", "cor-harmonic"):
        assert v[cid].status == PASS, cid
        assert v[cid].lhs_holds is False and v[cid].rhs_holds is False, cid


def test_dilation_free_identity_is_blind_when_mu_vanishes():
    """psi2_squared: not homothetic, yet the dilation-free identity holds (dim mu = 0)."""
    an = analysis("psi2_squared", (), SAMPLES)
    assert all(fr.mu.shape[1] == 0 for fr in an.regular)
    _, _, plain = th.integrability_sides(an)
    assert an.homothety_residual > 0.1
    assert plain < 1e-8
    v = _verdicts("psi2_squared")
    assert v["thm-homothety"].status == FAIL
    assert v["thm-homothety"].lhs_holds is False and v["thm-homothety"].rhs_holds is True
    assert v["cor-harmonic"].status == PASS  # dim B = 2


def test_integrability_rhs_needs_dilation_term():
    """Dropping the dilation term breaks the equivalence on the non-homothetic inversion."""
    an = analysis("psi3_inversion", (), SAMPLES)
    bracket, full, plain = th.integrability_sides(an)
    assert bracket < 1e-8 and full < 1e-6
    assert plain > 1e-3


def test_non_conformal_map_is_outside_the_hypotheses():
    an = Analysis(cosym_map(["x1", "2*x3"]), samples=3)
    assert an.hypothesis() is not None
    v = {x.check_id: x for x in run_checks(an)}
    assert v["thm-integrability"].vacuous
    assert v["cosym-structure"].status == PASS


def test_one_shot_wrappers():
    m = fx.make("psi2")
    for fn in (th.check_integrability_horizontal, th.check_homothety_criterion,
               th.check_horizontal_totally_geodesic, th.check_vertical_totally_geodesic,
               th.check_minimal_fibers_parallel_E, th.check_harmonicity,
               th.check_EkerMu_totally_geodesic, th.check_totally_geodesic_map,
               th.check_local_product):
        v = fn(m, samples=2)
        assert v.passed, fn.__name__


def test_domain_errors_are_collected():
    m = cosym_map(["sqrt(x1)", "x3"])  # x1 < 0 on half of the default box
    an = Analysis(m, samples=8)
    assert an.domain_errors and len(an.points) + len(an.domain_errors) == 8


def test_points_are_shared_across_checks():
    an = analysis("psi2", (), SAMPLES)
    assert len(an.points) == SAMPLES
    np.testing.assert_array_equal(an.points[0], an.frames[0].point)
