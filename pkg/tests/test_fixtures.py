import math

import pytest

from slantgeo import fixtures as fx
from slantgeo.map_analysis import slant_angle


def test_registry():
    assert set(fx.FIXTURES) == {"psi1", "psi2", "psi3", "psi2_squared", "psi3_inversion",
                                "slant_quadric"}
    assert {name for name, _ in fx.SUITE_CASES} == set(fx.FIXTURES)


def test_unknown_fixture_and_parameter():
    with pytest.raises(fx.FixtureError, match="available"):
        fx.get("psi9")
    with pytest.raises(fx.FixtureError, match="no parameter"):
        fx.make("psi2", {"alpha": 1.0})
    with pytest.raises(fx.FixtureError, match="pairing"):
        fx.make("psi2", {"pairing": "diagonal"})


def test_quadric_requires_an_anticommuting_K():
    with pytest.raises(fx.FixtureError, match="anticommute"):
        fx.make("slant_quadric", {"pairing": "cross"})


@pytest.mark.parametrize("alpha, beta", [(math.pi / 6, math.pi / 6), (math.pi / 4, math.pi / 8),
                                         (0.3, 0.9)])
def test_psi1_angle_depends_on_pairing(alpha, beta):
    study = fx.pairing_study("psi1", {"alpha": alpha, "beta": beta})
    assert study["identity"]["angle"] == pytest.approx(math.pi / 2, abs=1e-12)
    assert math.cos(study["cross"]["angle"]) == pytest.approx(abs(math.cos(alpha + beta)),
                                                              abs=1e-12)
    assert study["cross"]["matches_claim"]


def test_psi3_claim_needs_cross_pairing():
    study = fx.pairing_study("psi3")
    assert study["identity"]["angle"] == pytest.approx(math.pi / 2, abs=1e-12)
    assert not study["identity"]["matches_claim"]
    assert study["cross"]["angle"] == pytest.approx(math.pi / 4, abs=1e-12)
    assert study["cross"]["matches_claim"]


def test_psi2_angle_is_pairing_independent():
    study = fx.pairing_study("psi2")
    for row in study.values():
        assert row["angle"] == pytest.approx(math.pi / 4, abs=1e-12)


@pytest.mark.parametrize("theta", [0.4, math.pi / 3, 2.5])
def test_quadric_angle_follows_theta(theta):
    rep = slant_angle(fx.make("slant_quadric", {"theta": theta}), samples=4)
    assert rep.is_slant
    assert rep.mean == pytest.approx(math.acos(abs(math.cos(theta))), abs=1e-10)


def test_quadric_pairing_study_marks_cross_unavailable():
    study = fx.pairing_study("slant_quadric")
    assert study["cross"]["classification"] == "unavailable"
    assert study["identity"]["matches_claim"]
