"""Built-in maps from flat cosymplectic space, with the values claimed for them.

Each fixture records a *claimed* slant angle and dilation next to the pairing
convention that ``phi`` uses.  The pairing matters: several claimed angles are only
reproduced when ``u_i`` is paired with a ``v_j`` of a different index, so every
fixture exposes ``pairing`` as a parameter and :func:`pairing_study` reports the
angle under each choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .expr import parse
from .geometry import ManifoldSpec, builtin_cosymplectic
from .map_analysis import SmoothMapSpec, frame_at, slant_angle

PAIRINGS = {
    2: {"identity": (1, 2), "cross": (2, 1)},
    3: {"identity": (1, 2, 3), "cross": (3, 2, 1)},
}


class FixtureError(KeyError):
    pass


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    build: Callable[..., SmoothMapSpec]
    defaults: dict
    claimed_angle: Optional[Callable[[dict], float]] = None
    claimed_dilation: Optional[Callable[[dict], float]] = None
    # pairings under which the claimed angle is expected to be reproduced
    claim_pairings: tuple = ("identity", "cross")
    notes: tuple = ()

    def params(self, overrides: Optional[dict] = None) -> dict:
        out = dict(self.defaults)
        for key, value in (overrides or {}).items():
            if key not in self.defaults:
                raise FixtureError(f"fixture {self.name!r} has no parameter {key!r}")
            out[key] = value
        return out

    def make(self, overrides: Optional[dict] = None) -> SmoothMapSpec:
        return self.build(**self.params(overrides))


def _source(n_pairs: int, pairing: str, box=None):
    try:
        perm = PAIRINGS[n_pairs][pairing]
    except KeyError:
        raise FixtureError(f"unknown pairing {pairing!r}; expected one of "
                           f"{sorted(PAIRINGS[n_pairs])}") from None
    return builtin_cosymplectic(n_pairs, permutation=perm, box=box,
                                name=f"R^{2 * n_pairs + 1} ({pairing} pairing)")


def _map(n_pairs: int, pairing: str, components, name: str, box=None) -> SmoothMapSpec:
    source, acs = _source(n_pairs, pairing, box)
    n = source.dimension
    target = ManifoldSpec.euclidean(len(components), name=f"R^{len(components)}")
    return SmoothMapSpec(source, target, tuple(parse(c, n) for c in components), acs, name)


def psi1(alpha: float = math.pi / 6, beta: float = math.pi / 6,
         pairing: str = "identity") -> SmoothMapSpec:
    """``R^5 -> R^2``, ``e^7 (u1 cos a - v1 sin a, u2 sin b - v2 cos b)``."""
    a, b = repr(float(alpha)), repr(float(beta))
    comps = [f"exp(7)*(x1*cos({a}) - x3*sin({a}))", f"exp(7)*(x2*sin({b}) - x4*cos({b}))"]
    return _map(2, pairing, comps, "psi1")


def psi2(pairing: str = "identity") -> SmoothMapSpec:
    """``R^5 -> R^2``, ``pi^5 ((u1 - u2)/sqrt 2, v2)``."""
    return _map(2, pairing, ["pi^5*(x1 - x2)/sqrt(2)", "pi^5*x4"], "psi2")


def psi3(pairing: str = "identity") -> SmoothMapSpec:
    """``R^7 -> R^4``, ``e^11 (u1, (v1 - v2)/sqrt 2, v3, u2)``."""
    comps = ["exp(11)*x1", "exp(11)*(x4 - x5)/sqrt(2)", "exp(11)*x6", "exp(11)*x2"]
    return _map(3, pairing, comps, "psi3")


PSI2_SQUARED_BOX = ((1.0, 2.0), (-2.0, -1.0), (-1.0, 1.0), (0.5, 1.5), (-1.0, 1.0))


def psi2_squared(pairing: str = "identity") -> SmoothMapSpec:
    """``z -> z^2`` after ``psi2 / pi^5``; conformal with ``lambda = 2 |z|``."""
    z1, z2 = "((x1 - x2)/sqrt(2))", "x4"
    comps = [f"{z1}^2 - {z2}^2", f"2*{z1}*{z2}"]
    return _map(2, pairing, comps, "psi2_squared", box=PSI2_SQUARED_BOX)


PSI3_INVERSION_BOX = ((1.0, 2.0),) + ((-1.0, 1.0),) * 6


def psi3_inversion(pairing: str = "cross") -> SmoothMapSpec:
    """Inversion ``y -> y / |y|^2`` after ``psi3 / e^11``; ``lambda = 1 / |y|^2``."""
    ys = ["x1", "((x4 - x5)/sqrt(2))", "x6", "x2"]
    r2 = "(" + " + ".join(f"{y}^2" for y in ys) + ")"
    return _map(3, pairing, [f"{y}/{r2}" for y in ys], "psi3_inversion", box=PSI3_INVERSION_BOX)


SLANT_QUADRIC_BOX = ((1.0, 2.0),) + ((-1.0, 1.0),) * 4


def _linear(coeffs) -> str:
    terms = [f"({float(c)!r})*x{j + 1}" for j, c in enumerate(coeffs) if abs(c) > 1e-15]
    return "(" + " + ".join(terms) + ")"


def slant_quadric(theta: float = math.pi / 3, pairing: str = "identity") -> SmoothMapSpec:
    """``w1 * w2`` for complex coordinates of ``J' = cos(theta) phi + sin(theta) K``.

    ``K`` is an orthogonal complex structure on the ``(u, v)`` block anticommuting
    with ``phi``.  The fibres are complex curves for ``J'``, hence slant for ``phi``
    with angle ``arccos |cos theta|``, and they are curved, so T and A do not vanish.
    Holomorphic coordinates are ``w_k = x_k - i (J'^T e_k) . x`` for ``k = 1, 2``.
    """
    source, acs = _source(2, pairing, SLANT_QUADRIC_BOX)
    phi = acs.at(np.zeros(5))[0][:4, :4]
    # K: u1 -> u2 -> -u1, v1 -> -v2 -> -v1
    k_op = np.zeros((4, 4))
    k_op[1, 0], k_op[0, 1], k_op[3, 2], k_op[2, 3] = 1.0, -1.0, -1.0, 1.0
    if np.max(np.abs(phi @ k_op + k_op @ phi)) > 1e-12:
        raise FixtureError(f"K does not anticommute with phi under the {pairing!r} pairing")
    j_op = math.cos(theta) * phi + math.sin(theta) * k_op
    p1, p2 = _linear(np.eye(4)[0]), _linear(np.eye(4)[1])
    q1, q2 = _linear(j_op[0]), _linear(j_op[1])
    comps = [f"{p1}*{p2} - {q1}*{q2}", f"-({p1}*{q2} + {q1}*{p2})"]
    target = ManifoldSpec.euclidean(2, name="R^2")
    return SmoothMapSpec(source, target, tuple(parse(c, 5) for c in comps), acs, "slant_quadric")


def _psi2_squared_dilation(point) -> float:
    z1 = (point[0] - point[1]) / math.sqrt(2.0)
    return 2.0 * math.hypot(z1, point[3])


def _psi3_inversion_dilation(point) -> float:
    y = (point[0], (point[3] - point[4]) / math.sqrt(2.0), point[5], point[1])
    return 1.0 / sum(c * c for c in y)


FIXTURES: dict[str, Fixture] = {
    "psi1": Fixture(
        "psi1", "R^5 -> R^2 rotation pair scaled by e^7", psi1,
        {"alpha": math.pi / 6, "beta": math.pi / 6, "pairing": "identity"},
        claimed_angle=lambda p: math.acos(abs(math.cos(p["alpha"] + p["beta"]))),
        claimed_dilation=lambda p: math.exp(7),
        claim_pairings=("cross",),
        notes=("claimed cos(omega) = |cos(alpha + beta)| needs the cross pairing; "
               "the identity pairing gives omega = pi/2",)),
    "psi2": Fixture(
        "psi2", "R^5 -> R^2 linear map scaled by pi^5", psi2, {"pairing": "identity"},
        claimed_angle=lambda p: math.pi / 4,
        claimed_dilation=lambda p: math.pi ** 5),
    "psi3": Fixture(
        "psi3", "R^7 -> R^4 linear map scaled by e^11", psi3, {"pairing": "identity"},
        claimed_angle=lambda p: math.pi / 4,
        claimed_dilation=lambda p: math.exp(11),
        claim_pairings=("cross",),
        notes=("claimed omega = pi/4 needs the cross pairing sigma = (1 3); "
               "the identity pairing gives omega = pi/2",)),
    "psi2_squared": Fixture(
        "psi2_squared", "psi2 / pi^5 followed by z -> z^2 on a box away from z = 0",
        psi2_squared, {"pairing": "identity"},
        claimed_angle=lambda p: math.pi / 4,
        notes=("dilation 2|z| is not constant: conformal but not homothetic",)),
    "psi3_inversion": Fixture(
        "psi3_inversion", "psi3 / e^11 followed by the inversion y -> y/|y|^2",
        psi3_inversion, {"pairing": "cross"},
        claimed_angle=lambda p: math.pi / 4 if p["pairing"] == "cross" else math.pi / 2,
        notes=("dilation 1/|y|^2 is not constant and mu is 2-dimensional",)),
    "slant_quadric": Fixture(
        "slant_quadric", "product of two holomorphic coordinates of a rotated complex "
        "structure; curved fibres", slant_quadric, {"theta": math.pi / 3, "pairing": "identity"},
        claimed_angle=lambda p: math.acos(abs(math.cos(p["theta"]))),
        claim_pairings=("identity",),
        notes=("fibres and horizontal leaves are not totally geodesic",)),
}

# closed-form dilation at a point, for fixtures where it is not constant
DILATION_ORACLES = {"psi2_squared": _psi2_squared_dilation,
                    "psi3_inversion": _psi3_inversion_dilation}

# (fixture, overrides) covering every shipped fixture and both pairings of the examples
SUITE_CASES = (
    ("psi1", {"pairing": "identity"}),
    ("psi1", {"pairing": "cross"}),
    ("psi2", {}),
    ("psi3", {"pairing": "identity"}),
    ("psi3", {"pairing": "cross"}),
    ("psi2_squared", {}),
    ("psi3_inversion", {}),
    ("slant_quadric", {}),
)


def get(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise FixtureError(f"unknown fixture {name!r}; available: {', '.join(sorted(FIXTURES))}") \
            from None


def make(name: str, params: Optional[dict] = None) -> SmoothMapSpec:
    return get(name).make(params)


def pairing_study(name: str, params: Optional[dict] = None, samples: int = 4,
                  tol_angle: float = 1e-6) -> dict[str, dict]:
    """Slant angle of a fixture under every pairing, next to its claimed value."""
    fx = get(name)
    out = {}
    for pairing in sorted(PAIRINGS[make(name, params).source.dimension // 2]):
        p = fx.params({**(params or {}), "pairing": pairing})
        try:
            m = fx.build(**p)
        except FixtureError as exc:
            out[pairing] = {"angle": None, "classification": "unavailable",
                            "claimed": None, "matches_claim": False, "reason": exc.args[0]}
            continue
        report = slant_angle(m, samples=samples, tol_angle=tol_angle)
        claimed = fx.claimed_angle(p) if fx.claimed_angle else None
        out[pairing] = {
            "angle": report.mean,
            "classification": report.classification,
            "claimed": claimed,
            "matches_claim": claimed is not None and abs(report.mean - claimed) < tol_angle,
        }
    return out
