"""Shared manifolds, maps, cached analyses and random expressions for the tests."""

from __future__ import annotations

import functools

import numpy as np

from slantgeo import fixtures as fx
from slantgeo.expr import DomainError, evaluate, eval_dual, parse
from slantgeo.geometry import ManifoldSpec, builtin
from slantgeo.map_analysis import SmoothMapSpec
from slantgeo.theorems import Analysis

ACCEPTANCE_SAMPLES = 20


def map_from(metric, components, box, target_dim=None, name="test"):
    """A map without almost contact structure (O'Neill and tension tests only)."""
    n = len(metric)
    source = ManifoldSpec.from_strings(metric, box, name)
    target = ManifoldSpec.euclidean(target_dim or len(components))
    return SmoothMapSpec(source, target, tuple(parse(c, n) for c in components), None, name)


def heisenberg():
    """Projection of the Heisenberg group onto its first two coordinates: A != 0, T = 0."""
    metric = [["1", "0", "0"], ["0", "1 + x1^2", "-x1"], ["0", "-x1", "1"]]
    return map_from(metric, ["x1", "x2"], [(-1, 1)] * 3, name="heisenberg")


def warped():
    """``diag(e^{2 x3}, e^{2 x3}, 1) -> R^2``: conformal, lambda = e^{-x3}, T = 0."""
    metric = [["exp(2*x3)", "0", "0"], ["0", "exp(2*x3)", "0"], ["0", "0", "1"]]
    return map_from(metric, ["x1", "x2"], [(-1, 1)] * 3, name="warped")


def radial():
    """``|x| on R^2 \\ 0``: Riemannian submersion with curved fibres, tau = 1/r."""
    eye = [["1", "0"], ["0", "1"]]
    return map_from(eye, ["sqrt(x1^2 + x2^2)"], [(0.5, 1.5), (0.5, 1.5)], name="radial")


def cosym_map(components, structure="cosym_r5", box=None, name="inline"):
    source, acs = builtin(structure, box)
    target = ManifoldSpec.euclidean(len(components))
    return SmoothMapSpec(source, target, tuple(parse(c, source.dimension) for c in components),
                         acs, name)


def case_id(case) -> str:
    name, params = case
    return name + "".join(f"-{v}" for v in params.values())


@functools.lru_cache(maxsize=None)
def analysis(name: str, params: tuple = (), samples: int = ACCEPTANCE_SAMPLES) -> Analysis:
    return Analysis(fx.make(name, dict(params)), samples=samples)


def analysis_for(case, samples: int = ACCEPTANCE_SAMPLES) -> Analysis:
    name, params = case
    return analysis(name, tuple(sorted(params.items())), samples)


# ----------------------------------------------------------------------------- random expressions

_UNARY = ("sin", "cos", "exp", "ln", "sqrt")


def random_expr(rng: np.random.Generator, dim: int, depth: int = 3) -> str:
    """Random well-typed source text; ``ln`` and ``sqrt`` get positive arguments."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return f"x{rng.integers(1, dim + 1)}"
        return f"{rng.uniform(-3, 3):.3f}"
    kind = rng.integers(0, 5)
    if kind == 0:
        op = rng.choice(["+", "-", "*"])
        return f"({random_expr(rng, dim, depth - 1)} {op} {random_expr(rng, dim, depth - 1)})"
    if kind == 1:
        return f"({random_expr(rng, dim, depth - 1)}) / (2 + ({random_expr(rng, dim, depth - 1)})^2)"
    if kind == 2:
        f = _UNARY[rng.integers(0, len(_UNARY))]
        inner = random_expr(rng, dim, depth - 1)
        if f in ("ln", "sqrt"):
            inner = f"1 + ({inner})^2"
        elif f == "exp":
            inner = f"sin({inner})"
        return f"{f}({inner})"
    if kind == 3:
        return f"({random_expr(rng, dim, depth - 1)})^{rng.integers(2, 4)}"
    return f"-{random_expr(rng, dim, depth - 1)}"


def central_gradient(f, p: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central differences."""
    out = np.empty_like(p)
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = h
        out[i] = (-f(p + 2 * e) + 8 * f(p + e) - 8 * f(p - e) + f(p - 2 * e)) / (12 * h)
    return out


def fd_agreement(rng: np.random.Generator, count: int = 1000, dim: int = 3) -> tuple[float, int]:
    """Worst relative gap between dual-number and central-difference gradients.

    Returns ``(worst, skipped)``.  Points where two FD step sizes disagree by more than
    1e-8 relative are skipped as ill-conditioned, as are points outside the domain.
    """
    checked = skipped = 0
    worst = 0.0
    while checked < count:
        e = parse(random_expr(rng, dim, depth=4), dim)
        p = rng.uniform(-1.5, 1.5, dim)
        try:
            ad = eval_dual(e, p).derivatives
            fd = central_gradient(lambda q: evaluate(e, q), p, 1e-3)
            fd_half = central_gradient(lambda q: evaluate(e, q), p, 5e-4)
        except DomainError:
            skipped += 1
            continue
        scale = max(1.0, float(np.max(np.abs(ad))))
        if np.max(np.abs(fd - fd_half)) > 1e-8 * scale:
            skipped += 1
            continue
        worst = max(worst, float(np.max(np.abs(ad - fd_half))) / scale)
        checked += 1
    return worst, skipped
