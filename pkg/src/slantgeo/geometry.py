"""Charted Riemannian manifolds with an optional almost contact metric structure.

Tensors are stored as arrays of expressions in one chart.  The (1,1)-tensor
``phi`` acts on column vectors: ``phi(d/dx_j) = sum_i phi[i][j] d/dx_i``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .expr import Expr, ExprArray, parse, variables, to_text
from .verdict import CheckVerdict, direct

DEFAULT_SEED = 0x5EED


class GeometryError(ValueError):
    """Invalid manifold data or a degenerate metric at a point."""


def _check_vars(exprs, dimension: int, what: str) -> None:
    for e in exprs:
        bad = [i for i in variables(e) if i >= dimension]
        if bad:
            raise GeometryError(f"{what}: variable x{bad[0] + 1} exceeds dimension {dimension}")


def _parse_all(rows, dimension: int):
    return [[parse(str(s), dimension) for s in row] for row in rows]


@dataclass(frozen=True, eq=False)
class ManifoldSpec:
    """One coordinate chart: dimension, metric components and a sampling box."""

    dimension: int
    metric: tuple
    domain_box: tuple
    name: str = ""

    def __post_init__(self):
        n = self.dimension
        if n < 1:
            raise GeometryError("dimension must be positive")
        metric = tuple(tuple(row) for row in self.metric)
        if len(metric) != n or any(len(row) != n for row in metric):
            raise GeometryError(f"metric must be {n}x{n}")
        for i in range(n):
            for j in range(i):
                if metric[i][j] != metric[j][i]:
                    raise GeometryError(f"metric not symmetric at ({i + 1},{j + 1})")
        _check_vars([e for row in metric for e in row], n, "metric")
        box = tuple((float(lo), float(hi)) for lo, hi in self.domain_box)
        if len(box) != n or any(lo > hi for lo, hi in box):
            raise GeometryError(f"domain_box must hold {n} intervals lo <= hi")
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "domain_box", box)

    @classmethod
    def from_strings(cls, metric: Sequence[Sequence[str]], domain_box, name: str = ""):
        n = len(metric)
        return cls(n, _parse_all(metric, n), domain_box, name)

    @classmethod
    def euclidean(cls, n: int, box=None, name: str = ""):
        rows = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
        return cls.from_strings(rows, box or [(-1.0, 1.0)] * n, name)

    @functools.cached_property
    def _metric_array(self) -> ExprArray:
        return ExprArray(self.metric, self.dimension)

    def metric_at(self, p) -> np.ndarray:
        return self._metric_array.evaluate(p)

    def metric_derivatives_at(self, p) -> tuple[np.ndarray, np.ndarray]:
        """``g_ij`` and ``dg[l, i, j] = d_l g_ij`` (exact, via dual numbers)."""
        g, grads = self._metric_array.eval_dual(p)
        return g, np.moveaxis(grads, -1, 0)

    def contains(self, p) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(p, self.domain_box))

    def to_json(self) -> dict:
        return {"dimension": self.dimension,
                "metric": [[to_text(e) for e in row] for row in self.metric],
                "domain_box": [list(b) for b in self.domain_box]}


@dataclass(frozen=True, eq=False)
class AlmostContactStructure:
    """``(phi, xi, eta)`` given componentwise; ``phi`` acts on column vectors."""

    phi: tuple
    xi: tuple
    eta: tuple
    dimension: int

    def __post_init__(self):
        n = self.dimension
        phi = tuple(tuple(r) for r in self.phi)
        if len(phi) != n or any(len(r) != n for r in phi):
            raise GeometryError(f"phi must be {n}x{n}")
        if len(self.xi) != n or len(self.eta) != n:
            raise GeometryError(f"xi and eta must have {n} components")
        _check_vars([e for r in phi for e in r] + list(self.xi) + list(self.eta), n,
                    "almost contact structure")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "xi", tuple(self.xi))
        object.__setattr__(self, "eta", tuple(self.eta))

    @classmethod
    def from_strings(cls, phi, xi, eta):
        n = len(phi)
        return cls(_parse_all(phi, n), [parse(str(s), n) for s in xi],
                   [parse(str(s), n) for s in eta], n)

    @functools.cached_property
    def arrays(self) -> tuple[ExprArray, ExprArray, ExprArray]:
        n = self.dimension
        return ExprArray(self.phi, n), ExprArray(self.xi, n), ExprArray(self.eta, n)

    def at(self, p) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        phi, xi, eta = self.arrays
        return phi.evaluate(p), xi.evaluate(p), eta.evaluate(p)

    def to_json(self) -> dict:
        return {"phi": [[to_text(e) for e in r] for r in self.phi],
                "xi": [to_text(e) for e in self.xi],
                "eta": [to_text(e) for e in self.eta]}


def sample_points(box, samples: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``samples`` points drawn uniformly from ``box`` with a reproducible generator."""
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    rng = np.random.default_rng(seed)
    return lo + (hi - lo) * rng.random((samples, len(box)))


# --------------------------------------------------------------------------- connection

def _inverse(g: np.ndarray) -> np.ndarray:
    if np.linalg.cond(g) > 1e12:
        raise GeometryError("metric is not invertible at this point")
    return np.linalg.inv(g)


def christoffel_from(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """``Gamma[k, i, j]`` from the metric and ``dg[l, i, j] = d_l g_ij``."""
    ginv = _inverse(g)
    # lowered symbols: d_i g_jl + d_j g_il - d_l g_ij, indexed [l, i, j]
    low = np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    return 0.5 * np.einsum("kl,lij->kij", ginv, low)


def christoffel_at(m: ManifoldSpec, p) -> np.ndarray:
    g, dg = m.metric_derivatives_at(p)
    return christoffel_from(g, dg)


def metric_compatibility_residual(m: ManifoldSpec, p) -> float:
    """Largest component of ``(nabla g)_{i; jk}``; zero for the Levi-Civita connection."""
    g, dg = m.metric_derivatives_at(p)
    gamma = christoffel_from(g, dg)
    res = dg - np.einsum("lij,lk->ijk", gamma, g) - np.einsum("lik,jl->ijk", gamma, g)
    return float(np.max(np.abs(res)))


def _field_values(fld, n: int, p):
    arr = fld if isinstance(fld, ExprArray) else ExprArray(list(fld), n)
    return arr.eval_dual(p)


def covariant_derivative(m: ManifoldSpec, fld, direction, p) -> np.ndarray:
    """``nabla_X Y`` for a vector field ``Y`` given by expressions and a vector ``X`` at ``p``."""
    x = np.asarray(direction, dtype=float)
    y, dy = _field_values(fld, m.dimension, p)
    gamma = christoffel_at(m, p)
    return dy @ x + np.einsum("kij,i,j->k", gamma, x, y)


def covariant_derivative_tensor(m: ManifoldSpec, tensor, direction, p) -> np.ndarray:
    """``(nabla_X T)`` for a (1,1)-tensor field given as an ``n x n`` expression array."""
    x = np.asarray(direction, dtype=float)
    arr = tensor if isinstance(tensor, ExprArray) else ExprArray(tensor, m.dimension)
    t, dt = arr.eval_dual(p)
    gamma = christoffel_at(m, p)
    return (dt @ x + np.einsum("kil,i,lj->kj", gamma, x, t)
            - np.einsum("lij,i,kl->kj", gamma, x, t))


# --------------------------------------------------------------------------- structure checks

def structure_residuals(m: ManifoldSpec, acs: AlmostContactStructure, p) -> dict[str, float]:
    """Algebraic identities of an almost contact metric structure at ``p``."""
    n = m.dimension
    g = m.metric_at(p)
    phi, xi, eta = acs.at(p)
    eye = np.eye(n)
    return {
        "phi2": float(np.max(np.abs(phi @ phi - (-eye + np.outer(xi, eta))))),
        "phi_xi": float(np.max(np.abs(phi @ xi))),
        "eta_phi": float(np.max(np.abs(eta @ phi))),
        "eta_xi": abs(float(eta @ xi) - 1.0),
        # g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y) over the coordinate frame
        "compatibility": float(np.max(np.abs(phi.T @ g @ phi - (g - np.outer(eta, eta))))),
        "eta_is_dual": float(np.max(np.abs(g @ xi - eta))),
    }


def parallel_residuals(m: ManifoldSpec, acs: AlmostContactStructure, p) -> dict[str, float]:
    """Largest components of ``nabla phi`` and ``nabla xi`` over the coordinate frame."""
    phi_arr, xi_arr, _ = acs.arrays
    n = m.dimension
    r_phi = r_xi = 0.0
    for i in range(n):
        e = np.eye(n)[i]
        r_phi = max(r_phi, float(np.max(np.abs(covariant_derivative_tensor(m, phi_arr, e, p)))))
        r_xi = max(r_xi, float(np.max(np.abs(covariant_derivative(m, xi_arr, e, p)))))
    return {"nabla_phi": r_phi, "nabla_xi": r_xi}


def check_metric(m: ManifoldSpec, points) -> float:
    """Smallest metric eigenvalue over ``points``; raises if not positive definite."""
    smallest = np.inf
    for p in points:
        lam = float(np.min(np.linalg.eigvalsh(m.metric_at(p))))
        if lam <= 1e-10:
            raise GeometryError(f"metric not positive definite at {list(p)}")
        smallest = min(smallest, lam)
    return smallest


def check_cosymplectic(m: ManifoldSpec, acs: AlmostContactStructure, samples: int = 20,
                       tol: float = 1e-8, seed: int = DEFAULT_SEED, points=None) -> CheckVerdict:
    """Verify the almost contact identities and ``nabla phi = 0``, ``nabla xi = 0``.

    ``lhs_residual`` is the worst algebraic residual, ``rhs_residual`` the worst
    parallelism residual.
    """
    if points is None:
        points = sample_points(m.domain_box, samples, seed)
    check_metric(m, points)
    alg = par = 0.0
    worst = {}
    for p in points:
        for key, val in {**structure_residuals(m, acs, p), **parallel_residuals(m, acs, p)}.items():
            worst[key] = max(worst.get(key, 0.0), val)
    alg = max(v for k, v in worst.items() if not k.startswith("nabla"))
    par = max(worst["nabla_phi"], worst["nabla_xi"])
    notes = [f"{k}={v:.3e}" for k, v in sorted(worst.items())]
    return direct("cosym-structure", len(points), alg, tol, other=par, notes=notes)


# --------------------------------------------------------------------------- built-ins

def builtin_cosymplectic(n_pairs: int, permutation: Optional[Sequence[int]] = None,
                         signs: Optional[Sequence[int]] = None, box=None, name: str = ""):
    """Flat ``R^(2n+1)`` with coordinates ``(u_1..u_n, v_1..v_n, t)``, ``eta = dt``.

    ``phi(d/du_i) = -s_i d/dv_sigma(i)`` and ``phi(d/dv_sigma(i)) = s_i d/du_i`` where
    ``sigma`` is the 1-based ``permutation`` and ``s`` the ``signs``.  The identity
    pairing with unit signs gives the standard block matrix ``[[0, I, 0], [-I, 0, 0], [0, 0, 0]]``.
    """
    if n_pairs < 1:
        raise GeometryError("n_pairs must be at least 1")
    perm = list(permutation) if permutation is not None else list(range(1, n_pairs + 1))
    sgn = list(signs) if signs is not None else [1] * n_pairs
    if sorted(perm) != list(range(1, n_pairs + 1)):
        raise GeometryError(f"pairing {perm} is not a bijection on 1..{n_pairs}")
    if len(sgn) != n_pairs or any(s not in (1, -1) for s in sgn):
        raise GeometryError("signs must be +1 or -1, one per pair")
    n = 2 * n_pairs + 1
    phi = [["0"] * n for _ in range(n)]
    for i, (sigma, s) in enumerate(zip(perm, sgn)):
        u, v = i, n_pairs + sigma - 1
        phi[v][u] = "-1" if s > 0 else "1"
        phi[u][v] = "1" if s > 0 else "-1"
    xi = ["0"] * (n - 1) + ["1"]
    manifold = ManifoldSpec.euclidean(n, box, name or f"R^{n}")
    return manifold, AlmostContactStructure.from_strings(phi, xi, xi)


BUILTIN_STRUCTURES = {
    "cosym_r5": dict(n_pairs=2),
    "cosym_r7": dict(n_pairs=3),
    "cosym_r5_swap": dict(n_pairs=2, permutation=(2, 1)),
}


def builtin(name: str, box=None):
    try:
        kwargs = BUILTIN_STRUCTURES[name]
    except KeyError:
        raise GeometryError(f"unknown built-in structure {name!r}") from None
    return builtin_cosymplectic(box=box, name=name, **kwargs)
