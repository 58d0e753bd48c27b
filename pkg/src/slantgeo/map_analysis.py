"""Pointwise analysis of a smooth map from an almost contact metric manifold.

At a point ``p`` the tangent space splits into ``ker psi_*`` (vertical) and its
g-orthogonal complement (horizontal).  ``phi`` of a vertical vector splits into
a vertical part ``D`` and a horizontal part ``E``; ``phi`` of a horizontal vector
into ``d`` (vertical) and ``e`` (horizontal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.stats import qmc

from .expr import DomainError, ExprArray, to_text, variables
from .geometry import (DEFAULT_SEED, AlmostContactStructure, GeometryError, ManifoldSpec,
                       sample_points)
from .linalg import gram_schmidt, horizontal_projector, inner, kernel_projector, norm

TOL_RANK = 1e-8
FD_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class SmoothMapSpec:
    """A map ``source -> target`` given by one expression per target coordinate."""

    source: ManifoldSpec
    target: ManifoldSpec
    components: tuple
    structure: Optional[AlmostContactStructure] = None
    name: str = ""

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.target.dimension:
            raise GeometryError(f"map has {len(comps)} components but the target has "
                                f"dimension {self.target.dimension}")
        for k, c in enumerate(comps):
            bad = [i for i in variables(c) if i >= self.source.dimension]
            if bad:
                raise GeometryError(f"component {k + 1} uses x{bad[0] + 1} but the source "
                                    f"has dimension {self.source.dimension}")
        if self.structure is not None and self.structure.dimension != self.source.dimension:
            raise GeometryError("structure dimension does not match the source")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_array", ExprArray(list(comps), self.source.dimension))

    def value(self, p) -> np.ndarray:
        return self._array.evaluate(p)

    def to_json(self) -> dict:
        return {"components": [to_text(c) for c in self.components]}


def pushforward(m: SmoothMapSpec, p) -> np.ndarray:
    """Jacobian of the map at ``p`` (target-dim x source-dim), exact."""
    _, grads = m._array.eval_dual(p)
    return grads


def square_dilation(m: SmoothMapSpec, p, jac=None, g=None) -> float:
    """``Lambda(p) = tr(g_B J g^-1 J^T) / rank``: the mean of ``|psi_* X|^2`` over an
    orthonormal horizontal frame."""
    jac = pushforward(m, p) if jac is None else jac
    g = m.source.metric_at(p) if g is None else g
    g_b = m.target.metric_at(m.value(p))
    s = np.linalg.matrix_rank(jac)
    if s == 0:
        return 0.0
    return float(np.trace(g_b @ jac @ np.linalg.solve(g, jac.T)) / s)


def grad_ln_dilation(m: SmoothMapSpec, p, step: float = FD_STEP) -> np.ndarray:
    """Gradient of ``ln lambda = (1/2) ln Lambda`` by central differences."""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    dl = np.empty(n)
    for k in range(n):
        dp = np.zeros(n)
        dp[k] = step
        dl[k] = (math.log(square_dilation(m, p + dp)) - math.log(square_dilation(m, p - dp))) \
            / (4.0 * step)
    return np.linalg.solve(m.source.metric_at(p), dl)


# --------------------------------------------------------------------------- frames

@dataclass(eq=False)
class FrameDecomposition:
    """Orthonormal frames at a point; bases are stored as columns."""

    point: np.ndarray
    metric: np.ndarray
    jacobian: np.ndarray
    singular_values: np.ndarray
    rank: int
    status: str  # regular | critical | degenerate
    vertical: np.ndarray
    horizontal: np.ndarray
    xi_vertical: bool = False
    xi_residual: float = 0.0
    e_kernel: Optional[np.ndarray] = None
    mu: Optional[np.ndarray] = None
    phi: Optional[np.ndarray] = None
    xi: Optional[np.ndarray] = None
    eta: Optional[np.ndarray] = None

    @property
    def full(self) -> np.ndarray:
        return np.hstack([self.vertical, self.horizontal])

    @property
    def p_vertical(self) -> np.ndarray:
        return self.vertical @ self.vertical.T @ self.metric

    @property
    def p_horizontal(self) -> np.ndarray:
        return self.horizontal @ self.horizontal.T @ self.metric

    @property
    def slant_directions_basis(self) -> np.ndarray:
        """Orthonormal basis of the vertical space orthogonal to ``xi``."""
        return self.vertical[:, 1:] if self.xi_vertical else self.vertical

    def distance_to_vertical(self, v) -> float:
        """g-distance from the unit vector along ``v`` to the vertical span."""
        v = np.asarray(v, dtype=float)
        v = v / norm(self.metric, v)
        return norm(self.metric, v - self.p_vertical @ v)


def frame_at(m: SmoothMapSpec, p, tol_rank: float = TOL_RANK) -> FrameDecomposition:
    """Split ``T_p N`` into vertical and horizontal orthonormal frames.

    The vertical frame starts with ``xi/|xi|`` whenever the Reeb field is vertical.
    Rank deficiency is reported through ``status``, never raised.
    """
    p = np.asarray(p, dtype=float)
    n = m.source.dimension
    g = m.source.metric_at(p)
    jac = pushforward(m, p)
    _, sv, vh = np.linalg.svd(jac)
    top = float(sv[0]) if sv.size else 0.0
    rank = int(np.sum(sv > tol_rank * top)) if top > 0 else 0
    status = "regular" if rank == m.target.dimension else ("critical" if rank == 0 else "degenerate")
    kernel = vh[rank:].T
    p_v = kernel_projector(g, kernel)
    p_h = np.eye(n) - p_v

    phi = xi = eta = None
    seeds = []
    xi_vertical, xi_res = False, 0.0
    if m.structure is not None:
        phi, xi, eta = m.structure.at(p)
        xi_norm = norm(g, xi)
        xi_res = norm(g, p_h @ xi) / xi_norm
        if xi_res < 1e-10:
            xi_vertical = True
            seeds = [xi / xi_norm]
    vertical = gram_schmidt(p_v, g, seeds=seeds)
    horizontal = gram_schmidt(p_h, g)
    frame = FrameDecomposition(p, g, jac, sv, rank, status, vertical, horizontal,
                               xi_vertical, xi_res, phi=phi, xi=xi, eta=eta)
    if phi is not None:
        e_images = frame.p_horizontal @ phi @ vertical
        frame.e_kernel = gram_schmidt(e_images, g, tol=1e-8)
        frame.mu = gram_schmidt(p_h, g, seeds=list(frame.e_kernel.T), include_seeds=False)
    return frame


# --------------------------------------------------------------------------- conformality

@dataclass
class ConformalityReport:
    square_dilation: list[float]
    dilation: list[float]
    deviation: list[float]
    grad_vertical: list[float]
    grad_horizontal: list[float]
    is_conformal: bool
    is_homothetic: bool
    points: int
    tol: float
    tol_homothety: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviation, default=0.0)

    def to_dict(self) -> dict:
        return {
            "points": self.points,
            "is_conformal": self.is_conformal,
            "is_homothetic": self.is_homothetic,
            "max_relative_deviation": self.max_deviation,
            "max_grad_ln_lambda_horizontal": max(self.grad_horizontal, default=0.0),
            "max_grad_ln_lambda_vertical": max(self.grad_vertical, default=0.0),
            "dilation": self.dilation,
            "square_dilation": self.square_dilation,
        }


def conformality(m: SmoothMapSpec, samples=20, tol: float = 1e-8, tol_homothety: float = 1e-5,
                 seed: int = DEFAULT_SEED, points=None, frames=None) -> ConformalityReport:
    """Estimate ``Lambda`` and test horizontal conformality and homothety.

    Deviation is ``max |g_B(psi_* X_a, psi_* X_b) - Lambda delta_ab| / Lambda`` over the
    horizontal frame.  The dilation gradient comes from central differences of
    ``(1/2) ln Lambda`` and is split by the frame.
    """
    if points is None:
        points = sample_points(m.source.domain_box, samples, seed)
    frames = frames if frames is not None else [frame_at(m, p) for p in points]
    lam2, lam, dev, gv, gh = [], [], [], [], []
    conformal = True
    for p, fr in zip(points, frames):
        if fr.status != "regular":
            conformal = False
            continue
        g_b = m.target.metric_at(m.value(p))
        images = fr.jacobian @ fr.horizontal
        gram = images.T @ g_b @ images
        big = float(np.mean(np.diag(gram)))
        deviation = float(np.max(np.abs(gram - big * np.eye(gram.shape[0])))) / big
        grad = grad_ln_dilation(m, p)
        lam2.append(big)
        lam.append(math.sqrt(big))
        dev.append(deviation)
        gv.append(norm(fr.metric, fr.p_vertical @ grad))
        gh.append(norm(fr.metric, fr.p_horizontal @ grad))
        if deviation > tol:
            conformal = False
    homothetic = conformal and all(x < tol_homothety for x in gh)
    return ConformalityReport(lam2, lam, dev, gv, gh, conformal, homothetic, len(points), tol,
                              tol_homothety)


# --------------------------------------------------------------------------- D, E, d, e

@dataclass
class SlantDecomposition:
    """Blocks of ``phi`` in the frame ``[vertical | horizontal]``.

    ``D``: vertical -> vertical, ``E``: vertical -> horizontal,
    ``d``: horizontal -> vertical, ``e``: horizontal -> horizontal.
    """

    D: np.ndarray
    E: np.ndarray
    d: np.ndarray
    e: np.ndarray
    phi: np.ndarray
    eta: np.ndarray  # eta of each frame vector
    residual: float  # reconstruction error of phi from the blocks

    @property
    def k(self) -> int:
        return self.D.shape[0]


def slant_decomposition(m: SmoothMapSpec, frame: FrameDecomposition) -> SlantDecomposition:
    if frame.phi is None:
        raise GeometryError("the source carries no almost contact structure")
    basis = frame.full
    g = frame.metric
    k = frame.vertical.shape[1]
    phi_frame = basis.T @ g @ frame.phi @ basis
    D, d = phi_frame[:k, :k], phi_frame[:k, k:]
    E, e = phi_frame[k:, :k], phi_frame[k:, k:]
    recon = basis @ phi_frame - frame.phi @ basis
    return SlantDecomposition(D, E, d, e, phi_frame, frame.eta @ basis,
                              float(np.max(np.abs(recon))) if recon.size else 0.0)


def lemma_residuals(sd: SlantDecomposition) -> dict[str, float]:
    """``Dd + de = 0``, ``Ed + e^2 = -I``, ``D^2 + dE = phi^2|_V``, ``ED + eE = 0``."""
    k = sd.k
    s = sd.e.shape[0]
    phi2_vv = -np.eye(k) + np.outer(sd.eta[:k], sd.eta[:k])

    def mx(a):
        return float(np.max(np.abs(a))) if a.size else 0.0

    return {
        "Dd+de": mx(sd.D @ sd.d + sd.d @ sd.e),
        "Ed+e2": mx(sd.E @ sd.d + sd.e @ sd.e + np.eye(s)),
        "D2+dE": mx(sd.D @ sd.D + sd.d @ sd.E - phi2_vv),
        "ED+eE": mx(sd.E @ sd.D + sd.e @ sd.E),
    }


def d_squared_residual(sd: SlantDecomposition, omega: float) -> float:
    """Entrywise ``|D^2 + cos^2(omega) (I - eta (x) xi)|`` on the vertical frame."""
    k = sd.k
    target = -math.cos(omega) ** 2 * (np.eye(k) - np.outer(sd.eta[:k], sd.eta[:k]))
    return float(np.max(np.abs(sd.D @ sd.D - target))) if k else 0.0


def gram_residuals(sd: SlantDecomposition, omega: float) -> tuple[float, float]:
    """``g(DV, DW) = cos^2 (g(V,W) - eta eta)`` and the ``sin^2`` analogue for ``E``."""
    k = sd.k
    if k == 0:
        return 0.0, 0.0
    base = np.eye(k) - np.outer(sd.eta[:k], sd.eta[:k])
    r_d = np.max(np.abs(sd.D.T @ sd.D - math.cos(omega) ** 2 * base))
    r_e = np.max(np.abs(sd.E.T @ sd.E - math.sin(omega) ** 2 * base))
    return float(r_d), float(r_e)


# --------------------------------------------------------------------------- slant angle

def sphere_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic unit vectors in ``R^dim`` (rows), spread over the sphere.

    Evenly spaced angles on the half circle for ``dim == 2``, the Fibonacci lattice
    for ``dim == 3`` and an unscrambled Halton sequence pushed through the normal
    quantile for higher dimensions.
    """
    if dim == 0:
        return np.zeros((0, 0))
    if dim == 1:
        return np.ones((1, 1))
    if dim == 2:
        t = np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(1.0 - z * z)
        a = np.pi * (3.0 - math.sqrt(5.0)) * i
        return np.column_stack([r * np.cos(a), r * np.sin(a), z])
    from scipy.stats import norm as normal
    u = qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]
    x = normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def angle_of(frame: FrameDecomposition, v) -> float:
    """Angle between ``phi V`` and the vertical space: ``arccos(|DV| / |phi V|)``."""
    phv = frame.phi @ np.asarray(v, dtype=float)
    size = norm(frame.metric, phv)
    if size < 1e-14:
        raise GeometryError("phi V vanishes; the angle is undefined")
    ratio = norm(frame.metric, frame.p_vertical @ phv) / size
    return math.acos(min(1.0, ratio))


@dataclass
class SlantReport:
    angles: list[float]
    mean: float
    spread: float
    classification: str  # invariant | proper slant | anti-invariant | not slant | undefined
    points: int
    directions: int
    tol_angle: float
    degenerate: int = 0

    @property
    def is_slant(self) -> bool:
        return self.classification in ("invariant", "proper slant", "anti-invariant")

    def to_dict(self) -> dict:
        return {"mean": self.mean, "cos_mean": math.cos(self.mean), "spread": self.spread,
                "classification": self.classification, "points": self.points,
                "directions": self.directions, "samples": len(self.angles),
                "degenerate": self.degenerate}


def classify(mean: float, spread: float, tol_angle: float) -> str:
    if spread >= tol_angle:
        return "not slant"
    if mean < tol_angle:
        return "invariant"
    if abs(mean - math.pi / 2) < tol_angle:
        return "anti-invariant"
    return "proper slant"


def slant_angle(m: SmoothMapSpec, samples=20, tol_angle: float = 1e-6, seed: int = DEFAULT_SEED,
                directions: int = 16, points=None, frames=None) -> SlantReport:
    """Sample ``omega(V)`` over unit vertical vectors orthogonal to ``xi``."""
    if points is None:
        points = sample_points(m.source.domain_box, samples, seed)
    frames = frames if frames is not None else [frame_at(m, p) for p in points]
    angles = []
    degenerate = 0
    n_dir = 0
    for fr in frames:
        if fr.status != "regular":
            continue
        w = fr.slant_directions_basis
        dirs = sphere_directions(w.shape[1], directions)
        n_dir = len(dirs)
        for c in dirs:
            try:
                angles.append(angle_of(fr, w @ c))
            except GeometryError:
                degenerate += 1
    if not angles:
        return SlantReport([], float("nan"), float("nan"), "undefined", len(frames), n_dir,
                           tol_angle, degenerate)
    a = np.array(angles)
    mean = float(np.mean(a))
    spread = float(np.max(np.abs(a - mean)))
    label = classify(mean, spread, tol_angle) if not degenerate else "not slant"
    return SlantReport(angles, mean, spread, label, len(frames), n_dir, tol_angle, degenerate)


def bruteforce_angle(m: SmoothMapSpec, p, v, grid: int = 721, rounds: int = 6) -> float:
    """Independent estimate of ``omega(V)`` by direct search over unit vertical vectors.

    The kernel comes from ``scipy.linalg.null_space`` orthonormalised by a symmetric
    inverse square root (no Gram-Schmidt, no projector).  ``cos omega`` is the maximum
    of ``g(phi V, W) / |phi V|`` over unit vertical ``W``, found by sweeping a grid of
    ``grid`` directions over each 2-plane spanned by the current best ``W`` and one
    kernel basis vector, repeated ``rounds`` times.
    """
    p = np.asarray(p, dtype=float)
    g = m.source.metric_at(p)
    kern = scipy.linalg.null_space(pushforward(m, p), rcond=TOL_RANK)
    w_gram = kern.T @ g @ kern
    evals, evecs = np.linalg.eigh(w_gram)
    basis = kern @ evecs @ np.diag(evals ** -0.5) @ evecs.T
    phi, _, _ = m.structure.at(p)
    phv = phi @ np.asarray(v, dtype=float)
    size = norm(g, phv)
    # coordinates of the linear functional W -> g(phi V, W) in the orthonormal kernel basis
    coeff = basis.T @ g @ phv / size
    theta = np.linspace(0.0, 2.0 * np.pi, grid)
    best = np.zeros(len(coeff))
    best[0] = 1.0
    best_val = float(coeff @ best)
    for _ in range(rounds):
        for j in range(len(coeff)):
            other = np.zeros(len(coeff))
            other[j] = 1.0
            other = other - (other @ best) * best
            if np.linalg.norm(other) < 1e-12:
                continue
            other /= np.linalg.norm(other)
            cands = np.outer(np.cos(theta), best) + np.outer(np.sin(theta), other)
            vals = cands @ coeff
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best_val, best = float(vals[i]), cands[i] / np.linalg.norm(cands[i])
    return math.acos(min(1.0, max(0.0, best_val)))
