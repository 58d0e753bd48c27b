"""O'Neill tensors, the second fundamental form of a map and its tension field.

Everything here is evaluated at a single point ``p`` from vector fields defined on a
small neighbourhood.  The frame at ``p`` is extended by projecting it onto the
vertical and horizontal spaces at nearby points and re-orthonormalising in a fixed
order; derivatives of fields are central differences with step ``1e-5``.  The
tensors T, A and the second fundamental form do not depend on the extension, and
``twist`` exists so that this can be tested.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import GeometryError, christoffel_at
from .linalg import gram_schmidt, horizontal_projector, inner, norm
from .map_analysis import (FD_STEP, FrameDecomposition, SmoothMapSpec, frame_at,
                           grad_ln_dilation, pushforward, square_dilation)


@dataclass(eq=False)
class PointState:
    """Everything a field may need at a point of the neighbourhood."""

    point: np.ndarray
    metric: np.ndarray
    jacobian: np.ndarray
    p_vertical: np.ndarray
    p_horizontal: np.ndarray
    frame: np.ndarray  # columns: vertical frame, then horizontal frame
    phi: Optional[np.ndarray] = None


Field = Callable[[PointState], np.ndarray]


def _rotate(cols: np.ndarray, i: int, j: int, theta: float) -> np.ndarray:
    out = cols.copy()
    c, s = np.cos(theta), np.sin(theta)
    out[:, i] = c * cols[:, i] - s * cols[:, j]
    out[:, j] = s * cols[:, i] + c * cols[:, j]
    return out


class FrameField:
    """Smooth extension of the orthonormal frame of ``base`` to nearby points.

    With ``twist`` (a covector) the extension is rotated by the angle
    ``twist . (q - p)`` inside the first free vertical pair and the first horizontal
    pair.  The rotation is the identity at ``p`` but changes every derivative.
    """

    def __init__(self, m: SmoothMapSpec, base: FrameDecomposition, twist=None):
        self.m = m
        self.base = base
        self.twist = None if twist is None else np.asarray(twist, dtype=float)
        self.k = base.vertical.shape[1]
        self.s = base.horizontal.shape[1]

    def state(self, q) -> PointState:
        m, base = self.m, self.base
        q = np.asarray(q, dtype=float)
        g = m.source.metric_at(q)
        jac = pushforward(m, q)
        p_h = horizontal_projector(np.linalg.inv(g), jac)
        p_v = np.eye(len(q)) - p_h
        phi = xi = None
        if m.structure is not None:
            phi, xi, _ = m.structure.at(q)
        seeds = []
        cands = base.vertical
        if base.xi_vertical:
            seeds = [xi / norm(g, xi)]
            cands = base.vertical[:, 1:]
        vertical = gram_schmidt(p_v @ cands, g, seeds=seeds, pivot=False, tol=1e-6)
        horizontal = gram_schmidt(p_h @ base.horizontal, g, pivot=False, tol=1e-6)
        if vertical.shape[1] != self.k or horizontal.shape[1] != self.s:
            raise GeometryError(f"frame extension failed at {q}: rank changed nearby")
        # keep the orientation of every vector of the base frame
        for cols, ref in ((vertical, base.vertical), (horizontal, base.horizontal)):
            for i in range(cols.shape[1]):
                if inner(g, cols[:, i], ref[:, i]) < 0:
                    cols[:, i] = -cols[:, i]
        if self.twist is not None:
            theta = float(self.twist @ (q - base.point))
            j0 = 1 if base.xi_vertical else 0
            if self.k - j0 >= 2:
                vertical = _rotate(vertical, j0, j0 + 1, theta)
            if self.s >= 2:
                horizontal = _rotate(horizontal, 0, 1, -2.0 * theta)
        return PointState(q, g, jac, p_v, p_h, np.hstack([vertical, horizontal]), phi)


class LocalGeometry:
    """Connection-level quantities of a map at one point.

    Frame vectors are addressed by index: ``0..k-1`` vertical, ``k..n-1`` horizontal.
    Target-valued quantities live in the target chart at ``psi(p)``.
    """

    def __init__(self, m: SmoothMapSpec, p, frame: Optional[FrameDecomposition] = None,
                 twist=None, step: float = FD_STEP):
        self.m = m
        self.p = np.asarray(p, dtype=float)
        self.frame = frame if frame is not None else frame_at(m, self.p)
        if self.frame.status != "regular":
            raise GeometryError(f"the map is not a submersion at {self.p}")
        self.step = step
        self.field = FrameField(m, self.frame, twist)
        self.k = self.field.k
        self.s = self.field.s
        self.n = self.k + self.s
        self._cache: dict[bytes, PointState] = {}
        self.here = self.state(self.p)
        # pin the state at p to the base frame exactly
        self.here.frame = self.frame.full
        self.gamma = christoffel_at(m.source, self.p)
        self.gamma_target = christoffel_at(m.target, m.value(self.p))
        self.g = self.here.metric
        self.g_target = m.target.metric_at(m.value(self.p))
        self.jac = self.here.jacobian
        self.lam = float(np.sqrt(square_dilation(m, self.p, self.jac, self.g)))
        self.grad_ln_lambda = grad_ln_dilation(m, self.p)
        self._frame_nabla = None
        self._sff = None

    # -- neighbourhood ----------------------------------------------------------------

    def state(self, q) -> PointState:
        q = np.asarray(q, dtype=float)
        key = q.tobytes()
        st = self._cache.get(key)
        if st is None:
            st = self._cache[key] = self.field.state(q)
        return st

    def derivative(self, direction, fld: Field) -> np.ndarray:
        """Coordinate directional derivative of ``fld`` at ``p``."""
        h = self.step
        u = np.asarray(direction, dtype=float)
        return (fld(self.state(self.p + h * u)) - fld(self.state(self.p - h * u))) / (2 * h)

    def nabla(self, direction, fld: Field) -> np.ndarray:
        """Levi-Civita derivative ``nabla_U Y`` of a vector field."""
        u = np.asarray(direction, dtype=float)
        return self.derivative(u, fld) + np.einsum("kij,i,j->k", self.gamma, u, fld(self.here))

    def nabla_pullback(self, direction, fld: Field) -> np.ndarray:
        """Pullback derivative ``nabla^psi_U (psi_* Y)`` in the target chart."""
        u = np.asarray(direction, dtype=float)
        d = self.derivative(u, lambda st: st.jacobian @ fld(st))
        return d + np.einsum("kij,i,j->k", self.gamma_target, self.jac @ u,
                             self.jac @ fld(self.here))

    def bracket(self, f1: Field, f2: Field) -> np.ndarray:
        """Lie bracket ``[Y1, Y2] = D_{Y1} Y2 - D_{Y2} Y1`` (no connection involved)."""
        return self.derivative(f1(self.here), f2) - self.derivative(f2(self.here), f1)

    # -- fields ---------------------------------------------------------------------

    def frame_field(self, a: int) -> Field:
        return lambda st: st.frame[:, a]

    def vector_field(self, v) -> Field:
        """Extension of the vector ``v`` at ``p`` with constant frame coefficients."""
        c = self.coords(v)
        return lambda st: st.frame @ c

    @staticmethod
    def vphi(fld: Field) -> Field:
        """``D`` on vertical fields and ``d`` on horizontal ones."""
        return lambda st: st.p_vertical @ (st.phi @ fld(st))

    @staticmethod
    def hphi(fld: Field) -> Field:
        """``E`` on vertical fields and ``e`` on horizontal ones."""
        return lambda st: st.p_horizontal @ (st.phi @ fld(st))

    @staticmethod
    def vert(fld: Field) -> Field:
        return lambda st: st.p_vertical @ fld(st)

    @staticmethod
    def hor(fld: Field) -> Field:
        return lambda st: st.p_horizontal @ fld(st)

    # -- pointwise algebra ----------------------------------------------------------

    @property
    def vertical(self) -> np.ndarray:
        return self.frame.vertical

    @property
    def horizontal(self) -> np.ndarray:
        return self.frame.horizontal

    def coords(self, v) -> np.ndarray:
        return self.frame.full.T @ self.g @ np.asarray(v, dtype=float)

    def v(self, x) -> np.ndarray:
        return self.here.p_vertical @ x

    def h(self, x) -> np.ndarray:
        return self.here.p_horizontal @ x

    def phi(self, x) -> np.ndarray:
        return self.here.phi @ x

    def inner(self, x, y) -> float:
        return inner(self.g, x, y)

    def norm(self, x) -> float:
        return norm(self.g, x)

    def norm_target(self, y) -> float:
        return norm(self.g_target, y)

    def directional_ln_lambda(self, x) -> float:
        """``X(ln lambda)``."""
        return self.inner(x, self.grad_ln_lambda)

    # -- tensors in frame coordinates -------------------------------------------------

    @property
    def frame_nabla(self) -> np.ndarray:
        """``N[:, a, b] = nabla_{F_a} F_b`` for the extended frame."""
        if self._frame_nabla is None:
            out = np.empty((self.n, self.n, self.n))
            full = self.frame.full
            for a in range(self.n):
                for b in range(self.n):
                    out[:, a, b] = self.nabla(full[:, a], self.frame_field(b))
            self._frame_nabla = out
        return self._frame_nabla

    def T_frame(self) -> np.ndarray:
        """``T_{F_a} F_b``: zero for horizontal ``F_a``."""
        nab = self.frame_nabla
        out = np.zeros_like(nab)
        k = self.k
        out[:, :k, :k] = np.einsum("ij,jab->iab", self.here.p_horizontal, nab[:, :k, :k])
        out[:, :k, k:] = np.einsum("ij,jab->iab", self.here.p_vertical, nab[:, :k, k:])
        return out

    def A_frame(self) -> np.ndarray:
        """``A_{F_a} F_b``: zero for vertical ``F_a``."""
        nab = self.frame_nabla
        out = np.zeros_like(nab)
        k = self.k
        out[:, k:, k:] = np.einsum("ij,jab->iab", self.here.p_vertical, nab[:, k:, k:])
        out[:, k:, :k] = np.einsum("ij,jab->iab", self.here.p_horizontal, nab[:, k:, :k])
        return out

    def sff_frame(self) -> np.ndarray:
        """``S[:, a, b] = (nabla psi_*)(F_a, F_b)`` in the target chart."""
        if self._sff is None:
            nab = self.frame_nabla
            full = self.frame.full
            out = np.empty((self.jac.shape[0], self.n, self.n))
            for a in range(self.n):
                for b in range(self.n):
                    out[:, a, b] = (self.nabla_pullback(full[:, a], self.frame_field(b))
                                    - self.jac @ nab[:, a, b])
            self._sff = out
        return self._sff

    def _bilinear(self, arr: np.ndarray, x, y) -> np.ndarray:
        return np.einsum("iab,a,b->i", arr, self.coords(x), self.coords(y))

    def T(self, x, y) -> np.ndarray:
        if not hasattr(self, "_T"):
            self._T = self.T_frame()
        return self._bilinear(self._T, x, y)

    def A(self, x, y) -> np.ndarray:
        if not hasattr(self, "_A"):
            self._A = self.A_frame()
        return self._bilinear(self._A, x, y)

    def sff(self, x, y) -> np.ndarray:
        return self._bilinear(self.sff_frame(), x, y)

    # -- closed forms -----------------------------------------------------------------

    def sff_horizontal_formula(self, x, y) -> np.ndarray:
        """``X(ln l) psi_* Y + Y(ln l) psi_* X - g(X, Y) psi_*(grad ln l)``."""
        j = self.jac
        return (self.directional_ln_lambda(x) * (j @ y) + self.directional_ln_lambda(y) * (j @ x)
                - self.inner(x, y) * (j @ self.grad_ln_lambda))

    def A_horizontal_formula(self, a: int, b: int) -> np.ndarray:
        """``A_X Y = (1/2) v[X, Y] + g(X, Y) v(grad ln lambda)`` for horizontal frame fields."""
        br = self.bracket(self.frame_field(a), self.frame_field(b))
        x, y = self.frame.full[:, a], self.frame.full[:, b]
        return 0.5 * self.v(br) + self.inner(x, y) * self.v(self.grad_ln_lambda)

    def mean_curvature(self) -> np.ndarray:
        """``H = (1/k) sum_i T_{V_i} V_i``."""
        t = self.T_frame()
        return sum(t[:, i, i] for i in range(self.k)) / self.k

    def tension(self) -> np.ndarray:
        """Trace of the second fundamental form over the full orthonormal frame."""
        s = self.sff_frame()
        return sum(s[:, a, a] for a in range(self.n))

    def tension_formula(self) -> np.ndarray:
        """``-k psi_* H + (2 - s) psi_*(grad ln lambda)`` with ``s = dim B``."""
        s = self.m.target.dimension
        return -self.k * (self.jac @ self.mean_curvature()) + (2 - s) * (self.jac @ self.grad_ln_lambda)

    # -- covariant derivatives of D and E --------------------------------------------

    def nabla_D(self, v, w: int) -> np.ndarray:
        """``(nabla_V D) W = v nabla_V (DW) - D(v nabla_V W)`` for the vertical frame field ``w``."""
        fw = self.frame_field(w)
        return self.v(self.nabla(v, self.vphi(fw))) - self.v(self.phi(self.v(self.nabla(v, fw))))

    def nabla_E(self, v, w: int) -> np.ndarray:
        """``(nabla_V E) W = h nabla_V (EW) - E(v nabla_V W)``."""
        fw = self.frame_field(w)
        return self.h(self.nabla(v, self.hphi(fw))) - self.h(self.phi(self.v(self.nabla(v, fw))))

    def nabla_D_formula(self, v, w: int) -> np.ndarray:
        """``d T_V W - T_V EW``."""
        wv = self.frame.full[:, w]
        return self.v(self.phi(self.T(v, wv))) - self.T(v, self.h(self.phi(wv)))

    def nabla_E_formula(self, v, w: int) -> np.ndarray:
        """``e T_V W - T_V DW``."""
        wv = self.frame.full[:, w]
        return self.h(self.phi(self.T(v, wv))) - self.T(v, self.v(self.phi(wv)))


# ----------------------------------------------------------------------------- samples

def _max(values) -> float:
    return float(max(values, default=0.0))


@dataclass
class ONeillSample:
    point: np.ndarray
    T: np.ndarray  # T[:, a, b] = T_{F_a} F_b, frame = vertical then horizontal
    A: np.ndarray
    vertical_dim: int
    vertical_connection: np.ndarray  # hat-nabla_{V_i} V_j
    skew_T: float
    skew_A: float
    symmetry_T: float
    alternation_A: float
    T_xi: float
    A_xi: float


def oneill_tensors(m: SmoothMapSpec, frame: Optional[FrameDecomposition] = None, p=None,
                   geo: Optional[LocalGeometry] = None) -> ONeillSample:
    """T and A on all frame pairs plus their algebraic symmetry residuals."""
    geo = geo or LocalGeometry(m, p if p is not None else frame.point, frame)
    t, a = geo.T_frame(), geo.A_frame()
    g, k, n = geo.g, geo.k, geo.n
    full = geo.frame.full
    # g(T_E F1, F2) + g(F1, T_E F2), the same for A
    gt = np.einsum("iab,ij,jc->abc", t, g, full)
    ga = np.einsum("iab,ij,jc->abc", a, g, full)
    skew_t = float(np.max(np.abs(gt + gt.transpose(0, 2, 1))))
    skew_a = float(np.max(np.abs(ga + ga.transpose(0, 2, 1))))
    sym_t = float(np.max(np.abs(t[:, :k, :k] - t[:, :k, :k].transpose(0, 2, 1))))
    alt_a = float(np.max(np.abs(a[:, k:, k:] + a[:, k:, k:].transpose(0, 2, 1))))
    t_xi = a_xi = 0.0
    if geo.frame.xi_vertical:
        t_xi = _max(norm(g, t[:, i, 0]) for i in range(k))
        a_xi = _max(norm(g, a[:, j, 0]) for j in range(k, n))
    hat = np.einsum("ij,jab->iab", geo.here.p_vertical, geo.frame_nabla[:, :k, :k])
    return ONeillSample(geo.p, t, a, k, hat, skew_t, skew_a, sym_t, alt_a, t_xi, a_xi)


@dataclass
class SecondFundamentalSample:
    point: np.ndarray
    sff: np.ndarray  # sff[:, a, b] in the target chart
    tension: np.ndarray
    mean_curvature: np.ndarray
    dilation: float
    symmetry: float  # max |S(a, b) - S(b, a)| / lambda


def second_fundamental_form(m: SmoothMapSpec, frame: Optional[FrameDecomposition] = None, p=None,
                            geo: Optional[LocalGeometry] = None) -> SecondFundamentalSample:
    geo = geo or LocalGeometry(m, p if p is not None else frame.point, frame)
    s = geo.sff_frame()
    sym = float(np.max(np.abs(s - s.transpose(0, 2, 1)))) / geo.lam
    return SecondFundamentalSample(geo.p, s, geo.tension(), geo.mean_curvature(), geo.lam, sym)


def tension_conformal_formula(m: SmoothMapSpec, frame: Optional[FrameDecomposition] = None,
                              p=None, geo: Optional[LocalGeometry] = None) -> np.ndarray:
    """Tension of a horizontally conformal submersion from fibre mean curvature and dilation."""
    geo = geo or LocalGeometry(m, p if p is not None else frame.point, frame)
    return geo.tension_formula()
