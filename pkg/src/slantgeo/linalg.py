"""Small dense linear algebra in a point-dependent inner product."""

from __future__ import annotations

import numpy as np


def inner(g: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    return float(x @ g @ y)


def norm(g: np.ndarray, x: np.ndarray) -> float:
    return float(np.sqrt(max(x @ g @ x, 0.0)))


def gram_schmidt(candidates, g, *, seeds=(), tol=1e-8, pivot=True, include_seeds=True):
    """Modified Gram-Schmidt with column pivoting in the inner product ``g``.

    ``candidates`` are columns.  Each step takes the remaining candidate with the
    largest residual norm (lowest index on ties), so the output is deterministic.
    Candidates whose residual falls below ``tol`` times the largest input norm are
    dropped.  ``seeds`` must already be orthonormal; candidates are orthogonalised
    against them, and they lead the output when ``include_seeds`` is set.
    Returns an ``n x k`` array of orthonormal columns.
    """
    cands = [np.array(c, dtype=float) for c in np.asarray(candidates, dtype=float).T] \
        if np.size(candidates) else []
    basis = [np.array(s, dtype=float) for s in seeds]
    n = g.shape[0]
    scale = max([norm(g, c) for c in cands], default=0.0)
    for s in basis:
        cands = [c - inner(g, s, c) * s for c in cands]
    out = list(basis) if include_seeds else []
    while cands:
        norms = [norm(g, c) for c in cands]
        j = int(np.argmax(norms)) if pivot else 0
        if norms[j] <= tol * scale or norms[j] == 0.0:
            if pivot:
                break
            cands.pop(0)
            continue
        q = cands.pop(j) / norms[j]
        # re-orthogonalise once against what we have; keeps the frame at 1e-15
        for b in out:
            q = q - inner(g, b, q) * b
        q = q / norm(g, q)
        out.append(q)
        cands = [c - inner(g, q, c) * q for c in cands]
    if not out:
        return np.zeros((n, 0))
    return np.column_stack(out)


def horizontal_projector(g_inv: np.ndarray, jac: np.ndarray) -> np.ndarray:
    """g-orthogonal projector onto the complement of ``ker jac`` (``jac`` of full row rank)."""
    gj = g_inv @ jac.T
    return gj @ np.linalg.solve(jac @ gj, jac)


def kernel_projector(g: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """g-orthogonal projector onto the span of the columns of ``kernel``."""
    n = g.shape[0]
    if kernel.shape[1] == 0:
        return np.zeros((n, n))
    return kernel @ np.linalg.solve(kernel.T @ g @ kernel, kernel.T @ g)
