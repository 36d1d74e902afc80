"""Small dense symmetric eigensolver and finite-difference derivatives.

Everything in here is a pure function of its inputs. The matrices are tiny
(mostly 2x2, never large), so the eigensolver favours robustness and
determinism over speed.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EigenDecomposition",
    "StencilCrossesWall",
    "jacobi_eigen",
    "fd_gradient",
    "fd_hessian",
]


class StencilCrossesWall(ValueError):
    """A finite-difference stencil point evaluated non-finite.

    Raised when a difference stencil straddles a wall (infinite or undefined
    function values); callers must fall back to value-only logic.
    """


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order; eigenvectors[:, i] pairs eigenvalues[i]."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def jacobi_eigen(m) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below
    1e-14 * (1 + diagonal norm). Deterministic for identical input.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite matrix")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix not symmetric")

    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return EigenDecomposition(a[0].copy(), v)
    if n == 2:
        # a single Jacobi rotation annihilates the off-diagonal exactly
        a00, a01, a11 = a[0, 0], a[0, 1], a[1, 1]
        if a01 == 0.0:
            vals = np.array([a00, a11])
        else:
            theta = (a11 - a00) / (2.0 * a01)
            t = (1.0 if theta >= 0.0 else -1.0) / (
                abs(theta) + np.sqrt(theta * theta + 1.0)
            )
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            vals = np.array([a00 - t * a01, a11 + t * a01])
            v = np.array([[c, s], [-s, c]])
        order = np.argsort(-vals, kind="stable")
        return EigenDecomposition(vals[order], v[:, order])

    for _sweep in range(60):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        off = np.sqrt(2.0 * off)
        diag_norm = np.sqrt(np.sum(np.diag(a) ** 2))
        if off <= 1e-14 * (1.0 + diag_norm):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # symmetric Schur rotation annihilating a[p, q]
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) if theta != 0.0 else 1.0
                t = t / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq

    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    return EigenDecomposition(vals[order], v[:, order])


def _step_sizes(x: np.ndarray, h, base: float) -> np.ndarray:
    if h is not None:
        if h <= 0:
            raise ValueError("step size must be positive")
        return np.full(x.size, float(h))
    return base * (1.0 + np.abs(x))


def fd_gradient(f, x, h=None) -> np.ndarray:
    """Central-difference gradient; per-coordinate step 1e-6 * (1 + |x_i|).

    Raises StencilCrossesWall if any stencil value is non-finite.
    """
    x = np.asarray(x, dtype=float)
    hs = _step_sizes(x, h, 1e-6)
    g = np.empty(x.size)
    xw = x.copy()
    for i in range(x.size):
        xi = x[i]
        xw[i] = xi + hs[i]
        fp = f(xw)
        xw[i] = xi - hs[i]
        fm = f(xw)
        xw[i] = xi
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise StencilCrossesWall("stencil crosses wall")
        g[i] = (fp - fm) / (2.0 * hs[i])
    return g


def fd_hessian(f, x, h=None) -> np.ndarray:
    """Second-order central-difference Hessian, symmetrized exactly.

    Per-coordinate step 1e-4 * (1 + |x_i|). Raises StencilCrossesWall as
    fd_gradient does.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    hs = _step_sizes(x, h, 1e-4)
    f0 = f(x)
    if not np.isfinite(f0):
        raise StencilCrossesWall("stencil crosses wall")
    hess = np.empty((n, n))
    xw = x.copy()
    for i in range(n):
        xi = x[i]
        xw[i] = xi + hs[i]
        fp = f(xw)
        xw[i] = xi - hs[i]
        fm = f(xw)
        xw[i] = xi
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise StencilCrossesWall("stencil crosses wall")
        hess[i, i] = (fp - 2.0 * f0 + fm) / (hs[i] * hs[i])
    for i in range(n - 1):
        xi = x[i]
        for j in range(i + 1, n):
            xj = x[j]
            xw[i] = xi + hs[i]
            xw[j] = xj + hs[j]
            fpp = f(xw)
            xw[j] = xj - hs[j]
            fpm = f(xw)
            xw[i] = xi - hs[i]
            fmm = f(xw)
            xw[j] = xj + hs[j]
            fmp = f(xw)
            xw[i] = xi
            xw[j] = xj
            if not (
                np.isfinite(fpp)
                and np.isfinite(fpm)
                and np.isfinite(fmp)
                and np.isfinite(fmm)
            ):
                raise StencilCrossesWall("stencil crosses wall")
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * hs[i] * hs[j])
    return hess
