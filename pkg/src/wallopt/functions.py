"""Objective abstraction and the built-in test functions.

An Objective is an evaluatable scalar function of a real vector with a
declared dimension and optional analytic gradient/Hessian; finite
differences fill in whatever is missing. Complex maps enter through
modulus_objective, which turns F: C -> C into the real cost |F|^2 / 2.
"""

import math

import numpy as np

from .numerics import fd_gradient, fd_hessian

__all__ = [
    "Objective",
    "modulus_objective",
    "poly_example2",
    "bessel_j1",
    "builtin",
    "BUILTIN_NAMES",
]

INF = float("inf")


class Objective:
    """Scalar cost function with optional analytic derivatives.

    value must be deterministic. gradient/hessian fall back to central
    differences of value when no analytic callable was supplied.
    """

    def __init__(self, dim, value_fn, grad_fn=None, hess_fn=None, name=""):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)
        self.value_fn = value_fn
        self.grad_fn = grad_fn
        self.hess_fn = hess_fn
        self.name = name

    @property
    def has_gradient(self):
        return self.grad_fn is not None

    @property
    def has_hessian(self):
        return self.hess_fn is not None

    def value(self, x) -> float:
        return self.value_fn(x)

    __call__ = value

    def gradient(self, x) -> np.ndarray:
        if self.grad_fn is not None:
            return self.grad_fn(x)
        return fd_gradient(self.value_fn, x)

    def hessian(self, x) -> np.ndarray:
        if self.hess_fn is not None:
            return self.hess_fn(x)
        return fd_hessian(self.value_fn, x)

    def at_wall(self, x) -> bool:
        """Whether x sits on a wall of this objective (never for plain costs)."""
        return False

    def __repr__(self):
        return f"Objective({self.name or '<anon>'}, dim={self.dim})"


def _finite_complex(w) -> bool:
    return math.isfinite(w.real) and math.isfinite(w.imag)


def modulus_objective(F, dF=None, d2F=None, name="") -> Objective:
    """Objective (x, y) -> |F(x + iy)|^2 / 2 for a complex map F.

    Points where F is undefined or non-finite (poles) evaluate to +inf so
    optimizers treat them as walls. When dF (and d2F) are registered the
    gradient (and Hessian) come from the chain rule for holomorphic maps;
    otherwise finite differences are used.
    """

    def value(x):
        try:
            w = F(complex(x[0], x[1]))
        except (ZeroDivisionError, OverflowError, ValueError):
            return INF
        if not _finite_complex(w):
            return INF
        return 0.5 * (w.real * w.real + w.imag * w.imag)

    grad_fn = None
    hess_fn = None
    if dF is not None:

        def grad_fn(x):
            z = complex(x[0], x[1])
            try:
                u = F(z).conjugate() * dF(z)
            except (ZeroDivisionError, OverflowError, ValueError):
                return np.array([INF, INF])
            return np.array([u.real, -u.imag])

        if d2F is not None:

            def hess_fn(x):
                z = complex(x[0], x[1])
                try:
                    fp = dF(z)
                    a = fp.real * fp.real + fp.imag * fp.imag
                    b = F(z).conjugate() * d2F(z)
                except (ZeroDivisionError, OverflowError, ValueError):
                    return np.full((2, 2), INF)
                return np.array(
                    [[a + b.real, -b.imag], [-b.imag, a - b.real]]
                )

    return Objective(2, value, grad_fn, hess_fn, name=name or "modulus")


# degree-5 test polynomial with complex coefficients
_P5 = (1.0 + 0.0j, 0.0j, -3.0j, -(5.0 + 2.0j), 3.0 + 0.0j, 1.0 + 0.0j)


def poly_example2(z: complex) -> complex:
    """z^5 - 3i z^3 - (5+2i) z^2 + 3z + 1, by Horner evaluation."""
    w = _P5[0]
    for c in _P5[1:]:
        w = w * z + c
    return w


def _poly_example2_d1(z: complex) -> complex:
    return ((5.0 * z + 0.0j) * z - 9.0j) * z * z - (10.0 + 4.0j) * z + 3.0


def _poly_example2_d2(z: complex) -> complex:
    return (20.0 * z * z - 18.0j) * z - (10.0 + 4.0j)


_J1_TOL = 1e-16
_J1_MAX_TERMS = 60


def bessel_j1(z: complex) -> complex:
    """First-kind Bessel function of order one by truncated power series.

    Valid for |z| <= 16 (series budget); larger arguments are rejected.
    Terms are added until the next one is below 1e-16 * (1 + |sum|), with
    at most 60 terms.
    """
    z = complex(z)
    if abs(z) > 16.0:
        raise ValueError("outside series budget")
    half = 0.5 * z
    m = -half * half
    term = half
    total = term
    for k in range(1, _J1_MAX_TERMS + 1):
        term *= m / (k * (k + 1))
        if abs(term) <= _J1_TOL * (1.0 + abs(total)):
            break
        total += term
    return total


def _bessel_j1_d1(z: complex) -> complex:
    # termwise derivative of the series: sum (-1)^k (2k+1)/(2 k!(k+1)!) (z/2)^{2k}
    z = complex(z)
    if abs(z) > 16.0:
        raise ValueError("outside series budget")
    half = 0.5 * z
    m = -half * half
    term = 0.5 + 0.0j
    total = term
    for k in range(1, _J1_MAX_TERMS + 1):
        term *= m * (2 * k + 1) / ((2 * k - 1) * k * (k + 1))
        if abs(term) <= _J1_TOL * (1.0 + abs(total)):
            break
        total += term
    return total


def _bessel_j1_d2(z: complex) -> complex:
    # termwise second derivative: sum over k>=1 of c_k k (z/2)^{2k-1},
    # c_k = (-1)^k (2k+1)/(2 k!(k+1)!)
    z = complex(z)
    if abs(z) > 16.0:
        raise ValueError("outside series budget")
    half = 0.5 * z
    m = -half * half
    term = -0.75 * half  # k = 1: c_1 * 1 * (z/2)
    total = term
    for k in range(2, _J1_MAX_TERMS + 1):
        term *= m * (2 * k + 1) * k / ((2 * k - 1) * (k - 1) * k * (k + 1))
        if abs(term) <= _J1_TOL * (1.0 + abs(total)):
            break
        total += term
    return total


def _example1_value(x):
    a, b = x[0], x[1]
    return -a * b * math.exp(-(a * a + b * b)) + 0.5 * b * b


def _example1_grad(x):
    a, b = x[0], x[1]
    e = math.exp(-(a * a + b * b))
    return np.array(
        [-b * e * (1.0 - 2.0 * a * a), -a * e * (1.0 - 2.0 * b * b) + b]
    )


def _example3_value(x):
    a, b = x[0], x[1]
    c1 = b - a * a - 2.0
    c2 = b + a * a * a * a + 2.0
    q3 = a * a + (b - 1.0) * (b - 1.0)
    q4 = (a - 1.0) * (a - 1.0) + (b + 1.0) * (b + 1.0)
    q5 = (a + 1.0) * (a + 1.0) + (b - 4.0) * (b - 4.0)
    return c1 * c1 * c2 * c2 * q3 * q4 * q5


def _example4_value(x):
    a, b = x[0], x[1]
    r = b * b - a * a * a + a
    return r * r


def _example4_grad(x):
    a, b = x[0], x[1]
    r = b * b - a * a * a + a
    return np.array([2.0 * r * (1.0 - 3.0 * a * a), 4.0 * r * b])


def _example6_value(x):
    return -40.0 * x[0] - 30.0 * x[1]


def _example6_grad(x):
    return np.array([-40.0, -30.0])


def _example7_value(x):
    a, b = x[0], x[1]
    return -2.0 * (a - 0.25) * (a - 0.25) + 2.0 * (b - 0.5) * (b - 0.5)


def _example7_grad(x):
    return np.array([-4.0 * (x[0] - 0.25), 4.0 * (x[1] - 0.5)])


def _make_builtin(name):
    if name == "example1":
        return Objective(2, _example1_value, _example1_grad, name=name)
    if name == "example3":
        return Objective(2, _example3_value, name=name)
    if name == "example4":
        return Objective(2, _example4_value, _example4_grad, name=name)
    if name == "example6":
        return Objective(2, _example6_value, _example6_grad, name=name)
    if name == "example7":
        return Objective(2, _example7_value, _example7_grad, name=name)
    if name == "example2_modulus":
        return modulus_objective(
            poly_example2, _poly_example2_d1, _poly_example2_d2, name=name
        )
    if name == "example8_modulus":
        return modulus_objective(
            bessel_j1, _bessel_j1_d1, _bessel_j1_d2, name=name
        )
    raise ValueError(f"unknown builtin objective: {name!r}")


BUILTIN_NAMES = (
    "example1",
    "example3",
    "example4",
    "example6",
    "example7",
    "example2_modulus",
    "example8_modulus",
)


def builtin(name: str) -> Objective:
    """Construct one of the named built-in objectives."""
    return _make_builtin(name)
