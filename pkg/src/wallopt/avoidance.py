"""Closed avoidance sets and the wall transforms built on them.

An avoidance set supplies a distance function (and, where the distance is
smooth, its local derivatives) plus a membership test. Wall transforms wrap
a base Objective and an avoidance set into a new Objective whose value
blows up on, or is constant outside of, the allowed region. The +inf marker
is an ordinary float('inf'): always larger than any finite value, never an
exception.
"""

import math

import numpy as np

from .functions import Objective
from .numerics import fd_gradient, fd_hessian

__all__ = [
    "AvoidanceSet",
    "FinitePoints",
    "HyperplaneBoundary",
    "BoxBoundary",
    "RegionComplement",
    "Union",
    "avoidance_set_from_dict",
    "pole_wall",
    "product_pole_wall",
    "constant_wall",
    "penalty_h1",
    "penalty_h2",
    "equality_relaxation",
]

INF = float("inf")


def _ipow(base: float, n: int) -> float:
    """Integer power by repeated multiplication, for bit-reproducible walls."""
    out = 1.0
    for _ in range(n):
        out *= base
    return out


class AvoidanceSet:
    """Base class: a closed set with distance and membership."""

    def distance(self, x) -> float:
        raise NotImplementedError

    def contains(self, x) -> bool:
        return self.distance(x) == 0.0

    def geometry(self, x):
        """(d, grad d, hess d) where the distance is smooth, else None."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


class FinitePoints(AvoidanceSet):
    """A finite set of points; distance is the minimum Euclidean distance.

    At Voronoi ties the lowest-index nearest point is used for derivatives.
    """

    def __init__(self, points):
        pts = [np.asarray(p, dtype=float) for p in points]
        if not pts:
            raise ValueError("FinitePoints requires at least one point")
        self.points = pts

    def _nearest(self, x):
        x = np.asarray(x, dtype=float)
        best_i = 0
        best_d = math.sqrt(float(np.sum((x - self.points[0]) ** 2)))
        for i in range(1, len(self.points)):
            d = math.sqrt(float(np.sum((x - self.points[i]) ** 2)))
            if d < best_d:
                best_d = d
                best_i = i
        return best_i, best_d

    def distance(self, x) -> float:
        return self._nearest(x)[1]

    def geometry(self, x):
        i, d = self._nearest(x)
        if d == 0.0:
            return None
        x = np.asarray(x, dtype=float)
        u = (x - self.points[i]) / d
        hess = (np.eye(x.size) - np.outer(u, u)) / d
        return d, u, hess

    def to_dict(self):
        return {"kind": "points", "points": [p.tolist() for p in self.points]}


class HyperplaneBoundary(AvoidanceSet):
    """The hyperplane <a, x> = b, with distance s * |<a, x> - b|.

    The default scale s = 1/|a| gives Euclidean distance; any positive
    multiple is an admissible wall, so presets may override s.
    """

    def __init__(self, normal, offset, scale=None):
        self.normal = np.asarray(normal, dtype=float)
        self.offset = float(offset)
        if scale is None:
            scale = 1.0 / float(np.linalg.norm(self.normal))
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.scale = float(scale)

    def distance(self, x) -> float:
        return self.scale * abs(float(np.dot(self.normal, x)) - self.offset)

    def geometry(self, x):
        r = float(np.dot(self.normal, x)) - self.offset
        if r == 0.0:
            return None
        d = self.scale * abs(r)
        grad = (self.scale if r > 0 else -self.scale) * self.normal
        return d, grad, np.zeros((self.normal.size, self.normal.size))

    def to_dict(self):
        return {
            "kind": "hyperplane",
            "normal": self.normal.tolist(),
            "offset": self.offset,
            "scale": self.scale,
        }


class BoxBoundary(AvoidanceSet):
    """The topological boundary of an axis-aligned box."""

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if np.any(self.lower >= self.upper):
            raise ValueError("box must have positive extent")

    def distance(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if np.all(x >= self.lower) and np.all(x <= self.upper):
            return float(min(np.min(x - self.lower), np.min(self.upper - x)))
        c = np.clip(x, self.lower, self.upper)
        return float(np.linalg.norm(x - c))

    def geometry(self, x):
        x = np.asarray(x, dtype=float)
        n = x.size
        inside = np.all(x >= self.lower) and np.all(x <= self.upper)
        if inside:
            gaps_lo = x - self.lower
            gaps_hi = self.upper - x
            i_lo = int(np.argmin(gaps_lo))
            i_hi = int(np.argmin(gaps_hi))
            if gaps_lo[i_lo] <= gaps_hi[i_hi]:
                d = float(gaps_lo[i_lo])
                sign, i = 1.0, i_lo
            else:
                d = float(gaps_hi[i_hi])
                sign, i = -1.0, i_hi
            if d == 0.0:
                return None
            grad = np.zeros(n)
            grad[i] = sign
            return d, grad, np.zeros((n, n))
        c = np.clip(x, self.lower, self.upper)
        diff = x - c
        d = float(np.linalg.norm(diff))
        if d == 0.0:
            return None
        u = diff / d
        active = np.diag((diff != 0.0).astype(float))
        return d, u, (active - np.outer(u, u)) / d

    def to_dict(self):
        return {
            "kind": "box",
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }


class RegionComplement(AvoidanceSet):
    """Complement of a region given by a membership predicate.

    Supports membership only; it has no distance function, so it cannot back
    pole walls (use constant walls instead).
    """

    def __init__(self, region_predicate, spec=None):
        self.region_predicate = region_predicate
        self.spec = spec

    def distance(self, x) -> float:
        raise ValueError("RegionComplement has no distance function")

    def contains(self, x) -> bool:
        return not self.region_predicate(x)

    def to_dict(self):
        if self.spec is None:
            raise ValueError("predicate-only RegionComplement is not serializable")
        return {"kind": "region_complement", "region": self.spec}


class Union(AvoidanceSet):
    """Union of avoidance sets; distance is the minimum over members."""

    def __init__(self, members):
        members = list(members)
        if not members:
            raise ValueError("Union requires at least one member")
        self.members = members

    def distance(self, x) -> float:
        return min(m.distance(x) for m in self.members)

    def geometry(self, x):
        best = None
        best_d = INF
        for m in self.members:
            d = m.distance(x)
            if d < best_d:
                best_d = d
                best = m
        return best.geometry(x)

    def to_dict(self):
        return {"kind": "union", "members": [m.to_dict() for m in self.members]}


def avoidance_set_from_dict(d: dict) -> AvoidanceSet:
    kind = d["kind"]
    if kind == "points":
        return FinitePoints(d["points"])
    if kind == "hyperplane":
        return HyperplaneBoundary(d["normal"], d["offset"], d.get("scale"))
    if kind == "box":
        return BoxBoundary(d["lower"], d["upper"])
    if kind == "union":
        return Union([avoidance_set_from_dict(m) for m in d["members"]])
    if kind == "region_complement":
        from .regions import region_from_spec

        spec = d["region"]
        return RegionComplement(region_from_spec(spec), spec=spec)
    raise ValueError(f"unknown avoidance set kind: {kind!r}")


class TransformedObjective(Objective):
    """An Objective produced by a wall transform around a base Objective."""

    def __init__(self, base, name):
        self.base = base
        Objective.__init__(self, base.dim, self._value, name=name)

    def value(self, x):
        return self._value(x)

    __call__ = value

    def _value(self, x):  # pragma: no cover - overridden
        raise NotImplementedError


class PoleWallObjective(TransformedObjective):
    """(f(x) - gamma) / d(x, A)^N; +inf on A."""

    def __init__(self, base, avoid, exponent, gamma):
        if exponent < 1:
            raise ValueError("pole exponent must be >= 1")
        self.avoid = avoid
        self.exponent = int(exponent)
        self.gamma = float(gamma)
        TransformedObjective.__init__(self, base, f"pole({base.name})")

    def _value(self, x):
        d = self.avoid.distance(x)
        if d == 0.0:
            return INF
        fx = self.base.value(x)
        if not np.isfinite(fx):
            return INF
        return (fx - self.gamma) / _ipow(d, self.exponent)

    def gradient(self, x):
        geo = self.avoid.geometry(x)
        if geo is None:
            return fd_gradient(self._value, x)
        d, du, _ = geo
        n = self.exponent
        fx = self.base.value(x)
        g = self.base.gradient(x)
        dn = _ipow(d, n)
        return g / dn - (n * (fx - self.gamma) / (dn * d)) * du

    def hessian(self, x):
        geo = self.avoid.geometry(x)
        if geo is None:
            return fd_hessian(self._value, x)
        d, du, dh = geo
        n = self.exponent
        fx = self.base.value(x) - self.gamma
        g = self.base.gradient(x)
        hb = self.base.hessian(x)
        dn = _ipow(d, n)
        cross = np.outer(g, du)
        return (
            hb / dn
            - (n / (dn * d)) * (cross + cross.T)
            + (n * (n + 1) * fx / (dn * d * d)) * np.outer(du, du)
            - (n * fx / (dn * d)) * dh
        )

    def at_wall(self, x):
        return self.avoid.distance(x) == 0.0


class ProductPoleWallObjective(TransformedObjective):
    """f(x) / prod_j d(x, z_j)^{N_j}, the product-of-distances deflation wall."""

    def __init__(self, base, points, exponents):
        points = [np.asarray(p, dtype=float) for p in points]
        exponents = [int(n) for n in exponents]
        if not points or len(points) != len(exponents):
            raise ValueError("points and exponents must be nonempty, equal length")
        if any(n < 1 for n in exponents):
            raise ValueError("pole exponents must be >= 1")
        self.points = points
        self.exponents = exponents
        TransformedObjective.__init__(self, base, f"product_pole({base.name})")

    def _distances(self, x):
        x = np.asarray(x, dtype=float)
        return [math.sqrt(float(np.sum((x - p) ** 2))) for p in self.points]

    def _value(self, x):
        den = 1.0
        for p, n in zip(self.points, self.exponents):
            d = math.sqrt(float(np.sum((np.asarray(x, float) - p) ** 2)))
            if d == 0.0:
                return INF
            den *= _ipow(d, n)
        fx = self.base.value(x)
        if not np.isfinite(fx):
            return INF
        return fx / den

    def _log_derivs(self, x):
        # L = grad(log prod) and its Jacobian, summed over the pole points
        x = np.asarray(x, dtype=float)
        dim = x.size
        den = 1.0
        L = np.zeros(dim)
        dL = np.zeros((dim, dim))
        for p, n in zip(self.points, self.exponents):
            diff = x - p
            d = math.sqrt(float(np.sum(diff * diff)))
            if d == 0.0:
                return None
            u = diff / d
            den *= _ipow(d, n)
            L += (n / d) * u
            dL += (n / (d * d)) * (np.eye(dim) - 2.0 * np.outer(u, u))
        return den, L, dL

    def gradient(self, x):
        out = self._log_derivs(x)
        if out is None:
            return np.full(self.dim, INF)
        den, L, _ = out
        fx = self.base.value(x)
        g = self.base.gradient(x)
        return (g - fx * L) / den

    def hessian(self, x):
        out = self._log_derivs(x)
        if out is None:
            return np.full((self.dim, self.dim), INF)
        den, L, dL = out
        fx = self.base.value(x)
        g = self.base.gradient(x)
        hb = self.base.hessian(x)
        cross = np.outer(g, L)
        sym = cross + cross.T  # exactly symmetric before mixing into the sum
        return (hb - sym + fx * (np.outer(L, L) - dL)) / den

    def at_wall(self, x):
        return any(d == 0.0 for d in self._distances(x))


class ConstantWallObjective(TransformedObjective):
    """f inside the allowed region, the constant R outside.

    Gradients inside the region are the base objective's bit-exactly, and
    all derivatives outside are zero, so the wall repels through value
    comparisons in line searches. Hessians inside come from the base when it
    has an analytic one; otherwise they are finite differences of the walled
    value, so the quadratic model sees the jump to R within a stencil's
    reach of the boundary and suppresses steps across it.
    """

    def __init__(self, base, allowed, big_value):
        if not np.isfinite(big_value):
            raise ValueError("wall constant must be finite")
        self.allowed = allowed
        self.big_value = float(big_value)
        TransformedObjective.__init__(self, base, f"constant_wall({base.name})")

    def _value(self, x):
        if self.allowed(x):
            return self.base.value(x)
        return self.big_value

    def gradient(self, x):
        if self.allowed(x):
            return self.base.gradient(x)
        return np.zeros(self.dim)

    def hessian(self, x):
        if self.allowed(x):
            if self.base.has_hessian:
                return self.base.hessian(x)
            return fd_hessian(self._value, x)
        return np.zeros((self.dim, self.dim))

    def at_wall(self, x):
        return (not self.allowed(x)) or self.base.value(x) >= self.big_value


class PenaltyObjective(TransformedObjective):
    """Logarithmic penalties: (f - g0) - e*log d, or log(f - g0) - e*log d."""

    def __init__(self, base, avoid, epsilon, gamma0, log_numerator):
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        self.avoid = avoid
        self.epsilon = float(epsilon)
        self.gamma0 = float(gamma0)
        self.log_numerator = bool(log_numerator)
        kind = "penalty_h2" if log_numerator else "penalty_h1"
        TransformedObjective.__init__(self, base, f"{kind}({base.name})")

    def _value(self, x):
        d = self.avoid.distance(x)
        if d == 0.0:
            return INF
        fx = self.base.value(x) - self.gamma0
        if not np.isfinite(fx):
            return INF
        if self.log_numerator:
            if fx <= 0.0:
                return INF  # log of non-positive
            return math.log(fx) - self.epsilon * math.log(d)
        return fx - self.epsilon * math.log(d)

    def gradient(self, x):
        geo = self.avoid.geometry(x)
        if geo is None:
            return fd_gradient(self._value, x)
        d, du, _ = geo
        g = self.base.gradient(x)
        if self.log_numerator:
            fx = self.base.value(x) - self.gamma0
            if fx <= 0.0:
                return np.full(self.dim, INF)
            g = g / fx
        return g - (self.epsilon / d) * du

    def hessian(self, x):
        geo = self.avoid.geometry(x)
        if geo is None:
            return fd_hessian(self._value, x)
        d, du, dh = geo
        g = self.base.gradient(x)
        hb = self.base.hessian(x)
        if self.log_numerator:
            fx = self.base.value(x) - self.gamma0
            if fx <= 0.0:
                return np.full((self.dim, self.dim), INF)
            hb = hb / fx - np.outer(g, g) / (fx * fx)
        wall = (self.epsilon / d) * (dh - np.outer(du, du) / d)
        return hb - wall

    def at_wall(self, x):
        return not np.isfinite(self._value(x))


def pole_wall(f: Objective, avoid: AvoidanceSet, exponent: int, gamma: float = 0.0):
    """Divide f - gamma by d(x, A)^N so descent methods cannot approach A."""
    return PoleWallObjective(f, avoid, exponent, gamma)


def product_pole_wall(f: Objective, points, exponents):
    """Deflation baseline: divide f by the product of point distances."""
    return ProductPoleWallObjective(f, points, exponents)


def constant_wall(f: Objective, allowed, big_value: float):
    """Redefine f to the constant big_value outside the allowed region."""
    return ConstantWallObjective(f, allowed, big_value)


def penalty_h1(f: Objective, avoid: AvoidanceSet, epsilon: float, gamma0: float = 0.0):
    """(f - gamma0) - epsilon * log d(x, A)."""
    return PenaltyObjective(f, avoid, epsilon, gamma0, log_numerator=False)


def penalty_h2(f: Objective, avoid: AvoidanceSet, epsilon: float, gamma0: float = 0.0):
    """log(f - gamma0) - epsilon * log d(x, A); +inf where f <= gamma0."""
    return PenaltyObjective(f, avoid, epsilon, gamma0, log_numerator=True)


def equality_relaxation(p, epsilon: float):
    """Turn the equality p(x) = 0 into the band -eps <= p(x) <= eps.

    Returns two inequality predicates (p >= -eps, p <= eps).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    def lower(x):
        return p(x) >= -epsilon

    def upper(x):
        return p(x) <= epsilon

    return lower, upper
