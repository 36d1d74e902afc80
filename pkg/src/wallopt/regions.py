"""Serializable membership predicates for constant-wall regions.

Constant walls only need a membership test, so regions are described by
plain data (conjunctions of half-planes, or an axis-aligned box) that
round-trips through the CLI config format.
"""

import numpy as np

__all__ = ["region_from_spec", "polytope", "box_region"]


def polytope(constraints):
    """Membership in the intersection of half-planes <a, x> <= b.

    constraints is a sequence of (normal, offset) pairs.
    """
    mats = [(np.asarray(a, dtype=float), float(b)) for a, b in constraints]

    def inside(x):
        for a, b in mats:
            if float(np.dot(a, x)) > b:
                return False
        return True

    return inside


def box_region(lower, upper):
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)

    def inside(x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= lower) and np.all(x <= upper))

    return inside


def region_from_spec(spec: dict):
    kind = spec["kind"]
    if kind == "polytope":
        return polytope([(c["normal"], c["offset"]) for c in spec["constraints"]])
    if kind == "box":
        return box_region(spec["lower"], spec["upper"])
    raise ValueError(f"unknown region kind: {kind!r}")
