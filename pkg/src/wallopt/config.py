"""RunSpec: a fully serializable description of a single run.

Everything the CLI does is reproducible from a RunSpec plus its seed; specs
round-trip losslessly through plain JSON-compatible dictionaries.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .avoidance import (
    avoidance_set_from_dict,
    constant_wall,
    penalty_h1,
    penalty_h2,
    pole_wall,
    product_pole_wall,
)
from .basins import Attractor, BasinGrid
from .functions import BUILTIN_NAMES, Objective, builtin, modulus_objective
from .optimizers import OptimizerConfig
from .regions import region_from_spec

__all__ = [
    "RunSpec",
    "build_objective",
    "build_wall",
    "build_grid",
    "polynomial_modulus_objective",
]

WALL_KINDS = ("pole", "product", "constant", "h1", "h2")


def polynomial_modulus_objective(coeffs) -> Objective:
    """|p(z)|^2 / 2 for the polynomial with the given complex coefficients
    (leading first, as [re, im] pairs), with exact derivative registration."""
    cs = [complex(re, im) for re, im in coeffs]
    if len(cs) < 2:
        raise ValueError("polynomial needs degree >= 1")
    n = len(cs) - 1
    d1 = [c * (n - i) for i, c in enumerate(cs[:-1])]
    d2 = [c * (n - 1 - i) for i, c in enumerate(d1[:-1])]

    def horner(coefs):
        def ev(z):
            w = coefs[0]
            for c in coefs[1:]:
                w = w * z + c
            return w

        return ev

    return modulus_objective(
        horner(cs), horner(d1), horner(d2) if d2 else (lambda z: 0j), name="poly"
    )


def build_objective(spec) -> Objective:
    if isinstance(spec, str):
        if spec not in BUILTIN_NAMES:
            raise ValueError(f"unknown builtin objective: {spec!r}")
        return builtin(spec)
    if isinstance(spec, dict) and "poly" in spec:
        return polynomial_modulus_objective(spec["poly"])
    raise ValueError(f"bad objective spec: {spec!r}")


def build_wall(wall_spec, base: Objective):
    """Wrap base in the wall described by wall_spec (None passes through)."""
    if wall_spec is None:
        return base
    kind = wall_spec["kind"]
    if kind == "pole":
        return pole_wall(
            base,
            avoidance_set_from_dict(wall_spec["set"]),
            wall_spec.get("exponent", 2),
            wall_spec.get("gamma", 0.0),
        )
    if kind == "product":
        pts = wall_spec["points"]
        exps = wall_spec.get("exponents") or [wall_spec.get("exponent", 2)] * len(pts)
        return product_pole_wall(base, pts, exps)
    if kind == "constant":
        return constant_wall(
            base, region_from_spec(wall_spec["region"]), wall_spec.get("big_value", 1000.0)
        )
    if kind in ("h1", "h2"):
        fn = penalty_h1 if kind == "h1" else penalty_h2
        return fn(
            base,
            avoidance_set_from_dict(wall_spec["set"]),
            wall_spec["epsilon"],
            wall_spec.get("gamma0", 0.0),
        )
    raise ValueError(f"unknown wall kind: {kind!r}")


def build_grid(spec: dict) -> BasinGrid:
    attr = [
        Attractor(tuple(a["point"]), a["label"], tuple(a["color"]))
        for a in spec.get("attractors", [])
    ]
    return BasinGrid(
        center=tuple(spec["center"]),
        half_width=float(spec["half_width"]),
        resolution=int(spec["resolution"]),
        attractors=attr,
        classify_tol=float(spec.get("classify_tol", 1e-5)),
        unresolved_color=tuple(spec.get("unresolved_color", (0, 0, 0))),
    )


@dataclass
class RunSpec:
    """One optimizer run: objective, optional wall, config, start, outputs."""

    objective: object  # builtin name or {"poly": [[re, im], ...]}
    wall: dict = None
    optimizer: dict = field(default_factory=dict)
    start: object = None  # [x, y] or {"uniform": {"low": [...], "high": [...]}}
    outputs: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.wall is not None and self.wall.get("kind") not in WALL_KINDS:
            raise ValueError(f"unknown wall kind: {self.wall!r}")
        build_objective(self.objective)  # referenced builtin must exist

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "wall": self.wall,
            "optimizer": self.optimizer,
            "start": self.start,
            "outputs": self.outputs,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunSpec":
        return cls(
            objective=d["objective"],
            wall=d.get("wall"),
            optimizer=d.get("optimizer", {}),
            start=d.get("start"),
            outputs=d.get("outputs", {}),
            seed=d.get("seed", 0),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path) -> "RunSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def make_objective(self) -> Objective:
        return build_wall(self.wall, build_objective(self.objective))

    def make_config(self) -> OptimizerConfig:
        cfg = dict(self.optimizer)
        cfg.setdefault("seed", self.seed)
        return OptimizerConfig.from_dict({**OptimizerConfig().to_dict(), **cfg})

    def make_start(self, rng=None):
        if isinstance(self.start, dict) and "uniform" in self.start:
            u = self.start["uniform"]
            rng = rng if rng is not None else np.random.default_rng(self.seed)
            return rng.uniform(np.asarray(u["low"]), np.asarray(u["high"]))
        if self.start is None:
            raise ValueError("run spec has no start")
        return np.asarray(self.start, dtype=float)
