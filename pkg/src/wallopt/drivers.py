"""Outer loops around the optimizers.

The drivers chain single runs into higher-level procedures: refining a
running lower-bound estimate for the pole-wall numerator, growing an avoid
set one converged endpoint per round (deflation), escaping a
positive-dimensional solution component by restarting next to the last
endpoint, and the two feasibility-phase procedures (slack variables and
indicator wall).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .avoidance import FinitePoints, constant_wall, pole_wall, product_pole_wall
from .functions import Objective
from .optimizers import OptimizerConfig, Termination, bnqn

__all__ = [
    "GammaState",
    "GammaRun",
    "AvoidanceRoundLog",
    "RoundRecord",
    "gamma_update_loop",
    "avoid_iterate",
    "escape_component",
    "feasibility_slack",
    "feasibility_indicator",
    "FeasibilityResult",
    "write_jsonl",
]


@dataclass
class GammaRun:
    run_index: int
    gamma: float
    best_point: list
    best_value: float

    def to_dict(self):
        return {
            "run": self.run_index,
            "gamma": self.gamma,
            "best_point": list(self.best_point),
            "best_value": self.best_value,
        }


@dataclass
class GammaState:
    """Running lower-bound estimate and its per-run history (non-increasing)."""

    gamma: float
    history: list = field(default_factory=list)

    @property
    def best_point(self) -> np.ndarray:
        best = min(self.history, key=lambda r: r.best_value)
        return np.asarray(best.best_point)

    @property
    def best_value(self) -> float:
        return min(r.best_value for r in self.history)


@dataclass
class RoundRecord:
    round_index: int
    avoid_snapshot: list
    start: list
    endpoint: list
    base_value: float
    termination: str
    accepted: bool
    label: str = ""

    def to_dict(self):
        return {
            "round": self.round_index,
            "avoid_size": len(self.avoid_snapshot),
            "avoid": [list(p) for p in self.avoid_snapshot],
            "start": list(self.start),
            "endpoint": list(self.endpoint),
            "base_value": self.base_value,
            "termination": self.termination,
            "accepted": self.accepted,
            "label": self.label,
        }


@dataclass
class AvoidanceRoundLog:
    rounds: list = field(default_factory=list)

    @property
    def found_points(self):
        return [np.asarray(r.endpoint) for r in self.rounds if r.accepted]


def _sample_start(sampler, rng, avoid, restrict=None):
    for _ in range(100):
        x0 = np.asarray(sampler(rng), dtype=float)
        if avoid is not None and avoid.distance(x0) == 0.0:
            continue
        if restrict is not None and not restrict(x0):
            continue
        return x0
    raise ValueError("no feasible start")


def gamma_update_loop(
    f: Objective,
    avoid,
    exponent: int,
    runs: int,
    sampler,
    cfg: OptimizerConfig = None,
    restrict_component=None,
    gamma0: float = 0.0,
) -> GammaState:
    """Repeated pole-wall runs that tighten a lower-bound estimate.

    Each run minimizes (f - gamma) / d(., A)^N from a sampled start, then
    lowers gamma to the smallest base value seen along the trace (restricted
    to the given component when a predicate is supplied). gamma never
    increases.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    cfg = cfg or OptimizerConfig()
    rng = cfg.rng()
    state = GammaState(gamma=float(gamma0))
    for run in range(runs):
        x0 = _sample_start(sampler, rng, avoid, restrict_component)
        wall = pole_wall(f, avoid, exponent, state.gamma)
        trace = bnqn(wall, x0, cfg)
        best_v = math.inf
        best_x = trace.iterates[0]
        for x in trace.iterates:
            if restrict_component is not None and not restrict_component(x):
                continue
            v = f.value(x)
            if v < best_v:
                best_v = v
                best_x = x
        state.gamma = min(state.gamma, best_v)
        state.history.append(
            GammaRun(run, state.gamma, [float(c) for c in best_x], float(best_v))
        )
    return state


def avoid_iterate(
    f: Objective,
    exponent: int,
    rounds: int,
    start,
    cfg: OptimizerConfig = None,
    wall_kind: str = "pole",
    classifier=None,
    accept_tol: float = 1e-8,
) -> AvoidanceRoundLog:
    """Deflation rounds: each converged endpoint becomes a new pole.

    start is either a fixed point (array-like) or a callable sampler(rng).
    Round k minimizes the wall built from every previously accepted endpoint
    (round 1 is plain minimization of f). An endpoint joins the avoid set
    only when the run converged (GradTol) and its base value is below
    accept_tol; unconverged rounds append nothing.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if wall_kind not in ("pole", "product_pole"):
        raise ValueError(f"unknown wall kind: {wall_kind!r}")
    cfg = cfg or OptimizerConfig()
    rng = cfg.rng()
    log = AvoidanceRoundLog()
    found = []
    for k in range(rounds):
        if callable(start):
            x0 = np.asarray(start(rng), dtype=float)
        else:
            x0 = np.asarray(start, dtype=float)
        if not found:
            wall = f
        elif wall_kind == "pole":
            wall = pole_wall(f, FinitePoints(found), exponent)
        else:
            wall = product_pole_wall(f, found, [exponent] * len(found))
        trace = bnqn(wall, x0, cfg)
        end = trace.end_point
        base_v = float(f.value(end))
        accepted = bool(
            trace.termination == Termination.GRAD_TOL and base_v <= accept_tol
        )
        label = classifier(end) if classifier is not None else ""
        log.rounds.append(
            RoundRecord(
                k,
                [p.copy() for p in found],
                [float(c) for c in x0],
                [float(c) for c in end],
                base_v,
                trace.termination.value,
                accepted,
                label,
            )
        )
        if accepted:
            found.append(np.asarray(end, dtype=float).copy())
    return log


def _round_to_grid(x, scale):
    return np.round(np.asarray(x, dtype=float) / scale) * scale


def escape_component(
    f: Objective,
    exponent: int,
    seed_endpoint,
    cfg: OptimizerConfig = None,
    offset_scale: float = 1e-3,
    rounds: int = 1,
    classifier=None,
    accept_tol: float = 1e-8,
) -> AvoidanceRoundLog:
    """Escape a positive-dimensional component via a pole at the seed.

    The next start is the seed endpoint rounded per-coordinate to the
    offset_scale grid (so it moves by at most offset_scale per coordinate),
    and the wall is a pole over all points found so far. Later rounds start
    next to the latest endpoint.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    cfg = cfg or OptimizerConfig()
    log = AvoidanceRoundLog()
    found = [np.asarray(seed_endpoint, dtype=float).copy()]
    anchor = found[0]
    for k in range(rounds):
        x0 = _round_to_grid(anchor, offset_scale)
        wall = pole_wall(f, FinitePoints(found), exponent)
        trace = bnqn(wall, x0, cfg)
        end = trace.end_point
        base_v = float(f.value(end))
        accepted = bool(
            trace.termination == Termination.GRAD_TOL and base_v <= accept_tol
        )
        label = classifier(end) if classifier is not None else ""
        log.rounds.append(
            RoundRecord(
                k,
                [p.copy() for p in found],
                [float(c) for c in x0],
                [float(c) for c in end],
                base_v,
                trace.termination.value,
                accepted,
                label,
            )
        )
        if accepted:
            found.append(np.asarray(end, dtype=float).copy())
            anchor = found[-1]
    return log


@dataclass
class FeasibilityResult:
    feasible: bool
    point: np.ndarray  # x-part only
    residual: float
    termination: str

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "point": [float(c) for c in self.point],
            "residual": self.residual,
            "termination": self.termination,
        }


def feasibility_slack(
    equalities,
    inequalities,
    x0,
    cfg: OptimizerConfig = None,
    tol: float = 1e-12,
) -> FeasibilityResult:
    """Find a point with h_i(x) = 0 and h_k(x) <= 0 via slack variables.

    Each inequality h_k(x) <= 0 becomes the equality h_k(x) + y_k^2 = 0 with
    a fresh slack variable y_k; the sum of squared equalities over (x, y) is
    minimized. Success means the final sum of squares is <= tol.
    """
    cfg = cfg or OptimizerConfig()
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    m = len(inequalities)

    def total(z):
        x = z[:n]
        s = 0.0
        for h in equalities:
            r = h(x)
            s += r * r
        for k, h in enumerate(inequalities):
            r = h(x) + z[n + k] * z[n + k]
            s += r * r
        return s

    obj = Objective(n + m, total, name="feasibility_slack")
    # start slacks at sqrt(max(0, -h)) so already-satisfied inequalities
    # contribute zero residual
    z0 = np.concatenate(
        [x0, [math.sqrt(max(0.0, -h(x0))) for h in inequalities]]
    )
    trace = bnqn(obj, z0, cfg)
    best = trace.end_point
    residual = total(best)
    return FeasibilityResult(
        feasible=residual <= tol,
        point=best[:n].copy(),
        residual=float(residual),
        termination=trace.termination.value,
    )


def feasibility_indicator(
    equalities,
    predicate,
    big_value: float,
    x0,
    cfg: OptimizerConfig = None,
    tol: float = 1e-10,
) -> FeasibilityResult:
    """Feasibility via the indicator wall: minimize sum h_i(x)^2 walled by
    the inequality-region predicate."""
    cfg = cfg or OptimizerConfig()
    x0 = np.asarray(x0, dtype=float)
    if not equalities:
        ok = bool(predicate(x0))
        return FeasibilityResult(ok, x0.copy(), 0.0 if ok else math.inf, "none")

    def total(x):
        s = 0.0
        for h in equalities:
            r = h(x)
            s += r * r
        return s

    base = Objective(x0.size, total, name="feasibility_indicator")
    wall = constant_wall(base, predicate, big_value)
    trace = bnqn(wall, x0, cfg)
    best = trace.end_point
    residual = total(best)
    feasible = residual <= tol and bool(predicate(best))
    return FeasibilityResult(
        feasible, best.copy(), float(residual), trace.termination.value
    )


def write_jsonl(records, path):
    """One JSON object per line; records supply to_dict()."""
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict()) + "\n")
