"""Iterative minimizers producing full run traces.

Methods: plain Gradient Descent, Backtracking (Armijo) Gradient Descent, the
safeguarded Newton-type method with Hessian shifts and eigenvalue
sign-flips, Projected Gradient Descent, and an Armijo-with-constraints
variant. Line searches compare transformed (walled) objective values, while
search directions come from the interior derivatives; a +inf trial value
always fails the Armijo test, so walls repel without exceptions.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import StencilCrossesWall, jacobi_eigen

__all__ = [
    "OptimizerConfig",
    "Termination",
    "Trace",
    "gradient_descent",
    "backtracking_gd",
    "bnqn",
    "bnqn_direction",
    "projected_gd",
    "armijo_with_constraints",
]

MAX_HALVINGS = 60


class Termination(enum.Enum):
    GRAD_TOL = "GradTol"
    MAX_ITERS = "MaxIters"
    STATIONARY_START = "StationaryStart"
    WALL_START = "WallStart"
    LINE_SEARCH_FAILURE = "LineSearchFailure"
    NON_FINITE = "NonFinite"


@dataclass
class OptimizerConfig:
    """Hyperparameters of a single run; seed covers any sampling around it."""

    method: str = "bnqn"
    learning_rate: float = 0.1
    armijo_c: float = 1e-4
    armijo_beta: float = 0.5
    initial_step: float = 1.0
    delta_sequence: tuple = None  # default 0, 1, ..., dim
    alpha_exponent: float = 1.0
    step_cap: float = 1.0  # None disables the cap
    grad_tol: float = 1e-6
    max_iters: int = 10000
    seed: int = 0

    def deltas(self, dim: int) -> tuple:
        if self.delta_sequence is None:
            return tuple(float(j) for j in range(dim + 1))
        seq = tuple(float(d) for d in self.delta_sequence)
        if len(set(seq)) < dim + 1:
            raise ValueError("delta_sequence needs at least dim+1 distinct entries")
        return seq

    def rng(self):
        return np.random.default_rng(self.seed)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "learning_rate": self.learning_rate,
            "armijo_c": self.armijo_c,
            "armijo_beta": self.armijo_beta,
            "initial_step": self.initial_step,
            "delta_sequence": None
            if self.delta_sequence is None
            else list(self.delta_sequence),
            "alpha_exponent": self.alpha_exponent,
            "step_cap": self.step_cap,
            "grad_tol": self.grad_tol,
            "max_iters": self.max_iters,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        cfg = cls(**d)
        if cfg.delta_sequence is not None:
            cfg.delta_sequence = tuple(cfg.delta_sequence)
        return cfg


@dataclass
class Trace:
    """Full iterate/value record of one run.

    step_sizes[k] is the accepted step factor used to reach iterates[k]
    (0.0 for the starting point).
    """

    iterates: list = field(default_factory=list)
    values: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    termination: Termination = Termination.MAX_ITERS

    def append(self, x, value, grad_norm, step):
        self.iterates.append(np.asarray(x, dtype=float).copy())
        self.values.append(float(value))
        self.grad_norms.append(float(grad_norm))
        self.step_sizes.append(float(step))

    @property
    def end_point(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def end_value(self) -> float:
        return self.values[-1]

    def __len__(self):
        return len(self.iterates)

    def to_csv(self, path):
        with open(path, "w") as fh:
            dim = self.iterates[0].size if self.iterates else 0
            coords = ",".join(f"x{i}" for i in range(dim))
            fh.write(f"index,{coords},value,grad_norm,step_size\n")
            for k, x in enumerate(self.iterates):
                xs = ",".join(repr(float(c)) for c in x)
                fh.write(
                    f"{k},{xs},{self.values[k]!r},{self.grad_norms[k]!r},"
                    f"{self.step_sizes[k]!r}\n"
                )
            fh.write(f"termination,{self.termination.value}\n")


def _finite_vec(v) -> bool:
    return bool(np.all(np.isfinite(v)))


def _gradient(obj, x):
    """Gradient or None when it is unusable (wall stencils, overflow)."""
    try:
        g = obj.gradient(x)
    except StencilCrossesWall:
        return None
    return g if _finite_vec(g) else None


def _start(obj, x0, cfg, trace):
    """Record x0; return (x, value, grad) or a start-level termination."""
    x0 = np.asarray(x0, dtype=float)
    v0 = obj.value(x0)
    if obj.at_wall(x0) or not np.isfinite(v0):
        trace.append(x0, v0 if np.isfinite(v0) else np.inf, np.nan, 0.0)
        return Termination.WALL_START
    g0 = _gradient(obj, x0)
    if g0 is None:
        trace.append(x0, v0, np.nan, 0.0)
        return Termination.NON_FINITE
    gn0 = math.sqrt(float(g0 @ g0))
    trace.append(x0, v0, gn0, 0.0)
    if gn0 <= cfg.grad_tol:
        return Termination.STATIONARY_START
    return x0.copy(), v0, g0


def _fixed_step_loop(obj, x0, cfg, move) -> Trace:
    """Shared driver for the fixed-learning-rate methods."""
    trace = Trace()
    got = _start(obj, x0, cfg, trace)
    if isinstance(got, Termination):
        trace.termination = got
        return trace
    x, _, g = got
    for _ in range(cfg.max_iters):
        x = move(x, g)
        v = obj.value(x)
        if not np.isfinite(v):
            trace.append(x, np.inf, np.nan, cfg.learning_rate)
            trace.termination = Termination.NON_FINITE
            return trace
        g = _gradient(obj, x)
        gn = np.nan if g is None else math.sqrt(float(g @ g))
        trace.append(x, v, gn, cfg.learning_rate)
        if g is None:
            trace.termination = Termination.NON_FINITE
            return trace
        if gn <= cfg.grad_tol:
            trace.termination = Termination.GRAD_TOL
            return trace
    trace.termination = Termination.MAX_ITERS
    return trace


def gradient_descent(obj, x0, cfg: OptimizerConfig) -> Trace:
    """Fixed-step descent x <- x - lr * grad."""
    return _fixed_step_loop(obj, x0, cfg, lambda x, g: x - cfg.learning_rate * g)


def projected_gd(obj, x0, projector, cfg: OptimizerConfig) -> Trace:
    """x <- project(x - lr * grad) onto a closed convex constraint set."""

    def move(x, g):
        return np.asarray(projector(x - cfg.learning_rate * g), dtype=float)

    return _fixed_step_loop(obj, x0, cfg, move)


def _armijo(obj, x, fx, direction, slope, cfg, extra_ok=None):
    """Backtrack kappa = initial_step * beta^m; None if 60 halvings fail.

    slope is the predicted decrease rate <direction, grad>. extra_ok, when
    given, must also accept the trial point (constraint check).
    """
    kappa = cfg.initial_step
    for _ in range(MAX_HALVINGS + 1):
        trial = x - kappa * direction
        v = obj.value(trial)
        # f(x) - f(trial) >= c * kappa * slope, written so that a trial with
        # no representable decrease is rejected; False for inf/nan trials
        if fx - v >= cfg.armijo_c * kappa * slope:
            if extra_ok is None or extra_ok(trial):
                return kappa, trial, v
        kappa *= cfg.armijo_beta
    return None


def backtracking_gd(obj, x0, cfg: OptimizerConfig) -> Trace:
    """Armijo backtracking on the steepest-descent direction."""
    trace = Trace()
    got = _start(obj, x0, cfg, trace)
    if isinstance(got, Termination):
        trace.termination = got
        return trace
    x, fx, g = got
    for _ in range(cfg.max_iters):
        gn = math.sqrt(float(g @ g))
        hit = _armijo(obj, x, fx, g, gn * gn, cfg)
        if hit is None:
            trace.termination = Termination.LINE_SEARCH_FAILURE
            return trace
        kappa, x, fx = hit
        g = _gradient(obj, x)
        gn = np.nan if g is None else math.sqrt(float(g @ g))
        trace.append(x, fx, gn, kappa)
        if g is None:
            trace.termination = Termination.NON_FINITE
            return trace
        if gn <= cfg.grad_tol:
            trace.termination = Termination.GRAD_TOL
            return trace
    trace.termination = Termination.MAX_ITERS
    return trace


def _direction(obj, x, g, cfg):
    """(w, None) on success, else (None, failure Termination)."""
    try:
        h = obj.hessian(x)
    except StencilCrossesWall:
        return None, Termination.NON_FINITE
    if not _finite_vec(h):
        return None, Termination.NON_FINITE
    gn = math.sqrt(float(g @ g))
    shift = gn ** (1.0 + cfg.alpha_exponent)
    h_scale = 1.0 + float(np.sqrt(np.sum(h * h)))
    eye = np.eye(obj.dim)
    for delta in cfg.deltas(obj.dim):
        a = h + (delta * shift) * eye
        eig = jacobi_eigen(a)
        if float(np.min(np.abs(eig.eigenvalues))) > 1e-12 * h_scale:
            coeff = eig.eigenvectors.T @ g
            w = eig.eigenvectors @ (coeff / np.abs(eig.eigenvalues))
            if cfg.step_cap is not None:
                wn = math.sqrt(float(w @ w))
                if wn > cfg.step_cap:
                    w = w * (cfg.step_cap / wn)
            return w, None
    return None, Termination.LINE_SEARCH_FAILURE


def bnqn_direction(obj, x, cfg: OptimizerConfig):
    """Safeguarded Newton direction at x.

    Shift the Hessian by the first delta_j * |grad|^(1+alpha) making it
    invertible, flip the Newton step's components on negative-eigenvalue
    subspaces so it descends, and cap the length at cfg.step_cap.

    Returns (w, g) with <w, g> > 0 whenever g != 0; w is None when no
    usable direction exists, and g is None too when the gradient itself is
    unusable.
    """
    g = _gradient(obj, x)
    if g is None:
        return None, None
    w, _ = _direction(obj, x, g, cfg)
    return w, g


def _bnqn_loop(obj, x0, cfg, extra_ok=None) -> Trace:
    trace = Trace()
    got = _start(obj, x0, cfg, trace)
    if isinstance(got, Termination):
        trace.termination = got
        return trace
    x, fx, g = got
    for _ in range(cfg.max_iters):
        w, fail = _direction(obj, x, g, cfg)
        if w is None:
            trace.termination = fail
            return trace
        slope = float(np.dot(w, g))
        hit = _armijo(obj, x, fx, w, slope, cfg, extra_ok=extra_ok)
        if hit is None:
            trace.termination = Termination.LINE_SEARCH_FAILURE
            return trace
        kappa, x, fx = hit
        g = _gradient(obj, x)
        gn = np.nan if g is None else math.sqrt(float(g @ g))
        trace.append(x, fx, gn, kappa)
        if g is None:
            trace.termination = Termination.NON_FINITE
            return trace
        if gn <= cfg.grad_tol:
            trace.termination = Termination.GRAD_TOL
            return trace
    trace.termination = Termination.MAX_ITERS
    return trace


def bnqn(obj, x0, cfg: OptimizerConfig) -> Trace:
    """Backtracking safeguarded Newton run; descent and saddle avoidance."""
    return _bnqn_loop(obj, x0, cfg)


def armijo_with_constraints(obj, x0, constraint, cfg: OptimizerConfig) -> Trace:
    """Newton-type run whose line search also requires constraint(trial).

    The step is halved while either the Armijo test or the constraint fails,
    so every iterate satisfies the constraint.
    """
    if not constraint(np.asarray(x0, dtype=float)):
        raise ValueError("constraint violated at the starting point")
    return _bnqn_loop(obj, x0, cfg, extra_ok=constraint)
