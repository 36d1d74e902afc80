import math

import numpy as np
import pytest

from wallopt.avoidance import FinitePoints, HyperplaneBoundary, constant_wall, pole_wall
from wallopt.functions import Objective, builtin
from wallopt.optimizers import (
    OptimizerConfig,
    Termination,
    armijo_with_constraints,
    backtracking_gd,
    bnqn,
    bnqn_direction,
    gradient_descent,
    projected_gd,
)

def quadratic(q):
    q = np.asarray(q, dtype=float)
    return Objective(
        q.shape[0],
        lambda x: 0.5 * float(x @ q @ x),
        lambda x: q @ x,
        lambda x: q.copy(),
        name="quadratic",
    )


def test_gd_geometric_decay():
    obj = quadratic(np.eye(2))
    tr = gradient_descent(obj, [1.0, 0.0], OptimizerConfig(learning_rate=0.1))
    assert tr.termination == Termination.GRAD_TOL
    for k in (1, 2, 3):
        assert tr.iterates[k][0] == pytest.approx(0.9**k, rel=1e-12)
        assert tr.iterates[k][1] == 0.0


def test_gd_constant_function_stationary_start():
    obj = Objective(2, lambda x: 1.5)
    tr = gradient_descent(obj, [0.3, 0.4], OptimizerConfig())
    assert tr.termination == Termination.STATIONARY_START
    assert len(tr) == 1


def test_bgd_quadratic_one_step():
    obj = quadratic(np.eye(1))
    tr = backtracking_gd(obj, [1.0], OptimizerConfig())
    assert tr.step_sizes[1] == 1.0
    assert tr.iterates[1][0] == 0.0
    assert tr.termination == Termination.GRAD_TOL


def test_bgd_wall_shrinks_step():
    # full step would land on the wall plateau; kappa halves until it stays
    base = quadratic(np.eye(1))
    wall = constant_wall(base, lambda x: x[0] > 0.25, 1000.0)
    tr = backtracking_gd(wall, [1.0], OptimizerConfig(max_iters=5))
    assert all(x[0] > 0.25 for x in tr.iterates)
    assert all(v < 1000.0 for v in tr.values)
    assert tr.step_sizes[1] < 1.0


def test_bnqn_quadratic_newton_step():
    obj = quadratic(np.diag([1.0, 2.0]))
    tr = bnqn(obj, [1.0, 1.0], OptimizerConfig(step_cap=None))
    assert len(tr) == 2
    assert np.array_equal(tr.iterates[1], np.zeros(2))
    assert tr.step_sizes[1] == 1.0
    assert tr.termination == Termination.GRAD_TOL


def test_bnqn_sign_flip_descends_saddle():
    obj = quadratic(np.diag([1.0, -1.0]))
    w, g = bnqn_direction(obj, np.array([1.0, 1.0]), OptimizerConfig(step_cap=None))
    assert np.allclose(w, [1.0, -1.0])  # flipped second component
    assert float(w @ g) > 0.0
    tr = bnqn(obj, [1.0, 1.0], OptimizerConfig(step_cap=None, max_iters=50))
    assert tr.values[1] < tr.values[0]


def test_bnqn_direction_positivity_random():
    obj = builtin("example1")
    cfg = OptimizerConfig()
    rng = np.random.default_rng(12)
    for _ in range(200):
        x = rng.uniform(-2, 2, size=2)
        w, g = bnqn_direction(obj, x, cfg)
        if w is None or float(np.linalg.norm(g)) <= cfg.grad_tol:
            continue
        assert float(w @ g) > 0.0


def test_bnqn_step_cap():
    obj = quadratic(np.diag([1e-6, 1e-6]))  # huge Newton step
    cfg = OptimizerConfig(step_cap=0.5)
    w, _ = bnqn_direction(obj, np.array([3.0, 4.0]), cfg)
    assert np.linalg.norm(w) <= 0.5 + 1e-12


def test_bnqn_delta_sequence_validation():
    obj = quadratic(np.eye(2))
    with pytest.raises(ValueError, match="distinct"):
        bnqn(obj, [1.0, 1.0], OptimizerConfig(delta_sequence=(0.0, 0.0)))


def test_bnqn_zero_hessian_uses_shift():
    # LP-style flat objective: the shifted matrix gives a normalized step
    obj = Objective(
        2,
        lambda x: -40.0 * x[0] - 30.0 * x[1],
        lambda x: np.array([-40.0, -30.0]),
        lambda x: np.zeros((2, 2)),
    )
    w, g = bnqn_direction(obj, np.array([0.0, 0.0]), OptimizerConfig())
    assert np.allclose(w, g / 2500.0)


def test_descent_invariant_exact():
    runs = [
        (backtracking_gd, builtin("example1"), [1.3, -0.4]),
        (bnqn, builtin("example1"), [1.3, -0.4]),
        (bnqn, builtin("example4"), [-0.9, 0.1]),
        (bnqn, builtin("example2_modulus"), [2.0, 2.0]),
    ]
    for method, obj, x0 in runs:
        tr = method(obj, x0, OptimizerConfig())
        vals = tr.values
        assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_wall_start():
    base = builtin("example1")
    wall = constant_wall(base, lambda x: x[0] + x[1] <= 0.0, 1000.0)
    tr = bnqn(wall, [0.5, 0.5], OptimizerConfig())
    assert tr.termination == Termination.WALL_START
    pole = pole_wall(base, FinitePoints([[0.3, 0.4]]), 2, 0.0)
    tr2 = bnqn(pole, [0.3, 0.4], OptimizerConfig())
    assert tr2.termination == Termination.WALL_START


def test_constant_wall_avoidance():
    base = builtin("example1")
    allowed = lambda x: x[0] + x[1] <= 0.0
    wall = constant_wall(base, allowed, 1000.0)
    rng = np.random.default_rng(5)
    for _ in range(25):
        x0 = rng.uniform(-2, 2, size=2)
        if not allowed(x0):
            continue
        tr = bnqn(wall, x0, OptimizerConfig())
        assert max(tr.values) < 1000.0
        assert all(allowed(x) for x in tr.iterates)


def test_pole_confinement_with_step_cap():
    # with a step bound and a start below the wall's surroundings, iterates
    # stay in the starting component of the cut plane
    base = builtin("example1")
    line = HyperplaneBoundary([1.0, 1.0], 0.0, scale=1.0)
    wall = pole_wall(base, line, 1, -0.0727280)
    x0 = np.array([-0.3, -0.1])
    cfg = OptimizerConfig(step_cap=0.1)
    rng = np.random.default_rng(17)
    pts = rng.uniform(-3.0, 3.0, size=(200000, 2))
    strip = pts[np.abs(pts.sum(axis=1)) <= 0.1]
    strip_inf = min(wall.value(p) for p in strip)
    assert wall.value(x0) < strip_inf
    tr = bnqn(wall, x0, cfg)
    assert all(x[0] + x[1] < 0.0 for x in tr.iterates)
    assert all(
        np.linalg.norm(b - a) < 0.1 + 1e-12
        for a, b in zip(tr.iterates, tr.iterates[1:])
    )


def test_critical_point_preservation():
    base = builtin("example1")
    wall = constant_wall(base, lambda x: x[0] + x[1] <= 0.0, 1000.0)
    rng = np.random.default_rng(23)
    for _ in range(100):
        x = rng.uniform(-2, 2, size=2)
        if x[0] + x[1] <= 0.0:
            assert np.array_equal(wall.gradient(x), base.gradient(x))


def test_projected_gd_closed_form_projection():
    # projection onto the half-plane x+y<=0
    def proj(x):
        s = x[0] + x[1]
        return x - max(0.0, 0.5 * s) * np.ones(2)

    assert np.allclose(proj(np.array([1.0, 1.0])), [0.0, 0.0])
    assert np.array_equal(proj(np.array([-1.0, 0.5])), [-1.0, 0.5])
    # interior point: identical to a plain descent step
    obj = builtin("example1")
    cfg = OptimizerConfig(learning_rate=0.01, max_iters=1)
    a = gradient_descent(obj, [-1.0, -0.5], cfg).iterates[1]
    b = projected_gd(obj, [-1.0, -0.5], proj, cfg).iterates[1]
    assert np.array_equal(a, b)


def test_projected_gd_converges_to_saddle():
    obj = builtin("example1")

    def proj(x):
        s = x[0] + x[1]
        return x - max(0.0, 0.5 * s) * np.ones(2)

    cfg = OptimizerConfig(learning_rate=0.1, max_iters=100000, grad_tol=1e-9)
    tr = projected_gd(obj, [0.5, -0.5], proj, cfg)
    assert np.linalg.norm(tr.end_point) <= 1e-6


def test_armijo_constrained_unconstrained_equals_bnqn():
    obj = builtin("example1")
    cfg = OptimizerConfig()
    a = bnqn(obj, [1.1, 0.4], cfg)
    b = armijo_with_constraints(obj, [1.1, 0.4], lambda x: True, cfg)
    assert a.termination == b.termination
    assert all(np.array_equal(p, q) for p, q in zip(a.iterates, b.iterates))


def test_armijo_constrained_keeps_constraint():
    obj = builtin("example1")
    con = lambda x: x[0] + x[1] <= 0.0
    tr = armijo_with_constraints(obj, [0.5, -0.5003], con, OptimizerConfig())
    assert all(con(x) for x in tr.iterates)


def test_armijo_constrained_rejects_bad_start():
    obj = builtin("example1")
    with pytest.raises(ValueError, match="constraint violated"):
        armijo_with_constraints(obj, [1.0, 1.0], lambda x: x[0] < 0, OptimizerConfig())


def test_nonfinite_termination():
    obj = Objective(1, lambda x: float("nan") if x[0] < 0 else x[0] ** 0.5)
    tr = gradient_descent(obj, [0.04], OptimizerConfig(learning_rate=10.0))
    assert tr.termination == Termination.NON_FINITE


def test_trace_csv_roundtrip(tmp_path):
    obj = builtin("example1")
    tr = bnqn(obj, [1.0, 0.3], OptimizerConfig())
    path = tmp_path / "trace.csv"
    tr.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,x0,x1,value,grad_norm,step_size"
    assert lines[-1] == "termination,GradTol"
    assert len(lines) == len(tr) + 2
    row = lines[1].split(",")
    assert float(row[1]) == 1.0 and float(row[2]) == 0.3


def test_config_roundtrip():
    cfg = OptimizerConfig(method="bgd", step_cap=None, delta_sequence=(0.0, 1.5, 3.0))
    back = OptimizerConfig.from_dict(cfg.to_dict())
    assert back == cfg
