import math

import numpy as np
import pytest

from wallopt.numerics import StencilCrossesWall, fd_gradient, fd_hessian, jacobi_eigen

from oracles import char_poly_eigenvalues


def reconstruct(eig):
    return eig.eigenvectors @ np.diag(eig.eigenvalues) @ eig.eigenvectors.T


def test_eigen_identity():
    eig = jacobi_eigen(np.eye(3))
    assert np.allclose(eig.eigenvalues, [1.0, 1.0, 1.0], atol=0)
    assert np.max(np.abs(eig.eigenvectors.T @ eig.eigenvectors - np.eye(3))) <= 1e-12


def test_eigen_diagonal():
    eig = jacobi_eigen(np.diag([2.0, -3.0]))
    assert eig.eigenvalues.tolist() == [2.0, -3.0]
    assert np.allclose(np.abs(eig.eigenvectors), np.eye(2), atol=0)


def test_eigen_against_char_poly_oracle():
    rng = np.random.default_rng(42)
    a = rng.normal(size=(5, 5))
    m = a + a.T
    eig = jacobi_eigen(m)
    oracle = char_poly_eigenvalues(m)
    assert np.max(np.abs(np.array(oracle) - eig.eigenvalues)) <= 1e-9


def test_eigen_rejects_bad_input():
    with pytest.raises(ValueError, match="non-finite matrix"):
        jacobi_eigen(np.array([[1.0, np.inf], [np.inf, 1.0]]))
    with pytest.raises(ValueError, match="not symmetric"):
        jacobi_eigen(np.array([[1.0, 2.0], [2.0 + 1e-12, 1.0]]))


def test_eigen_fuzz_roundtrip():
    # round-trip and orthonormality bounds over all small dimensions
    rng = np.random.default_rng(7)
    for dim in range(1, 17):
        for _ in range(8):
            scale = 10.0 ** rng.integers(-3, 4)
            a = rng.normal(size=(dim, dim)) * scale
            m = a + a.T
            eig = jacobi_eigen(m)
            err = np.max(np.abs(reconstruct(eig) - m))
            assert err <= 1e-10 * (1.0 + np.max(np.abs(m)))
            ortho = np.max(
                np.abs(eig.eigenvectors.T @ eig.eigenvectors - np.eye(dim))
            )
            assert ortho <= 1e-12
            assert np.all(np.diff(eig.eigenvalues) <= 0)


def test_eigen_deterministic():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4))
    m = a + a.T
    e1 = jacobi_eigen(m)
    e2 = jacobi_eigen(m)
    assert np.array_equal(e1.eigenvalues, e2.eigenvalues)
    assert np.array_equal(e1.eigenvectors, e2.eigenvectors)


def test_fd_gradient_square():
    g = fd_gradient(lambda x: x[0] ** 2, np.array([3.0]), h=1e-6)
    assert abs(g[0] - 6.0) <= 1e-6


def test_fd_gradient_two_well_matches_hand_derivative():
    # hand-differentiated oracle for -x*y*exp(-x^2-y^2) + y^2/2
    def f(v):
        return -v[0] * v[1] * math.exp(-(v[0] ** 2 + v[1] ** 2)) + 0.5 * v[1] ** 2

    x = np.array([0.5, -0.5])
    e = math.exp(-(x[0] ** 2 + x[1] ** 2))
    hand = np.array(
        [
            -x[1] * e * (1.0 - 2.0 * x[0] ** 2),
            -x[0] * e * (1.0 - 2.0 * x[1] ** 2) + x[1],
        ]
    )
    g = fd_gradient(f, x)
    assert np.max(np.abs(g - hand)) <= 1e-5 * (1.0 + np.max(np.abs(hand)))


def test_fd_gradient_constant():
    g = fd_gradient(lambda x: 4.25, np.array([1.0, -2.0, 3.0]))
    assert np.array_equal(g, np.zeros(3))


def test_fd_gradient_wall_stencil():
    def f(x):
        return float("inf") if x[0] > 1.0 else x[0]

    with pytest.raises(StencilCrossesWall):
        fd_gradient(f, np.array([1.0]))


def test_fd_hessian_bilinear():
    h = fd_hessian(lambda x: x[0] * x[1], np.array([1.0, 2.0]))
    assert np.max(np.abs(h - np.array([[0.0, 1.0], [1.0, 0.0]]))) <= 1e-4


def test_fd_hessian_quadratic_exact():
    q = np.array([[2.0, 0.5], [0.5, 1.0]])
    h = fd_hessian(lambda x: 0.5 * x @ q @ x, np.array([0.3, -1.7]))
    assert np.max(np.abs(h - q)) <= 1e-6 * (1.0 + np.max(np.abs(q)))


def test_fd_hessian_indefinite_quadratic():
    # hand differentiation of -2(x-1/4)^2 + 2(y-1/2)^2
    def f(v):
        return -2.0 * (v[0] - 0.25) ** 2 + 2.0 * (v[1] - 0.5) ** 2

    for point in ([0.0, 0.0], [1.3, -2.0], [0.25, 0.5]):
        h = fd_hessian(f, np.array(point))
        assert np.max(np.abs(h - np.diag([-4.0, 4.0]))) <= 1e-6


def test_fd_hessian_exactly_symmetric():
    rng = np.random.default_rng(5)

    def f(v):
        return math.sin(v[0]) * v[1] ** 2 + math.exp(0.3 * v[0] * v[2])

    for _ in range(5):
        h = fd_hessian(f, rng.normal(size=3))
        assert np.array_equal(h, h.T)
