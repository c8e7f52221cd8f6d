import numpy as np
import pytest

from diracred.numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    NoSolutionError,
    Tolerance,
    is_antisymmetric,
    null_basis,
    pseudoinverse,
    range_projector,
    rank_tol,
    rel_residual,
    skew_part,
    skew_solve,
    symplectic_block,
    weak_equal,
)


def test_tolerance_validation():
    with pytest.raises(InvalidInputError):
        Tolerance(rank_rel=0.0)
    with pytest.raises(InvalidInputError):
        Tolerance(weak_eq=1.5)
    with pytest.raises(InvalidInputError):
        Tolerance(rank_rel=1e-6, weak_eq=1e-8)
    t = Tolerance(rank_rel=1e-12, weak_eq=1e-6, surface=1e-9)
    assert t.rank_rel == 1e-12


def test_rank_tol_detects_numerical_rank():
    rng = np.random.default_rng(0)
    u = rng.standard_normal((8, 3))
    v = rng.standard_normal((3, 8))
    m = u @ v
    assert rank_tol(m) == 3
    assert rank_tol(np.zeros((4, 4))) == 0
    assert rank_tol(np.eye(5)) == 5


def test_pseudoinverse_moore_penrose():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((6, 4))
    p = pseudoinverse(m)
    assert np.allclose(m @ p @ m, m, atol=1e-12)
    assert np.allclose(p @ m @ p, p, atol=1e-12)


def test_null_basis_orthonormal_and_complete():
    m = np.array([[1.0, 1.0, 0.0, 0.0]])
    nb = null_basis(m)
    assert nb.shape == (4, 3)
    assert np.allclose(m @ nb, 0.0, atol=1e-14)
    assert np.allclose(nb.T @ nb, np.eye(3), atol=1e-14)
    # zero matrix: the whole space is the null space
    assert null_basis(np.zeros((2, 3))).shape == (3, 3)


def test_symplectic_block():
    j = symplectic_block(4)
    assert np.allclose(j @ j, -np.eye(4))
    assert is_antisymmetric(j)
    with pytest.raises(InvalidInputError):
        symplectic_block(3)


def test_range_projector_idempotent():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((5, 2))
    p = range_projector(m)
    assert np.allclose(p @ p, p, atol=1e-12)
    assert np.allclose(p @ m, m, atol=1e-12)
    assert rank_tol(p) == 2


def test_skew_solve_projector_path():
    # c antisymmetric of rank 4 inside a 6-dim space
    rng = np.random.default_rng(3)
    b = rng.standard_normal((6, 4))
    c = b @ symplectic_block(4) @ b.T
    target = range_projector(c)
    m = skew_solve(c, target)
    assert np.allclose(m, -m.T, atol=1e-14)
    assert np.linalg.norm(m @ c - target) < 1e-9


def test_skew_solve_general_path_and_failure():
    c = symplectic_block(4)
    target = 0.5 * np.eye(4)
    m = skew_solve(c, target)
    assert np.allclose(m @ c, target, atol=1e-9)
    assert np.allclose(m, -m.T, atol=1e-14)
    with pytest.raises(NoSolutionError):
        # M @ 0 can never reach the identity
        skew_solve(np.zeros((2, 2)), np.eye(2))


def test_skew_solve_input_checks():
    with pytest.raises(InvalidInputError):
        skew_solve(np.eye(3), np.eye(3))
    with pytest.raises(InvalidInputError):
        skew_solve(symplectic_block(2), np.eye(4))


def test_weak_equal_and_rel_residual_scale_aware():
    a = np.eye(3) * 1e6
    b = a + 1e-4
    # absolute difference is large-ish but relative to the scale it passes
    assert rel_residual(a, b) < 1e-9
    assert weak_equal(a, b, DEFAULT_TOL)
    assert not weak_equal(np.zeros(3), np.ones(3), DEFAULT_TOL)


def test_skew_part():
    m = np.arange(9.0).reshape(3, 3)
    s = skew_part(m)
    assert np.allclose(s, -s.T)
    assert np.allclose(s + 0.5 * (m + m.T), m)
