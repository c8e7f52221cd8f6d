"""Tolerance-aware dense linear algebra: rank decisions, pseudoinverses,
null-space bases and antisymmetric solves.

All downstream constructions funnel their rank and equality decisions
through this module so that one set of cutoffs governs the whole pipeline.

Index convention used throughout the package: an object ``X^a_b`` is stored
with ``a`` as the row index and ``b`` as the column index, so index
contractions become left-to-right matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class InvalidInputError(ValueError):
    """Raised for non-finite or dimensionally inconsistent inputs."""


class NoSolutionError(RuntimeError):
    """Raised when a linear matrix equation is infeasible at tolerance.

    Carries the achieved residual in ``residual``.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Tolerance:
    """Numerical cutoffs for the constraint pipeline.

    rank_rel
        Relative singular-value cutoff for rank decisions.
    weak_eq
        Residual threshold for equalities that hold only on the
        constraint surface.
    surface
        Constraint-satisfaction threshold for points accepted as
        on-surface.
    """

    rank_rel: float = 1e-10
    weak_eq: float = 1e-8
    surface: float = 1e-10

    def __post_init__(self):
        for name in ("rank_rel", "weak_eq", "surface"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise InvalidInputError(f"{name} must lie in (0, 1), got {v}")
        if self.rank_rel > self.weak_eq:
            raise InvalidInputError(
                "rank_rel must not exceed weak_eq "
                f"({self.rank_rel} > {self.weak_eq})"
            )


DEFAULT_TOL = Tolerance()


def check_finite(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return m


def weak_equal(a: np.ndarray, b: np.ndarray, tol: Tolerance) -> bool:
    """Scale-aware equality: residual <= weak_eq * (1 + larger norm)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = 1.0 + max(np.linalg.norm(a), np.linalg.norm(b))
    return float(np.linalg.norm(a - b)) <= tol.weak_eq * scale


def rel_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Residual of ``a == b`` relative to 1 + the larger operand norm."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = 1.0 + max(np.linalg.norm(a), np.linalg.norm(b))
    return float(np.linalg.norm(a - b)) / scale


def rank_tol(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values above rank_rel * sigma_max."""
    m = check_finite(m)
    if m.size == 0:
        return 0
    s = scipy.linalg.svdvals(m)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def pseudoinverse(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the shared rank cutoff."""
    m = check_finite(m)
    if m.size == 0:
        return m.T.copy()
    return np.linalg.pinv(m, rcond=tol.rank_rel)


def null_basis(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical right null space, as columns.

    Column count equals ``cols(m) - rank_tol(m)``.
    """
    m = check_finite(m)
    if m.shape[0] == 0 or not m.any():
        return np.eye(m.shape[1])
    _, s, vt = np.linalg.svd(m)
    r = int(np.sum(s > tol.rank_rel * s[0])) if s.size else 0
    return vt[r:].T.copy()


def skew_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m - m.T)


def is_antisymmetric(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    scale = 1.0 + np.linalg.norm(m)
    return float(np.linalg.norm(m + m.T)) <= tol.weak_eq * scale


def symplectic_block(n: int) -> np.ndarray:
    """Canonical antisymmetric invertible matrix [[0, I], [-I, 0]] of size n.

    Requires even n: odd-dimensional antisymmetric matrices are singular.
    """
    if n % 2 != 0:
        raise InvalidInputError(
            f"no invertible antisymmetric matrix exists in odd dimension {n}"
        )
    half = n // 2
    j = np.zeros((n, n))
    j[:half, half:] = np.eye(half)
    j[half:, :half] = -np.eye(half)
    return j


def range_projector(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the numerical column space of m."""
    m = check_finite(m)
    if not m.any():
        return np.zeros((m.shape[0], m.shape[0]))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > tol.rank_rel * s[0]))
    ur = u[:, :r]
    return ur @ ur.T


def skew_solve(
    c: np.ndarray, target: np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Antisymmetric solution M of ``M @ c ~= target``.

    ``c`` must be square and antisymmetric to within weak_eq.  When the
    target is (numerically) the orthogonal projector onto range(c), the
    canonical representative pinv(c) is returned; otherwise the system is
    solved in least-squares sense over the space of antisymmetric matrices.
    The result is exactly antisymmetric.  Raises NoSolutionError when the
    best residual exceeds ``weak_eq * (1 + |target|)``.
    """
    c = check_finite(c, "c")
    target = check_finite(target, "target")
    n = c.shape[0]
    if c.shape != (n, n) or target.shape != (n, n):
        raise InvalidInputError("skew_solve needs square matrices of one size")
    if not is_antisymmetric(c, tol):
        raise InvalidInputError("c is not antisymmetric within weak_eq")

    scale = 1.0 + np.linalg.norm(target)

    proj = range_projector(c, tol)
    if np.linalg.norm(proj - target) <= tol.weak_eq * scale:
        m = skew_part(pseudoinverse(c, tol))
        return m

    # Least squares over antisymmetric M: unknowns m_ij for i < j.
    # Row equation (M c)_{ik} = sum_j M_ij c_jk.
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if len(pairs) > 4000:
        raise InvalidInputError(
            "general antisymmetric solve is limited to small systems; "
            "target does not match the range projector of c"
        )
    a = np.zeros((n * n, len(pairs)))
    for col, (i, j) in enumerate(pairs):
        # M_ij = +x contributes x * c[j, :] to row block i,
        # M_ji = -x contributes -x * c[i, :] to row block j.
        a[i * n:(i + 1) * n, col] += c[j, :]
        a[j * n:(j + 1) * n, col] -= c[i, :]
    x, *_ = np.linalg.lstsq(a, target.reshape(-1), rcond=None)
    m = np.zeros((n, n))
    for col, (i, j) in enumerate(pairs):
        m[i, j] = x[col]
        m[j, i] = -x[col]
    residual = float(np.linalg.norm(m @ c - target))
    if residual > tol.weak_eq * scale:
        raise NoSolutionError("target is not reachable as M @ c", residual)
    return m
