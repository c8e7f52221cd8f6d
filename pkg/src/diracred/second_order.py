"""Second-order reducible machinery: derived projectors, the mutually
inverse omega-tilde pair, and the invertible mu matrix with its explicit
inverse.

Conventions for shapes, with M0 constraints, M1 first-level and M2
second-level reducibility directions:

- c2: M0 x M0 constraint bracket matrix
- a12: M1 x M2 (defaults to Z2 itself)
- dbar2: M2 x M2, inverse of Z2^T a12
- d11: M1 x M1 projector complementary to the Z2 directions
- abar01: M1 x M0 with abar01 @ Z1 ~= d11
- d00: M0 x M0 projector, I - Z1 @ abar01
- m2: M0 x M0 antisymmetric, m2 @ c2 ~= d00
- omega_low / omega_up: M1 x M1 mutually inverse antisymmetric pair
- mu2 / mu2_inv: M0 x M0 invertible antisymmetric pair
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .constraints import ConstraintSet
from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    NoSolutionError,
    Tolerance,
    check_finite,
    is_antisymmetric,
    pseudoinverse,
    rank_tol,
    rel_residual,
    skew_part,
    skew_solve,
    symplectic_block,
)
from .phase import PhaseFunction


@dataclass(frozen=True)
class SecondOrderArtifacts:
    c2: np.ndarray
    a12: np.ndarray
    dbar2: np.ndarray
    d11: np.ndarray
    abar01: np.ndarray
    d00: np.ndarray
    m2: np.ndarray
    point: np.ndarray
    omega_bar: Optional[np.ndarray] = None
    omega_hat: Optional[np.ndarray] = None
    omega_low: Optional[np.ndarray] = None
    omega_up: Optional[np.ndarray] = None
    mu2: Optional[np.ndarray] = None
    mu2_inv: Optional[np.ndarray] = None
    residuals: Optional[dict] = None


def _check(residuals: dict, name: str, value: float, limit: float) -> None:
    residuals[name] = float(value)
    if value > limit:
        raise NoSolutionError(
            f"construction identity {name} failed", float(value)
        )


def second_order_artifacts(
    cs: ConstraintSet,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    a12: Optional[np.ndarray] = None,
    abar01: Optional[np.ndarray] = None,
) -> SecondOrderArtifacts:
    """Build the full derived-matrix bundle at one on-surface point.

    Defaults pick canonical representatives: a12 = Z2 (making Z2^T a12
    symmetric positive definite) and abar01 the minimum-norm solution of
    abar01 @ Z1 = d11, under which d11 and d00 are orthogonal projectors.
    Every defining identity is checked and a failure raises rather than
    returning a silently broken bundle.
    """
    if cs.order != 2:
        raise InvalidInputError("second-order pipeline needs an order-2 system")
    if cs.m1 % 2 or cs.m2 % 2:
        raise InvalidInputError("M1 and M2 must be even")
    at = cs.spec.point(at)
    cs.require_on_surface(at, tol)
    z1 = cs.z1_at(at)
    z2 = cs.z2_at(at)
    residuals: dict = {}

    red2 = np.linalg.norm(z1 @ z2) / (
        1.0 + np.linalg.norm(z1) * np.linalg.norm(z2)
    )
    _check(residuals, "eq_11x", red2, tol.weak_eq)

    g = cs.gradients(at)
    c2 = g.T @ cs.spec.poisson @ g
    _check(
        residuals, "eq_11e",
        rel_residual(z1.T @ c2, np.zeros_like(z1.T @ c2)), tol.weak_eq,
    )

    if a12 is None:
        a12 = z2.copy()
    a12 = check_finite(a12, "a12")
    if a12.shape != (cs.m1, cs.m2):
        raise InvalidInputError("a12 must be M1 x M2")
    d2 = z2.T @ a12
    if rank_tol(d2, tol) != cs.m2:
        raise InvalidInputError("Z2^T a12 must have full rank M2")
    dbar2 = np.linalg.inv(d2)
    d11 = np.eye(cs.m1) - a12 @ dbar2 @ z2.T
    # defining relation for the level-2 left inverse
    abar12 = a12 @ dbar2.T
    _check(
        residuals, "eq_a2", rel_residual(z2.T @ abar12, np.eye(cs.m2)),
        tol.weak_eq,
    )
    _check(residuals, "eq_ay", rel_residual(d11 @ d11, d11), tol.weak_eq)
    _check(
        residuals, "eq_a8",
        rel_residual(dbar2 @ a12.T @ d11, np.zeros((cs.m2, cs.m1))),
        tol.weak_eq,
    )

    if abar01 is None:
        abar01 = d11 @ pseudoinverse(z1, tol)
    abar01 = check_finite(abar01, "abar01")
    if abar01.shape != (cs.m1, cs.m0):
        raise InvalidInputError("abar01 must be M1 x M0")
    res_1qa = rel_residual(abar01 @ z1, d11)
    if res_1qa > tol.weak_eq:
        raise NoSolutionError(
            "abar01 @ Z1 = d11 is infeasible at tolerance", res_1qa
        )
    residuals["eq_1qa"] = res_1qa
    d00 = np.eye(cs.m0) - z1 @ abar01
    _check(residuals, "eq_15", rel_residual(d00 @ d00, d00), tol.weak_eq)
    _check(
        residuals, "eq_17",
        rel_residual(abar01 @ d00, np.zeros_like(abar01)), tol.weak_eq,
    )
    _check(
        residuals, "eq_12k",
        rel_residual(abar01 @ z1 @ a12, np.zeros((cs.m1, cs.m2))),
        tol.weak_eq,
    )
    _check(
        residuals, "eq_12b",
        rel_residual(d00 @ z1, z1 @ a12 @ dbar2 @ z2.T), tol.weak_eq,
    )

    m2 = skew_solve(c2, d00, tol)
    _check(residuals, "eq_11c", rel_residual(m2 @ c2, d00), tol.weak_eq)

    return SecondOrderArtifacts(
        c2=c2, a12=a12, dbar2=dbar2, d11=d11, abar01=abar01, d00=d00,
        m2=m2, point=at, residuals=residuals,
    )


def omega_tilde_pair(
    art: SecondOrderArtifacts,
    seed_low: Optional[np.ndarray] = None,
    seed2: Optional[np.ndarray] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> SecondOrderArtifacts:
    """Install the mutually inverse antisymmetric pair on the M1 space.

    omega_low restricts an invertible antisymmetric seed to the range of
    d11 and fills the complementary Z2 block with a second seed;
    omega_up does the same with the pseudoinverse restriction and the
    inverse seed, making the two weakly inverse to each other.
    """
    m1 = art.d11.shape[0]
    m2 = art.a12.shape[1]
    if seed_low is None:
        seed_low = symplectic_block(m1)
    if seed2 is None:
        seed2 = symplectic_block(m2)
    seed_low = check_finite(seed_low, "seed_low")
    seed2 = check_finite(seed2, "seed2")
    if seed_low.shape != (m1, m1) or not is_antisymmetric(seed_low, tol):
        raise InvalidInputError("seed_low must be antisymmetric of size M1")
    if seed2.shape != (m2, m2) or not is_antisymmetric(seed2, tol):
        raise InvalidInputError("seed2 must be antisymmetric of size M2")
    if rank_tol(seed2, tol) != m2:
        raise InvalidInputError("seed2 must be invertible")

    omega_bar = art.d11.T @ seed_low @ art.d11
    if rank_tol(omega_bar, tol) != m1 - m2:
        raise NoSolutionError(
            "restricted seed is rank deficient, reseed required",
            float(rank_tol(omega_bar, tol)),
        )
    omega_hat = art.d11 @ pseudoinverse(omega_bar, tol) @ art.d11
    # enforce exact antisymmetry against rounding
    omega_bar = skew_part(omega_bar)
    omega_hat = skew_part(omega_hat)

    p2 = art.dbar2 @ art.a12.T  # maps the M1 space onto the M2 labels
    z2 = art.a12  # with the default choice a12 is Z2 itself
    omega_low = omega_bar + p2.T @ seed2 @ p2
    omega_up = omega_hat + z2 @ np.linalg.inv(seed2) @ z2.T

    residuals = dict(art.residuals or {})
    res_a3 = rel_residual(omega_hat @ omega_bar, art.d11)
    residuals["eq_a3"] = res_a3
    res_a18 = rel_residual(omega_up @ art.d11 @ omega_low, art.d11)
    res_a18a = rel_residual(omega_up @ omega_low, np.eye(m1))
    residuals["eq_a18"] = res_a18
    residuals["eq_a18a"] = res_a18a
    for name, v in (("eq_a3", res_a3), ("eq_a18", res_a18),
                    ("eq_a18a", res_a18a)):
        if v > tol.weak_eq:
            raise NoSolutionError(f"omega pair identity {name} failed", v)
    if rank_tol(omega_low, tol) != m1 or rank_tol(omega_up, tol) != m1:
        raise NoSolutionError(
            "omega pair is not invertible, reseed required", float(m1)
        )
    return replace(
        art, omega_bar=omega_bar, omega_hat=omega_hat,
        omega_low=omega_low, omega_up=omega_up, residuals=residuals,
    )


def mu_pair(
    art: SecondOrderArtifacts,
    cs: ConstraintSet,
    tol: Tolerance = DEFAULT_TOL,
) -> SecondOrderArtifacts:
    """Invertible mu matrix and its explicit inverse.

    mu2 adds an invertible completion on the Z1 directions to m2;
    mu2_inv adds the matching completion to the constraint bracket
    matrix, and the product is checked against the identity.
    """
    if art.omega_up is None or art.omega_low is None:
        raise InvalidInputError("omega pair must be installed before mu_pair")
    z1 = cs.z1_at(art.point)
    mu2 = art.m2 + z1 @ art.omega_up @ z1.T
    mu2_inv = art.c2 + art.abar01.T @ art.omega_low @ art.abar01
    residuals = dict(art.residuals or {})
    res = rel_residual(mu2 @ mu2_inv, np.eye(cs.m0))
    residuals["eq_21q"] = res
    if res > tol.weak_eq:
        raise NoSolutionError("mu2 @ mu2_inv = I failed", res)
    residuals["eq_20"] = rel_residual(art.m2, art.d00 @ mu2 @ art.d00.T)
    return replace(art, mu2=mu2, mu2_inv=mu2_inv, residuals=residuals)


def full_artifacts(
    cs: ConstraintSet,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    seed_low: Optional[np.ndarray] = None,
    seed2: Optional[np.ndarray] = None,
) -> SecondOrderArtifacts:
    """Artifacts with the omega pair and mu pair installed."""
    art = second_order_artifacts(cs, at, tol)
    art = omega_tilde_pair(art, seed_low, seed2, tol)
    return mu_pair(art, cs, tol)


def dirac2(
    cs: ConstraintSet,
    f: PhaseFunction,
    g: PhaseFunction,
    at: np.ndarray,
    mode: str = "noninvertible",
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Dirac bracket with either the noninvertible or the invertible matrix."""
    m = _bracket_core(cs, at, mode, tol)
    at = cs.spec.point(at)
    j = cs.spec.poisson
    grads = cs.gradients(at)
    u = f.gradient(at) @ j @ grads
    v = grads.T @ j @ g.gradient(at)
    plain = float(f.gradient(at) @ j @ g.gradient(at))
    return plain - float(u @ m @ v)


def fundamental_matrix_2(
    cs: ConstraintSet,
    at: np.ndarray,
    mode: str = "noninvertible",
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Matrix of Dirac brackets among the coordinates, 2N x 2N."""
    m = _bracket_core(cs, at, mode, tol)
    j = cs.spec.poisson
    g = cs.gradients(cs.spec.point(at))
    return j - (j @ g) @ m @ (g.T @ j)


def _bracket_core(
    cs: ConstraintSet, at: np.ndarray, mode: str, tol: Tolerance
) -> np.ndarray:
    if mode == "noninvertible":
        return second_order_artifacts(cs, at, tol).m2
    if mode == "invertible":
        return full_artifacts(cs, at, tol).mu2
    raise InvalidInputError(
        f"mode must be 'noninvertible' or 'invertible', got {mode!r}"
    )
