"""First-order reducible Dirac brackets and the irreducible lift.

For a reducible set of M0 second-class constraints with a single level of
dependencies Z1 (M0 x M1), the Dirac bracket can be written with a
noninvertible antisymmetric matrix M1 solving ``M @ C ~= d`` where d is
the projector complementary to the Z1 directions.  Alternatively one
enlarges the phase space by M1 extra variables Y with an invertible
antisymmetric bracket Gamma and trades the reducible set for the
independent combinations chi + a Y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constraints import ConstraintSet
from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    Tolerance,
    check_finite,
    is_antisymmetric,
    pseudoinverse,
    rank_tol,
    skew_solve,
    symplectic_block,
)
from .phase import PhaseFunction, PhaseSpec


@dataclass(frozen=True)
class FirstOrderArtifacts:
    """Derived matrices of the reducible bracket at one phase-space point.

    c1 is the constraint bracket matrix, abar the minimum-norm left
    inverse of Z1, d = I - Z1 abar the complementary projector, and m1
    the antisymmetric matrix with m1 @ c1 ~= d.
    """

    c1: np.ndarray
    abar: np.ndarray
    d: np.ndarray
    m1: np.ndarray
    point: np.ndarray


def first_order_artifacts(
    cs: ConstraintSet,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> FirstOrderArtifacts:
    if cs.order != 1:
        raise InvalidInputError("first-order pipeline needs an order-1 system")
    at = cs.spec.point(at)
    cs.require_on_surface(at, tol)
    z1 = cs.z1_at(at)
    if rank_tol(z1, tol) != cs.m1:
        raise InvalidInputError(
            "Z1 columns must be independent for an order-1 system"
        )
    g = cs.gradients(at)
    c1 = g.T @ cs.spec.poisson @ g
    abar = pseudoinverse(z1, tol)
    d = np.eye(cs.m0) - z1 @ abar
    m1 = skew_solve(c1, d, tol)
    return FirstOrderArtifacts(c1=c1, abar=abar, d=d, m1=m1, point=at)


def dirac1(
    cs: ConstraintSet,
    f: PhaseFunction,
    g: PhaseFunction,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Dirac bracket [f, g] - [f, chi] M [chi, g] with the reducible M."""
    art = first_order_artifacts(cs, at, tol)
    j = cs.spec.poisson
    grads = cs.gradients(art.point)
    u = f.gradient(art.point) @ j @ grads  # [f, chi_a0]
    v = grads.T @ j @ g.gradient(art.point)  # [chi_b0, g]
    plain = float(f.gradient(art.point) @ j @ g.gradient(art.point))
    return plain - float(u @ art.m1 @ v)


def fundamental_matrix_1(
    cs: ConstraintSet,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Matrix of Dirac brackets among the coordinates, 2N x 2N."""
    art = first_order_artifacts(cs, at, tol)
    j = cs.spec.poisson
    g = cs.gradients(art.point)
    return j - (j @ g) @ art.m1 @ (g.T @ j)


@dataclass(frozen=True)
class FirstOrderLift:
    """Irreducible replacement system on the (z, Y) extended space."""

    base: ConstraintSet
    gamma: np.ndarray
    a_lift: np.ndarray
    dbar: np.ndarray
    mu1_of: object  # point -> M0 x M0 matrix
    point_template: PhaseSpec

    def extended_poisson(self) -> np.ndarray:
        j = self.base.spec.poisson
        dim = j.shape[0]
        m1 = self.gamma.shape[0]
        ext = np.zeros((dim + m1, dim + m1))
        ext[:dim, :dim] = j
        ext[dim:, dim:] = self.gamma
        return ext

    def chi_bar_value(self, z: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.base.values(z) + self.a_lift @ y

    def chi_bar_gradients(self, z: np.ndarray) -> np.ndarray:
        """Extended-space gradient matrix of chi-bar, (2N + M1) x M0."""
        gz = self.base.gradients(z)
        return np.vstack([gz, self.a_lift.T])

    def mu1(self, z: np.ndarray) -> np.ndarray:
        return self.mu1_of(z)

    def bracket(
        self,
        grad_f: np.ndarray,
        grad_g: np.ndarray,
        z: np.ndarray,
        tol: Tolerance = DEFAULT_TOL,
    ) -> float:
        """Lifted Dirac bracket from extended-space gradients of f and g."""
        jext = self.extended_poisson()
        gb = self.chi_bar_gradients(z)
        mu = self.mu1(z)
        u = grad_f @ jext @ gb
        v = gb.T @ jext @ grad_g
        return float(grad_f @ jext @ grad_g) - float(u @ mu @ v)

    def bracket_z(
        self,
        f: PhaseFunction,
        g: PhaseFunction,
        z: np.ndarray,
        y: Optional[np.ndarray] = None,
        tol: Tolerance = DEFAULT_TOL,
    ) -> float:
        """Lifted bracket of functions of the original coordinates only."""
        z = self.base.spec.point(z)
        m1 = self.gamma.shape[0]
        if y is None:
            y = np.zeros(m1)
        pad = np.zeros(m1)
        gf = np.concatenate([f.gradient(z), pad])
        gg = np.concatenate([g.gradient(z), pad])
        return self.bracket(gf, gg, z, tol)

    def fundamental_matrix(
        self, z: np.ndarray, tol: Tolerance = DEFAULT_TOL
    ) -> np.ndarray:
        """Lifted Dirac brackets among the original coordinates."""
        dim = self.base.spec.dim
        jext = self.extended_poisson()
        gb = self.chi_bar_gradients(z)
        mu = self.mu1(z)
        full = jext - (jext @ gb) @ mu @ (gb.T @ jext)
        return full[:dim, :dim]


def irreducible_lift_1(
    cs: ConstraintSet,
    gamma: Optional[np.ndarray] = None,
    a_lift: Optional[np.ndarray] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> FirstOrderLift:
    """Irreducible lift with Y variables: chi_bar = chi + a_lift Y.

    Defaults: Gamma the canonical symplectic block (needs even M1) and
    a_lift = Z1, which always meets the rank requirement for constant Z1.
    """
    if cs.order != 1:
        raise InvalidInputError("lift applies to order-1 systems")
    if not isinstance(cs.z1, np.ndarray):
        raise InvalidInputError("lift needs a constant Z1 matrix")
    z1 = cs.z1
    m1 = cs.m1
    if gamma is None:
        gamma = symplectic_block(m1)
    gamma = check_finite(gamma, "gamma")
    if gamma.shape != (m1, m1) or not is_antisymmetric(gamma, tol):
        raise InvalidInputError("gamma must be antisymmetric of size M1")
    if rank_tol(gamma, tol) != m1:
        raise InvalidInputError("gamma must be invertible")
    if a_lift is None:
        a_lift = z1.copy()
    a_lift = check_finite(a_lift, "a_lift")
    if a_lift.shape != (cs.m0, m1):
        raise InvalidInputError("a_lift must be M0 x M1")
    za = z1.T @ a_lift
    if rank_tol(za, tol) != m1:
        raise InvalidInputError(
            "a_lift fails the rank condition: Z1^T a_lift must be invertible"
        )
    dbar = np.linalg.inv(za)
    gamma_inv = np.linalg.inv(gamma)
    lift_term = z1 @ dbar @ gamma_inv @ dbar.T @ z1.T

    def mu1_of(z: np.ndarray) -> np.ndarray:
        art = first_order_artifacts(cs, z, tol)
        return art.m1 + lift_term

    return FirstOrderLift(
        base=cs,
        gamma=gamma,
        a_lift=a_lift,
        dbar=dbar,
        mu1_of=mu1_of,
        point_template=cs.spec,
    )
