"""Irreducible replacement of a second-order reducible system.

The phase space is extended by M1 variables y with an invertible
antisymmetric bracket omega_y; the reducible constraints chi are traded
for the independent set

    chi_tilde_a0 = chi_a0 + a01 y,    chi_tilde_a2 = Z2^T y,

whose bracket matrix c_delta is invertible with the closed-form inverse
c_delta_inv.  The Dirac bracket built from them weakly reproduces the
reducible one for functions of the original coordinates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import oracle as oracle_mod
from . import second_order as so
from .constraints import ConstraintSet, project_to_surface, sample_surface
from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    NoSolutionError,
    Tolerance,
    check_finite,
    rank_tol,
    rel_residual,
)
from .phase import PhaseFunction
from .report import CheckReport


class OffSurfaceExtendedError(ValueError):
    """Extended point violates the irreducible constraints."""


@dataclass(frozen=True)
class IrreducibleSystem:
    base: ConstraintSet
    artifacts: so.SecondOrderArtifacts
    omega_y: np.ndarray
    omega_y_inv: np.ndarray
    ehat: np.ndarray
    ehat_inv: np.ndarray
    a01: np.ndarray
    c_delta: np.ndarray
    c_delta_inv: np.ndarray
    residuals: dict

    @property
    def dim_z(self) -> int:
        return self.base.spec.dim

    @property
    def dim_y(self) -> int:
        return self.omega_y.shape[0]

    @property
    def n_tilde(self) -> int:
        return self.base.m0 + self.base.m2

    def extended_poisson(self) -> np.ndarray:
        j = self.base.spec.poisson
        nz, ny = self.dim_z, self.dim_y
        ext = np.zeros((nz + ny, nz + ny))
        ext[:nz, :nz] = j
        ext[nz:, nz:] = self.omega_y
        return ext

    def split(self, at: np.ndarray) -> tuple:
        at = check_finite(np.asarray(at, dtype=float), "extended point")
        if at.shape != (self.dim_z + self.dim_y,):
            raise InvalidInputError(
                f"extended point must have length {self.dim_z + self.dim_y}"
            )
        return at[:self.dim_z], at[self.dim_z:]

    def join(self, z: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.concatenate([np.asarray(z, float), np.asarray(y, float)])

    def chi_tilde_values(self, at: np.ndarray) -> np.ndarray:
        z, y = self.split(at)
        z2 = self.base.z2_at(z)
        top = self.base.values(z) + self.a01 @ y
        bottom = z2.T @ y
        return np.concatenate([top, bottom])

    def chi_tilde_gradients(self, at: np.ndarray) -> np.ndarray:
        """Extended gradient matrix, (2N + M1) x (M0 + M2)."""
        z, _ = self.split(at)
        gz = self.base.gradients(z)
        z2 = self.base.z2_at(z)
        m0, m2 = self.base.m0, self.base.m2
        out = np.zeros((self.dim_z + self.dim_y, m0 + m2))
        out[:self.dim_z, :m0] = gz
        out[self.dim_z:, :m0] = self.a01.T
        out[self.dim_z:, m0:] = z2
        return out

    def recover(self, at: np.ndarray) -> tuple:
        """Original chi values and y recovered from the chi_tilde values."""
        z, _ = self.split(at)
        vals = self.chi_tilde_values(at)
        m0 = self.base.m0
        top, bottom = vals[:m0], vals[m0:]
        art = self.artifacts
        z1 = self.base.z1_at(z)
        abar12 = art.a12 @ art.dbar2.T
        chi = art.d00.T @ top
        y = self.ehat.T @ z1.T @ top + abar12 @ bottom
        return chi, y

    def require_on_surface(self, at: np.ndarray, tol: Tolerance) -> None:
        r = float(np.max(np.abs(self.chi_tilde_values(at))))
        if r > tol.surface:
            raise OffSurfaceExtendedError(
                f"extended point violates chi_tilde: max residual {r:.3e}"
            )

    def extend_gradient(self, grad_z: np.ndarray) -> np.ndarray:
        """Pad a z-space gradient with zero y components."""
        return np.concatenate([np.asarray(grad_z, float),
                               np.zeros(self.dim_y)])


def build_irreducible(
    cs: ConstraintSet,
    art: so.SecondOrderArtifacts,
    ehat_inv: Optional[np.ndarray] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> IrreducibleSystem:
    """Assemble the irreducible system from a second-order artifact bundle.

    With the default choice the congruence matrix is the identity, the
    y-space bracket is omega_low itself, and a01 is the transpose of
    abar01.  A custom invertible congruence (the ehat_inv argument) is
    accepted after checking that it preserves the d11 projector sandwich.
    """
    if art.omega_low is None or art.mu2 is None:
        raise InvalidInputError(
            "artifacts must carry the omega and mu pairs; use full_artifacts"
        )
    m0, m1, m2 = cs.m0, cs.m1, cs.m2
    if ehat_inv is None:
        ehat_inv = np.eye(m1)
        ehat = np.eye(m1)
    else:
        ehat_inv = check_finite(ehat_inv, "ehat_inv")
        if ehat_inv.shape != (m1, m1):
            raise InvalidInputError("congruence matrix must be M1 x M1")
        if rank_tol(ehat_inv, tol) != m1:
            raise InvalidInputError("congruence matrix must be invertible")
        ehat = np.linalg.inv(ehat_inv)
    residuals: dict = dict(art.residuals or {})
    res_27qq = rel_residual(ehat_inv @ art.d11 @ ehat, art.d11)
    residuals["eq_27qq"] = res_27qq
    if res_27qq > tol.weak_eq:
        raise NoSolutionError(
            "congruence matrix does not preserve the d11 sandwich", res_27qq
        )
    omega_y = ehat.T @ art.omega_low @ ehat
    omega_y_inv = ehat_inv @ np.linalg.inv(art.omega_low) @ ehat_inv.T
    a01 = art.abar01.T @ ehat_inv.T

    z1 = cs.z1_at(art.point)
    z2 = cs.z2_at(art.point)
    abar12 = art.a12 @ art.dbar2.T

    mu_low = art.c2 + a01 @ omega_y @ a01.T
    c_delta = np.block([
        [mu_low, a01 @ omega_y @ z2],
        [z2.T @ omega_y @ a01.T, z2.T @ omega_y @ z2],
    ])
    mu_up = art.m2 + z1 @ ehat @ omega_y_inv @ ehat.T @ z1.T
    c_delta_inv = np.block([
        [mu_up, z1 @ ehat @ omega_y_inv @ abar12],
        [abar12.T @ omega_y_inv @ ehat.T @ z1.T,
         abar12.T @ omega_y_inv @ abar12],
    ])

    res_p11 = rel_residual(c_delta @ c_delta_inv, np.eye(m0 + m2))
    residuals["eq_p11"] = res_p11
    if res_p11 > tol.weak_eq:
        raise NoSolutionError("c_delta inverse check failed", res_p11)
    rank_c = rank_tol(c_delta, tol)
    residuals["rank_c_delta"] = float(abs(rank_c - (m0 + m2)))
    if rank_c != m0 + m2:
        raise NoSolutionError(
            "c_delta is rank deficient", float(rank_c)
        )
    # the mu matrix built with the congruence must reproduce the stored one
    residuals["eq_27x"] = rel_residual(mu_low, art.mu2_inv)
    residuals["eq_27z"] = rel_residual(mu_up, art.mu2)
    # conjugation identity for the installed y-space bracket
    residuals["eq_27wp"] = rel_residual(
        omega_y_inv @ art.d11 @ omega_y, art.d11
    )

    return IrreducibleSystem(
        base=cs, artifacts=art, omega_y=omega_y, omega_y_inv=omega_y_inv,
        ehat=ehat, ehat_inv=ehat_inv, a01=a01, c_delta=c_delta,
        c_delta_inv=c_delta_inv, residuals=residuals,
    )


def dirac_irred(
    sys: IrreducibleSystem,
    f: PhaseFunction,
    g: PhaseFunction,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Irreducible Dirac bracket on the extended space.

    Functions of the original coordinates alone are accepted and padded
    with vanishing y derivatives.
    """
    sys.require_on_surface(at, tol)
    z, _ = sys.split(at)
    gf = _ext_gradient(sys, f, at, z)
    gg = _ext_gradient(sys, g, at, z)
    jext = sys.extended_poisson()
    gt = sys.chi_tilde_gradients(at)
    u = gf @ jext @ gt
    v = gt.T @ jext @ gg
    return float(gf @ jext @ gg) - float(u @ sys.c_delta_inv @ v)


def _ext_gradient(
    sys: IrreducibleSystem, f: PhaseFunction, at: np.ndarray, z: np.ndarray
) -> np.ndarray:
    if f.dim == sys.dim_z:
        return sys.extend_gradient(f.gradient(z))
    if f.dim == sys.dim_z + sys.dim_y:
        return f.gradient(at)
    raise InvalidInputError(
        "function dimension matches neither the base nor the extended space"
    )


def fundamental_matrix_irred(
    sys: IrreducibleSystem,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Irreducible Dirac brackets among ALL extended coordinates.

    The leading 2N x 2N block is the fundamental matrix of the original
    coordinates; the y rows and columns vanish weakly.
    """
    sys.require_on_surface(at, tol)
    jext = sys.extended_poisson()
    gt = sys.chi_tilde_gradients(at)
    return jext - (jext @ gt) @ sys.c_delta_inv @ (gt.T @ jext)


def intermediate_bracket_matrix(
    sys: IrreducibleSystem,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Fundamental brackets of the intermediate system (chi, y) extended."""
    sys.require_on_surface(at, tol)
    z, _ = sys.split(at)
    jext = sys.extended_poisson()
    gz = sys.base.gradients(z)
    nz, ny = sys.dim_z, sys.dim_y
    gchi = np.zeros((nz + ny, sys.base.m0))
    gchi[:nz, :] = gz
    gy = np.zeros((nz + ny, ny))
    gy[nz:, :] = np.eye(ny)
    mu2 = sys.artifacts.mu2
    out = jext - (jext @ gchi) @ mu2 @ (gchi.T @ jext)
    return out - (jext @ gy) @ sys.omega_y_inv @ (gy.T @ jext)


def equivalence_report(
    cs: ConstraintSet,
    sys: IrreducibleSystem,
    n_pairs_of_functions: int = 10,
    n_points: int = 20,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> CheckReport:
    """Certify that all bracket formulations agree for z-only functions.

    At each on-surface point (y = 0) the fundamental matrices of the
    oracle, the reducible brackets in both modes, the intermediate system
    and the irreducible system are compared; random quadratic function
    pairs then contract those matrices.
    """
    rep = CheckReport(
        system=cs.name or "constraint-system",
        tolerances=tol,
        seeds={"points": seed, "functions": seed + 1},
    )
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed + 1)
    dim = cs.spec.dim
    grads = []
    for _ in range(n_pairs_of_functions):
        # gradients of random quadratic functions at a point are generic
        # vectors; sampling them directly is equivalent and cheaper
        grads.append((rng.standard_normal(dim), rng.standard_normal(dim)))

    points = sample_surface(cs, seed, n_points, tol)
    dev_modes = 0.0   # noninvertible vs invertible
    dev_inter = 0.0   # intermediate vs reducible
    dev_irred = 0.0   # irreducible vs intermediate
    dev_all = 0.0     # worst pairwise including the oracle
    for z in points:
        f_oracle = oracle_mod.fundamental_matrix_oracle(cs, z, tol)
        art = so.full_artifacts(cs, z, tol)
        j = cs.spec.poisson
        gz = cs.gradients(z)
        f_non = j - (j @ gz) @ art.m2 @ (gz.T @ j)
        f_inv = j - (j @ gz) @ art.mu2 @ (gz.T @ j)
        ext = sys.join(z, np.zeros(sys.dim_y))
        f_inter = intermediate_bracket_matrix(sys, ext, tol)[:dim, :dim]
        f_irr = fundamental_matrix_irred(sys, ext, tol)[:dim, :dim]
        mats = [f_oracle, f_non, f_inv, f_inter, f_irr]
        dev_modes = max(dev_modes, float(np.abs(f_non - f_inv).max()))
        dev_inter = max(dev_inter, float(np.abs(f_inter - f_inv).max()))
        dev_irred = max(dev_irred, float(np.abs(f_irr - f_inter).max()))
        for i, a in enumerate(mats):
            for b in mats[i + 1:]:
                entry = float(np.abs(a - b).max())
                for gf, gg in grads:
                    entry = max(entry, abs(float(gf @ (a - b) @ gg)))
                dev_all = max(dev_all, entry)
    rep.add("eq_24", dev_modes, tol.weak_eq)
    rep.add("eq_28", dev_inter, tol.weak_eq)
    rep.add("eq_32y", dev_irred, tol.weak_eq)
    rep.add("eq_32", dev_all, tol.weak_eq)
    rep.timings["equivalence"] = time.perf_counter() - t0
    return rep


def eom_step(
    sys: IrreducibleSystem,
    h: PhaseFunction,
    at: np.ndarray,
    dt: float,
    tol: Tolerance = DEFAULT_TOL,
    project: bool = False,
) -> np.ndarray:
    """One fixed-step RK4 step of z' = [z, h]* with y held fixed.

    The bracket kernel at each stage is assembled at the nearest
    on-surface point, so small integrator drift does not poison the
    construction; the state itself is only reprojected when asked.
    """
    if dt <= 0.0:
        raise InvalidInputError("dt must be positive")
    z, y = sys.split(at)

    def velocity(zs: np.ndarray) -> np.ndarray:
        zk = project_to_surface(sys.base, zs, tol)
        ext = sys.join(zk, y * 0.0)
        kernel = fundamental_matrix_irred(sys, ext, tol)[:sys.dim_z,
                                                         :sys.dim_z]
        return kernel @ h.gradient(zs)

    k1 = velocity(z)
    k2 = velocity(z + 0.5 * dt * k1)
    k3 = velocity(z + 0.5 * dt * k2)
    k4 = velocity(z + dt * k3)
    z_new = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if project:
        z_new = project_to_surface(sys.base, z_new, tol)
    return sys.join(z_new, y)
