"""Reducible second-class constraint sets: data model, validation,
surface sampling and generators.

A constraint set bundles M0 constraint functions chi with their
first-order reducibility matrix Z1 (M0 x M1, ``Z1.T @ chi == 0``) and,
for order-2 systems, the second-order matrix Z2 (M1 x M2,
``Z1 @ Z2 ~= 0`` on the surface).  Z matrices may be constant arrays or
point-valued callables; all bundled generators produce constant ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import phase
from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    Tolerance,
    check_finite,
    null_basis,
    pseudoinverse,
    rank_tol,
)
from .phase import PhaseFunction, PhaseSpec

MatrixOrMap = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


class OffSurfaceError(ValueError):
    """A point violates the constraint surface beyond tolerance."""


class ProjectionError(RuntimeError):
    """Surface projection failed to converge; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class ConstraintSet:
    spec: PhaseSpec
    chi: tuple[PhaseFunction, ...]
    z1: MatrixOrMap
    z2: Optional[MatrixOrMap] = None
    order: int = 2
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "chi", tuple(self.chi))
        if self.order not in (1, 2):
            raise InvalidInputError("order must be 1 or 2")
        if self.order == 2 and self.z2 is None:
            raise InvalidInputError("order-2 systems need a Z2 matrix")
        if isinstance(self.z1, np.ndarray):
            z1 = check_finite(self.z1, "Z1")
            if z1.shape[0] != self.m0:
                raise InvalidInputError("Z1 must have M0 rows")
            object.__setattr__(self, "z1", z1)
        if isinstance(self.z2, np.ndarray):
            z2 = check_finite(self.z2, "Z2")
            object.__setattr__(self, "z2", z2)

    @property
    def m0(self) -> int:
        return len(self.chi)

    @property
    def m1(self) -> int:
        z1 = self.z1 if isinstance(self.z1, np.ndarray) else self.z1(
            np.zeros(self.spec.dim)
        )
        return z1.shape[1]

    @property
    def m2(self) -> int:
        if self.z2 is None:
            return 0
        z2 = self.z2 if isinstance(self.z2, np.ndarray) else self.z2(
            np.zeros(self.spec.dim)
        )
        return z2.shape[1]

    @property
    def n_independent(self) -> int:
        """Number of independent second-class constraints, M0 - M1 (+ M2)."""
        return self.m0 - self.m1 + (self.m2 if self.order == 2 else 0)

    @property
    def is_affine(self) -> bool:
        return all(f.kind == "affine" for f in self.chi)

    def z1_at(self, at: np.ndarray) -> np.ndarray:
        return self.z1 if isinstance(self.z1, np.ndarray) else np.asarray(
            self.z1(at), dtype=float
        )

    def z2_at(self, at: np.ndarray) -> np.ndarray:
        if self.z2 is None:
            raise InvalidInputError("order-1 system has no Z2")
        return self.z2 if isinstance(self.z2, np.ndarray) else np.asarray(
            self.z2(at), dtype=float
        )

    def values(self, at: np.ndarray) -> np.ndarray:
        at = self.spec.point(at)
        return np.array([f(at) for f in self.chi])

    def gradients(self, at: np.ndarray) -> np.ndarray:
        """Gradient matrix, 2N x M0: column a0 is grad(chi_{a0})."""
        at = self.spec.point(at)
        return np.column_stack([f.gradient(at) for f in self.chi])

    def affine_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """(B, c) with chi = B z + c for fully affine systems."""
        if not self.is_affine:
            raise InvalidInputError("constraint set is not affine")
        b = np.vstack([f.b for f in self.chi])
        c = np.array([f.c for f in self.chi])
        return b, c

    def surface_residual(self, at: np.ndarray) -> float:
        return float(np.max(np.abs(self.values(at)))) if self.m0 else 0.0

    def require_on_surface(self, at: np.ndarray, tol: Tolerance) -> None:
        r = self.surface_residual(at)
        if r > tol.surface:
            raise OffSurfaceError(
                f"point violates the constraint surface: max |chi| = {r:.3e}"
            )


@dataclass(frozen=True)
class ValidationReport:
    residuals: dict[str, float]
    checks: dict[str, bool]
    tolerances: Tolerance

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def validate(
    cs: ConstraintSet,
    points: Sequence[np.ndarray],
    tol: Tolerance = DEFAULT_TOL,
) -> ValidationReport:
    """Check reducibility relations and second-class rank counts.

    Points must already lie on the surface; off-surface input is refused.
    """
    for p in points:
        cs.require_on_surface(p, tol)

    residuals: dict[str, float] = {}
    checks: dict[str, bool] = {}

    red1 = 0.0
    red2 = 0.0
    rank_c_ok = True
    rank_c_seen = []
    for p in points:
        chi_v = cs.values(p)
        z1 = cs.z1_at(p)
        red1 = max(red1, float(np.linalg.norm(z1.T @ chi_v)))
        g = cs.gradients(p)
        c = g.T @ cs.spec.poisson @ g
        rank_c = rank_tol(c, tol)
        rank_c_seen.append(rank_c)
        if cs.order == 2:
            z2 = cs.z2_at(p)
            scale = 1.0 + np.linalg.norm(z1) * np.linalg.norm(z2)
            red2 = max(red2, float(np.linalg.norm(z1 @ z2)) / scale)
    expected_rank = cs.n_independent

    residuals["eq_2"] = red1
    checks["eq_2"] = red1 <= tol.weak_eq
    residuals["eq_11d_rank"] = float(
        max(abs(r - expected_rank) for r in rank_c_seen)
    )
    checks["eq_11d_rank"] = all(r == expected_rank for r in rank_c_seen)

    if cs.order == 2:
        residuals["eq_11x"] = red2
        checks["eq_11x"] = red2 <= tol.weak_eq
        z2 = cs.z2_at(points[0])
        rank_z2 = rank_tol(z2, tol)
        residuals["z2_rank"] = float(abs(rank_z2 - cs.m2))
        checks["z2_rank"] = rank_z2 == cs.m2
        z1 = cs.z1_at(points[0])
        rank_z1 = rank_tol(z1, tol)
        residuals["z1_rank"] = float(abs(rank_z1 - (cs.m1 - cs.m2)))
        checks["z1_rank"] = rank_z1 == cs.m1 - cs.m2

    return ValidationReport(residuals=residuals, checks=checks, tolerances=tol)


def project_to_surface(
    cs: ConstraintSet,
    start: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    max_iter: int = 50,
) -> np.ndarray:
    """Gauss-Newton projection onto the constraint surface.

    For affine systems this is a single exact minimum-norm correction.
    """
    z = cs.spec.point(start).copy()
    residual = cs.surface_residual(z)
    if residual <= tol.surface:
        return z
    for _ in range(max_iter):
        vals = cs.values(z)
        jac = cs.gradients(z).T  # M0 x 2N
        z = z - pseudoinverse(jac, tol) @ vals
        residual = cs.surface_residual(z)
        if residual <= tol.surface:
            return z
    raise ProjectionError("surface projection did not converge", residual)


def sample_surface(
    cs: ConstraintSet,
    seed: int,
    count: int,
    tol: Tolerance = DEFAULT_TOL,
    scale: float = 1.0,
) -> list[np.ndarray]:
    """Deterministic on-surface points: projected Gaussian perturbations."""
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        start = scale * rng.standard_normal(cs.spec.dim)
        points.append(project_to_surface(cs, start, tol))
    return points


def _affine_set(
    spec: PhaseSpec,
    b: np.ndarray,
    c: np.ndarray,
    z1: np.ndarray,
    z2: Optional[np.ndarray],
    name: str,
) -> ConstraintSet:
    chi = tuple(
        phase.affine(b[i], float(c[i]), label=f"chi{i}")
        for i in range(b.shape[0])
    )
    order = 2 if z2 is not None else 1
    return ConstraintSet(spec=spec, chi=chi, z1=z1, z2=z2, order=order,
                         name=name)


def synth_linear(
    n_pairs: int,
    m0: int,
    m1: int,
    m2: int,
    seed: int,
    tol: Tolerance = DEFAULT_TOL,
    max_resample: int = 50,
) -> ConstraintSet:
    """Random affine second-order reducible second-class system.

    The reducibility chain is built backwards: a random full-column-rank
    Z2, then Z1 with null space spanned by Z2, then a constraint matrix B
    whose rows live in null(Z1.T).  Resampled until the bracket matrix
    B J B.T has the full second-class rank m0 - m1 + m2.
    """
    n_ind = m0 - m1 + m2
    if not (0 < m2 <= m1 <= m0):
        raise InvalidInputError("need 0 < m2 <= m1 <= m0")
    if m1 % 2 or m2 % 2:
        raise InvalidInputError("m1 and m2 must be even")
    if n_ind % 2 or n_ind <= 0 or n_ind > 2 * n_pairs:
        raise InvalidInputError(
            "independent count m0 - m1 + m2 must be even, positive and "
            "at most the phase-space dimension"
        )
    spec = PhaseSpec(n_pairs=n_pairs)
    j = spec.poisson
    rng = np.random.default_rng(seed)
    for _ in range(max_resample):
        z2 = rng.standard_normal((m1, m2))
        if rank_tol(z2, tol) != m2:
            continue
        s = null_basis(z2.T, tol)  # m1 x (m1 - m2)
        n = rng.standard_normal((m0, m1 - m2))
        if rank_tol(n, tol) != m1 - m2:
            continue
        z1 = n @ s.T
        u = null_basis(z1.T, tol)  # m0 x n_ind
        if u.shape[1] != n_ind:
            continue
        r = rng.standard_normal((n_ind, 2 * n_pairs))
        if rank_tol(r, tol) != n_ind:
            continue
        b = u @ r
        if rank_tol(b @ j @ b.T, tol) != n_ind:
            continue
        return _affine_set(
            spec, b, np.zeros(m0), z1, z2, name=f"synth(seed={seed})"
        )
    raise RuntimeError(
        "failed to sample a second-class system within the resample budget"
    )


def toy_system() -> ConstraintSet:
    """Two canonical pairs with triply repeated constraints on (q1, p1).

    chi = (q1, q1, q1, p1, p1, p1); the three copies of each function are
    related by the columns of K, whose single dependency v gives the
    second-order matrix.  M0 = M1 = 6, M2 = 2, two independent constraints.
    """
    spec = PhaseSpec(n_pairs=2)
    k = np.array([
        [1.0, 0.0, 1.0],
        [-1.0, 1.0, 0.0],
        [0.0, -1.0, -1.0],
    ])
    v = np.array([[1.0], [1.0], [-1.0]])
    z1 = np.block([
        [k, np.zeros((3, 3))],
        [np.zeros((3, 3)), k],
    ])
    z2 = np.block([
        [v, np.zeros((3, 1))],
        [np.zeros((3, 1)), v],
    ])
    b = np.zeros((6, 4))
    b[:3, 0] = 1.0  # three copies of q1
    b[3:, 2] = 1.0  # three copies of p1
    return _affine_set(spec, b, np.zeros(6), z1, z2, name="toy")


def duplicated_pair_system() -> ConstraintSet:
    """Order-1 system on two pairs: chi = (q1, p1, q1), Z = (1, 0, -1)."""
    spec = PhaseSpec(n_pairs=2)
    b = np.zeros((3, 4))
    b[0, 0] = 1.0
    b[1, 2] = 1.0
    b[2, 0] = 1.0
    z1 = np.array([[1.0], [0.0], [-1.0]])
    return _affine_set(spec, b, np.zeros(3), z1, None, name="duplicated-pair")


def curved_first_order_system() -> ConstraintSet:
    """Order-1 system with curved constraints chi = (q1, q1 e^q2, p1, p1 e^q2).

    The reducibility matrix is point-dependent; its two columns kill the
    exponential copies exactly at every point.
    """
    spec = PhaseSpec(n_pairs=2)
    dim = spec.dim

    def expfun(coef_index: int, label: str) -> PhaseFunction:
        def ev(z: np.ndarray) -> float:
            return z[coef_index] * np.exp(z[1])

        def gr(z: np.ndarray) -> np.ndarray:
            g = np.zeros(dim)
            g[coef_index] = np.exp(z[1])
            g[1] = z[coef_index] * np.exp(z[1])
            return g

        return phase.opaque(ev, dim, grad=gr, label=label)

    chi = (
        phase.coordinate(dim, 0, "q1"),
        expfun(0, "q1*exp(q2)"),
        phase.coordinate(dim, 2, "p1"),
        expfun(2, "p1*exp(q2)"),
    )

    def z1_at(z: np.ndarray) -> np.ndarray:
        e = np.exp(z[1])
        return np.array([
            [-e, 0.0],
            [1.0, 0.0],
            [0.0, -e],
            [0.0, 1.0],
        ])

    return ConstraintSet(spec=spec, chi=chi, z1=z1_at, z2=None, order=1,
                         name="curved")


def save_system(cs: ConstraintSet, path: Union[str, Path]) -> None:
    """Write an affine constant-Z system to the JSON file format."""
    if not cs.is_affine:
        raise InvalidInputError("only affine systems are serializable")
    if not isinstance(cs.z1, np.ndarray):
        raise InvalidInputError("only constant Z matrices are serializable")
    b, c = cs.affine_matrix()
    doc = {
        "n_pairs": cs.spec.n_pairs,
        "chi": {"B": b.tolist(), "c": c.tolist()},
        "Z1": cs.z1.tolist(),
    }
    canonical = phase.canonical_poisson(cs.spec.n_pairs)
    if not np.array_equal(cs.spec.poisson, canonical):
        doc["poisson"] = cs.spec.poisson.tolist()
    if cs.order == 2:
        doc["Z2"] = np.asarray(cs.z2).tolist()
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_system(path: Union[str, Path]) -> ConstraintSet:
    """Read a system from the JSON file format; order follows Z2 presence."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read system file {path}: {exc}")
    for key in ("n_pairs", "chi", "Z1"):
        if key not in doc:
            raise InvalidInputError(f"system file missing field {key!r}")
    n_pairs = int(doc["n_pairs"])
    poisson = None
    if "poisson" in doc:
        poisson = np.asarray(doc["poisson"], dtype=float)
    spec = PhaseSpec(n_pairs=n_pairs, poisson=poisson)
    chi_doc = doc["chi"]
    if "B" not in chi_doc:
        raise InvalidInputError("system file field 'chi' needs a 'B' array")
    b = np.asarray(chi_doc["B"], dtype=float)
    if b.ndim != 2 or b.shape[1] != spec.dim:
        raise InvalidInputError(
            f"'chi.B' must be M0 x {spec.dim}, got {b.shape}"
        )
    c = np.asarray(chi_doc.get("c", np.zeros(b.shape[0])), dtype=float)
    if c.shape != (b.shape[0],):
        raise InvalidInputError("'chi.c' length must match the rows of B")
    z1 = np.asarray(doc["Z1"], dtype=float)
    if z1.ndim != 2 or z1.shape[0] != b.shape[0]:
        raise InvalidInputError("'Z1' must have one row per constraint")
    z2 = None
    if "Z2" in doc and doc["Z2"] is not None:
        z2 = np.asarray(doc["Z2"], dtype=float)
        if z2.ndim != 2 or z2.shape[0] != z1.shape[1]:
            raise InvalidInputError("'Z2' must have one row per Z1 column")
    name = str(Path(path).name)
    return _affine_set(spec, b, c, z1, z2, name=name)
