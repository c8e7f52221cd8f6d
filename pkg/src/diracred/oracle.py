"""Brute-force ground truth: maximal independent constraint subsets and
the textbook Dirac bracket built from them.

Every other bracket formulation in the package is certified against this
one, so the subset selection is deliberately boring: greedy, pivoted,
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .constraints import ConstraintSet
from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    Tolerance,
    pseudoinverse,
    rank_tol,
)
from .phase import PhaseFunction


class DegenerateSystemError(RuntimeError):
    """The constraint gradients cannot supply the expected independent count."""


@dataclass(frozen=True)
class SubsetSelection:
    indices: tuple[int, ...]
    cab: np.ndarray
    cab_inv: np.ndarray


def independent_subset(
    cs: ConstraintSet,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    order: Optional[Sequence[int]] = None,
) -> SubsetSelection:
    """Pick a maximal independent constraint subset at a point.

    Greedy column pivoting on the gradient matrix: repeatedly take the
    constraint whose gradient has the largest residual after projecting
    out the span of those already chosen, breaking ties by lowest index.
    ``order`` optionally permutes the candidate ranking (used to test
    invariance of the bracket under subset choice).
    """
    at = cs.spec.point(at)
    cs.require_on_surface(at, tol)
    target = cs.n_independent
    g = cs.gradients(at)
    m0 = cs.m0
    candidates = list(range(m0)) if order is None else list(order)
    if sorted(candidates) != list(range(m0)):
        raise InvalidInputError("order must be a permutation of 0..M0-1")

    residual = g.copy()
    chosen: list[int] = []
    available = set(candidates)
    for _ in range(target):
        norms = np.linalg.norm(residual, axis=0)
        best = None
        best_norm = -1.0
        for i in candidates:
            if i not in available:
                continue
            if norms[i] > best_norm * (1.0 + 1e-12):
                best, best_norm = i, norms[i]
        scale = np.linalg.norm(g[:, best]) if best is not None else 0.0
        if best is None or best_norm <= tol.rank_rel * (1.0 + scale):
            raise DegenerateSystemError(
                f"only {len(chosen)} independent constraints found, "
                f"expected {target}"
            )
        chosen.append(best)
        available.discard(best)
        col = residual[:, best] / np.linalg.norm(residual[:, best])
        residual = residual - np.outer(col, col @ residual)

    indices = tuple(sorted(chosen))
    sub = g[:, indices]
    cab = sub.T @ cs.spec.poisson @ sub
    if rank_tol(cab, tol) != target:
        raise DegenerateSystemError(
            "selected subset is not second class: C_AB rank deficient"
        )
    cab_inv = pseudoinverse(cab, tol)
    return SubsetSelection(indices=indices, cab=cab, cab_inv=cab_inv)


def dirac_oracle(
    cs: ConstraintSet,
    f: PhaseFunction,
    g: PhaseFunction,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Textbook Dirac bracket over the selected independent subset."""
    at = cs.spec.point(at)
    sel = independent_subset(cs, at, tol)
    j = cs.spec.poisson
    grads = cs.gradients(at)[:, list(sel.indices)]
    u = f.gradient(at) @ j @ grads
    v = grads.T @ j @ g.gradient(at)
    plain = float(f.gradient(at) @ j @ g.gradient(at))
    return plain - float(u @ sel.cab_inv @ v)


def fundamental_matrix_oracle(
    cs: ConstraintSet,
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    order: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Matrix of oracle Dirac brackets among the coordinates."""
    at = cs.spec.point(at)
    sel = independent_subset(cs, at, tol, order)
    j = cs.spec.poisson
    grads = cs.gradients(at)[:, list(sel.indices)]
    return j - (j @ grads) @ sel.cab_inv @ (grads.T @ j)


def compare_fundamental(
    cs: ConstraintSet,
    methods: Dict[str, Callable[[np.ndarray], np.ndarray]],
    at: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> Dict[str, float]:
    """Max entrywise deviation of each method's fundamental matrix from
    the oracle's, plus the worst pairwise deviation overall."""
    at = cs.spec.point(at)
    reference = fundamental_matrix_oracle(cs, at, tol)
    matrices = {"oracle": reference}
    for name, fn in methods.items():
        matrices[name] = np.asarray(fn(at), dtype=float)
    out: Dict[str, float] = {}
    names = list(matrices)
    worst = 0.0
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            dev = float(np.abs(matrices[a] - matrices[b]).max())
            worst = max(worst, dev)
            if a == "oracle":
                out[f"vs_{b}"] = dev
    out["max_pairwise"] = worst
    return out
