import numpy as np
import pytest

from diracred.constraints import (
    ConstraintSet,
    curved_first_order_system,
    duplicated_pair_system,
    sample_surface,
    toy_system,
)
from diracred.first_order import (
    dirac1,
    first_order_artifacts,
    fundamental_matrix_1,
    irreducible_lift_1,
)
from diracred.numerics import InvalidInputError
from diracred.oracle import fundamental_matrix_oracle
from diracred.phase import PhaseSpec, affine, coordinate


def doubled_pair_system() -> ConstraintSet:
    """Order-1 system with even M1: chi = (q1, p1, q1, p1)."""
    spec = PhaseSpec(n_pairs=2)
    b = np.zeros((4, 4))
    b[0, 0] = b[2, 0] = 1.0  # two copies of q1
    b[1, 2] = b[3, 2] = 1.0  # two copies of p1
    z1 = np.array([
        [1.0, 0.0],
        [0.0, 1.0],
        [-1.0, 0.0],
        [0.0, -1.0],
    ])
    chi = tuple(affine(b[i], label=f"chi{i}") for i in range(4))
    return ConstraintSet(spec=spec, chi=chi, z1=z1, order=1, name="doubled")


def test_artifact_identities():
    cs = duplicated_pair_system()
    at = sample_surface(cs, seed=0, count=1)[0]
    art = first_order_artifacts(cs, at)
    assert np.allclose(art.d @ art.d, art.d, atol=1e-12)
    assert np.allclose(art.abar @ cs.z1, np.eye(cs.m1), atol=1e-12)
    assert np.allclose(art.m1, -art.m1.T, atol=1e-14)
    assert np.abs(art.m1 @ art.c1 - art.d).max() < 1e-9


def test_reducible_bracket_matches_oracle():
    cs = duplicated_pair_system()
    for at in sample_surface(cs, seed=1, count=5):
        f1 = fundamental_matrix_1(cs, at)
        fo = fundamental_matrix_oracle(cs, at)
        assert np.abs(f1 - fo).max() < 1e-9


def test_curved_system_bracket_matches_oracle():
    cs = curved_first_order_system()
    for at in sample_surface(cs, seed=2, count=5):
        f1 = fundamental_matrix_1(cs, at)
        fo = fundamental_matrix_oracle(cs, at)
        assert np.abs(f1 - fo).max() < 1e-8


def test_constraints_are_casimirs():
    cs = duplicated_pair_system()
    at = sample_surface(cs, seed=3, count=1)[0]
    f = coordinate(cs.spec.dim, 3)
    for chi in cs.chi:
        assert abs(dirac1(cs, chi, f, at)) < 1e-10


def test_lift_matches_reducible_and_oracle():
    cs = doubled_pair_system()
    lift = irreducible_lift_1(cs)
    for at in sample_surface(cs, seed=4, count=4):
        lifted = lift.fundamental_matrix(at)
        direct = fundamental_matrix_1(cs, at)
        oracle = fundamental_matrix_oracle(cs, at)
        assert np.abs(lifted - direct).max() < 1e-9
        assert np.abs(lifted - oracle).max() < 1e-9
        q2 = coordinate(4, 1)
        p2 = coordinate(4, 3)
        assert lift.bracket_z(q2, p2, at) == pytest.approx(lifted[1, 3])


def test_lifted_constraints_vanish_with_matching_y():
    cs = doubled_pair_system()
    lift = irreducible_lift_1(cs)
    at = sample_surface(cs, seed=5, count=1)[0]
    y = np.array([0.3, -0.7])
    vals = lift.chi_bar_value(at, y)
    # chi = 0 on the surface, so chi_bar = a_lift @ y exactly
    assert np.allclose(vals, lift.a_lift @ y, atol=1e-12)
    grads = lift.chi_bar_gradients(at)
    assert np.linalg.matrix_rank(grads) == cs.m0


def test_lift_rank_condition_enforced():
    cs = doubled_pair_system()
    with pytest.raises(InvalidInputError):
        irreducible_lift_1(cs, a_lift=np.zeros((cs.m0, cs.m1)))
    with pytest.raises(InvalidInputError):
        irreducible_lift_1(cs, gamma=np.zeros((cs.m1, cs.m1)))
    with pytest.raises(InvalidInputError):
        # odd M1 has no invertible antisymmetric gamma
        irreducible_lift_1(duplicated_pair_system())


def test_ambiguity_shift_leaves_bracket_unchanged():
    cs = doubled_pair_system()
    at = sample_surface(cs, seed=6, count=1)[0]
    art = first_order_artifacts(cs, at)
    j = cs.spec.poisson
    g = cs.gradients(at)
    base = j - (j @ g) @ art.m1 @ (g.T @ j)
    rng = np.random.default_rng(7)
    for _ in range(10):
        s = rng.standard_normal((cs.m1, cs.m1))
        q = s - s.T
        shifted = art.m1 + cs.z1 @ q @ cs.z1.T
        alt = j - (j @ g) @ shifted @ (g.T @ j)
        assert np.abs(alt - base).max() < 1e-8


def test_first_order_requires_order_one():
    cs = toy_system()
    at = sample_surface(cs, seed=0, count=1)[0]
    with pytest.raises(InvalidInputError):
        first_order_artifacts(cs, at)
