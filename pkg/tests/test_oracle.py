import numpy as np
import pytest

from diracred.constraints import sample_surface, synth_linear, toy_system
from diracred.numerics import DEFAULT_TOL, InvalidInputError, rank_tol
from diracred.oracle import (
    DegenerateSystemError,
    compare_fundamental,
    dirac_oracle,
    fundamental_matrix_oracle,
    independent_subset,
)
from diracred.phase import coordinate


def test_subset_size_and_invertibility():
    cs = toy_system()
    at = sample_surface(cs, seed=0, count=1)[0]
    sel = independent_subset(cs, at)
    assert len(sel.indices) == cs.n_independent
    assert rank_tol(sel.cab) == cs.n_independent
    assert np.allclose(sel.cab @ sel.cab_inv, np.eye(2), atol=1e-12)


def test_subset_choice_does_not_change_bracket():
    cs = synth_linear(6, 8, 4, 2, seed=2)
    at = sample_surface(cs, seed=0, count=1)[0]
    base = fundamental_matrix_oracle(cs, at)
    rng = np.random.default_rng(4)
    for _ in range(5):
        order = list(rng.permutation(cs.m0))
        alt = fundamental_matrix_oracle(cs, at, order=order)
        assert np.abs(alt - base).max() < 1e-9


def test_order_must_be_permutation():
    cs = toy_system()
    at = sample_surface(cs, seed=0, count=1)[0]
    with pytest.raises(InvalidInputError):
        independent_subset(cs, at, order=[0, 0, 1, 2, 3, 4])


def test_constraints_are_casimirs_of_oracle_bracket():
    cs = toy_system()
    at = sample_surface(cs, seed=1, count=1)[0]
    f = coordinate(cs.spec.dim, 1)
    for chi in cs.chi:
        assert abs(dirac_oracle(cs, chi, f, at)) < 1e-10


def test_degenerate_system_detected():
    cs = toy_system()
    # claim more independent constraints than the gradients can supply
    bad = type(cs)(
        spec=cs.spec, chi=cs.chi, z1=cs.z1[:, :2], z2=None, order=1,
        name="broken",
    )
    at = sample_surface(cs, seed=0, count=1)[0]
    with pytest.raises(DegenerateSystemError):
        independent_subset(bad, at)


def test_compare_fundamental_keys():
    cs = toy_system()
    at = sample_surface(cs, seed=0, count=1)[0]
    out = compare_fundamental(
        cs, {"same": lambda z: fundamental_matrix_oracle(cs, z)}, at,
        DEFAULT_TOL,
    )
    assert out["vs_same"] == 0.0
    assert out["max_pairwise"] == 0.0
