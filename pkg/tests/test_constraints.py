import numpy as np
import pytest

from diracred.constraints import (
    ConstraintSet,
    OffSurfaceError,
    curved_first_order_system,
    duplicated_pair_system,
    load_system,
    project_to_surface,
    sample_surface,
    save_system,
    synth_linear,
    toy_system,
    validate,
)
from diracred.numerics import DEFAULT_TOL, InvalidInputError
from diracred.phase import PhaseSpec, affine


def test_toy_system_counts_and_validation():
    cs = toy_system()
    assert (cs.m0, cs.m1, cs.m2) == (6, 6, 2)
    assert cs.n_independent == 2
    pts = sample_surface(cs, seed=0, count=5)
    rep = validate(cs, pts)
    assert rep.passed
    assert rep.residuals["eq_2"] < 1e-10
    assert rep.residuals["eq_11x"] < 1e-10
    assert rep.residuals["eq_11d_rank"] == 0.0


def test_duplicated_pair_first_order():
    cs = duplicated_pair_system()
    assert cs.order == 1
    assert cs.n_independent == 2
    pts = sample_surface(cs, seed=1, count=4)
    rep = validate(cs, pts)
    assert rep.passed
    assert "eq_11x" not in rep.residuals


def test_curved_system_point_dependent_z1():
    cs = curved_first_order_system()
    pts = sample_surface(cs, seed=2, count=4)
    rep = validate(cs, pts)
    assert rep.passed
    z1a = cs.z1_at(pts[0])
    z1b = cs.z1_at(pts[1])
    assert not np.allclose(z1a, z1b)


def test_synth_linear_seeded_and_valid():
    cs = synth_linear(10, 12, 8, 2, seed=5)
    assert (cs.m0, cs.m1, cs.m2) == (12, 8, 2)
    assert cs.n_independent == 6
    pts = sample_surface(cs, seed=0, count=10)
    assert validate(cs, pts).passed
    again = synth_linear(10, 12, 8, 2, seed=5)
    b1, c1 = cs.affine_matrix()
    b2, c2 = again.affine_matrix()
    assert np.array_equal(b1, b2) and np.array_equal(c1, c2)


def test_synth_linear_rejects_bad_counts():
    with pytest.raises(InvalidInputError):
        synth_linear(10, 8, 12, 2, seed=0)  # m1 > m0
    with pytest.raises(InvalidInputError):
        synth_linear(10, 12, 7, 2, seed=0)  # odd m1
    with pytest.raises(InvalidInputError):
        synth_linear(2, 12, 8, 2, seed=0)  # too few pairs


def test_projection_and_surface_guard():
    cs = toy_system()
    z = np.array([1.0, 2.0, -1.0, 0.5])
    on = project_to_surface(cs, z)
    assert cs.surface_residual(on) <= DEFAULT_TOL.surface
    # the free pair (q2, p2) is untouched by the projection
    assert on[1] == pytest.approx(2.0)
    assert on[3] == pytest.approx(0.5)
    with pytest.raises(OffSurfaceError):
        cs.require_on_surface(z, DEFAULT_TOL)


def test_sample_surface_deterministic():
    cs = toy_system()
    a = sample_surface(cs, seed=7, count=3)
    b = sample_surface(cs, seed=7, count=3)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_save_load_round_trip(tmp_path):
    cs = synth_linear(6, 8, 4, 2, seed=1)
    path = tmp_path / "sys.json"
    save_system(cs, path)
    back = load_system(path)
    assert (back.m0, back.m1, back.m2) == (cs.m0, cs.m1, cs.m2)
    b1, c1 = cs.affine_matrix()
    b2, c2 = back.affine_matrix()
    assert np.allclose(b1, b2) and np.allclose(c1, c2)
    assert np.allclose(back.z1, cs.z1)
    assert np.allclose(back.z2, cs.z2)


def test_load_rejects_malformed_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidInputError):
        load_system(bad)
    bad.write_text('{"n_pairs": 2}')
    with pytest.raises(InvalidInputError):
        load_system(bad)
    with pytest.raises(InvalidInputError):
        load_system(tmp_path / "absent.json")


def test_constraint_set_structure_checks():
    spec = PhaseSpec(n_pairs=1)
    chi = (affine([1.0, 0.0]),)
    with pytest.raises(InvalidInputError):
        ConstraintSet(spec=spec, chi=chi, z1=np.ones((1, 1)), order=3)
    with pytest.raises(InvalidInputError):
        ConstraintSet(spec=spec, chi=chi, z1=np.ones((1, 1)), order=2)
    with pytest.raises(InvalidInputError):
        ConstraintSet(spec=spec, chi=chi, z1=np.ones((2, 1)), order=1)
