import numpy as np
import pytest
from hypothesis import given

from conescale import cones
from conescale.errors import DimensionError, DomainError, NotInteriorError, NumericalError
from conftest import cone_and_rng

O2, L3 = cones.orthant(2), cones.lorentz(3)


@pytest.mark.parametrize("cone,x,expected", [
    (O2, [0, 0], True),
    (O2, [1, -1], False),
    (L3, [3, 4, 5], True),
    (L3, [3, 4, 4.99], False),
])
def test_contains(cone, x, expected):
    assert cones.contains(cone, x) is expected


@pytest.mark.parametrize("cone,x,expected", [
    (O2, [1, 1], True),
    (O2, [1, 0], False),
    (L3, [0, 0, 1], True),
    (L3, [3, 4, 5], False),
])
def test_interior_contains(cone, x, expected):
    assert cones.interior_contains(cone, x) is expected


def test_leq_and_strict():
    assert cones.leq(O2, [1, 1], [2, 3])
    assert cones.leq(O2, [7, -2], [7, -2])
    assert not cones.leq(O2, [1, 0], [0, 1])
    assert cones.strictly_less(O2, [0, 0], [1, 1])
    assert not cones.strictly_less(O2, [0, 0], [1, 0])
    assert cones.strictly_less(cones.lorentz(2), [0, 0], [0, 1])


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        cones.contains(O2, [1, 2, 3])
    with pytest.raises(DimensionError):
        cones.leq(O2, [1, 2], [1, 2, 3])


def test_polyhedral_tolerance_scales_with_normal_length():
    P = cones.polyhedral([[10.0, 0.0], [0.0, 1.0]], [1, 1])
    assert cones.contains(P, [-5e-13, 1.0])
    assert not cones.contains(P, [-1e-9, 1.0])


@pytest.mark.parametrize("cone,c,e,delta", [
    (O2, [2, 2], [1, 1], 0.25),
    (O2, [1, 1], [1, 1], 0.5),
    (cones.lorentz(2), [0, 4], [0, 1], 0.125),
])
def test_find_scale(cone, c, e, delta):
    assert cones.find_scale(cone, c, e) == delta


def test_find_scale_rejects_boundary():
    with pytest.raises(NotInteriorError):
        cones.find_scale(O2, [1, 0], [1, 1])


def test_find_scale_exhausted():
    with pytest.raises(NumericalError):
        cones.find_scale(O2, [1e30, 1e30], [1, 1])


def test_validate_examples():
    assert cones.validate(cones.orthant(3)).passed
    flat = cones.validate(cones.polyhedral([[1.0, 0.0]], [1.0, 0.0]))
    assert not flat.checks["pointedness"]
    assert cones.validate(cones.polyhedral([[1, 0], [0, 1]], [1, 1])).passed


def test_polyhedral_needs_interior_witness():
    with pytest.raises(NotInteriorError):
        cones.polyhedral([[1, 0], [0, 1]], [1, 0])


def test_json_round_trip():
    for c in (O2, L3, cones.polyhedral([[1, 0], [1, 1]], [1, 1])):
        assert cones.cone_from_json(c.to_json()).to_json() == c.to_json()
    with pytest.raises(DomainError):
        cones.cone_from_json({"kind": "orthant", "dim": 2, "extra": 1})
    with pytest.raises(DomainError):
        cones.cone_from_json({"kind": "simplex", "dim": 2})


@given(cone_and_rng())
def test_point_plus_interior_is_interior(data):
    cone, rng = data
    x, y = cones.sample_point(cone, rng), cones.sample_interior(cone, rng)
    assert cones.contains(cone, x)
    assert cones.interior_contains(cone, x + y)


@given(cone_and_rng())
def test_leq_preorder(data):
    cone, rng = data
    a = cones.sample_vector(cone, rng)
    b = a + cones.sample_point(cone, rng)
    c = b + cones.sample_point(cone, rng)
    assert cones.leq(cone, a, a)
    assert cones.leq(cone, a, b) and cones.leq(cone, b, c) and cones.leq(cone, a, c)


@given(cone_and_rng())
def test_antisymmetry(data):
    cone, rng = data
    a = cones.sample_vector(cone, rng)
    b = a + cones.sample_point(cone, rng)
    if cones.leq(cone, b, a):
        assert np.abs(a - b).max() <= 10 * cone.tol_membership * max(1.0, np.abs(a).max(), np.abs(b).max())


@given(cone_and_rng())
def test_strict_implies_leq(data):
    cone, rng = data
    a = cones.sample_vector(cone, rng)
    b = a + cones.sample_interior(cone, rng)
    assert cones.strictly_less(cone, a, b) and cones.leq(cone, a, b)


@given(cone_and_rng())
def test_find_scale_output_is_strict(data):
    cone, rng = data
    c, e = cones.sample_interior(cone, rng), cones.sample_interior(cone, rng)
    d = cones.find_scale(cone, c, e)
    assert cones.strictly_less(cone, np.zeros(cone.dim), e - d * c)
    # the previous step of the schedule must have failed
    if d < 1:
        assert not cones.strictly_less(cone, np.zeros(cone.dim), e - 2 * d * c)
