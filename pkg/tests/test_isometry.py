import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypvol.errors import AmbiguousClass, IdentityHasAllFixed, InvalidParameter, NotReal
from hypvol.isometry import (IDENTITY, INFINITY, ORIGIN, BoundaryPoint, Elementarity, H2Point,
                             H3Point, IsometryKind, ProjectiveIsometry, apply_boundary, apply_h2,
                             apply_h3, classify, compose, diagonal, dist_h2, dist_h3,
                             fixed_points, is_elementary_pair, isometry, random_isometry,
                             rotation)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def test_canonical_sign_identifies_projective_classes():
    g = isometry(2, 1, 1, 1)
    h = isometry(-2, -1, -1, -1)
    assert g == h
    assert g.a.real > 0


def test_from_matrix_rescales_determinant():
    g = isometry(2, 0, 0, 2)
    assert g == IDENTITY
    with pytest.raises(InvalidParameter):
        isometry(1, 2, 2, 4)


def test_constructor_rejects_bad_determinant():
    with pytest.raises(InvalidParameter):
        ProjectiveIsometry(1, 1, 1, 1)


def test_boundary_action_basic():
    g = isometry(1, 1, 0, 1)
    assert apply_boundary(g, BoundaryPoint.from_complex(2)).isclose(BoundaryPoint.from_complex(3))
    assert apply_boundary(g, INFINITY) == INFINITY
    inv = isometry(0, -1, 1, 0)
    assert apply_boundary(inv, BoundaryPoint.from_complex(0)) == INFINITY


def test_h3_action_of_dilation():
    g = diagonal(2)  # z -> 4z
    y = apply_h3(g, H3Point(1 + 1j, 0.5))
    assert abs(y.z - (4 + 4j)) < 1e-14 and abs(y.t - 2) < 1e-14
    assert abs(dist_h3(ORIGIN, apply_h3(g, ORIGIN)) - math.log(4)) < 1e-14


def test_h2_action_rejects_complex():
    with pytest.raises(NotReal):
        apply_h2(isometry(1, 1j, 0, 1), H2Point(1j))
    assert abs(apply_h2(rotation(1.0), H2Point(1j)).z - 1j) < 1e-14


def test_dist_h2_matches_formula():
    # d(i, e^s i) = s on the imaginary axis
    assert abs(dist_h2(H2Point(1j), H2Point(3j)) - math.log(3)) < 1e-14


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_actions_are_isometric(seed):
    rng = np.random.default_rng(seed)
    g = random_isometry(rng)
    x = H3Point(complex(*rng.normal(size=2)), float(rng.uniform(0.3, 3)))
    y = H3Point(complex(*rng.normal(size=2)), float(rng.uniform(0.3, 3)))
    d0 = dist_h3(x, y)
    d1 = dist_h3(apply_h3(g, x), apply_h3(g, y))
    assert abs(d0 - d1) < 1e-8 * max(1, d0)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_composition_is_an_action(seed):
    rng = np.random.default_rng(seed)
    g, h = random_isometry(rng), random_isometry(rng)
    p = BoundaryPoint.from_complex(complex(*rng.normal(size=2)))
    lhs = apply_boundary(compose(g, h), p)
    rhs = apply_boundary(g, apply_boundary(h, p))
    assert lhs.chordal(rhs) < 1e-9
    assert compose(g, g.inverse()).isclose(IDENTITY, 1e-9)


def test_classify_kinds():
    assert classify(IDENTITY).kind is IsometryKind.IDENTITY
    assert classify(isometry(1, 1, 0, 1)).kind is IsometryKind.PARABOLIC
    ell = classify(rotation(0.8))
    assert ell.kind is IsometryKind.ELLIPTIC and abs(ell.rotation_angle - 0.8) < 1e-12
    lox = classify(diagonal(cmath.exp((2 + 0.3j) / 2)))
    assert lox.kind is IsometryKind.LOXODROMIC
    assert abs(lox.complex_length - (2 + 0.3j)) < 1e-12
    assert classify(diagonal(math.exp(0.5))).is_hyperbolic


def test_classify_ambiguous_band():
    # trace^2 is 4 + 1e-11: neither clearly parabolic nor clearly not
    lam = 1 + math.sqrt(2.5e-12)
    g = isometry(lam, 1, 0, 1 / lam)
    assert 1e-12 < abs(g.trace ** 2 - 4) < 1e-9
    with pytest.raises(AmbiguousClass):
        classify(g)


def test_fixed_points_ordering():
    g = diagonal(2)  # z -> 4z: attracting infinity, repelling 0
    att, rep = fixed_points(g)
    assert att == INFINITY
    assert rep.isclose(BoundaryPoint.from_complex(0))
    with pytest.raises(IdentityHasAllFixed):
        fixed_points(IDENTITY)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_fixed_points_are_fixed(seed):
    g = random_isometry(np.random.default_rng(seed))
    if classify(g).kind is not IsometryKind.LOXODROMIC:
        return
    att, rep = fixed_points(g)
    for p in (att, rep):
        assert apply_boundary(g, p).chordal(p) < 1e-8


def test_elementarity_detectors():
    a = diagonal(2)
    assert is_elementary_pair(a, diagonal(3)) is Elementarity.COMMON_FIXED_POINT
    # swap of 0 and infinity preserves the axis of a
    assert is_elementary_pair(a, isometry(0, 1j, 1j, 0)) is Elementarity.INVARIANT_GEODESIC
    # two rotations about i with axes through one point
    r1, r2 = rotation(0.7), isometry(math.cos(0.3), 1j * math.sin(0.3), 1j * math.sin(0.3),
                                      math.cos(0.3))
    assert is_elementary_pair(r1, r2) is Elementarity.FIXED_INTERIOR_POINT
    assert is_elementary_pair(diagonal(2), isometry(2, 1, 1, 1)) is Elementarity.INVARIANT_PLANE
    b = isometry(1, 0.5j, 0.3 + 0.2j, None or (1 + 0.5j * (0.3 + 0.2j)))
    assert is_elementary_pair(diagonal(cmath.exp(0.5 + 0.2j)), b) is Elementarity.NON_ELEMENTARY
