import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from hypvol.errors import DegenerateFrame, InvalidParameter
from hypvol.isometry import INFINITY, BoundaryPoint, H2Point, dist_h2, random_isometry, rotation
from hypvol.volume import (V3, bloch_wigner, cross_ratio, ideal_tet_volume, li2, signed_area_h2,
                           vol2_cocycle, vol3_cocycle)

# Catalan's constant from the alternating series sum (-1)^k / (2k+1)^2, summed by mpmath
CATALAN = float(mpmath.nsum(lambda k: (-1) ** k / (2 * k + 1) ** 2, [0, mpmath.inf]))


def d_oracle(z):
    z = mpmath.mpc(z)
    return float(mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z)))


def test_regular_ideal_tetrahedron():
    assert abs(bloch_wigner(cmath.exp(1j * math.pi / 3)) - 1.0149416064) < 1e-9
    assert abs(V3 - d_oracle(cmath.exp(1j * math.pi / 3))) < 1e-15


def test_d_of_i_is_catalan():
    assert abs(CATALAN - 0.915965594177219) < 1e-14
    assert abs(bloch_wigner(1j) - CATALAN) < 1e-11


def test_li2_matches_mpmath_on_disc(rng):
    for _ in range(300):
        z = complex(*rng.uniform(-1, 1, 2))
        if abs(z) > 1:
            continue
        ref = complex(mpmath.polylog(2, z))
        assert abs(li2(z) - ref) < 1e-14


def test_li2_outside_disc_is_refused():
    with pytest.raises(InvalidParameter):
        li2(1.5)


def test_d_zero_on_real_axis_and_at_special_points():
    for z in (0, 1, -2.5, 0.3, 7.0, complex("inf")):
        assert bloch_wigner(z) == 0 or abs(bloch_wigner(z)) < 1e-15


def test_d_matches_mpmath(rng):
    worst = 0
    for _ in range(500):
        z = complex(*rng.normal(scale=2, size=2))
        worst = max(worst, abs(bloch_wigner(z) - d_oracle(z)))
    assert worst < 1e-13


zs = st.complex_numbers(min_magnitude=0.05, max_magnitude=20, allow_nan=False,
                        allow_infinity=False).filter(lambda z: abs(z.imag) > 1e-3 and abs(z - 1) > 0.05)


@settings(max_examples=200, deadline=None)
@given(zs)
def test_symmetries(z):
    d = bloch_wigner(z)
    assert abs(d + bloch_wigner(1 / z)) < 1e-10
    assert abs(d + bloch_wigner(1 - z)) < 1e-10
    assert abs(d + bloch_wigner(z.conjugate())) < 1e-10


@settings(max_examples=200, deadline=None)
@given(zs, zs)
def test_five_term_relation(x, y):
    if abs(1 - x * y) < 1e-3:
        return
    total = (bloch_wigner(x) + bloch_wigner(y) + bloch_wigner((1 - x) / (1 - x * y))
             + bloch_wigner(1 - x * y) + bloch_wigner((1 - y) / (1 - x * y)))
    assert abs(total) < 1e-10


def test_cross_ratio_normalization():
    z = 0.4 + 1.3j
    w = cross_ratio(INFINITY, 0, 1, z)
    assert w.isclose(BoundaryPoint.from_complex(z))
    with pytest.raises(DegenerateFrame):
        cross_ratio(1, 1, 2, 3)


def test_ideal_volume_degenerate_is_zero():
    assert ideal_tet_volume(0, 1, 1, 2j) == 0.0


def test_ideal_volume_orientation():
    z = cmath.exp(1j * math.pi / 3)
    assert abs(ideal_tet_volume(INFINITY, 0, 1, z) - V3) < 1e-14
    assert abs(ideal_tet_volume(0, INFINITY, 1, z) + V3) < 1e-14


def test_vol3_cocycle_identity(rng):
    x = BoundaryPoint.from_complex(0.3 + 0.7j)
    for _ in range(100):
        g = [random_isometry(rng) for _ in range(5)]
        total = math.fsum((-1) ** i * vol3_cocycle(x, *(g[:i] + g[i + 1:])) for i in range(5))
        assert abs(total) < 1e-9


def law_of_cosines_area(p, q, r):
    a, b, c = dist_h2(q, r), dist_h2(p, r), dist_h2(p, q)

    def angle(opp, s1, s2):
        val = (math.cosh(s1) * math.cosh(s2) - math.cosh(opp)) / (math.sinh(s1) * math.sinh(s2))
        return math.acos(max(-1, min(1, val)))

    return math.pi - angle(a, b, c) - angle(b, a, c) - angle(c, a, b)


def test_area_against_law_of_cosines(rng):
    for _ in range(200):
        pts = [H2Point(complex(rng.normal(), rng.uniform(0.2, 3))) for _ in range(3)]
        area = signed_area_h2(*pts)
        assert abs(abs(area) - law_of_cosines_area(*pts)) < 1e-9


def test_area_sign_and_ideal_triangle():
    p, q, r = H2Point(1j), H2Point(1 + 1j), H2Point(2j)
    assert signed_area_h2(p, q, r) > 0
    assert abs(signed_area_h2(p, q, r) + signed_area_h2(q, p, r)) < 1e-15
    assert abs(signed_area_h2(0.0, 1.0, complex("inf")) - math.pi) < 1e-12


def test_vol2_invariance(rng):
    x = H2Point(1j)
    g = [rotation(float(rng.uniform(0, 6))) for _ in range(3)]
    h = rotation(0.4)
    a = vol2_cocycle(x, *g)
    b = vol2_cocycle(x, *(h @ gi for gi in g))
    assert abs(a - b) < 1e-12
