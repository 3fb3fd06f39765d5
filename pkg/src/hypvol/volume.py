"""Bloch-Wigner dilogarithm, ideal tetrahedra and signed hyperbolic areas."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .errors import DegenerateFrame, InvalidParameter
from .isometry import (BoundaryPoint, H2Point, ProjectiveIsometry, apply_boundary)

#: Volume of the regular ideal tetrahedron, D(exp(i pi / 3)).
V3 = 1.0149416064096536250

FRAME_TOL = 1e-13
_PI2_6 = math.pi ** 2 / 6


@lru_cache(maxsize=None)
def _li2_coefficients(nterms=40):
    # Bernoulli numbers B_0..B_n (B_1 = -1/2) via the standard recurrence
    b = [Fraction(1)]
    for m in range(1, nterms):
        s = sum(math.comb(m + 1, k) * b[k] for k in range(m))
        b.append(-s / (m + 1))
    return tuple(float(b[n] / math.factorial(n + 1)) for n in range(nterms))


def _li2_core(z: complex) -> complex:
    """Li_2 for |z| <= 1, Re z <= 1/2 via the series in u = -log(1 - z)."""
    u = -cmath.log(1 - z)
    coeffs = _li2_coefficients()
    u2 = u * u
    # B_n vanishes for odd n > 1, so sum the even terms plus the B_1 term
    total = coeffs[0] * u + coeffs[1] * u2
    power = u * u2
    for n in range(2, len(coeffs), 2):
        term = coeffs[n] * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        power *= u2
    return total


def li2(z: complex) -> complex:
    """Principal branch dilogarithm for |z| <= 1."""
    z = complex(z)
    if abs(z) > 1 + 1e-15:
        raise InvalidParameter("li2 is only provided on the closed unit disc")
    if z == 0:
        return 0j
    if z == 1:
        return complex(_PI2_6)
    if z.real > 0.5:
        return -_li2_core(1 - z) + _PI2_6 - cmath.log(z) * cmath.log(1 - z)
    return _li2_core(z)


def bloch_wigner(z) -> float:
    """D(z) = Im Li_2(z) + arg(1 - z) log|z|; zero at 0, 1 and infinity."""
    if isinstance(z, BoundaryPoint):
        z = z.to_complex()
    z = complex(z)
    if cmath.isinf(z) or z == 0 or z == 1:
        return 0.0
    if abs(z) > 1:
        return -bloch_wigner(1 / z)
    return li2(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def _bracket(p: BoundaryPoint, q: BoundaryPoint) -> complex:
    return p.z0 * q.z1 - p.z1 * q.z0


def cross_ratio(z0, z1, z2, z3) -> BoundaryPoint:
    """Image of z3 under the Mobius map sending (z0, z1, z2) to (inf, 0, 1)."""
    pts = [p if isinstance(p, BoundaryPoint) else BoundaryPoint.from_complex(p)
           for p in (z0, z1, z2, z3)]
    p0, p1, p2, p3 = pts
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if pts[i].chordal(pts[j]) < FRAME_TOL:
            raise DegenerateFrame(f"frame points {i} and {j} coincide")
    num = _bracket(p3, p1) * _bracket(p2, p0)
    den = _bracket(p3, p0) * _bracket(p2, p1)
    return BoundaryPoint(num, den)


def ideal_tet_volume(z0, z1, z2, z3) -> float:
    """Signed volume of the ideal tetrahedron with the given ordered vertices."""
    pts = [p if isinstance(p, BoundaryPoint) else BoundaryPoint.from_complex(p)
           for p in (z0, z1, z2, z3)]
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i].chordal(pts[j]) < FRAME_TOL:
                return 0.0
    return bloch_wigner(cross_ratio(*pts))


def vol3_cocycle(x: BoundaryPoint, g0: ProjectiveIsometry, g1: ProjectiveIsometry,
                 g2: ProjectiveIsometry, g3: ProjectiveIsometry) -> float:
    return ideal_tet_volume(*(apply_boundary(g, x) for g in (g0, g1, g2, g3)))


# ---------------------------------------------------------------- two dimensions

def _to_disc(p) -> complex:
    """Poincare disc coordinate of a point of H^2 or of its boundary."""
    if isinstance(p, H2Point):
        z = complex(p.z)
    elif isinstance(p, BoundaryPoint):
        if p.is_infinity:
            return 1 + 0j
        z = p.to_complex()
        if abs(z.imag) > 1e-12 * max(1.0, abs(z)):
            raise InvalidParameter("boundary point of H^2 must be real")
        z = complex(z.real, 0.0)
    else:
        z = complex(p)
        if cmath.isinf(z):
            return 1 + 0j
        if z.imag < 0:
            raise InvalidParameter("points of H^2 closure need Im >= 0")
    w = (z - 1j) / (z + 1j)
    if z.imag == 0:
        w /= abs(w)
    return w


def signed_area_h2(x0, x1, x2) -> float:
    """Orientation-signed area of a geodesic triangle in the closure of H^2.

    Vertices may be :class:`H2Point`, real numbers / infinity, or real
    :class:`BoundaryPoint` values.  Degenerate triangles have area 0.
    """
    w = [_to_disc(p) for p in (x0, x1, x2)]
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(w[i] - w[j]) < 1e-13:
                return 0.0
    # Klein coordinates make geodesics straight, so orientation is Euclidean
    k = [2 * v / (1 + abs(v) ** 2) for v in w]
    e1, e2 = k[1] - k[0], k[2] - k[0]
    cross = e1.real * e2.imag - e1.imag * e2.real
    if abs(cross) < 1e-15:
        return 0.0
    angle_sum = 0.0
    for i in range(3):
        p = w[i]
        if abs(p) >= 1 - 1e-15:
            continue
        q, r = w[(i + 1) % 3], w[(i + 2) % 3]
        fq = (q - p) / (1 - p.conjugate() * q)
        fr = (r - p) / (1 - p.conjugate() * r)
        angle_sum += abs(cmath.phase(fr / fq))
    area = max(0.0, math.pi - angle_sum)
    return math.copysign(area, cross)


def vol2_cocycle(x, g0: ProjectiveIsometry, g1: ProjectiveIsometry,
                 g2: ProjectiveIsometry) -> float:
    """Signed area of the triangle (g0 x, g1 x, g2 x) for real g_i."""
    return signed_area_h2(*(_apply_h2_closure(g, x) for g in (g0, g1, g2)))


def _apply_h2_closure(g: ProjectiveIsometry, x):
    from .isometry import apply_h2
    if isinstance(x, H2Point):
        return apply_h2(g, x)
    p = x if isinstance(x, BoundaryPoint) else BoundaryPoint.from_complex(x)
    if not g.is_real():
        from .errors import NotReal
        raise NotReal("vol2 needs real isometries")
    return apply_boundary(g, p)
