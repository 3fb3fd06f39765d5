"""PSL(2,C) acting on the Riemann sphere, upper half-space and upper half-plane.

Group elements are stored as determinant-one 2x2 complex matrices in a
canonical sign: the first entry of ``(a, b, c, d)`` whose modulus exceeds
the tolerance has argument in ``[0, pi)``.  With that convention two
projective classes are equal exactly when their canonical matrices agree.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousClass, IdentityHasAllFixed, InvalidParameter, NotReal

TOL_DET = 1e-12
TOL_CLASS = 1e-9


def _scale(*entries):
    return max(1.0, max(abs(e) for e in entries))


def _canonical_sign(a, b, c, d, tol=TOL_DET):
    cut = tol * _scale(a, b, c, d)
    for e in (a, b, c, d):
        if abs(e) > cut:
            if abs(e.imag) <= tol * abs(e):
                flip = e.real < 0
            else:
                flip = e.imag < 0
            if flip:
                return -a, -b, -c, -d
            return a, b, c, d
    return a, b, c, d


@dataclass(frozen=True)
class ProjectiveIsometry:
    """An element of PSL(2,C); build it with :func:`isometry` or :meth:`from_matrix`."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        scale = _scale(self.a, self.b, self.c, self.d)
        if abs(det - 1) > TOL_DET * scale * scale:
            raise InvalidParameter(f"determinant {det} is not 1")

    @classmethod
    def from_matrix(cls, m) -> "ProjectiveIsometry":
        m = np.asarray(m, dtype=complex)
        a, b, c, d = complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])
        det = a * d - b * c
        if det == 0:
            raise InvalidParameter("singular matrix")
        s = cmath.sqrt(det)
        return cls(*_canonical_sign(a / s, b / s, c / s, d / s))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def inverse(self) -> "ProjectiveIsometry":
        return ProjectiveIsometry(*_canonical_sign(self.d, -self.b, -self.c, self.a))

    def __matmul__(self, other: "ProjectiveIsometry") -> "ProjectiveIsometry":
        return compose(self, other)

    def is_real(self, tol=TOL_CLASS) -> bool:
        cut = tol * _scale(*self.entries)
        return all(abs(e.imag) <= cut for e in self.entries)

    def isclose(self, other: "ProjectiveIsometry", tol=1e-9) -> bool:
        scale = max(_scale(*self.entries), _scale(*other.entries))
        plus = max(abs(x - y) for x, y in zip(self.entries, other.entries))
        minus = max(abs(x + y) for x, y in zip(self.entries, other.entries))
        return min(plus, minus) <= tol * scale


def isometry(a, b, c, d) -> ProjectiveIsometry:
    """Canonical isometry from (a, b, c, d), rescaled to determinant one."""
    return ProjectiveIsometry.from_matrix([[a, b], [c, d]])


IDENTITY = ProjectiveIsometry(1 + 0j, 0j, 0j, 1 + 0j)


def compose(g: ProjectiveIsometry, h: ProjectiveIsometry) -> ProjectiveIsometry:
    a = g.a * h.a + g.b * h.c
    b = g.a * h.b + g.b * h.d
    c = g.c * h.a + g.d * h.c
    d = g.c * h.b + g.d * h.d
    det = a * d - b * c
    # renormalize drift only when det is computed well above rounding noise
    noise = 64 * 2.0 ** -52 * (abs(a * d) + abs(b * c))
    if det != 1 and abs(det - 1) > noise and abs(det) > noise:
        s = cmath.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
    return ProjectiveIsometry(*_canonical_sign(a, b, c, d))


def diagonal(lam: complex) -> ProjectiveIsometry:
    return isometry(lam, 0, 0, 1 / lam)


def rotation(angle: float) -> ProjectiveIsometry:
    """Elliptic element of PSL(2,R) rotating H^2 by ``angle`` about i."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return isometry(c, -s, s, c)


# ---------------------------------------------------------------- points

@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point of CP^1 stored as a homogeneous pair; the point z is (z, 1)."""

    z0: complex
    z1: complex

    def __post_init__(self):
        z0, z1 = complex(self.z0), complex(self.z1)
        m = max(abs(z0), abs(z1))
        if m == 0 or not math.isfinite(m):
            raise InvalidParameter("homogeneous pair must be finite and nonzero")
        # scale so the larger coordinate is exactly 1
        if abs(z0) >= abs(z1):
            z0, z1 = 1 + 0j, z1 / z0
        else:
            z0, z1 = z0 / z1, 1 + 0j
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "z1", z1)

    @classmethod
    def from_complex(cls, z) -> "BoundaryPoint":
        if z is None or (isinstance(z, (float, complex)) and cmath.isinf(z)):
            return cls(1, 0)
        return cls(complex(z), 1)

    @property
    def is_infinity(self) -> bool:
        return self.z1 == 0

    def to_complex(self) -> complex:
        """Affine coordinate; ``complex('inf')`` for the point at infinity."""
        if self.z1 == 0:
            return complex(math.inf, 0)
        return self.z0 / self.z1

    def vector(self) -> np.ndarray:
        return np.array([self.z0, self.z1], dtype=complex)

    def chordal(self, other: "BoundaryPoint") -> float:
        det = self.z0 * other.z1 - self.z1 * other.z0
        n1 = math.hypot(abs(self.z0), abs(self.z1))
        n2 = math.hypot(abs(other.z0), abs(other.z1))
        return abs(det) / (n1 * n2)

    def isclose(self, other: "BoundaryPoint", tol=1e-9) -> bool:
        return self.chordal(other) <= tol

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return self.chordal(other) <= 1e-13

    def __hash__(self):
        raise TypeError("BoundaryPoint compares up to tolerance and is unhashable")

    def __repr__(self):
        if self.is_infinity:
            return "BoundaryPoint(inf)"
        return f"BoundaryPoint({self.to_complex()!r})"


INFINITY = BoundaryPoint(1, 0)


@dataclass(frozen=True)
class H3Point:
    z: complex
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise InvalidParameter("height must be positive")


@dataclass(frozen=True)
class H2Point:
    z: complex

    def __post_init__(self):
        if not complex(self.z).imag > 0:
            raise InvalidParameter("H2 points need positive imaginary part")


ORIGIN = H3Point(0j, 1.0)


# ---------------------------------------------------------------- actions

def apply_boundary(g: ProjectiveIsometry, p: BoundaryPoint) -> BoundaryPoint:
    return BoundaryPoint(g.a * p.z0 + g.b * p.z1, g.c * p.z0 + g.d * p.z1)


def apply_h3(g: ProjectiveIsometry, x: H3Point) -> H3Point:
    z, t = x.z, x.t
    w = g.c * z + g.d
    den = abs(w) ** 2 + abs(g.c) ** 2 * t * t
    znew = ((g.a * z + g.b) * w.conjugate() + g.a * g.c.conjugate() * t * t) / den
    return H3Point(znew, t / den)


def apply_h2(g: ProjectiveIsometry, x: H2Point, tol=TOL_CLASS) -> H2Point:
    if not g.is_real(tol):
        raise NotReal("apply_h2 needs a real matrix")
    a, b, c, d = (e.real for e in g.entries)
    return H2Point((a * x.z + b) / (c * x.z + d))


def dist_h3(x: H3Point, y: H3Point) -> float:
    num = abs(x.z - y.z) ** 2 + (x.t - y.t) ** 2
    u = num / (2 * x.t * y.t)
    # acosh(1+u) written to stay accurate for small u
    return math.log1p(u + math.sqrt(u * (u + 2)))


def dist_h2(x: H2Point, y: H2Point) -> float:
    return dist_h3(H3Point(x.z.real, x.z.imag), H3Point(y.z.real, y.z.imag))


def displacement(g: ProjectiveIsometry, x: H3Point = ORIGIN) -> float:
    return dist_h3(x, apply_h3(g, x))


# ---------------------------------------------------------------- classification

class IsometryKind(str, enum.Enum):
    IDENTITY = "Identity"
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    LOXODROMIC = "Loxodromic"


@dataclass(frozen=True)
class IsometryClass:
    kind: IsometryKind
    complex_length: complex | None = None
    rotation_angle: float | None = None

    @property
    def is_hyperbolic(self) -> bool:
        """Loxodromic with zero rotation, i.e. hyperbolic in the PSL(2,R) sense."""
        return (self.kind is IsometryKind.LOXODROMIC
                and abs(self.complex_length.imag) < 1e-9)


def _wrap_angle(theta: float) -> float:
    theta = math.remainder(theta, 2 * math.pi)
    if theta <= -math.pi:
        theta += 2 * math.pi
    return theta


def complex_length(g: ProjectiveIsometry) -> complex:
    """tau = 2 acosh(tr/2), normalized to Re >= 0 and Im in (-pi, pi]."""
    tau = 2 * cmath.acosh(g.trace / 2)
    if tau.real < 0 or (tau.real == 0 and tau.imag < 0):
        tau = -tau
    return complex(tau.real, _wrap_angle(tau.imag))


def classify(g: ProjectiveIsometry, tol_class=TOL_CLASS) -> IsometryClass:
    tr = g.trace
    tr2 = tr * tr
    near_one = min(
        max(abs(g.a - s), abs(g.d - s), abs(g.b), abs(g.c)) for s in (1, -1)
    )
    if abs(tr2 - 4) < tol_class and abs(tr2.imag) < tol_class:
        if near_one <= tol_class:
            return IsometryClass(IsometryKind.IDENTITY)
        if abs(tr2 - 4) <= TOL_DET * _scale(*g.entries) ** 2:
            return IsometryClass(IsometryKind.PARABOLIC)
        raise AmbiguousClass(f"trace^2 = {tr2} is within {tol_class} of 4")
    if abs(tr2.imag) < tol_class and -tol_class < tr2.real < 4:
        half = min(1.0, math.sqrt(max(tr2.real, 0.0)) / 2)
        return IsometryClass(IsometryKind.ELLIPTIC, rotation_angle=2 * math.acos(half))
    return IsometryClass(IsometryKind.LOXODROMIC, complex_length=complex_length(g))


def fixed_points(g: ProjectiveIsometry, tol_class=TOL_CLASS):
    """Fixed points on CP^1.

    For a loxodromic element the result is ``(attracting, repelling)``;
    otherwise a tuple of one or two points.
    """
    kind = classify(g, tol_class).kind
    if kind is IsometryKind.IDENTITY:
        raise IdentityHasAllFixed("the identity fixes every point")
    a, b, c, d = g.entries
    scale = _scale(a, b, c, d)
    if abs(c) <= 1e-14 * scale:
        pts = [INFINITY]
        if abs(d - a) > 1e-14 * scale:
            pts.append(BoundaryPoint.from_complex(b / (d - a)))
    else:
        disc = cmath.sqrt((d - a) ** 2 + 4 * b * c)
        # the root formula below avoids cancellation in either sign
        r1 = BoundaryPoint(a - d + disc, 2 * c)
        r2 = BoundaryPoint(a - d - disc, 2 * c)
        pts = [r1, r2]
        if kind is IsometryKind.PARABOLIC or r1.chordal(r2) < 1e-12:
            pts = [r1 if abs(a - d + disc) >= abs(a - d - disc) else r2]
    if kind is IsometryKind.LOXODROMIC and len(pts) == 2:
        if _multiplier(g, pts[0]) > 1:
            pts.reverse()
    return tuple(pts)


def _multiplier(g: ProjectiveIsometry, p: BoundaryPoint) -> float:
    """|derivative| of g at a fixed point, as a ratio (works at infinity)."""
    if p.is_infinity:
        return abs(g.d / g.a) ** 2 if g.a != 0 else math.inf
    z = p.to_complex()
    w = g.c * z + g.d
    return 1 / abs(w) ** 2


# ---------------------------------------------------------------- elementarity

class Elementarity(str, enum.Enum):
    COMMON_FIXED_POINT = "CommonFixedPoint"
    INVARIANT_GEODESIC = "InvariantGeodesic"
    INVARIANT_PLANE = "InvariantPlane"
    FIXED_INTERIOR_POINT = "FixedInteriorPoint"
    NON_ELEMENTARY = "NonElementary"


def commutator(g: ProjectiveIsometry, h: ProjectiveIsometry) -> ProjectiveIsometry:
    return g @ h @ g.inverse() @ h.inverse()


def _preserves_pair(g, pair, tol):
    p, q = pair
    gp, gq = apply_boundary(g, p), apply_boundary(g, q)
    same = gp.chordal(p) <= tol and gq.chordal(q) <= tol
    swap = gp.chordal(q) <= tol and gq.chordal(p) <= tol
    return same or swap


def _cross_ratio_raw(p0, p1, p2, p3):
    def br(u, v):
        return u.z0 * v.z1 - u.z1 * v.z0
    return (br(p3, p1) * br(p2, p0)) / (br(p3, p0) * br(p2, p1))


def is_elementary_pair(A: ProjectiveIsometry, B: ProjectiveIsometry,
                       tol=TOL_CLASS, ambient: str = "complex") -> Elementarity:
    """Detect the ways the group generated by A and B can be elementary.

    With ``ambient="real"`` the pair is judged inside PSL(2,R): the invariant
    plane test is skipped, since every real pair preserves H^2.
    """
    if ambient not in ("complex", "real"):
        raise InvalidParameter("ambient must be 'complex' or 'real'")
    ma, mb = A.matrix, B.matrix
    comm = ma @ mb @ np.linalg.inv(ma) @ np.linalg.inv(mb)
    scale = _scale(*A.entries) ** 2 * _scale(*B.entries) ** 2
    if abs(np.trace(comm) - 2) < tol * scale:
        # the SL(2,C) commutator does not depend on the choice of lifts
        return Elementarity.COMMON_FIXED_POINT
    cls_a, cls_b = classify(A, tol), classify(B, tol)
    pairs = []
    for g, cl in ((A, cls_a), (B, cls_b)):
        if cl.kind in (IsometryKind.LOXODROMIC, IsometryKind.ELLIPTIC):
            pairs.append(fixed_points(g, tol))
    geo_tol = 1e-7
    for pair in pairs:
        if len(pair) == 2 and _preserves_pair(A, pair, geo_tol) and _preserves_pair(B, pair, geo_tol):
            return Elementarity.INVARIANT_GEODESIC
    if cls_a.kind is IsometryKind.ELLIPTIC and cls_b.kind is IsometryKind.ELLIPTIC:
        pa, pb = fixed_points(A, tol), fixed_points(B, tol)
        cr = _cross_ratio_raw(pa[0], pa[1], pb[0], pb[1])
        if abs(cr.imag) <= geo_tol * max(1.0, abs(cr)) and cr.real < 0:
            return Elementarity.FIXED_INTERIOR_POINT
    if ambient == "real":
        return Elementarity.NON_ELEMENTARY
    ta, tb, tab = A.trace, B.trace, (A @ B).trace
    # sign-independent real-trace test: tr^2 A, tr^2 B, trA trB trAB
    invariants = (ta * ta, tb * tb, ta * tb * tab)
    if all(abs(v.imag) <= tol * max(1.0, abs(v)) for v in invariants):
        return Elementarity.INVARIANT_PLANE
    return Elementarity.NON_ELEMENTARY


def conjugate(h: ProjectiveIsometry, g: ProjectiveIsometry) -> ProjectiveIsometry:
    """h g h^-1."""
    return h @ g @ h.inverse()


def random_isometry(rng: np.random.Generator, scale=2.0) -> ProjectiveIsometry:
    while True:
        m = rng.normal(scale=scale, size=(2, 2)) + 1j * rng.normal(scale=scale, size=(2, 2))
        if abs(np.linalg.det(m)) > 1e-3:
            return ProjectiveIsometry.from_matrix(m)
