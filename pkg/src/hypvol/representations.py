"""Explicit representation families and density / Schottky certificates."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .chains import (FreeRepresentation, Word, format_word, multiply,
                     word_eval, word_eval_rtl, word_power)
from .errors import (BudgetExceeded, DiscsOverlap, InvalidParameter, NotFound)
from .isometry import (IDENTITY, ORIGIN, Elementarity, H3Point, IsometryKind,
                       ProjectiveIsometry, apply_h3, classify, diagonal, dist_h3,
                       is_elementary_pair, isometry, rotation)

SCHEMA_VERSION = 1
MU3_DEFAULT = 0.104
SCHOTTKY_INFLATION = 0.01


def _check_mu(mu: float) -> float:
    if not mu > 0:
        raise InvalidParameter("Margulis constant must be positive")
    return float(mu)


def inequality(name: str, lhs: float, rhs: float, relation: str = "<") -> dict:
    """Record lhs < rhs (or lhs > rhs); margin is positive when it holds."""
    margin = rhs - lhs if relation == "<" else lhs - rhs
    return {"name": name, "lhs": lhs, "rhs": rhs, "relation": relation,
            "margin": margin, "holds": margin > 0}


def _matrix_json(g: ProjectiveIsometry):
    return [[e.real, e.imag] for e in g.entries]


# ---------------------------------------------------------------- families

def elliptic_about_unit_axis(theta: float) -> ProjectiveIsometry:
    """Rotation by 2 pi theta about the geodesic with endpoints -1 and +1."""
    c, s = math.cos(math.pi * theta), math.sin(math.pi * theta)
    return isometry(c, 1j * s, 1j * s, c)


def rho_theta(r: float, t: float, theta: float) -> FreeRepresentation:
    """a = loxodromic with complex length r + it on the vertical axis,
    b = elliptic of angle 2 pi theta whose axis meets it orthogonally at (0, 1)."""
    if not r > 0:
        raise InvalidParameter("r must be positive")
    if not 0 < t < math.pi / 8:
        raise InvalidParameter("t must lie in (0, pi/8)")
    if not 0 < theta < 1:
        raise InvalidParameter("theta must lie in (0, 1)")
    lam = cmath.exp((r + 1j * t) / 2)
    return FreeRepresentation((diagonal(lam), elliptic_about_unit_axis(theta)), "complex")


def conjugate_pair_words(n: int) -> Tuple[Word, Word]:
    """Words z1 and z2^n z1 z2^-n generating the subgroup H_n of F_2."""
    return (1,), multiply(word_power((2,), n), (1,), word_power((2,), -n))


def restrict(rep: FreeRepresentation, words: Sequence[Word]) -> FreeRepresentation:
    """Representation of a free group sending generator i to rep(words[i])."""
    gens = tuple(word_eval(rep, w) for w in words)
    real = all(g.is_real() for g in gens)
    return FreeRepresentation(gens, "real" if real else "complex")


def h_alpha_beta(alpha: complex, beta: complex) -> FreeRepresentation:
    """The pair x(alpha) = diag(alpha, 1/alpha) and y(beta) with axis (-1, 1)."""
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) - 1) < 1e-12 or abs(abs(beta) - 1) < 1e-12:
        raise InvalidParameter("|alpha| and |beta| must differ from 1")
    ch, sh = (beta + 1 / beta) / 2, (beta - 1 / beta) / 2
    gens = (isometry(alpha, 0, 0, 1 / alpha), isometry(ch, sh, sh, ch))
    real = all(g.is_real() for g in gens)
    return FreeRepresentation(gens, "real" if real else "complex")


def dense_psl2r(length: float, q: float) -> FreeRepresentation:
    """Hyperbolic of translation ``length`` on the imaginary axis and an
    elliptic of angle pi q about i.  Density rests on q being irrational."""
    if not length > 0:
        raise InvalidParameter("translation length must be positive")
    return FreeRepresentation((diagonal(math.exp(length / 2)), rotation(math.pi * q)), "real")


def threshold_tau0(r: float, mu: float = MU3_DEFAULT) -> float:
    """Largest tau0 (below 1/4) with 2 asinh(sin(2 pi tau0) sinh(r + 1)) < mu."""
    if not r > 0:
        raise InvalidParameter("r must be positive")
    mu = _check_mu(mu)
    ratio = math.sinh(mu / 2) / math.sinh(r + 1)
    tau = math.asin(min(1.0, ratio)) / (2 * math.pi)
    tau = min(tau, math.nextafter(0.25, 0))
    while threshold_lhs(tau, r) >= mu:
        tau = math.nextafter(tau, 0)
    return tau


def threshold_lhs(tau: float, r: float) -> float:
    return 2 * math.asinh(math.sin(2 * math.pi * tau) * math.sinh(r + 1))


def long_enough_bound() -> float:
    c = math.cos(math.pi / 8)
    return (1 + c) / (1 - c)


# ---------------------------------------------------------------- surfaces

def _cayley_conjugate(m: np.ndarray) -> ProjectiveIsometry:
    """Disc-model SU(1,1) matrix to the upper half plane."""
    to_disc = np.array([[1, -1j], [1, 1j]])
    from_disc = np.array([[1j, 1j], [-1, 1]])
    return ProjectiveIsometry.from_matrix(from_disc @ m @ to_disc)


def _disc_rotation(t):
    return np.array([[cmath.exp(1j * t / 2), 0], [0, cmath.exp(-1j * t / 2)]])


def _disc_translation(s):
    return np.array([[math.cosh(s / 2), math.sinh(s / 2)], [math.sinh(s / 2), math.cosh(s / 2)]])


def regular_polygon_vertices(genus: int):
    """Vertices (in H^2) of the regular 4g-gon centred at i with angle sum 2 pi."""
    n = 4 * genus
    cosh_r = 1 / math.tan(math.pi / n) ** 2
    rad = math.tanh(math.acosh(cosh_r) / 2)
    from .isometry import H2Point
    out = []
    for k in range(n):
        w = rad * cmath.exp(2j * math.pi * k / n)
        out.append(H2Point(1j * (1 + w) / (1 - w)))
    return out


def surface_relator(genus: int) -> Word:
    """x1 y1 x1^-1 y1^-1 ... xg yg xg^-1 yg^-1 with x_k = 2k+1, y_k = 2k+2."""
    word = []
    for k in range(genus):
        x, y = 2 * k + 1, 2 * k + 2
        word += [x, y, -x, -y]
    return tuple(word)


def fuchsian_surface_rep(genus: int):
    """Side pairings of the regular 4g-gon; returns (representation, relator)."""
    if genus < 2:
        raise InvalidParameter("genus must be at least 2")
    n = 4 * genus
    d = math.acosh(1 / math.tan(math.pi / n))

    def pairing(j):
        # side j to side j+2: move side j to angle pi, push across, rotate
        psi_j, psi_k = (2 * j + 1) * math.pi / n, (2 * j + 5) * math.pi / n
        m = _disc_rotation(psi_k) @ _disc_translation(2 * d) @ _disc_rotation(math.pi - psi_j)
        return _cayley_conjugate(m)

    gens = []
    for k in range(genus):
        gens += [pairing(4 * k).inverse(), pairing(4 * k + 1)]
    return FreeRepresentation(tuple(gens), "real"), surface_relator(genus)


# ---------------------------------------------------------------- density

@dataclass
class DensityCertificate:
    basepoint: H3Point
    g: Word
    h: Word
    displacement_g: float
    displacement_h: float
    margulis_bound: float
    elementarity: Elementarity
    assumptions: List[str] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return (self.displacement_g < self.margulis_bound
                and self.displacement_h < self.margulis_bound
                and self.elementarity is Elementarity.NON_ELEMENTARY)

    def inequalities(self):
        return [
            inequality("d(x, rho(g) x) < mu3", self.displacement_g, self.margulis_bound),
            inequality("d(x, rho(h) x) < mu3", self.displacement_h, self.margulis_bound),
        ]

    def verify(self, rep: FreeRepresentation) -> bool:
        """Recompute every inequality from the raw generator matrices."""
        g1, h1 = word_eval_rtl(rep, self.g), word_eval_rtl(rep, self.h)
        dg = dist_h3(self.basepoint, apply_h3(g1, self.basepoint))
        dh = dist_h3(self.basepoint, apply_h3(h1, self.basepoint))
        return (dg < self.margulis_bound and dh < self.margulis_bound
                and is_elementary_pair(g1, h1) is Elementarity.NON_ELEMENTARY)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "DensityCertificate",
            "parameters": dict(self.parameters, margulis_bound=self.margulis_bound,
                               basepoint=[self.basepoint.z.real, self.basepoint.z.imag,
                                          self.basepoint.t]),
            "witnesses": {"g": format_word(self.g), "h": format_word(self.h),
                          "elementarity": self.elementarity.value},
            "inequalities": self.inequalities(),
            "assumptions": list(self.assumptions),
            "valid": self.valid,
        }


def group_elementarity(rep: FreeRepresentation) -> Elementarity:
    """Elementarity of the whole image; a real image preserves a plane."""
    gens = rep.generators
    if all(g.is_real() for g in gens):
        return Elementarity.INVARIANT_PLANE
    if len(gens) == 1:
        return Elementarity.COMMON_FIXED_POINT
    for g, h in itertools.combinations(gens, 2):
        if is_elementary_pair(g, h) is Elementarity.NON_ELEMENTARY:
            return Elementarity.NON_ELEMENTARY
    if len(gens) == 2:
        return is_elementary_pair(*gens)
    # every pair is elementary; report the first pair's type (inconclusive for rank > 2)
    return is_elementary_pair(gens[0], gens[1])


def enumerate_words(rank: int, max_length: int):
    """Reduced words in shortlex order (length, then letters 1, -1, 2, -2, ...)."""
    alphabet = []
    for i in range(1, rank + 1):
        alphabet += [i, -i]
    level = [()]
    yield ()
    for _ in range(max_length):
        nxt = []
        for w in level:
            for x in alphabet:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        for w in nxt:
            yield w
        level = nxt


def certify_dense(rep: FreeRepresentation, x: H3Point = ORIGIN, mu: float = MU3_DEFAULT,
                  max_length: int = 4, max_candidates: int = 200,
                  assumptions: Sequence[str] = (), parameters: dict | None = None
                  ) -> DensityCertificate:
    """Search for two short-displacement words generating a non-elementary group.

    If the image were discrete, the Margulis lemma would force two elements
    moving x less than mu to generate an elementary group; a non-elementary
    pair therefore shows the image is indiscrete, and an indiscrete
    non-elementary subgroup of PSL(2,C) is dense.
    """
    mu = _check_mu(mu)
    whole = group_elementarity(rep)
    if whole is not Elementarity.NON_ELEMENTARY:
        raise NotFound(f"the image is elementary: {whole.value} detected")
    small = []
    for w in enumerate_words(rep.rank, max_length):
        if not w:
            continue
        g = word_eval(rep, w)
        if g.isclose(IDENTITY, 1e-10):
            continue
        d = dist_h3(x, apply_h3(g, x))
        if d < mu:
            small.append((w, g, d))
            if len(small) >= max_candidates:
                break
    for (w1, g1, d1), (w2, g2, d2) in itertools.combinations(small, 2):
        kind = is_elementary_pair(g1, g2)
        if kind is Elementarity.NON_ELEMENTARY:
            return DensityCertificate(x, w1, w2, d1, d2, mu, kind, list(assumptions),
                                      dict(parameters or {}))
    if small:
        raise NotFound(f"{len(small)} short words found but every pair is elementary")
    raise NotFound("no word of length <= %d moves the basepoint less than mu" % max_length)


@dataclass
class RealDensityCertificate:
    """Density in PSL(2,R): an elliptic generator of irrational angle (declared)
    gives a full rotation group in the closure, and the pair is non-elementary."""

    elliptic: int
    rotation_angle: float
    trace_margin: float
    commutator_margin: float
    elementarity: Elementarity
    assumptions: List[str] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return (self.trace_margin > 0 and self.commutator_margin > 0
                and self.elementarity is Elementarity.NON_ELEMENTARY)

    def verify(self, rep: FreeRepresentation) -> bool:
        try:
            other = certify_dense_real(rep, self.assumptions, self.parameters)
        except NotFound:
            return False
        return other.valid

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "RealDensityCertificate",
            "parameters": dict(self.parameters),
            "witnesses": {"elliptic_generator": self.elliptic,
                          "rotation_angle": self.rotation_angle,
                          "elementarity": self.elementarity.value},
            "inequalities": [
                inequality("|tr| < 2 for the elliptic generator", 2 - self.trace_margin, 2.0),
                inequality("|tr[a,b] - 2| > 0", self.commutator_margin, 0.0, ">"),
            ],
            "assumptions": list(self.assumptions),
            "valid": self.valid,
        }


def certify_dense_real(rep: FreeRepresentation, assumptions: Sequence[str] = (),
                       parameters: dict | None = None) -> RealDensityCertificate:
    """Certificate for a real rank-2 representation such as :func:`dense_psl2r`."""
    if rep.rank != 2 or not all(g.is_real() for g in rep.generators):
        raise InvalidParameter("need a real representation of rank 2")
    a, b = rep.generators
    for idx, g in ((2, b), (1, a)):
        cl = classify(g)
        if cl.kind is IsometryKind.ELLIPTIC:
            break
    else:
        raise NotFound("no elliptic generator")
    kind = is_elementary_pair(a, b, ambient="real")
    comm = a.matrix @ b.matrix @ np.linalg.inv(a.matrix) @ np.linalg.inv(b.matrix)
    cert = RealDensityCertificate(idx, cl.rotation_angle, 2 - abs(g.trace.real),
                                  abs(np.trace(comm) - 2), kind,
                                  list(assumptions) or ["rotation angle / pi is irrational (declared)"],
                                  dict(parameters or {}))
    if not cert.valid:
        raise NotFound(f"the pair is elementary in PSL(2,R): {kind.value}")
    return cert


# ---------------------------------------------------------------- Schottky

@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def contains_disc(self, other: "Disc") -> float:
        """Positive gap when ``other`` lies strictly inside this disc."""
        return self.radius - abs(self.center - other.center) - other.radius

    def gap(self, other: "Disc") -> float:
        return abs(self.center - other.center) - self.radius - other.radius


def mobius_image_circle(g: ProjectiveIsometry, disc: Disc) -> Disc:
    """Image of the circle bounding ``disc`` (assumes it avoids the pole)."""
    pts = [disc.center + disc.radius * cmath.exp(2j * math.pi * k / 3) for k in range(3)]
    imgs = [(g.a * z + g.b) / (g.c * z + g.d) for z in pts]
    return _circle_through(*imgs)


def _circle_through(z1, z2, z3) -> Disc:
    a = z2 - z1
    b = z3 - z1
    den = 2 * (a.real * b.imag - a.imag * b.real)
    if den == 0:
        raise InvalidParameter("collinear points")
    ux = (b.imag * abs(a) ** 2 - a.imag * abs(b) ** 2) / den
    uy = (a.real * abs(b) ** 2 - b.real * abs(a) ** 2) / den
    center = z1 + complex(ux, uy)
    return Disc(center, abs(center - z1))


@dataclass
class SchottkyCertificate:
    conjugator: ProjectiveIsometry
    repelling: List[Disc]
    attracting: List[Disc]
    margin: float
    mapping_gaps: List[float]
    parameters: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.margin > 0 and all(gap > 0 for gap in self.mapping_gaps)

    def discs(self) -> List[Disc]:
        out = []
        for r, a in zip(self.repelling, self.attracting):
            out += [r, a]
        return out

    def verify(self, rep: FreeRepresentation) -> bool:
        return _schottky_check(rep, self.conjugator, self.repelling, self.attracting)[0]

    def to_json(self) -> dict:
        discs = [{"generator": i // 2 + 1, "side": "repelling" if i % 2 == 0 else "attracting",
                  "center": [d.center.real, d.center.imag], "radius": d.radius}
                 for i, d in enumerate(self.discs())]
        ineqs = [inequality("min pairwise disc gap > 0", self.margin, 0.0, ">")]
        for i, gap in enumerate(self.mapping_gaps):
            ineqs.append(inequality(f"g{i + 1}(ext repelling) inside attracting", gap, 0.0, ">"))
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "SchottkyCertificate",
            "parameters": dict(self.parameters),
            "witnesses": {"conjugator": _matrix_json(self.conjugator), "discs": discs},
            "inequalities": ineqs,
            "assumptions": [],
            "valid": self.valid,
        }


def _unitary(phi: float, psi: float) -> ProjectiveIsometry:
    c, s = math.cos(phi), math.sin(phi)
    e = cmath.exp(1j * psi)
    return isometry(c, -e * s, s / e, c)


def _schottky_check(rep, u, repelling, attracting, mesh=64):
    discs = []
    for r, a in zip(repelling, attracting):
        discs += [r, a]
    margin = min(d1.gap(d2) for d1, d2 in itertools.combinations(discs, 2))
    gaps = []
    uinv = u.inverse()
    for g, drep, datt in zip(rep.generators, repelling, attracting):
        gc = u @ g @ uinv
        if abs(gc.c) < 1e-300:
            return False, margin, [-math.inf]
        # analytic: image of the repelling circle, and of infinity (outside it)
        img = mobius_image_circle(gc, drep)
        gap = datt.contains_disc(img)
        inf_img = gc.a / gc.c
        gap = min(gap, datt.radius - abs(inf_img - datt.center))
        # boundary mesh
        for k in range(mesh):
            z = drep.center + drep.radius * cmath.exp(2j * math.pi * (k + 0.5) / mesh)
            w = (gc.a * z + gc.b) / (gc.c * z + gc.d)
            gap = min(gap, datt.radius - abs(w - datt.center))
        gaps.append(gap)
    ok = margin > 0 and all(x > 0 for x in gaps)
    return ok, margin, gaps


def certify_schottky(rep: FreeRepresentation, inflation: float = SCHOTTKY_INFLATION,
                     parameters: dict | None = None) -> SchottkyCertificate:
    """Ping-pong certificate from (inflated) isometric circles.

    For g = (a b; c d) with c != 0, g maps the outside of |c z + d| = s onto the
    inside of |-c z + a| = 1/s.  Using radius (1 + inflation)/|c| for both discs
    keeps the mapping property with room to spare.  A unitary conjugation
    (a rotation of the sphere) is chosen so no generator fixes infinity.
    """
    for g in rep.generators:
        if classify(g).kind is not IsometryKind.LOXODROMIC:
            raise InvalidParameter("every generator must be loxodromic")
    s = 1 + inflation
    best = None
    for phi, psi in itertools.product(np.linspace(0.1, 1.4, 14), np.linspace(0.0, 2.8, 8)):
        u = _unitary(float(phi), float(psi))
        uinv = u.inverse()
        repelling, attracting = [], []
        for g in rep.generators:
            gc = u @ g @ uinv
            if abs(gc.c) < 1e-12:
                break
            repelling.append(Disc(-gc.d / gc.c, s / abs(gc.c)))
            attracting.append(Disc(gc.a / gc.c, s / abs(gc.c)))
        else:
            ok, margin, gaps = _schottky_check(rep, u, repelling, attracting)
            score = min([margin] + gaps)
            if best is None or score > best[0]:
                best = (score, u, repelling, attracting, margin, gaps)
    if best is None:
        raise DiscsOverlap("no usable chart", margin=None)
    score, u, repelling, attracting, margin, gaps = best
    cert = SchottkyCertificate(u, repelling, attracting, margin, gaps, dict(parameters or {}))
    if not cert.valid:
        raise DiscsOverlap(f"ping-pong discs overlap (best margin {score:.3g})", margin=score)
    return cert


# ---------------------------------------------------------------- exponents

def _frac(x: np.ndarray) -> np.ndarray:
    return np.mod(x, 1.0)


def in_window_d(f, tau0):
    return (f < tau0) | (f > 1 - tau0)


def in_window_f(f):
    return (f > 0.125) & (f < 0.375)


def exponent_conditions(n: int, thetas: Sequence[float], i: int, tau0: float) -> bool:
    """Direct re-check of the window conditions for exponent n and index i."""
    for j, th in enumerate(thetas):
        f = math.fmod(n * th, 1.0)
        if f < 0:
            f += 1
        if j == i:
            if not (f < tau0 or f > 1 - tau0):
                return False
        elif not (0.125 < f < 0.375):
            return False
    return True


def find_exponents(thetas: Sequence[float], tau0: float, max_n: int = 10 ** 7,
                   chunk: int = 1 << 20) -> List[int]:
    """Least n_i >= 1 with n_i theta_i in (-tau0, tau0) and n_i theta_j in (1/8, 3/8)."""
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise InvalidParameter("need at least one angle")
    if not 0 < tau0 < 0.5:
        raise InvalidParameter("tau0 must lie in (0, 1/2)")
    th = np.array(thetas)
    result: List[int | None] = [None] * len(thetas)
    start = 1
    while start <= max_n and any(r is None for r in result):
        n = np.arange(start, min(start + chunk, max_n + 1), dtype=np.float64)
        fr = _frac(np.outer(n, th))
        inside_d = in_window_d(fr, tau0)
        inside_f = in_window_f(fr)
        for i in range(len(thetas)):
            if result[i] is not None:
                continue
            ok = inside_d[:, i].copy()
            for j in range(len(thetas)):
                if j != i:
                    ok &= inside_f[:, j]
            hits = np.flatnonzero(ok)
            for h in hits:
                cand = int(n[h])
                if exponent_conditions(cand, thetas, i, tau0):
                    result[i] = cand
                    break
        start += chunk
    missing = [i for i, r in enumerate(result) if r is None]
    if missing:
        raise BudgetExceeded(f"no exponent below {max_n} for indices {missing}", best=result)
    return [int(r) for r in result]


__all__ = [
    "MU3_DEFAULT", "rho_theta", "h_alpha_beta", "dense_psl2r", "threshold_tau0",
    "certify_dense", "certify_dense_real", "certify_schottky", "find_exponents", "fuchsian_surface_rep",
    "DensityCertificate", "SchottkyCertificate", "conjugate_pair_words", "restrict",
    "long_enough_bound", "surface_relator", "regular_polygon_vertices",
]
