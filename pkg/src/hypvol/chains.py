"""Free-group words, group chains with l1 norm and boundary, cocycle evaluation.

Words are tuples of nonzero ints: generator ``i`` (0-based) is ``i + 1`` and
its inverse is ``-(i + 1)``.  A simplex ``[g0, ..., gk]`` is stored by its
normalized representative ``(g0^-1 g1, ..., g0^-1 gk)``; the leading
identity is implicit.  All word arithmetic is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .borel import Flag, borel_bound, borel_cocycle, veronese_flag, veronese_matrix
from .errors import InvalidParameter
from .isometry import (IDENTITY, BoundaryPoint, H2Point, ProjectiveIsometry, compose,
                       TOL_CLASS)
from .volume import V3, vol2_cocycle, vol3_cocycle

Word = Tuple[int, ...]
Simplex = Tuple[Word, ...]

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


# ---------------------------------------------------------------- words

def reduce_word(letters: Iterable[int]) -> Word:
    out = []
    for x in letters:
        if x == 0:
            raise InvalidParameter("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse_word(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def multiply(*words: Word) -> Word:
    return reduce_word(x for w in words for x in w)


def word_power(w: Word, k: int) -> Word:
    if k < 0:
        w, k = inverse_word(w), -k
    return multiply(*([w] * k))


def parse_word(s: str) -> Word:
    """``"aB"`` is a b^-1; ``"1"`` or ``""`` is the identity."""
    s = s.strip()
    if s in ("", "1"):
        return ()
    out = []
    for ch in s:
        if ch.isspace():
            continue
        idx = _LETTERS.find(ch.lower())
        if idx < 0:
            raise InvalidParameter(f"bad letter {ch!r}")
        out.append(idx + 1 if ch.islower() else -(idx + 1))
    return reduce_word(out)


def format_word(w: Word) -> str:
    if not w:
        return "1"
    chars = []
    for x in w:
        if abs(x) > len(_LETTERS):
            raise InvalidParameter("text format supports at most 26 generators")
        ch = _LETTERS[abs(x) - 1]
        chars.append(ch if x > 0 else ch.upper())
    return "".join(chars)


def normalize_simplex(vertices: Sequence[Word]) -> Simplex:
    """Representative of [g0, ..., gk] whose first vertex is the identity."""
    g0inv = inverse_word(tuple(vertices[0]))
    return tuple(multiply(g0inv, tuple(g)) for g in vertices[1:])


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class GroupChain:
    """Finite real combination of normalized simplices of one degree."""

    degree: int
    terms: Dict[Simplex, object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for s, a in self.terms.items():
            if len(s) != self.degree:
                raise InvalidParameter(f"simplex {s} has wrong degree")
            if a != 0:
                clean[s] = a
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(cls, degree: int, pairs: Iterable[Tuple[object, Sequence[Word]]],
                   normalized=True) -> "GroupChain":
        acc: Dict[Simplex, object] = {}
        for coeff, simplex in pairs:
            key = tuple(tuple(w) for w in simplex)
            if not normalized:
                key = normalize_simplex(key)
            acc[key] = acc.get(key, 0) + coeff
        return cls(degree, acc)

    def __len__(self):
        return len(self.terms)

    def items(self):
        """Terms in a deterministic order."""
        return sorted(self.terms.items(), key=lambda kv: _simplex_key(kv[0]))

    def norm1(self):
        return sum(abs(a) for a in self.terms.values())

    def __add__(self, other: "GroupChain") -> "GroupChain":
        if other.degree != self.degree:
            raise InvalidParameter("degree mismatch")
        acc = dict(self.terms)
        for s, a in other.terms.items():
            acc[s] = acc.get(s, 0) + a
        return GroupChain(self.degree, acc)

    def __neg__(self):
        return GroupChain(self.degree, {s: -a for s, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GroupChain":
        return GroupChain(self.degree, {s: c * a for s, a in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms


def _simplex_key(s: Simplex):
    return tuple((len(w), w) for w in s)


def zero_chain(degree: int) -> GroupChain:
    return GroupChain(degree, {})


def simplex_boundary(s: Simplex):
    """Signed faces (sign, face) of the simplex (id, w1, ..., wk)."""
    k = len(s)
    faces = []
    if k == 0:
        return faces
    w1inv = inverse_word(s[0])
    faces.append((1, tuple(multiply(w1inv, w) for w in s[1:])))
    for i in range(1, k + 1):
        faces.append(((-1) ** i, s[:i - 1] + s[i:]))
    return faces


def boundary(z: GroupChain) -> GroupChain:
    if z.degree < 1:
        raise InvalidParameter("boundary needs degree >= 1")
    acc: Dict[Simplex, object] = {}
    for s, a in z.terms.items():
        for sign, face in simplex_boundary(s):
            acc[face] = acc.get(face, 0) + sign * a
    return GroupChain(z.degree - 1, acc)


def substitute(phi: Sequence[Word], w: Word) -> Word:
    """Image of w under the homomorphism sending generator i to phi[i]."""
    out = []
    for x in w:
        img = phi[abs(x) - 1]
        out.extend(img if x > 0 else inverse_word(img))
    return reduce_word(out)


def pushforward(phi: Sequence[Word], z: GroupChain) -> GroupChain:
    acc: Dict[Simplex, object] = {}
    for s, a in z.terms.items():
        key = tuple(substitute(phi, w) for w in s)
        acc[key] = acc.get(key, 0) + a
    return GroupChain(z.degree, acc)


def max_generator(z: GroupChain) -> int:
    return max((abs(x) for s in z.terms for w in s for x in w), default=0)


# ---------------------------------------------------------------- text format

def _format_coeff(a) -> str:
    if isinstance(a, Fraction):
        return str(a)
    if isinstance(a, int):
        return str(a)
    return repr(float(a))


def _parse_coeff(s: str):
    s = s.strip()
    if any(ch in s.lower() for ch in ".ein"):
        return float(s)
    return Fraction(s)


def dumps_chain(z: GroupChain, rank: int | None = None) -> str:
    head = f"# hypvol-chain degree={z.degree}"
    if rank is not None:
        head += f" rank={rank}"
    lines = [head]
    for s, a in z.items():
        lines.append("; ".join([_format_coeff(a)] + [format_word(w) for w in s]))
    return "\n".join(lines) + "\n"


def loads_chain(text: str, degree: int | None = None) -> GroupChain:
    pairs = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("degree="):
                    degree = int(tok.split("=", 1)[1])
            continue
        fields = [f.strip() for f in line.split(";")]
        simplex = tuple(parse_word(f) for f in fields[1:])
        if degree is None:
            degree = len(simplex)
        pairs.append((_parse_coeff(fields[0]), simplex))
    if degree is None:
        raise InvalidParameter("cannot infer degree of an empty chain")
    return GroupChain.from_terms(degree, pairs)


# ---------------------------------------------------------------- representations

@dataclass(frozen=True)
class FreeRepresentation:
    """Homomorphism from the free group of the given rank into PSL(2,C)."""

    generators: Tuple[ProjectiveIsometry, ...]
    field: str = "complex"

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.field not in ("real", "complex"):
            raise InvalidParameter("field must be 'real' or 'complex'")
        if self.field == "real" and not all(g.is_real() for g in self.generators):
            raise InvalidParameter("real representation with non-real generator")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def image(self, x: int) -> ProjectiveIsometry:
        g = self.generators[abs(x) - 1]
        return g if x > 0 else g.inverse()


def word_eval(rep: FreeRepresentation, w: Word) -> ProjectiveIsometry:
    if any(abs(x) > rep.rank for x in w):
        raise InvalidParameter("word uses a generator outside the rank")
    if not w:
        return IDENTITY
    out = rep.image(w[0])
    for x in w[1:]:
        out = compose(out, rep.image(x))
    return out


def word_eval_rtl(rep: FreeRepresentation, w: Word) -> ProjectiveIsometry:
    """Same product accumulated right to left, as an independent check."""
    if not w:
        return IDENTITY
    out = rep.image(w[-1])
    for x in reversed(w[:-1]):
        out = compose(rep.image(x), out)
    return out


# ---------------------------------------------------------------- cocycles

class Cocycle:
    degree: int
    sup_norm: float
    name: str

    def value(self, mats: Sequence[ProjectiveIsometry]) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Vol3Cocycle(Cocycle):
    """Ideal-basepoint volume cocycle vol_3^x."""

    x: BoundaryPoint
    degree = 3
    sup_norm = V3
    name = "vol3"

    def value(self, mats):
        return vol3_cocycle(self.x, *mats)


@dataclass(frozen=True)
class Vol2Cocycle(Cocycle):
    """Area cocycle vol_2^x with x in H^2 or on its boundary."""

    x: object = H2Point(1j)
    degree = 2
    sup_norm = math.pi
    name = "vol2"

    def value(self, mats):
        return vol2_cocycle(self.x, *mats)


@dataclass(frozen=True, eq=False)
class BorelCocycle(Cocycle):
    """B_n^F pulled back through the Veronese representation iota_n."""

    n: int
    flag: Flag
    degree = 3
    name = "borel"

    @classmethod
    def at_boundary_point(cls, n: int, x: BoundaryPoint) -> "BorelCocycle":
        return cls(n, veronese_flag(n, x))

    @property
    def sup_norm(self):
        return borel_bound(self.n)

    def value(self, mats):
        flags = [self.flag.transform(veronese_matrix(self.n, g)) for g in mats]
        return borel_cocycle(*flags)


def evaluate(cocycle: Cocycle, rep: FreeRepresentation, z: GroupChain) -> float:
    """Sum of a_j * cocycle(id, rho(w_1^j), ..., rho(w_k^j))."""
    if z.degree != cocycle.degree:
        raise InvalidParameter(f"{cocycle.name} needs degree {cocycle.degree} chains")
    cache: Dict[Word, ProjectiveIsometry] = {(): IDENTITY}

    def img(w):
        if w not in cache:
            cache[w] = word_eval(rep, w)
        return cache[w]

    parts = []
    for s, a in z.items():
        mats = [IDENTITY] + [img(w) for w in s]
        parts.append(float(a) * cocycle.value(mats))
    return math.fsum(parts)


def random_chain(rng: np.random.Generator, degree: int, rank: int, nterms: int,
                 max_len: int = 4, coeff_range: int = 5) -> GroupChain:
    """Random chain with small Fraction coefficients (for tests and checks)."""
    pairs = []
    for _ in range(nterms):
        simplex = []
        for _ in range(degree):
            n = int(rng.integers(0, max_len + 1))
            letters = [int(rng.integers(1, rank + 1)) * int(rng.choice([-1, 1])) for _ in range(n)]
            simplex.append(reduce_word(letters))
        num = int(rng.integers(-coeff_range, coeff_range + 1)) or 1
        den = int(rng.integers(1, 4))
        pairs.append((Fraction(num, den), simplex))
    return GroupChain.from_terms(degree, pairs)


__all__ = [
    "Word", "Simplex", "GroupChain", "FreeRepresentation", "Vol3Cocycle",
    "Vol2Cocycle", "BorelCocycle", "boundary", "pushforward", "evaluate",
    "word_eval", "word_eval_rtl", "parse_word", "format_word", "dumps_chain",
    "loads_chain", "reduce_word", "inverse_word", "multiply", "substitute",
    "random_chain", "normalize_simplex", "TOL_CLASS",
]
