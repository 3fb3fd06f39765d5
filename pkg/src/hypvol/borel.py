"""Complete flags of C^n, the Borel cocycle B_n and the Veronese embedding."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DependentBasis, InvalidParameter, NonGenericConfiguration
from .isometry import BoundaryPoint, ProjectiveIsometry
from .volume import V3, ideal_tet_volume

TOL_RANK = 1e-9


@dataclass(frozen=True, eq=False)
class Flag:
    """Complete flag stored as an orthonormal frame; column j spans F^{j+1}/F^j."""

    frame: np.ndarray

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    def subspace(self, j: int) -> np.ndarray:
        """Orthonormal basis (columns) of F^j."""
        return self.frame[:, :j]

    def transform(self, h: np.ndarray) -> "Flag":
        """The flag h . F."""
        return gram_schmidt_flag(np.asarray(h) @ self.frame)

    def same_as(self, other: "Flag", tol=1e-9) -> bool:
        for j in range(1, self.n):
            a, b = self.subspace(j), other.subspace(j)
            # projection of b onto span(a) must reproduce b
            resid = b - a @ (a.conj().T @ b)
            if np.linalg.norm(resid) > tol:
                return False
        return True


def multi_index_set(n: int):
    """All (j0, j1, j2, j3) with entries <= n-2 summing to n-2, lexicographic."""
    if n < 2:
        raise InvalidParameter("n must be at least 2")
    k = n - 2
    out = [J for J in itertools.product(range(k + 1), repeat=4) if sum(J) == k]
    return sorted(out, reverse=True)


def gram_schmidt_flag(basis) -> Flag:
    """Flag spanned by the columns of ``basis`` in order.

    Uses a QR factorisation, which is Gram-Schmidt on the ordered columns.
    """
    basis = np.asarray(basis, dtype=complex)
    n = basis.shape[0]
    if basis.shape != (n, n):
        raise InvalidParameter("need n vectors in C^n")
    s = np.linalg.svd(basis, compute_uv=False)
    if s[-1] == 0 or s[0] / s[-1] > 1e12:
        raise DependentBasis("basis is (numerically) dependent")
    q, r = np.linalg.qr(basis)
    # fix phases so the diagonal of r is positive; flags do not see this
    phases = np.diag(r) / np.abs(np.diag(r))
    return Flag(q * phases)


def standard_flag(n: int) -> Flag:
    return Flag(np.eye(n, dtype=complex))


def _rank(vectors: np.ndarray) -> int:
    if vectors.shape[1] == 0:
        return 0
    s = np.linalg.svd(vectors, compute_uv=False)
    return int(np.sum(s > TOL_RANK))


def is_generic(f0: Flag, f1: Flag, f2: Flag, f3: Flag):
    """Return ``(ok, witness)``; witness is the first failing (j0..j3) or None."""
    flags = (f0, f1, f2, f3)
    n = f0.n
    if any(f.n != n for f in flags):
        raise InvalidParameter("flags must live in the same C^n")
    for J in itertools.product(range(n), repeat=4):
        k = sum(J)
        if k == 0:
            continue
        span = np.hstack([f.subspace(j) for f, j in zip(flags, J)])
        if _rank(span) != min(n, k):
            return False, J
    return True, None


def _orthonormal_complement(v: np.ndarray, n: int) -> np.ndarray:
    if v.shape[1] == 0:
        return np.eye(n, dtype=complex)
    u, s, _ = np.linalg.svd(v, full_matrices=True)
    return u[:, v.shape[1]:]


def borel_cocycle(f0: Flag, f1: Flag, f2: Flag, f3: Flag, check=True) -> float:
    """B_n on a generic quadruple of flags: sum over J of ideal volumes of t_J."""
    flags = (f0, f1, f2, f3)
    n = f0.n
    if check:
        ok, witness = is_generic(*flags)
        if not ok:
            raise NonGenericConfiguration("flags are not in generic position", witness)
    total = []
    for J in multi_index_set(n):
        v = np.hstack([f.subspace(j) for f, j in zip(flags, J)])
        perp = _orthonormal_complement(v, n)
        if perp.shape[1] != 2:
            raise NonGenericConfiguration("V_J does not have codimension 2", J)
        pts = []
        for f, j in zip(flags, J):
            coords = perp.conj().T @ f.frame[:, j]
            pts.append(BoundaryPoint(coords[0], coords[1]))
        total.append(ideal_tet_volume(*pts))
    return math.fsum(total)


def borel_bound(n: int) -> float:
    return n * (n * n - 1) / 6 * V3


# ---------------------------------------------------------------- Veronese

def _poly_mul(p, q):
    return np.convolve(p, q)


def _poly_pow(p, k):
    out = np.array([1 + 0j])
    for _ in range(k):
        out = _poly_mul(out, p)
    return out


@lru_cache(maxsize=None)
def _binomial_scale(n: int) -> np.ndarray:
    return np.sqrt(np.array([math.comb(n - 1, k) for k in range(n)], dtype=float))


def veronese_vector(n: int, v) -> np.ndarray:
    """Image of v in C^2 on the rational normal curve in C^n (unitary basis)."""
    v0, v1 = complex(v[0]), complex(v[1])
    k = np.arange(n)
    return _binomial_scale(n) * (v0 ** (n - 1 - k)) * (v1 ** k)


def veronese_matrix(n: int, g: ProjectiveIsometry) -> np.ndarray:
    """Matrix of the irreducible representation iota_n(g) on Sym^{n-1} C^2.

    Basis vector k is sqrt(C(n-1,k)) z0^{n-1-k} z1^k, which makes SU(2)
    act unitarily.  Column k is the image of basis vector k.
    """
    if n < 2:
        raise InvalidParameter("n must be at least 2")
    a, b, c, d = g.entries
    scale = _binomial_scale(n)
    m = np.zeros((n, n), dtype=complex)
    for row in range(n):
        # nu(g v)_row = s_row (a v0 + b v1)^{n-1-row} (c v0 + d v1)^row, v0 = 1
        poly = _poly_mul(_poly_pow(np.array([a, b]), n - 1 - row),
                         _poly_pow(np.array([c, d]), row))
        m[row, :] = scale[row] * poly / scale
    return m


def veronese_flag(n: int, z: BoundaryPoint) -> Flag:
    """Osculating flag of the rational normal curve at z."""
    v = z.vector()
    w = np.array([-np.conj(v[1]), np.conj(v[0])])
    # coefficient of t^j in nu(v + t w) spans the j-th osculating direction
    scale = _binomial_scale(n)
    cols = np.zeros((n, n), dtype=complex)
    for m in range(n):
        poly = _poly_mul(_poly_pow(np.array([v[0], w[0]]), n - 1 - m),
                         _poly_pow(np.array([v[1], w[1]]), m))
        cols[m, :] = scale[m] * poly
    return gram_schmidt_flag(cols)
