"""Word approximation of isometries in a dense representation, and chain transfer.

The element search enumerates a ball of reduced words breadth first, prunes
it with a spatial hash on matrix entries and then composes pairs ``u v``
(meet in the middle) using a k-d tree on the ball.  A few residual rounds
approximate the remaining error ``rho(w)^-1 T`` the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .chains import (BorelCocycle, Cocycle, FreeRepresentation, GroupChain, Vol3Cocycle,
                     Word, boundary, evaluate, format_word, multiply, pushforward,
                     word_eval, word_eval_rtl)
from .errors import BudgetExceeded, InvalidParameter, NonGenericConfiguration
from .isometry import ORIGIN, H3Point, ProjectiveIsometry, apply_boundary
from .volume import FRAME_TOL

METRICS = ("displacement", "operator")


@dataclass(frozen=True)
class ApproxRequest:
    """Search budget and target for word approximation.

    The search is deterministic; ``seed`` is carried for the interface and
    recorded in reports, but no step draws from it.
    """

    rep: FreeRepresentation
    epsilon: float
    targets: Tuple[ProjectiveIsometry, ...] = ()
    metric: str = "displacement"
    basepoint: H3Point = ORIGIN
    radius: float = 1.0
    max_length: int = 40
    max_nodes: int = 150_000
    refine_rounds: int = 3
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidParameter("epsilon must be positive")
        if self.metric not in METRICS:
            raise InvalidParameter(f"metric must be one of {METRICS}")
        if self.max_length < 1 or self.max_nodes < 1:
            raise InvalidParameter("budget must be positive and finite")
        object.__setattr__(self, "targets", tuple(self.targets))

    def with_epsilon(self, eps: float) -> "ApproxRequest":
        return ApproxRequest(self.rep, eps, self.targets, self.metric, self.basepoint,
                             self.radius, self.max_length, self.max_nodes,
                             self.refine_rounds, self.seed, self.threads)


# ---------------------------------------------------------------- metrics

def probe_points(x: H3Point, radius: float) -> List[H3Point]:
    """x and three points at distance ``radius`` from x in orthogonal directions."""
    # build them at (0, 1) and move by the similarity taking (0, 1) to x
    th, sh = math.tanh(radius), 1 / math.cosh(radius)
    base = [(0j, 1.0), (0j, math.exp(radius)), (complex(th), sh), (1j * th, sh)]
    return [H3Point(x.z + x.t * z, x.t * t) for z, t in base]


def _act(m: np.ndarray, z: complex, t: float):
    """Vectorised action of matrices m[..., 2, 2] on the point (z, t)."""
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    q = c * z + d
    den = np.abs(q) ** 2 + np.abs(c) ** 2 * t * t
    zz = ((a * z + b) * np.conj(q) + a * np.conj(c) * t * t) / den
    return zz, t / den


def _h3_dist(z1, t1, z2, t2):
    num = np.abs(z1 - z2) ** 2 + (t1 - t2) ** 2
    return 2 * np.arcsinh(np.sqrt(num / (4 * t1 * t2)))


def _normalize(m: np.ndarray) -> np.ndarray:
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return m / np.sqrt(det)[..., None, None]


def metric_many(req: ApproxRequest, mats: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Distance from every matrix in ``mats`` to ``target``."""
    mats = _normalize(np.asarray(mats, dtype=complex))
    target = _normalize(np.asarray(target, dtype=complex))
    if req.metric == "operator":
        plus = np.linalg.norm(mats - target, ord=2, axis=(-2, -1))
        minus = np.linalg.norm(mats + target, ord=2, axis=(-2, -1))
        return np.minimum(plus, minus)
    out = np.zeros(mats.shape[:-2])
    for p in probe_points(req.basepoint, req.radius):
        z1, t1 = _act(mats, p.z, p.t)
        z2, t2 = _act(target, p.z, p.t)
        out = np.maximum(out, _h3_dist(z1, t1, z2, t2))
    return out


def metric(req: ApproxRequest, g: ProjectiveIsometry, target: ProjectiveIsometry) -> float:
    return float(metric_many(req, g.matrix[None], target.matrix)[0])


# ---------------------------------------------------------------- word ball

@dataclass
class WordBall:
    """Breadth-first ball of reduced words, deduplicated on a spatial hash."""

    mats: np.ndarray
    parents: np.ndarray
    letters: np.ndarray
    lengths: np.ndarray

    def word(self, i: int) -> Word:
        out = []
        while i > 0:
            out.append(int(self.letters[i]))
            i = int(self.parents[i])
        return tuple(reversed(out))

    def __len__(self):
        return len(self.mats)


def _sign_fix(m: np.ndarray) -> np.ndarray:
    """Choose the sign of each matrix so its largest real coordinate is positive."""
    flat = np.concatenate([m.real.reshape(len(m), 4), m.imag.reshape(len(m), 4)], axis=1)
    idx = np.argmax(np.abs(flat), axis=1)
    sign = np.sign(flat[np.arange(len(m)), idx])
    sign[sign == 0] = 1
    return m * sign[:, None, None]


def _embed(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m.real.reshape(len(m), 4), m.imag.reshape(len(m), 4)], axis=1)


def build_ball(rep: FreeRepresentation, radius: int, max_nodes: int, cell: float) -> WordBall:
    gens = []
    letters = []
    for i, g in enumerate(rep.generators):
        m = g.matrix
        gens += [m, np.linalg.inv(m)]
        letters += [i + 1, -(i + 1)]
    gens = np.array(gens)
    letters = np.array(letters)
    mats = [np.eye(2, dtype=complex)[None]]
    parents = [np.array([-1])]
    lets = [np.array([0])]
    lengths = [np.array([0])]
    seen = {tuple(np.floor(_embed(_sign_fix(mats[0])) / cell).astype(np.int64)[0])}
    total = 1
    frontier = np.array([0])
    front_mats, front_last = mats[0], np.array([0])
    for level in range(1, radius + 1):
        if total >= max_nodes or len(frontier) == 0:
            break
        # children in shortlex order: parent-major, then letter order
        prod = np.einsum("pij,gjk->pgik", front_mats, gens)
        ok = front_last[:, None] != -letters[None, :]
        par = np.repeat(frontier, len(letters)).reshape(len(frontier), len(letters))
        let = np.tile(letters, (len(frontier), 1))
        prod, par, let = prod[ok], par[ok], let[ok]
        keys = np.floor(_embed(_sign_fix(prod)) / cell).astype(np.int64)
        keep = []
        for j, key in enumerate(map(tuple, keys)):
            if key in seen:
                continue
            seen.add(key)
            keep.append(j)
            if total + len(keep) >= max_nodes:
                break
        keep = np.array(keep, dtype=np.int64)
        new_idx = np.arange(total, total + len(keep))
        mats.append(prod[keep])
        parents.append(par[keep])
        lets.append(let[keep])
        lengths.append(np.full(len(keep), level))
        total += len(keep)
        frontier, front_mats, front_last = new_idx, prod[keep], let[keep]
    return WordBall(np.concatenate(mats), np.concatenate(parents), np.concatenate(lets),
                    np.concatenate(lengths))


@dataclass
class SearchResult:
    word: Word
    distance: float
    history: List[float] = field(default_factory=list)


_TIE = 1e-12


def _best_index(dist: np.ndarray, lengths: np.ndarray) -> int:
    """Smallest distance; near ties go to the shorter (then earlier) word."""
    dmin = dist.min()
    cand = np.flatnonzero(dist <= dmin + _TIE)
    return int(cand[np.lexsort((cand, lengths[cand]))][0])


class ElementSearch:
    """Reusable search state (the ball and its k-d tree) for one request."""

    def __init__(self, req: ApproxRequest):
        self.req = req
        radius = max(1, req.max_length // 2)
        self.ball = build_ball(req.rep, radius, req.max_nodes, req.epsilon / 4)
        emb = _embed(self.ball.mats)
        self.tree = cKDTree(np.concatenate([emb, -emb]))
        self.inv = np.linalg.inv(self.ball.mats)

    def _mitm(self, target: np.ndarray, k: int = 4):
        """Best u v with u, v in the ball, measured against ``target``."""
        ball = self.ball
        n = len(ball)
        direct = metric_many(self.req, ball.mats, target)
        i = _best_index(direct, ball.lengths)
        best = (direct[i], ball.lengths[i], ball.word(i))
        q = self.inv @ target
        k = min(k, 2 * n)
        _, idx = self.tree.query(_embed(q), k=k, workers=self.req.threads)
        idx = np.asarray(idx).reshape(n, k) % n
        u = np.repeat(np.arange(n), k)
        v = idx.reshape(-1)
        prods = ball.mats[u] @ ball.mats[v]
        dist = metric_many(self.req, prods, target)
        lengths = ball.lengths[u] + ball.lengths[v]
        j = _best_index(dist, lengths)
        if dist[j] < best[0] - _TIE:
            best = (dist[j], lengths[j], multiply(ball.word(int(u[j])), ball.word(int(v[j]))))
        return best[2], float(best[0])

    def run(self, target: ProjectiveIsometry) -> SearchResult:
        req = self.req
        word, dist = self._mitm(target.matrix)
        history = [dist]
        for _ in range(req.refine_rounds):
            if dist < req.epsilon * 1e-3:
                break
            residual = (word_eval(req.rep, word).inverse() @ target).matrix
            extra, _ = self._mitm(residual)
            cand = multiply(word, extra)
            if len(cand) > req.max_length:
                break
            d = metric(req, word_eval(req.rep, cand), target)
            if d < dist - _TIE:
                word, dist = cand, d
            history.append(dist)
        return SearchResult(word, dist, history)


def _verified_distance(req: ApproxRequest, word: Word, target: ProjectiveIsometry) -> float:
    """Distance recomputed along both product orders; the larger is reported."""
    d1 = metric(req, word_eval(req.rep, word), target)
    d2 = metric(req, word_eval_rtl(req.rep, word), target)
    return max(d1, d2)


def search_element(req: ApproxRequest, target: ProjectiveIsometry,
                   search: ElementSearch | None = None) -> SearchResult:
    """Best word found for ``target``; does not enforce the tolerance."""
    search = search or ElementSearch(req)
    res = search.run(target)
    res.distance = _verified_distance(req, res.word, target)
    return res


def approximate_element(req: ApproxRequest, target: ProjectiveIsometry,
                        search: ElementSearch | None = None) -> Word:
    """A word w with metric(rho(w), target) < epsilon, else BudgetExceeded."""
    res = search_element(req, target, search)
    if not res.distance < req.epsilon:
        raise BudgetExceeded(
            f"best distance {res.distance:.3g} is not below {req.epsilon:g}",
            best=(format_word(res.word), res.distance))
    return res.word


# ---------------------------------------------------------------- chain transfer

@dataclass
class TransferReport:
    epsilon: float
    element_tolerance: float
    attempts: int
    input_norm: float
    input_boundary_norm: float
    input_value: float
    words: List[Word]
    word_distances: List[float]
    output_norm: float
    output_boundary_norm: float
    output_value: float

    @property
    def deviation(self) -> float:
        return abs(self.input_value - self.output_value)

    @property
    def success(self) -> bool:
        return (self.deviation < self.epsilon and self.output_norm <= self.input_norm
                and self.output_boundary_norm <= self.input_boundary_norm)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "type": "TransferReport",
            "epsilon": self.epsilon,
            "element_tolerance": self.element_tolerance,
            "attempts": self.attempts,
            "input": {"norm1": self.input_norm, "boundary_norm1": self.input_boundary_norm,
                      "value": self.input_value},
            "substitution": [format_word(w) for w in self.words],
            "word_distances": self.word_distances,
            "output": {"norm1": self.output_norm, "boundary_norm1": self.output_boundary_norm,
                       "value": self.output_value},
            "deviation": self.deviation,
            "success": self.success,
        }


def check_distinct_orbits(cocycle: Cocycle, rep0: FreeRepresentation, z: GroupChain):
    """Orbit points of every simplex must be pairwise distinct for ideal cocycles."""
    if not isinstance(cocycle, (Vol3Cocycle, BorelCocycle)):
        return
    x = cocycle.x if isinstance(cocycle, Vol3Cocycle) else None
    for s, _ in z.items():
        mats = [ProjectiveIsometry(1, 0, 0, 1)] + [word_eval(rep0, w) for w in s]
        if x is not None:
            pts = [apply_boundary(g, x) for g in mats]
            bad = any(p.chordal(q) < FRAME_TOL for i, p in enumerate(pts) for q in pts[i + 1:])
        else:
            bad = any(g.isclose(h) for i, g in enumerate(mats) for h in mats[i + 1:])
        if bad:
            raise NonGenericConfiguration("orbit points of a simplex coincide", s)


def transfer_chain(rep0: FreeRepresentation, z: GroupChain, cocycle: Cocycle,
                   rep: FreeRepresentation, epsilon: float, request: ApproxRequest | None = None,
                   max_retries: int = 6) -> Tuple[GroupChain, TransferReport]:
    """Replace each generator of rep0 by a word in rep and push the chain forward.

    The deviation |B(rho0, Z) - B(rho, Z(eps))| is checked after the fact; on
    failure the element tolerance is halved and the search repeated.
    """
    if not epsilon > 0:
        raise InvalidParameter("epsilon must be positive")
    check_distinct_orbits(cocycle, rep0, z)
    value0 = evaluate(cocycle, rep0, z)
    norm0, bnorm0 = z.norm1(), boundary(z).norm1()
    req = request or ApproxRequest(rep, epsilon)
    if req.rep is not rep:
        req = ApproxRequest(rep, req.epsilon, req.targets, req.metric, req.basepoint,
                            req.radius, req.max_length, req.max_nodes, req.refine_rounds,
                            req.seed, req.threads)
    tol = req.epsilon
    best = None
    for attempt in range(1, max_retries + 1):
        sub = req.with_epsilon(tol)
        search = ElementSearch(sub)
        results = [search_element(sub, g, search) for g in rep0.generators]
        words = [r.word for r in results]
        z_eps = pushforward(words, z)
        value = evaluate(cocycle, rep, z_eps)
        report = TransferReport(epsilon, tol, attempt, float(norm0), float(bnorm0), value0,
                                words, [r.distance for r in results], float(z_eps.norm1()),
                                float(boundary(z_eps).norm1()), value)
        if best is None or report.deviation < best[1].deviation:
            best = (z_eps, report)
        if report.success:
            return z_eps, report
        tol /= 2
    raise BudgetExceeded(f"best deviation {best[1].deviation:.3g} is not below {epsilon:g}",
                         best=best[1])


__all__ = ["ApproxRequest", "approximate_element", "search_element", "transfer_chain",
           "TransferReport", "ElementSearch", "metric", "probe_points", "build_ball"]
