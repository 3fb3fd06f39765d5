"""Surface chains, free approximations and seminorm lower bounds."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .approx import ApproxRequest, TransferReport, transfer_chain
from .chains import (Cocycle, FreeRepresentation, GroupChain, Word, boundary, evaluate,
                     reduce_word)
from .errors import EmptyFamily, HypvolError, InvalidParameter
from .representations import fuchsian_surface_rep, regular_polygon_vertices
from .volume import signed_area_h2


@dataclass(frozen=True)
class FreeApproximation:
    """A chain Z over F_m with ||dZ||_1 <= K, plus the homomorphism it is used with."""

    rank: int
    chain: GroupChain
    bound: int
    rep: Optional[FreeRepresentation] = None
    label: str = ""

    def __post_init__(self):
        if boundary(self.chain).norm1() > self.bound:
            raise InvalidParameter("boundary norm exceeds K")


def fan_chain(word: Word, root: int = 0) -> GroupChain:
    """Fan triangulation, from prefix vertex ``root``, of the polygon read off ``word``.

    Vertex k is the prefix p_k of the cyclically rotated word; the edge from
    p_k to p_{k+1} is labelled by the k-th letter.  Triangles are oriented so
    that under the side-pairing representation the area is positive.
    """
    n = len(word)
    word = tuple(word[root:]) + tuple(word[:root])
    prefixes = [()]
    for x in word:
        prefixes.append(reduce_word(prefixes[-1] + (x,)))
    terms = []
    for k in range(1, n - 1):
        if word[k] > 0:
            terms.append((-1, (prefixes[0], prefixes[k], prefixes[k + 1])))
        else:
            terms.append((1, (prefixes[0], prefixes[k + 1], prefixes[k])))
    return GroupChain.from_terms(2, terms, normalized=False)


def surface_chain(genus: int, root: int = 0) -> FreeApproximation:
    """The 2-freely approximating chain of the closed genus-g surface (K = 2)."""
    if genus < 2:
        raise InvalidParameter("genus must be at least 2")
    rep, relator = fuchsian_surface_rep(genus)
    z = fan_chain(relator, root)
    # the default root gives the K = 2 chain; other roots may leave more boundary
    k = max(2, int(boundary(z).norm1()))
    return FreeApproximation(2 * genus, z, k, rep, f"surface genus {genus}")


def polygon_area(genus: int) -> float:
    """Area of the regular 4g-gon from a fan of its actual vertices."""
    v = regular_polygon_vertices(genus)
    return math.fsum(signed_area_h2(v[0], v[k], v[k + 1]) for k in range(1, len(v) - 1))


# ---------------------------------------------------------------- seminorm bound

@dataclass
class FamilyItem:
    """One chain of a family.

    With ``rep0`` set the chain is transferred from rep0 to the target
    representation; otherwise it is evaluated directly, under ``rep`` when
    given and under the family-wide representation when not.
    """

    parameter: object
    chain: GroupChain
    rep0: Optional[FreeRepresentation] = None
    rep: Optional[FreeRepresentation] = None


@dataclass
class ItemRecord:
    parameter: object
    value: Optional[float] = None
    norm1: Optional[float] = None
    boundary_norm1: Optional[float] = None
    deviation: float = 0.0
    transfer: Optional[TransferReport] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def ratio(self) -> Optional[float]:
        return None if not self.ok else abs(self.value) / self.norm1

    @property
    def certified(self) -> Optional[float]:
        """(|value| - deviation) / ||Z||_1, the per-chain bound."""
        return None if not self.ok else (abs(self.value) - self.deviation) / self.norm1

    @property
    def boundary_ratio(self) -> Optional[float]:
        return None if not self.ok else self.boundary_norm1 / self.norm1

    def to_json(self) -> dict:
        out = {"parameter": self.parameter, "tag": "machine-checked"}
        if not self.ok:
            out.update(error=self.error, tag="failed")
            return out
        out.update(value=self.value, norm1=self.norm1, boundary_norm1=self.boundary_norm1,
                   deviation=self.deviation, ratio=self.ratio, certified_bound=self.certified,
                   boundary_ratio=self.boundary_ratio,
                   inequality=("||rho*B + db||_inf >= %.17g - ||b||_inf * %.17g"
                               % (self.certified, self.boundary_ratio)))
        if self.transfer is not None:
            out["transfer"] = self.transfer.to_json()
        return out


@dataclass
class SeminormLowerBound:
    cocycle: str
    representation: str
    records: List[ItemRecord]
    tail: int = 0
    parameters: dict = field(default_factory=dict)

    def good(self) -> List[ItemRecord]:
        return [r for r in self.records if r.ok]

    @property
    def headline(self) -> float:
        good = self.good()
        tail = good[-self.tail:] if self.tail else good
        return min(r.certified for r in tail)

    @property
    def boundary_ratios(self) -> List[float]:
        return [r.boundary_ratio for r in self.good()]

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "type": "SeminormLowerBound",
            "cocycle": self.cocycle,
            "representation": self.representation,
            "parameters": dict(self.parameters),
            "items": [r.to_json() for r in self.records],
            "headline": self.headline,
            "boundary_ratios": self.boundary_ratios,
            "statement": ("for every bounded cochain b and every listed chain Z: "
                          "||rho*B + db||_inf >= certified_bound - ||b||_inf * boundary_ratio"),
            "limit_claim": {
                "tag": "family extrapolation",
                "statement": "if boundary_ratio -> 0 along the family, the seminorm is at least "
                             "liminf of the ratios",
            },
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["g", "value", "norm1", "ratio"])
        for r in self.good():
            w.writerow([r.parameter, "%.17g" % r.value, "%.17g" % r.norm1, "%.17g" % r.ratio])
        return buf.getvalue()


def seminorm_bound(cocycle: Cocycle, rep: Optional[FreeRepresentation], family: Sequence[FamilyItem],
                   epsilon: float = 0.5, request: ApproxRequest | None = None, tail: int = 0,
                   labels: tuple = ("", ""), parameters: dict | None = None
                   ) -> SeminormLowerBound:
    """Per-chain lower bounds of the seminorm-certificate inequality.

    Items with rep0 set are moved to ``rep`` with :func:`transfer_chain`;
    others are evaluated under ``rep`` directly.  A failing item is recorded
    and the rest of the family still runs.
    """
    family = list(family)
    if not family:
        raise EmptyFamily("the family of chains is empty")
    records = []
    for item in family:
        rec = ItemRecord(item.parameter)
        try:
            if item.rep0 is None:
                target = item.rep or rep
                if target is None:
                    raise InvalidParameter("no representation for a direct item")
                rec.value = evaluate(cocycle, target, item.chain)
                rec.norm1 = float(item.chain.norm1())
                rec.boundary_norm1 = float(boundary(item.chain).norm1())
            else:
                if rep is None:
                    raise InvalidParameter("transfer needs a target representation")
                z_eps, report = transfer_chain(item.rep0, item.chain, cocycle, rep, epsilon,
                                               request)
                # value under rho0; the deviation covers the move to rho
                rec.value = report.input_value
                rec.norm1 = report.output_norm
                rec.boundary_norm1 = report.output_boundary_norm
                rec.deviation = report.deviation
                rec.transfer = report
            if rec.norm1 == 0:
                raise InvalidParameter("zero chain")
        except HypvolError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
            rec.value = rec.norm1 = rec.boundary_norm1 = None
        records.append(rec)
    if not any(r.ok for r in records):
        raise EmptyFamily("every item of the family failed")
    return SeminormLowerBound(labels[0] or getattr(cocycle, "name", "cocycle"),
                              labels[1] or "rep", records, tail, dict(parameters or {}))


def surface_family(genera: Sequence[int], transfer: bool = False) -> List[FamilyItem]:
    items = []
    for g in genera:
        fa = surface_chain(g)
        if transfer:
            items.append(FamilyItem(g, fa.chain, rep0=fa.rep))
        else:
            items.append(FamilyItem(g, fa.chain, rep=fa.rep))
    return items


__all__ = ["FreeApproximation", "surface_chain", "fan_chain", "polygon_area",
           "seminorm_bound", "SeminormLowerBound", "FamilyItem", "surface_family"]
