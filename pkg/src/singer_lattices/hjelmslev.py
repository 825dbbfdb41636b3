"""The level-2 Hjelmslev plane around v1 in an Ã2 building from cyclic Singer groups.

Points of the radius-2 sphere are σ1^j1 σ3^j3 v2 with j3 ∉ -Δ3, lines are
σ1^k1 σ2^k2 v3 with k2 ∉ Δ2.  Points are stored as pairs (j1, j3) and
lines as pairs (k1, k2).  The projection ψ forgets the second entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import SingerLatticeError
from .gf import is_prime
from .lattice import A2LatticeSpec
from .polygon import IncidenceStructure, PolygonFailure, verify_generalized_polygon


class NotCyclic(SingerLatticeError, TypeError):
    pass


class MissingTriangleRelation(SingerLatticeError, KeyError):
    pass


class NoValidM(SingerLatticeError, ValueError):
    pass


class HypothesisViolated(SingerLatticeError, ValueError):
    pass


Point = tuple[int, int]
Line = tuple[int, int]


def triangle_relations(spec: A2LatticeSpec) -> list[tuple[int, int, int]]:
    """Exponent triples (a, b, c) with σ1^a σ2^b σ3^c = 1, one per j ∈ J."""
    return [tuple(spec.delta(a)[j] for a in (1, 2, 3)) for j in range(spec.q + 1)]


def _require_cyclic(spec) -> A2LatticeSpec:
    if not isinstance(spec, A2LatticeSpec):
        raise NotCyclic(f"expected a cyclic Ã2 spec, got {type(spec).__name__}")
    spec.validate()
    return spec


def closed_form_applies(spec: A2LatticeSpec) -> bool:
    """True when the three ordered difference sets δ1, δ2, δ3 coincide."""
    return spec.delta(1) == spec.delta(2) == spec.delta(3)


def cyclic_adjacency(n: int, delta: Iterable[int], point: Point, line: Line) -> bool:
    """k1 - j1 ∈ Δ and (k2 - Δ) ∩ (-j3 - Δ) ∩ (k1 - j1 - Δ) ≠ ∅."""
    D = {d % n for d in delta}
    (j1, j3), (k1, k2) = point, line
    c = (k1 - j1) % n
    if c not in D:
        return False
    a = {(k2 - d) % n for d in D}
    b = {(-j3 - d) % n for d in D}
    return any((c - d) % n in a and (c - d) % n in b for d in D)


def general_adjacency(spec: A2LatticeSpec, point: Point, line: Line,
                      relations: Sequence[tuple[int, int, int]] | None = None) -> bool:
    """Adjacency from conditions (C1) and (C2) with the triangle-relation lookup.

    ``relations`` lists exponent triples (d1, d2, d3) with d1 d2 d3 = 1;
    the default comes from the relators of the lattice.
    """
    n = spec.n
    D1, D2, D3 = (set(spec.deltas[a].residues) for a in range(3))
    rels = triangle_relations(spec) if relations is None else relations
    by_first = {r[0] % n: r for r in rels}
    by_second = {r[1] % n: r for r in rels}
    (j1, j3), (k1, k2) = point, line
    c = (k1 - j1) % n
    if c not in D1:
        return False
    if c not in by_first:
        raise MissingTriangleRelation(f"no relation d1 d2 d3 = 1 with d1 = σ1^{c}")
    _, d2, d3 = by_first[c]
    for n2 in range(n):
        # n2 ∈ t2 D2^-1 ∩ d2 D2^-1
        if (k2 - n2) % n not in D2 or (d2 - n2) % n not in D2:
            continue
        x = (d2 - n2) % n
        if x not in by_second:
            raise MissingTriangleRelation(f"no relation with middle factor σ2^{x}")
        _, _, e3 = by_second[x]
        if (-j3 - d3 + e3) % n in D3:
            return True
    return False


@dataclass
class HjelmslevPlane:
    q: int
    n: int
    spec: A2LatticeSpec
    points: list
    lines: list
    adjacency: dict = field(repr=False)        # point -> frozenset of lines
    closed_form: bool = False

    def __post_init__(self):
        inv: dict = {l: set() for l in self.lines}
        for p, ls in self.adjacency.items():
            for l in ls:
                inv[l].add(p)
        self._points_on = {l: frozenset(ps) for l, ps in inv.items()}

    def adjacent(self, p: Point, l: Line) -> bool:
        return l in self.adjacency[p]

    def lines_through(self, p: Point) -> frozenset:
        return self.adjacency[p]

    def points_on(self, l: Line) -> frozenset:
        return self._points_on[l]

    @staticmethod
    def psi(x: tuple[int, int]) -> int:
        return x[0]

    def base_plane(self) -> IncidenceStructure:
        """The radius-1 plane: point j lies on line k iff k - j ∈ Δ1."""
        D1 = self.spec.deltas[0].residues
        flags = [(j, (j + d) % self.n) for j in range(self.n) for d in D1]
        return IncidenceStructure(range(self.n), range(self.n), flags)

    def incidence_structure(self) -> IncidenceStructure:
        flags = [(p, l) for p in self.points for l in sorted(self.adjacency[p])]
        return IncidenceStructure(self.points, self.lines, flags)

    def to_json(self) -> str:
        return json.dumps({
            "q": self.q,
            "n": self.n,
            "points": [list(p) for p in self.points],
            "lines": [list(l) for l in self.lines],
            "adjacency": [[list(p), list(l)] for p in self.points for l in sorted(self.adjacency[p])],
        })

    def to_dot(self) -> str:
        out = ["graph hjelmslev {"]
        for p in self.points:
            out.append(f'  "P{p[0]},{p[1]}" [shape=circle];')
        for l in self.lines:
            out.append(f'  "L{l[0]},{l[1]}" [shape=box];')
        for p in self.points:
            for l in sorted(self.adjacency[p]):
                out.append(f'  "P{p[0]},{p[1]}" -- "L{l[0]},{l[1]}";')
        out.append("}")
        return "\n".join(out)


def hjelmslev_plane(spec: A2LatticeSpec, method: str = "auto") -> HjelmslevPlane:
    """Build P², L² and the adjacency table.

    ``method`` is "closed" (residue-set criterion), "general" (conditions
    C1 and C2) or "auto", which uses the closed form exactly when δ1, δ2
    and δ3 agree as ordered sequences.
    """
    spec = _require_cyclic(spec)
    n = spec.n
    minus_d3 = {(-d) % n for d in spec.deltas[2].residues}
    d2 = set(spec.deltas[1].residues)
    points = [(j1, j3) for j1 in range(n) for j3 in range(n) if j3 not in minus_d3]
    lines = [(k1, k2) for k1 in range(n) for k2 in range(n) if k2 not in d2]
    if method == "auto":
        method = "closed" if closed_form_applies(spec) else "general"
    if method == "closed":
        if not closed_form_applies(spec):
            raise HypothesisViolated("the closed form needs δ1 = δ2 = δ3")
        delta = spec.deltas[0].residues
        adj = {p: frozenset(l for l in lines if cyclic_adjacency(n, delta, p, l)) for p in points}
    elif method == "general":
        rels = triangle_relations(spec)
        adj = {p: frozenset(l for l in lines if general_adjacency(spec, p, l, rels)) for p in points}
    else:
        raise ValueError(f"unknown method {method!r}")
    return HjelmslevPlane(spec.q, n, spec, points, lines, adj, method == "closed")


def incidence_counts(H: HjelmslevPlane, x: tuple[int, int], y: tuple[int, int], kind: str = "point") -> int:
    """Number of lines through two points, or of points on two lines when kind='line'."""
    if x == y:
        raise ValueError("the two elements must differ")
    if kind == "point":
        return len(H.lines_through(x) & H.lines_through(y))
    if kind == "line":
        return len(H.points_on(x) & H.points_on(y))
    raise ValueError(f"kind must be 'point' or 'line', got {kind!r}")


@dataclass
class SplittingMap:
    m: int
    points: dict        # radius-1 point j -> (j, -m)
    lines: dict         # radius-1 line k -> (k, m)

    def image(self) -> tuple[list, list]:
        return sorted(self.points.values()), sorted(self.lines.values())


def splitting_map(H: HjelmslevPlane) -> SplittingMap:
    """ι(j) = (j, -m), ι(k) = (k, m) with m the smallest residue outside Δ ∪ -Δ."""
    if not closed_form_applies(H.spec):
        raise HypothesisViolated("the splitting map is only defined for δ1 = δ2 = δ3")
    n = H.n
    D = set(H.spec.deltas[0].residues)
    allowed = [m for m in range(n) if m not in D and (-m) % n not in D]
    if not allowed:
        raise NoValidM(f"Δ ∪ -Δ covers Z/{n}")
    m = allowed[0]
    iota = SplittingMap(m, {j: (j, (-m) % n) for j in range(n)}, {k: (k, m) for k in range(n)})
    base = H.base_plane()
    for j, p in iota.points.items():
        assert H.psi(p) == j and p in H.adjacency
    for k, l in iota.lines.items():
        assert H.psi(l) == k and l in H._points_on
    for j, k in base.flags:
        if not H.adjacent(iota.points[j], iota.lines[k]):
            raise NoValidM(f"ι does not preserve the flag ({j}, {k}) for m = {m}")
    return iota


@dataclass
class Substructure:
    points: frozenset
    lines: frozenset

    def incidence(self, H: HjelmslevPlane) -> IncidenceStructure:
        ps, ls = sorted(self.points), sorted(self.lines)
        lset = set(ls)
        return IncidenceStructure(ps, ls, [(p, l) for p in ps for l in H.lines_through(p) if l in lset])


def generate_substructure(H: HjelmslevPlane, seeds: Iterable[Point], lines: Iterable[Line] = ()) -> Substructure:
    """Close under joining ψ-distinct points and meeting ψ-distinct lines."""
    P = set(seeds)
    L = set(lines)
    for p in P:
        if p not in H.adjacency:
            raise KeyError(f"{p} is not a point of P²")
    changed = True
    while changed:
        changed = False
        for a, b in combinations(sorted(P), 2):
            if H.psi(a) != H.psi(b):
                (l,) = H.lines_through(a) & H.lines_through(b)
                if l not in L:
                    L.add(l)
                    changed = True
        for a, b in combinations(sorted(L), 2):
            if H.psi(a) != H.psi(b):
                (p,) = H.points_on(a) & H.points_on(b)
                if p not in P:
                    P.add(p)
                    changed = True
    return Substructure(frozenset(P), frozenset(L))


@dataclass
class CmszVerdict:
    kind: str                   # "ProjectivePlaneOfOrder", "FullPlane" or "Other"
    order: int | None
    seeds: tuple
    substructure: Substructure
    details: str = ""

    def __str__(self):
        if self.kind == "ProjectivePlaneOfOrder":
            return (f"ProjectivePlaneOfOrder({self.order}): the substructure generated by "
                    f"{len(self.seeds)} lifted points has {len(self.substructure.points)} points and "
                    f"{len(self.substructure.lines)} lines, so the building is not that of SL3(Q_{self.order})")
        if self.kind == "FullPlane":
            return "FullPlane: the substructure is all of the Hjelmslev plane"
        return f"Other: {self.details}"


def general_position_quadruple(I: IncidenceStructure) -> tuple:
    """Lexicographically first four points with no three on a common line."""
    line_sets = [set(I.points_on[l]) for l in I.lines]
    for quad in combinations(sorted(I.points), 4):
        if not any(sum(p in s for p in quad) >= 3 for s in line_sets):
            return quad
    raise ValueError("no four points in general position")


def cmsz_test(H: HjelmslevPlane) -> CmszVerdict:
    """Lift a general-position quadruple by ι, generate, and classify the result."""
    if not is_prime(H.q):
        raise HypothesisViolated(f"the criterion needs a prime residue field, got q = {H.q}")
    iota = splitting_map(H)
    quad = general_position_quadruple(H.base_plane())
    seeds = tuple(iota.points[j] for j in quad)
    sub = generate_substructure(H, seeds)
    if len(sub.points) == len(H.points) and len(sub.lines) == len(H.lines):
        return CmszVerdict("FullPlane", None, seeds, sub)
    try:
        cert = verify_generalized_polygon(sub.incidence(H), 3)
    except PolygonFailure as exc:
        return CmszVerdict("Other", None, seeds, sub, f"not a projective plane: {exc!r}")
    if cert.order != (H.q, H.q):
        return CmszVerdict("Other", None, seeds, sub, f"projective plane of order {cert.order}")
    return CmszVerdict("ProjectivePlaneOfOrder", H.q, seeds, sub)
