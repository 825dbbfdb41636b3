"""Singer projective planes and the slanted symplectic quadrangle W(q)♦."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import InvalidOrder, SingerLatticeError
from .gf import FieldElement, field_of_order, make_field, prime_power, primitive_element, trace_to_subfield
from .groups import (
    CyclicGroup,
    GroupAction,
    GroupElement,
    HeisenbergGroup,
    cyclic_group,
    heisenberg_group,
)
from .polygon import IncidenceStructure, double_perp


class NotPrimePower(SingerLatticeError, ValueError):
    pass


class InvariantViolation(SingerLatticeError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ZeroNotFirst(SingerLatticeError, ValueError):
    pass


@dataclass(frozen=True)
class DifferenceSet:
    n: int
    residues: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "residues", tuple(sorted(r % self.n for r in self.residues)))

    def __iter__(self):
        return iter(self.residues)

    def __len__(self):
        return len(self.residues)

    def __contains__(self, r):
        return r % self.n in self.residues

    @property
    def q(self) -> int:
        return len(self.residues) - 1

    def __str__(self):
        return "{" + ",".join(map(str, self.residues)) + "} mod " + str(self.n)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "residues": list(self.residues)})

    @classmethod
    def from_json(cls, text: str) -> "DifferenceSet":
        data = json.loads(text)
        return cls(data["n"], tuple(data["residues"]))

    def violation(self):
        """None if perfect; otherwise (residue, representations) witnessing failure."""
        reps: dict[int, list] = {r: [] for r in range(1, self.n)}
        if len(set(self.residues)) != len(self.residues):
            return (0, "repeated residue")
        for a in self.residues:
            for b in self.residues:
                if a != b:
                    reps[(a - b) % self.n].append((a, b))
        for r in range(1, self.n):
            if len(reps[r]) != 1:
                return (r, reps[r])
        return None

    def is_perfect(self) -> bool:
        return self.violation() is None


def singer_difference_set(q: int) -> DifferenceSet:
    """Trace-kernel difference set of PG(2, q), translated to contain 0."""
    pe = prime_power(q)
    if pe is None:
        raise NotPrimePower(f"{q} is not a prime power")
    p, e = pe
    big = make_field(p, 3 * e)
    sub = make_field(p, e)
    n = q * q + q + 1
    omega = primitive_element(big)
    zeros = []
    w = big.one
    for i in range(n):
        if not trace_to_subfield(w, 3, sub):
            zeros.append(i)
        w = w * omega
    m = min(zeros)
    return DifferenceSet(n, tuple((i - m) % n for i in zeros))


@dataclass
class SingerPlane:
    q: int
    n: int
    plane: IncidenceStructure
    delta: DifferenceSet
    group: CyclicGroup

    def point_action(self) -> GroupAction:
        return GroupAction(self.group, list(range(self.n)), lambda g, i: (i + g.payload) % self.n)

    def line_action(self) -> GroupAction:
        return GroupAction(self.group, list(range(self.n)), lambda g, j: (j + g.payload) % self.n)


def plane_from_difference_set(delta: DifferenceSet) -> SingerPlane:
    """Points and lines are Z/n; point i lies on line j iff i - j ∈ Δ."""
    bad = delta.violation()
    if bad is not None:
        raise InvariantViolation(f"{delta} is not a perfect difference set; residue {bad[0]}", bad)
    n = delta.n
    flags = [((j + d) % n, j) for j in range(n) for d in delta.residues]
    plane = IncidenceStructure(range(n), range(n), flags)
    return SingerPlane(delta.q, n, plane, delta, cyclic_group(n, "σ"))


def ordered_difference_set(delta: DifferenceSet, ordering: Sequence[int]) -> tuple[int, ...]:
    """Bijection J = {0..q} → Δ: index j maps to residues[ordering[j]]."""
    ordering = list(ordering)
    if sorted(ordering) != list(range(len(delta))):
        raise ValueError(f"{ordering} is not a permutation of 0..{len(delta) - 1}")
    seq = tuple(delta.residues[k] for k in ordering)
    if seq[0] != 0:
        raise ZeroNotFirst(f"ordering {ordering} does not send 0 to the residue 0")
    return seq


# symplectic quadrangle W(q)

def symplectic_form(u: Sequence[FieldElement], v: Sequence[FieldElement]) -> FieldElement:
    """h on coordinates (e_-2, e_-1, e_1, e_2): h(e_i, e_j) = 1 if i + j = 0 and i < j, -1 if i > j."""
    return u[0] * v[3] - u[3] * v[0] + u[1] * v[2] - u[2] * v[1]


def _normalize(v: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    lead = next(c for c in v if c)
    inv = lead.inverse()
    return tuple(c * inv for c in v)


def _projective_points(F, dim: int) -> list[tuple]:
    els = list(F.elements())
    pts = []

    def rec(prefix):
        if len(prefix) == dim:
            if any(prefix):
                pts.append(tuple(prefix))
            return
        for x in els:
            rec(prefix + [x])
    rec([])
    return sorted({_normalize(v) for v in pts}, key=lambda v: [int(c) for c in v])


def _span_points(F, u, v) -> frozenset:
    out = set()
    for a in F.elements():
        for b in F.elements():
            if a or b:
                out.add(_normalize(tuple(a * x + b * y for x, y in zip(u, v))))
    return frozenset(out)


def point_key(v: Sequence[FieldElement]) -> tuple[int, ...]:
    return tuple(int(c) for c in v)


@lru_cache(maxsize=None)
def symplectic_quadrangle(q: int) -> IncidenceStructure:
    """W(q): all points of PG(3,q); lines are the totally isotropic 2-spaces."""
    F = field_of_order(q)
    pts = _projective_points(F, 4)
    lines = set()
    for i, u in enumerate(pts):
        for v in pts[i + 1:]:
            if not symplectic_form(u, v):
                lines.add(_span_points(F, u, v))
    lines = sorted((tuple(sorted(point_key(p) for p in l)) for l in lines))
    points = [point_key(p) for p in pts]
    flags = [(p, l) for l in lines for p in l]
    return IncidenceStructure(points, lines, flags)


@dataclass
class SlantedQuadrangle:
    q: int
    quadrangle: IncidenceStructure
    singer: HeisenbergGroup
    action: GroupAction
    line_action: GroupAction
    base_point: tuple
    line_reps: list = field(default_factory=list)
    rep_labels: list = field(default_factory=list)
    stabilizers: list = field(default_factory=list)

    def to_json(self) -> str:
        idx = {p: i for i, p in enumerate(self.quadrangle.points)}
        return json.dumps({
            "q": self.q,
            "points": [list(p) for p in self.quadrangle.points],
            "lines": [[idx[p] for p in l] for l in self.quadrangle.lines],
        })


def _act_on_point(E: HeisenbergGroup, g: GroupElement, p: tuple) -> tuple:
    F = E.field
    v = E.act(g, [F.from_int(c) for c in p])
    return point_key(_normalize(v))


def projective_line_labels(F) -> list[tuple]:
    """Normalized [a:b] in PF_q^2: (1, b) for all b, then (0, 1)."""
    return [(F.one, b) for b in F.elements()] + [(F.zero, F.one)]


def displayed_stabilizer(E: HeisenbergGroup, label) -> list[GroupElement]:
    """The stabilizer of a representative line in closed matrix form."""
    F = E.field
    if label == 0:
        return [E.z(f) for f in F.elements()]
    a, b = label
    return [E._mat([[1, f * a, f * b, 0], [0, 1, 0, f * b], [0, 0, 1, -(f * a)], [0, 0, 0, 1]])
            for f in F.elements()]


def slanted_quadrangle(q: int) -> SlantedQuadrangle:
    """Payne derivation of W(q) at p0 = span(1,0,0,0) with Singer group E."""
    if prime_power(q) is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q <= 2:
        raise InvalidOrder(f"slanted quadrangle needs q > 2, got {q}")
    F = field_of_order(q)
    W = symplectic_quadrangle(q)
    p0 = point_key((F.one, F.zero, F.zero, F.zero))
    p1 = point_key((F.zero, F.zero, F.zero, F.one))
    # points not collinear with p0 are exactly those with last coordinate nonzero
    p0_perp = {p0}
    for l in W.lines_through[p0]:
        p0_perp.update(l)
    points = [p for p in W.points if p not in p0_perp]
    pset = set(points)
    lines = set()
    for l in W.lines:
        if p0 not in l:
            lines.add(tuple(sorted(p for p in l if p in pset)))
    for r in points:
        lines.add(tuple(sorted(double_perp(W, p0, r) - {p0})))
    lines = sorted(lines)
    flags = [(p, l) for l in lines for p in l]
    Q = IncidenceStructure(points, lines, flags)

    E = heisenberg_group(q)
    act = GroupAction(E, points, lambda g, p: _act_on_point(E, g, p))
    line_act = GroupAction(E, lines, lambda g, l: tuple(sorted(_act_on_point(E, g, p) for p in l)))

    reps, labels = [], []
    for a, b in projective_line_labels(F):
        pts = _span_points(F, (F.zero, F.zero, F.zero, F.one), (F.zero, b, -a, F.zero))
        reps.append(tuple(sorted(point_key(p) for p in pts if point_key(p) in pset)))
        labels.append((a, b))
    reps.append(tuple(sorted(double_perp(W, p0, p1) - {p0})))
    labels.append(0)
    stabs = []
    for rep in reps:
        stabs.append([g for g in E.elements() if line_act(g, rep) == rep])
    return SlantedQuadrangle(q, Q, E, act, line_act, p1, reps, labels, stabs)


def stabilizer_generators(sq: SlantedQuadrangle) -> list[GroupElement]:
    """Per representative: x^a y^b z^(-ab/2), and z for l0.  Odd prime q only."""
    E = sq.singer
    if E.field.e != 1 or E.q % 2 == 0:
        raise InvalidOrder(f"closed-form generators need an odd prime, got {E.q}")
    half = E.field(2).inverse()
    out = []
    for label in sq.rep_labels:
        if label == 0:
            out.append(E.z())
            continue
        a, b = label
        c = -(a * b) * half
        out.append(E.x() ** int(a) * E.y() ** int(b) * E.z() ** int(c))
    return out
