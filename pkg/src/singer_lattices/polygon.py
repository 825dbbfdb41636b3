"""Finite incidence structures and generalized polygon verification."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import SingerLatticeError


class UnknownPoint(SingerLatticeError, KeyError):
    pass


class PolygonFailure(SingerLatticeError):
    """Base for structured verification failures."""


class NotConnected(PolygonFailure):
    def __init__(self, unreached):
        super().__init__(f"incidence graph not connected; unreached vertex {unreached!r}")
        self.unreached = unreached


class NotPolygon(PolygonFailure):
    def __init__(self, diameter, girth, expected_m=None):
        msg = f"diameter {diameter}, girth {girth}"
        if expected_m is not None:
            msg += f", expected m={expected_m}"
        super().__init__(msg)
        self.diameter = diameter
        self.girth = girth
        self.expected_m = expected_m


class NonConstantOrder(PolygonFailure):
    def __init__(self, kind, witness, sizes):
        super().__init__(f"{kind} sizes not constant: {sizes}, witness {witness!r}")
        self.kind = kind
        self.witness = witness
        self.sizes = sizes


class IncidenceStructure:
    """Points, lines and flags.  Points and lines are arbitrary hashable labels."""

    def __init__(self, points: Iterable[Hashable], lines: Iterable[Hashable],
                 flags: Iterable[tuple[Hashable, Hashable]]):
        self.points = list(points)
        self.lines = list(lines)
        self.flags = list(dict.fromkeys(flags))
        self._pidx = {p: i for i, p in enumerate(self.points)}
        self._lidx = {l: i for i, l in enumerate(self.lines)}
        if len(self._pidx) != len(self.points) or len(self._lidx) != len(self.lines):
            raise ValueError("duplicate point or line labels")
        self.points_on = {l: [] for l in self.lines}
        self.lines_through = {p: [] for p in self.points}
        for p, l in self.flags:
            if p not in self._pidx or l not in self._lidx:
                raise ValueError(f"flag {(p, l)!r} not in points x lines")
            self.points_on[l].append(p)
            self.lines_through[p].append(l)
        self._flagset = set(self.flags)

    def __repr__(self):
        return f"IncidenceStructure({len(self.points)} points, {len(self.lines)} lines, {len(self.flags)} flags)"

    def incident(self, p, l) -> bool:
        return (p, l) in self._flagset

    def dual(self) -> "IncidenceStructure":
        return IncidenceStructure(self.lines, self.points, [(l, p) for p, l in self.flags])

    def to_json(self) -> str:
        pid, lid = self._pidx, self._lidx
        return json.dumps({
            "points": [_jsonable(p) for p in self.points],
            "lines": [_jsonable(l) for l in self.lines],
            "flags": [[pid[p], lid[l]] for p, l in self.flags],
        })

    @classmethod
    def from_json(cls, text: str) -> "IncidenceStructure":
        data = json.loads(text)
        pts = [_hashable(p) for p in data["points"]]
        lns = [_hashable(l) for l in data["lines"]]
        return cls(pts, lns, [(pts[i], lns[j]) for i, j in data["flags"]])

    def to_dot(self, name: str = "incidence") -> str:
        out = [f"graph {name} {{"]
        for i, p in enumerate(self.points):
            out.append(f'  p{i} [shape=circle, label="{p}"];')
        for j, l in enumerate(self.lines):
            out.append(f'  l{j} [shape=box, label="{l}"];')
        for p, l in self.flags:
            out.append(f"  p{self._pidx[p]} -- l{self._lidx[l]};")
        out.append("}")
        return "\n".join(out) + "\n"


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, (int, str)) or x is None:
        return x
    return str(x)


def _hashable(x):
    return tuple(_hashable(y) for y in x) if isinstance(x, list) else x


@dataclass(frozen=True)
class IncidenceGraph:
    """Bipartite graph on P ⊔ L; vertices are ('P', p) and ('L', l)."""

    vertices: tuple
    adjacency: dict

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.adjacency.values()) // 2


def incidence_graph(I: IncidenceStructure) -> IncidenceGraph:
    verts = tuple([("P", p) for p in I.points] + [("L", l) for l in I.lines])
    adj = {v: [] for v in verts}
    for p, l in I.flags:
        adj[("P", p)].append(("L", l))
        adj[("L", l)].append(("P", p))
    return IncidenceGraph(verts, adj)


def _bfs(adj: dict, src) -> tuple[dict, int]:
    """Distances from src and the length of the shortest cycle through src."""
    dist = {src: 0}
    parent = {src: None}
    queue = deque([src])
    shortest = None
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                parent[w] = u
                queue.append(w)
            elif parent[u] != w:
                cyc = dist[u] + dist[w] + 1
                if shortest is None or cyc < shortest:
                    shortest = cyc
    return dist, shortest


def diameter_and_girth(G: IncidenceGraph) -> tuple[int, int | None]:
    """Raises NotConnected.  Girth is None for a forest."""
    diam, girth = 0, None
    n = len(G.vertices)
    for v in G.vertices:
        dist, cyc = _bfs(G.adjacency, v)
        if len(dist) != n:
            raise NotConnected(next(u for u in G.vertices if u not in dist))
        diam = max(diam, max(dist.values()))
        if cyc is not None and (girth is None or cyc < girth):
            girth = cyc
    return diam, girth


@dataclass(frozen=True)
class PolygonCertificate:
    m: int
    order: tuple[int, int]
    thick: bool


def structure_order(I: IncidenceStructure) -> tuple[int, int]:
    """(s, t): s+1 points per line and t+1 lines per point, required constant."""
    line_sizes = {l: len(I.points_on[l]) for l in I.lines}
    point_sizes = {p: len(I.lines_through[p]) for p in I.points}
    for kind, sizes in (("line", line_sizes), ("point", point_sizes)):
        values = set(sizes.values())
        if len(values) > 1:
            common = max(values, key=lambda v: sum(1 for x in sizes.values() if x == v))
            witness = next(k for k, v in sizes.items() if v != common)
            raise NonConstantOrder(kind, witness, sorted(values))
    s = next(iter(line_sizes.values())) - 1
    t = next(iter(point_sizes.values())) - 1
    return s, t


def verify_generalized_polygon(I: IncidenceStructure, expected_m: int | None = None) -> PolygonCertificate:
    """Certify that I is a generalized m-gon: diameter m and girth 2m."""
    if not I.points or not I.lines:
        raise NotConnected(None)
    G = incidence_graph(I)
    diam, girth = diameter_and_girth(G)
    if girth is None or girth != 2 * diam or (expected_m is not None and diam != expected_m):
        raise NotPolygon(diam, girth, expected_m)
    s, t = structure_order(I)
    return PolygonCertificate(diam, (s, t), s >= 2 and t >= 2)


def _check_point(I: IncidenceStructure, p):
    if p not in I._pidx:
        raise UnknownPoint(p)


def collinear(I: IncidenceStructure, p, p2) -> bool:
    """p ~ p2: equal, or on a common line."""
    _check_point(I, p)
    _check_point(I, p2)
    if p == p2:
        return True
    lines = set(I.lines_through[p])
    return any(l in lines for l in I.lines_through[p2])


def perp_set(I: IncidenceStructure, p) -> set:
    _check_point(I, p)
    out = {p}
    for l in I.lines_through[p]:
        out.update(I.points_on[l])
    return out


def double_perp(I: IncidenceStructure, p, p2) -> set:
    """{p, p2}^⊥⊥: points collinear with every s in p^⊥ ∩ p2^⊥."""
    common = perp_set(I, p) & perp_set(I, p2)
    perps = [perp_set(I, s) for s in common]
    return {r for r in I.points if all(r in ps for ps in perps)}


def projective_plane_axioms(I: IncidenceStructure) -> bool:
    """Two distinct points span one line and two distinct lines meet once."""
    for a in range(len(I.points)):
        for b in range(a + 1, len(I.points)):
            pa, pb = I.points[a], I.points[b]
            if len(set(I.lines_through[pa]) & set(I.lines_through[pb])) != 1:
                return False
    for a in range(len(I.lines)):
        for b in range(a + 1, len(I.lines)):
            la, lb = I.lines[a], I.lines[b]
            if len(set(I.points_on[la]) & set(I.points_on[lb])) != 1:
                return False
    return True


def fano_plane() -> IncidenceStructure:
    """The Fano plane with the standard labelling of its 7 lines."""
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return IncidenceStructure(range(7), range(7), [(p, j) for j, l in enumerate(lines) for p in l])


def complete_bipartite(a: int, b: int) -> IncidenceStructure:
    return IncidenceStructure(range(a), range(b), [(p, l) for p in range(a) for l in range(b)])


def relabel(I: IncidenceStructure, pmap: dict, lmap: dict) -> IncidenceStructure:
    return IncidenceStructure([pmap[p] for p in I.points], [lmap[l] for l in I.lines],
                              [(pmap[p], lmap[l]) for p, l in I.flags])


def restrict(I: IncidenceStructure, points: Sequence, lines: Sequence) -> IncidenceStructure:
    ps, ls = set(points), set(lines)
    return IncidenceStructure(points, lines, [(p, l) for p, l in I.flags if p in ps and l in ls])
