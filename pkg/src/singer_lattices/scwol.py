"""Scwols, complexes of groups, upper links and fundamental groups.

Edges are written ``x <- y`` with initial vertex ``i = y`` and terminal
vertex ``t = x``.  A pair ``(a, b)`` is composable when ``i(a) = t(b)``, and
then ``i(ab) = i(b)``, ``t(ab) = t(a)``.
"""

from __future__ import annotations

import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import SingerLatticeError, TooLarge
from .groups import FiniteGroup, GroupElement, Subgroup, generate_subgroup
from .polygon import IncidenceStructure
from .words import Generator, Presentation, Word, free_reduce, inverse, occurrences, relator_normal_form, substitute

DEFAULT_VERTEX_BOUND = 5000
BOUND_ENV = "SINGER_LATTICE_MAX_SCWOL"


class ScwolError(SingerLatticeError):
    pass


class NotATree(ScwolError):
    pass


class BoundExceeded(ScwolError):
    pass


def vertex_bound() -> int:
    raw = os.environ.get(BOUND_ENV)
    return int(raw) if raw else DEFAULT_VERTEX_BOUND


class Scwol:
    """A small category without loops of dimension at most 2."""

    def __init__(self, vertices: Iterable[Hashable], edges: Mapping[Hashable, tuple[Hashable, Hashable]],
                 composition: Mapping[tuple[Hashable, Hashable], Hashable] | None = None):
        self.vertices = list(vertices)
        self.edges = dict(edges)   # edge -> (i, t)
        self.composition = dict(composition or {})
        self._vset = set(self.vertices)
        if len(self._vset) != len(self.vertices):
            raise ScwolError("duplicate vertices")
        for a, (i, t) in self.edges.items():
            if i not in self._vset or t not in self._vset:
                raise ScwolError(f"edge {a!r} has endpoints outside the vertex set")
            if i == t:
                raise ScwolError(f"edge {a!r} is a loop")
        for (a, b), ab in self.composition.items():
            if self.i(a) != self.t(b):
                raise ScwolError(f"({a!r}, {b!r}) not composable")
            if self.i(ab) != self.i(b) or self.t(ab) != self.t(a):
                raise ScwolError(f"composite of ({a!r}, {b!r}) has wrong endpoints")
        for (a, b), ab in self.composition.items():
            for (b2, c), bc in self.composition.items():
                if b2 == b and (ab, c) in self.composition and (a, bc) in self.composition:
                    if self.composition[(ab, c)] != self.composition[(a, bc)]:
                        raise ScwolError("composition is not associative")

    def i(self, a) -> Hashable:
        return self.edges[a][0]

    def t(self, a) -> Hashable:
        return self.edges[a][1]

    def __repr__(self):
        return f"Scwol({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def incoming(self, v) -> list:
        """Edges a with t(a) = v."""
        return [a for a, (_, t) in self.edges.items() if t == v]

    def outgoing(self, v) -> list:
        """Edges a with i(a) = v."""
        return [a for a, (i, _) in self.edges.items() if i == v]

    def composable_pairs(self) -> list[tuple]:
        return list(self.composition)

    def to_dot(self, labels: Mapping | None = None) -> str:
        idx = {v: k for k, v in enumerate(self.vertices)}
        out = ["digraph scwol {"]
        for v in self.vertices:
            lab = labels.get(v, v) if labels else v
            out.append(f'  n{idx[v]} [label="{lab}"];')
        for a, (i, t) in self.edges.items():
            out.append(f"  n{idx[i]} -> n{idx[t]};")
        out.append("}")
        return "\n".join(out) + "\n"


def scwol_of_incidence(I: IncidenceStructure) -> Scwol:
    """Z(I): vertices P ⊔ L ⊔ F with edges p <- f and l <- f."""
    verts = [("P", p) for p in I.points] + [("L", l) for l in I.lines] + [("F", f) for f in I.flags]
    edges = {}
    for f in I.flags:
        p, l = f
        edges[("P<-F", f)] = (("F", f), ("P", p))
        edges[("L<-F", f)] = (("F", f), ("L", l))
    return Scwol(verts, edges)


def discrete_scwol(k: int, tag: str = "x") -> Scwol:
    """k vertices and no edges."""
    return Scwol([(tag, j) for j in range(k)], {})


class Homomorphism:
    """A map between finite groups given by a Python callable."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, fn: Callable[[GroupElement], GroupElement]):
        self.source = source
        self.target = target
        self.fn = fn

    def __call__(self, g: GroupElement) -> GroupElement:
        return self.fn(g)

    def image(self) -> list[GroupElement]:
        return generate_subgroup(self.target, [self.fn(g) for _, g in self.source.generators()])

    def is_injective_homomorphism(self) -> bool:
        els = self.source.elements()
        images = [self.fn(g) for g in els]
        if len(set(images)) != len(els):
            return False
        gens = [g for _, g in self.source.generators()] or []
        for a in els:
            for b in gens:
                if self.fn(a * b) != self.fn(a) * self.fn(b):
                    return False
        return True


def inclusion(source: FiniteGroup, target: FiniteGroup, fn=None) -> Homomorphism:
    if fn is None:
        if source.order() == 1:
            fn = lambda g: target.identity  # noqa: E731
        else:
            fn = lambda g: g  # noqa: E731
    return Homomorphism(source, target, fn)


@dataclass
class ComplexOfGroups:
    scwol: Scwol
    vertex_groups: dict
    monos: dict = field(default_factory=dict)
    twists: dict = field(default_factory=dict)
    name: str = ""

    def group(self, v) -> FiniteGroup:
        return self.vertex_groups[v]

    def psi(self, a) -> Homomorphism:
        if a in self.monos:
            return self.monos[a]
        src, tgt = self.group(self.scwol.i(a)), self.group(self.scwol.t(a))
        if src.order() != 1:
            raise ScwolError(f"missing monomorphism for edge {a!r}")
        return inclusion(src, tgt)

    def twist(self, a, b) -> GroupElement:
        g = self.twists.get((a, b))
        return g if g is not None else self.group(self.scwol.t(a)).identity

    def validate(self) -> None:
        """Injectivity of the monos and Ad(g_ab) ψ_ab = ψ_a ψ_b."""
        Y = self.scwol
        for a in Y.edges:
            if not self.psi(a).is_injective_homomorphism():
                raise ScwolError(f"ψ for edge {a!r} is not an injective homomorphism")
        for (a, b), ab in Y.composition.items():
            g = self.twist(a, b)
            if g.group is not self.group(Y.t(a)):
                raise ScwolError(f"twist for ({a!r}, {b!r}) not in the terminal group")
            for h in self.group(Y.i(b)).elements():
                lhs = g * self.psi(ab)(h) * g.inverse()
                if lhs != self.psi(a)(self.psi(b)(h)):
                    raise ScwolError(f"compatibility fails at ({a!r}, {b!r})")


# upper links of local developments

def _coset(sub: frozenset, g: GroupElement) -> frozenset:
    return frozenset(g * h for h in sub)


def upper_link(C: ComplexOfGroups, v) -> Scwol:
    """Lk_ṽ: cosets (g ψ_a(G_i(a)), a) for t(a) = v, and edges (g ψ_ab(G_i(b)), a, b)."""
    Y = C.scwol
    Gv = C.group(v)
    verts: list = []
    images: dict = {}
    for a in Y.incoming(v):
        img = frozenset(C.psi(a).image())
        images[a] = img
        seen = set()
        for g in Gv.elements():
            cs = _coset(img, g)
            if cs not in seen:
                seen.add(cs)
                verts.append((cs, a))
    edges = {}
    for (a, b), ab in Y.composition.items():
        if Y.t(a) != v:
            continue
        img_ab = frozenset(C.psi(ab).image())
        gab_inv = C.twist(a, b).inverse()
        seen = set()
        for g in Gv.elements():
            cs = _coset(img_ab, g)
            if cs in seen:
                continue
            seen.add(cs)
            rep = min(cs, key=lambda x: repr(x.payload))
            src = (cs, ab)
            tgt = (_coset(images[a], rep * gab_inv), a)
            edges[(cs, a, b)] = (src, tgt)
    return Scwol(verts, edges)


# scwol isomorphism by colour refinement and backtracking

@dataclass
class IsomorphismResult:
    isomorphic: bool
    mapping: dict | None = None
    reason: str = ""

    def __bool__(self):
        return self.isomorphic


def _graph_data(X: Scwol):
    idx = {v: k for k, v in enumerate(X.vertices)}
    out = [Counter() for _ in X.vertices]
    inc = [Counter() for _ in X.vertices]
    for i, t in X.edges.values():
        out[idx[i]][idx[t]] += 1
        inc[idx[t]][idx[i]] += 1
    return idx, out, inc


def _refine(colors: list, outs: list, ins: list) -> list:
    """Colour refinement over the disjoint union of both graphs."""
    while True:
        sigs = []
        for k in range(len(colors)):
            so = tuple(sorted((colors[t], m) for t, m in outs[k].items()))
            si = tuple(sorted((colors[s], m) for s, m in ins[k].items()))
            sigs.append((colors[k], so, si))
        palette = {s: c for c, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def scwol_isomorphism(X: Scwol, Y: Scwol, bound: int | None = None) -> IsomorphismResult:
    """Decide whether two scwols (as directed multigraphs) are isomorphic."""
    bound = bound or vertex_bound()
    if max(len(X.vertices), len(Y.vertices)) > bound:
        raise TooLarge(f"scwol with more than {bound} vertices")
    if len(X.vertices) != len(Y.vertices):
        return IsomorphismResult(False, reason=f"{len(X.vertices)} vs {len(Y.vertices)} vertices")
    if len(X.edges) != len(Y.edges):
        return IsomorphismResult(False, reason=f"{len(X.edges)} vs {len(Y.edges)} edges")
    n = len(X.vertices)
    if n == 0:
        return IsomorphismResult(True, {})
    ix, ox, inx = _graph_data(X)
    iy, oy, iny = _graph_data(Y)
    outs = ox + [Counter({t + n: m for t, m in c.items()}) for c in oy]
    ins = inx + [Counter({s + n: m for s, m in c.items()}) for c in iny]
    colors = _refine([0] * (2 * n), outs, ins)

    def hist(cols):
        return Counter(cols[:n]), Counter(cols[n:])

    hx, hy = hist(colors)
    if hx != hy:
        diff = next(c for c in set(hx) | set(hy) if hx[c] != hy[c])
        sample = next((X.vertices[k] for k in range(n) if colors[k] == diff), None)
        return IsomorphismResult(False, reason=f"refined colour class sizes differ ({hx[diff]} vs {hy[diff]}); witness {sample!r}")

    def search(cols):
        hx, hy = hist(cols)
        if hx != hy:
            return None
        classes = defaultdict(list)
        for k, c in enumerate(cols):
            classes[c].append(k)
        if all(len(v) == 2 for v in classes.values()):
            mapping = {}
            for members in classes.values():
                a, b = sorted(members)
                mapping[a] = b - n
            for a in range(n):
                if Counter({mapping[t]: m for t, m in ox[a].items()}) != oy[mapping[a]]:
                    return None
            return mapping
        target = min((c for c, v in classes.items() if len(v) > 2), key=lambda c: (len(classes[c]), c))
        members = classes[target]
        x = next(k for k in members if k < n)
        fresh = max(cols) + 1
        for y in (k for k in members if k >= n):
            trial = list(cols)
            trial[x] = fresh
            trial[y] = fresh
            found = search(_refine(trial, outs, ins))
            if found is not None:
                return found
        return None

    found = search(colors)
    if found is None:
        return IsomorphismResult(False, reason="no colour-consistent bijection extends to an isomorphism")
    return IsomorphismResult(True, {X.vertices[a]: Y.vertices[b] for a, b in found.items()})


def local_development_check(C: ComplexOfGroups, v, expected: Scwol, bound: int | None = None) -> IsomorphismResult:
    return scwol_isomorphism(upper_link(C, v), expected, bound)


# fundamental group

def edge_name(a) -> str:
    return "k[" + (a if isinstance(a, str) else repr(a)) + "]"


def _is_spanning_tree(Y: Scwol, tree: Sequence) -> bool:
    parent = {v: v for v in Y.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in tree:
        if a not in Y.edges:
            return False
        ra, rb = find(Y.i(a)), find(Y.t(a))
        if ra == rb:
            return False
        parent[ra] = rb
    return len(tree) == len(Y.vertices) - 1


def raw_fundamental_group(C: ComplexOfGroups, tree: Sequence) -> Presentation:
    """All four relation families before any simplification."""
    Y = C.scwol
    if not _is_spanning_tree(Y, tree):
        raise NotATree(f"{list(tree)!r} is not a maximal tree")
    gens: list[Generator] = []
    rels: list[Word] = []
    for v in Y.vertices:
        G = C.group(v)
        for name, g in G.generators():
            gens.append(Generator(name, g.order(), origin=str(v)))
        rels.extend(G.relators())
    for a in Y.edges:
        gens.append(Generator(edge_name(a), None, origin="edge"))
    for (a, b), ab in Y.composition.items():
        ka, kb, kab = ((edge_name(x), 1) for x in (a, b, ab))
        g_inv = C.group(Y.t(a)).word_for(C.twist(a, b).inverse())
        # k_a k_b = g k_ab, written as g^-1 k_a k_b k_ab^-1
        rels.append(free_reduce(g_inv + (ka, kb, (kab[0], -1))))
    for a in Y.edges:
        src, tgt = C.group(Y.i(a)), C.group(Y.t(a))
        k = edge_name(a)
        for name, g in src.generators():
            # ψ_a(g) = k_a g k_a^-1
            rels.append(free_reduce(tgt.word_for(C.psi(a)(g)) + ((k, 1), (name, -1), (k, -1))))
    for a in tree:
        rels.append(((edge_name(a), 1),))
    names = [g.name for g in gens]
    if len(set(names)) != len(names):
        raise ScwolError("generator names clash between vertex groups")
    return Presentation(gens, rels)


def simplify(P: Presentation, protected: Iterable[str] = (), rank: Mapping[str, int] | None = None,
             record: dict | None = None) -> Presentation:
    """Eliminate generators defined by a single relator in which they occur once.

    Candidates are ranked by ``rank`` (lower first) and then by relator
    length; protected generators are never eliminated.  If ``record`` is
    given it receives the value of every eliminated generator as a word in
    the surviving generators.
    """
    protected = set(protected)
    rank = dict(rank or {})
    gens = list(P.generators)
    rels = [free_reduce(r) for r in P.relators]
    rels = [r for r in rels if r]
    while True:
        best = None
        for ri, r in enumerate(rels):
            for name in dict.fromkeys(n for n, _ in r):
                if name in protected or occurrences(r, name) != 1:
                    continue
                key = (rank.get(name, 0), len(r), ri)
                if best is None or key < best[0]:
                    best = (key, ri, name)
        if best is None:
            break
        _, ri, name = best
        r = rels.pop(ri)
        pos = next(k for k, (n, _) in enumerate(r) if n == name)
        e = r[pos][1]
        # r = A x^e B = 1  =>  x^e = A^-1 B^-1
        value = inverse(r[:pos]) + inverse(r[pos + 1:])
        if e < 0:
            value = inverse(value)
        value = free_reduce(value)
        rels = [free_reduce(substitute(s, name, value)) for s in rels]
        rels = [s for s in rels if s]
        if record is not None:
            for key in record:
                record[key] = substitute(record[key], name, value)
            record[name] = value
        gens = [g for g in gens if g.name != name]
    out: list[Word] = []
    for r in rels:
        if r not in out:
            out.append(r)
    return Presentation(gens, out)


def drop_redundant(P: Presentation, groups: Sequence[FiniteGroup]) -> Presentation:
    """Remove relators written in one vertex group's generators that already hold there.

    A vertex group's own defining relators are kept.
    """
    owners = {}
    own = set()
    for G in groups:
        names = {n for n, _ in G.generators()}
        for n in names:
            owners[n] = G
        own.update(relator_normal_form(r) for r in G.relators())
    out = []
    for r in P.relators:
        hosts = {id(owners.get(n)) for n, _ in r}
        if len(hosts) == 1 and r[0][0] in owners and relator_normal_form(r) not in own:
            G = owners[r[0][0]]
            if G.evaluate(r).is_identity():
                continue
        out.append(r)
    return Presentation(P.generators, out)


def fundamental_group(C: ComplexOfGroups, tree: Sequence, simplify_result: bool = True,
                      keep: Iterable | None = None, record: dict | None = None) -> Presentation:
    """π1(G(Y), T) with k_a = 1 on T, then single-relator eliminations.

    Generators of the vertices in ``keep`` (default: vertices with no
    outgoing edge) are never eliminated.  Edge generators go first, then
    generators of vertices listed later in the scwol.  Finally relators
    that already hold in a single kept vertex group are dropped.
    """
    raw = raw_fundamental_group(C, tree)
    if not simplify_result:
        return raw
    Y = C.scwol
    if keep is None:
        keep = [v for v in Y.vertices if not Y.outgoing(v)]
    keep = list(keep)
    protected = {n for v in keep for n, _ in C.group(v).generators()}
    rank = {}
    nv = len(Y.vertices)
    for pos, v in enumerate(Y.vertices):
        for name, _ in C.group(v).generators():
            rank[name] = 1 + (nv - pos)
    for a in Y.edges:
        rank[edge_name(a)] = 0
    P = simplify(raw, protected=protected, rank=rank, record=record)
    return drop_redundant(P, [C.group(v) for v in keep])


def presentations_match(P: Presentation, Q: Presentation) -> bool:
    """Same generators and the same relators up to rotation, inversion and
    reduction of exponents modulo the declared generator orders."""
    if set(P.names) != set(Q.names):
        return False
    orders = {**Q.orders(), **P.orders()}
    return P.canonical_relators(orders) == Q.canonical_relators(orders)


# bounded neighbourhoods in the universal cover

DEFAULT_CLASS_CAP = 20000


class _SyllableCalculus:
    """Words in a free product of the kept vertex groups, as syllable tuples.

    Relators spanning several factors give the rewriting moves.
    """

    def __init__(self, C: ComplexOfGroups, P: Presentation, keep: Sequence, values: Mapping[str, Word]):
        self.C = C
        self.keep = list(keep)
        self.groups = [C.group(v) for v in self.keep]
        self._ones = [G._identity_payload() for G in self.groups]
        self._muls = [G._mul for G in self.groups]
        self.owner: dict[str, int] = {}
        for gid, G in enumerate(self.groups):
            for n, _ in G.generators():
                self.owner[n] = gid
        stray = [n for n in P.names if n not in self.owner]
        if stray:
            raise BoundExceeded(f"generators {stray} lie outside the kept vertex groups")
        self.values = dict(values)
        self.vertex_gid = {v: gid for gid, v in enumerate(self.keep)}
        cyc = []
        for r in P.relators:
            syl = self.syllables(r, cyclic=True)
            if len(syl) >= 2:
                cyc.append(syl)
        self.blocks = []  # (A, B^-1) with A B = 1 and A of length 1..k-1
        for R in cyc:
            for base in (R, self.inverse(R)):
                k = len(base)
                for i in range(k):
                    rot = base[i:] + base[:i]
                    for m in range(1, k):
                        self.blocks.append((rot[:m], self.inverse(rot[m:])))
        self.by_pattern: dict = defaultdict(list)
        for A, Binv in self.blocks:
            self.by_pattern[tuple(s[0] for s in A)].append((A, Binv))
        self.max_block = max((len(A) for A, _ in self.blocks), default=0)
        self.tails = defaultdict(set)
        for A, _ in self.blocks:
            for s in A:
                self.tails[s[0]].add(s)

    def mul(self, gid: int, a, b):
        return self._muls[gid](a, b)

    def inv(self, gid: int, a):
        return self.groups[gid]._inv(a)

    def is_one(self, gid: int, a) -> bool:
        return a == self._ones[gid]

    def normalize(self, syl) -> tuple:
        ones, muls = self._ones, self._muls
        out: list = []
        for gid, a in syl:
            if a == ones[gid]:
                continue
            if out and out[-1][0] == gid:
                merged = muls[gid](out.pop()[1], a)
                if merged != ones[gid]:
                    out.append((gid, merged))
            else:
                out.append((gid, a))
        return tuple(out)

    def inverse(self, syl) -> tuple:
        return tuple((gid, self.inv(gid, a)) for gid, a in reversed(syl))

    def syllables(self, w: Word, cyclic: bool = False) -> tuple:
        out = []
        for n, e in w:
            gid = self.owner[n]
            G = self.groups[gid]
            g = G.evaluate(((n, e),))
            out.append((gid, g.payload))
        syl = self.normalize(out)
        if cyclic:
            while len(syl) >= 2 and syl[0][0] == syl[-1][0]:
                syl = self.normalize(syl[1:-1] + ((syl[0][0], self.mul(syl[0][0], syl[-1][1], syl[0][1])),))
        return syl

    def word_of_element(self, v, g: GroupElement) -> tuple:
        """φ_v(g) as syllables."""
        w = self.C.group(v).word_for(g)
        for n in dict.fromkeys(n for n, _ in w):
            if n in self.values:
                w = substitute(w, n, self.values[n])
        return self.syllables(w)

    def edge_element(self, a) -> tuple:
        return self.syllables(self.values.get(edge_name(a), ((edge_name(a), 1),)))

    def strip(self, syl: tuple, gid) -> tuple:
        if gid is not None and syl and syl[-1][0] == gid:
            return syl[:-1]
        return syl

    def moves(self, syl: tuple, gid, limit: int):
        """Words equal to syl modulo the relators, right G_gid and the length limit."""
        cands = [syl]
        if gid is not None:
            cands += [self.normalize(syl + (s,)) for s in sorted(self.tails[gid], key=repr)]
        for w in cands:
            L = len(w)
            for m in range(1, min(self.max_block, L) + 1):
                for s in range(L - m + 1):
                    pattern = tuple(w[s + t][0] for t in range(m))
                    for A, Binv in self.by_pattern.get(pattern, ()):
                        if m > 2 and any(w[s + t] != A[t] for t in range(1, m - 1)):
                            continue
                        g0, g1 = A[0][0], A[-1][0]
                        if m == 1:
                            splits = [((g0, self.mul(g0, w[s][1], self.inv(g0, A[0][1]))), None),
                                      (None, (g0, self.mul(g0, self.inv(g0, A[0][1]), w[s][1])))]
                        else:
                            splits = [((g0, self.mul(g0, w[s][1], self.inv(g0, A[0][1]))),
                                       (g1, self.mul(g1, self.inv(g1, A[-1][1]), w[s + m - 1][1])))]
                        for x, y in splits:
                            mid = ((x,) if x else ()) + Binv + ((y,) if y else ())
                            new = self.strip(self.normalize(w[:s] + mid + w[s + m:]), gid)
                            if len(new) <= limit:
                                yield new


@dataclass
class CoverBall:
    scwol: Scwol
    base: Hashable
    distance: dict            # minimal cover vertex -> building distance from the base
    kinds: dict               # cover vertex -> vertex of Y it lies over
    _locate: Callable | None = field(default=None, repr=False)

    def sphere(self, r: int, kind=None) -> list:
        return [x for x, d in self.distance.items() if d == r and (kind is None or self.kinds[x] == kind)]

    def locate(self, w: Word, m) -> Hashable | None:
        """The minimal cover vertex (g G_m, m) for g given as a word, if it lies in the ball."""
        label = self._locate(w, m)
        return label if label in self.distance else None


def universal_cover_ball(C: ComplexOfGroups, base, radius: int, tree: Sequence, keep: Sequence | None = None,
                         word_bound: int = 4, class_cap: int = DEFAULT_CLASS_CAP) -> CoverBall:
    """The union of closed stars of minimal cover vertices within ``radius - 1`` of ṽ.

    Minimal cover vertices (gG_m, m) are canonicalized by closing a
    representative word under the relator moves of the simplified
    presentation, with at most ``word_bound`` syllables; two cosets whose
    closures meet are identified.  Equalities found this way are exact.
    Cosets that would only be identified through longer words stay
    distinct, so counts are upper bounds certified by comparison.  Cells
    are labelled by their Y-vertex and their set of minimal faces.
    """
    if radius < 0 or radius > 2:
        raise ValueError("radius must be 0, 1 or 2")
    Y = C.scwol
    minimal = [v for v in Y.vertices if not Y.outgoing(v)]
    if base not in minimal:
        raise ScwolError(f"base {base!r} is not a minimal vertex")
    keep = list(keep) if keep is not None else minimal
    values: dict = {}
    P = fundamental_group(C, tree, keep=keep, record=values)
    calc = _SyllableCalculus(C, P, keep, values)

    labels: dict = {}

    def canonical(syl: tuple, m) -> tuple:
        gid = calc.vertex_gid.get(m)
        syl = calc.strip(syl, gid)
        key = (m, syl)
        if key in labels:
            return labels[key]
        seen = {syl}
        frontier = [syl]
        while frontier:
            nxt = []
            for w in frontier:
                for new in calc.moves(w, gid, word_bound):
                    if new not in seen:
                        if (m, new) in labels:
                            lab = labels[(m, new)]
                            for s in seen:
                                labels[(m, s)] = lab
                            return lab
                        seen.add(new)
                        nxt.append(new)
                if len(seen) > class_cap:
                    raise BoundExceeded(f"coset class of {syl!r} exceeds {class_cap} words")
            frontier = nxt
        lab = (m, min(seen, key=lambda s: (len(s), repr(s))))
        for s in seen:
            labels[(m, s)] = lab
        return lab

    def faces(syl: tuple, u) -> list:
        """Minimal faces of the cover vertex (syl G_u, u) as (label, word)."""
        out = []
        for b in Y.outgoing(u):
            g = calc.normalize(syl + calc.inverse(calc.edge_element(b)))
            t = Y.t(b)
            if t in minimal:
                out.append((canonical(g, t), g))
        return out

    def star(syl: tuple, m) -> list:
        """Cells containing (syl G_m, m): (u, word)."""
        out = []
        Gm = C.group(m)
        for a in Y.incoming(m):
            img = frozenset(C.psi(a).image())
            reps, covered = [], set()
            for h in Gm.elements():
                if h in covered:
                    continue
                covered.update(h * x for x in img)
                reps.append(h)
            for h in reps:
                g = calc.normalize(syl + calc.word_of_element(m, h) + calc.edge_element(a))
                out.append((Y.i(a), g))
        return out

    base_label = canonical((), base)
    distance = {base_label: 0}
    kinds = {base_label: base}
    words = {base_label: ()}
    cells: dict = {}
    layer = [base_label]
    for r in range(1, radius + 1):
        nxt = []
        for x in layer:
            for u, g in star(words[x], kinds[x]):
                fs = faces(g, u)
                label = (u, frozenset(lab for lab, _ in fs))
                if label not in cells:
                    cells[label] = (u, g)
                for lab, w in fs:
                    if lab not in distance:
                        distance[lab] = r
                        kinds[lab] = lab[0]
                        words[lab] = w
                        nxt.append(lab)
        layer = nxt

    # non-minimal faces of cells are cells themselves
    pending = list(cells.items())
    while pending:
        label, (u, g) = pending.pop()
        for b in Y.outgoing(label[0]):
            t = Y.t(b)
            if t in minimal:
                continue
            h = calc.normalize(g + calc.inverse(calc.edge_element(b)))
            sub = (t, frozenset(lab for lab, _ in faces(h, t)))
            if sub not in cells:
                cells[sub] = (t, h)
                pending.append((sub, (t, h)))

    verts = list(distance) + list(cells)
    for label in cells:
        kinds[label] = label[0]
    edges = {}
    comp = {}
    face_of = {}
    for label, (u, g) in cells.items():
        for b in Y.outgoing(u):
            t = Y.t(b)
            h = calc.normalize(g + calc.inverse(calc.edge_element(b)))
            if t in minimal:
                target = canonical(h, t)
            else:
                target = (t, frozenset(lab for lab, _ in faces(h, t)))
            face_of[(label, b)] = target
            edges[(label, b)] = (label, target)
    for (c, b), cb in Y.composition.items():
        for label in cells:
            if label[0] == Y.i(b) and (label, b) in edges:
                mid = face_of[(label, b)]
                if (mid, c) in edges:
                    comp[((mid, c), (label, b))] = (label, cb)
    return CoverBall(Scwol(verts, edges, comp), base_label, distance, kinds,
                     lambda w, m: canonical(calc.syllables(w), m))


def star_of(X: Scwol, x) -> Scwol:
    """The upper link of x inside a scwol: vertices above x and edges among them."""
    above = {X.i(a) for a in X.edges if X.t(a) == x}
    edges = {a: e for a, e in X.edges.items() if e[0] in above and e[1] in above}
    return Scwol(sorted(above, key=repr), edges)


# quotients of finite group actions and finite developments

@dataclass
class QuotientComplex:
    """G\\\\X together with the choices made: lifts ā, representatives v̄, elements h_a."""

    complex: ComplexOfGroups
    group: FiniteGroup
    representative: dict      # quotient vertex -> vertex of X (the quotient vertex is v̄ itself)
    projection: dict          # vertex of X -> quotient vertex
    h: dict                   # quotient edge -> h_a with h_a · t(ā) = t(a)‾

    def morphism(self) -> tuple[dict, dict]:
        """The natural morphism to G: inclusions of the stabilizers and a ↦ h_a."""
        phi_v = {v: Homomorphism(self.complex.group(v), self.group, self.complex.group(v).embed)
                 for v in self.complex.scwol.vertices}
        return phi_v, dict(self.h)


def _edge_action(X: Scwol, act: Callable) -> Callable:
    by_ends = {e: a for a, e in X.edges.items()}
    if len(by_ends) != len(X.edges):
        raise ScwolError("parallel edges: the edge action must be given explicitly")
    return lambda g, a: by_ends[(act(g, X.i(a)), act(g, X.t(a)))]


def quotient_complex(X: Scwol, G: FiniteGroup, act: Callable[[GroupElement, Hashable], Hashable],
                     edge_act: Callable | None = None,
                     choose: Callable[[Hashable, list], GroupElement] | None = None) -> QuotientComplex:
    """The quotient complex of groups of a finite group acting on a finite scwol.

    Each quotient vertex is named by its representative v̄ and each quotient
    edge by its unique lift ā with i(ā) = v̄.  ``choose(a, candidates)`` picks
    h_a among all elements taking t(ā) to the representative of its orbit;
    by default the first one found is used.
    """
    edge_act = edge_act or _edge_action(X, act)
    els = G.elements()
    proj: dict = {}
    transporter: dict = {}    # x -> g with g · rep(x) = x
    reps: list = []
    for v in X.vertices:
        if v in proj:
            continue
        reps.append(v)
        for g in els:
            x = act(g, v)
            if x not in proj:
                proj[x] = v
                transporter[x] = g
    groups = {}
    for v in reps:
        stab = [g for g in els if act(g, v) == v]
        for g in stab:
            for a in X.outgoing(v):
                if edge_act(g, a) != a:
                    raise ScwolError(f"{g!r} fixes {v!r} but moves the edge {a!r}")
        groups[v] = Subgroup(G, stab, name=f"G[{v!r}]")
    edges, h = {}, {}
    for v in reps:
        for a in X.outgoing(v):
            u = proj[X.t(a)]
            edges[a] = (v, u)
            if choose is None:
                h[a] = transporter[X.t(a)].inverse()
            else:
                h[a] = choose(a, [g for g in els if act(g, X.t(a)) == u])
                if act(h[a], X.t(a)) != u:
                    raise ScwolError(f"chosen h for {a!r} does not reach the representative")
    comp = {}
    for a, (ia, _) in edges.items():
        for b, (_, tb) in edges.items():
            if ia != tb:
                continue
            lifted = edge_act(h[b].inverse(), a)
            if (lifted, b) not in X.composition:
                raise ScwolError(f"{lifted!r} and {b!r} compose in the quotient but not in X")
            comp[(a, b)] = X.composition[(lifted, b)]
    Y = Scwol(reps, edges, comp)
    monos = {}
    for a, (v, u) in edges.items():
        src, tgt, ha = groups[v], groups[u], h[a]
        if src.order() > 1:
            monos[a] = Homomorphism(src, tgt, lambda g, src=src, tgt=tgt, ha=ha:
                                    tgt.restrict(ha * src.embed(g) * ha.inverse()))
    twists = {}
    for (a, b), ab in comp.items():
        g = h[a] * h[b] * h[ab].inverse()
        if not g.is_identity():
            twists[(a, b)] = groups[edges[a][1]].restrict(g)
    C = ComplexOfGroups(Y, groups, monos, twists, name="quotient")
    return QuotientComplex(C, G, {v: v for v in reps}, proj, h)


def is_morphism(C: ComplexOfGroups, G: FiniteGroup, phi_v: Mapping, phi_a: Mapping) -> bool:
    """φ_t(a) ψ_a = Ad(φ(a)) φ_i(a) and φ_t(a)(g_ab) φ(ab) = φ(a) φ(b)."""
    Y = C.scwol
    for v in Y.vertices:
        if not phi_v[v].is_injective_homomorphism():
            return False
    for a in Y.edges:
        fa = phi_a[a]
        for g in C.group(Y.i(a)).elements():
            if phi_v[Y.t(a)](C.psi(a)(g)) != fa * phi_v[Y.i(a)](g) * fa.inverse():
                return False
    for (a, b), ab in Y.composition.items():
        if phi_v[Y.t(a)](C.twist(a, b)) * phi_a[ab] != phi_a[a] * phi_a[b]:
            return False
    return True


@dataclass
class Development:
    scwol: Scwol
    group: FiniteGroup

    def act(self, g: GroupElement, x):
        """Left multiplication on cosets; works for vertices and edges alike."""
        cs, rest = x[0], x[1:]
        return (frozenset(g * k for k in cs),) + rest


def development(C: ComplexOfGroups, G: FiniteGroup, phi_v: Mapping, phi_a: Mapping) -> Development:
    """D(Y, φ) for a morphism φ to a finite group that is injective on the local groups.

    Vertices (g φ(G_v), v); edges (g φ(G_i(a)), a) from (g φ(G_i(a)), i(a))
    to (g φ(a)⁻¹ φ(G_t(a)), t(a)).
    """
    if not is_morphism(C, G, phi_v, phi_a):
        raise ScwolError("not a morphism injective on the local groups")
    Y = C.scwol
    images = {v: frozenset(phi_v[v](g) for g in C.group(v).elements()) for v in Y.vertices}

    def cosets(img):
        out, seen = [], set()
        for g in G.elements():
            cs = frozenset(g * k for k in img)
            if cs not in seen:
                seen.add(cs)
                out.append((cs, g))
        return out

    def coset(g, v):
        return frozenset(g * k for k in images[v])

    verts = [(cs, v) for v in Y.vertices for cs, _ in cosets(images[v])]
    edges, comp = {}, {}
    for a in Y.edges:
        ia, ta = Y.i(a), Y.t(a)
        for cs, g in cosets(images[ia]):
            edges[(cs, a)] = ((cs, ia), (coset(g * phi_a[a].inverse(), ta), ta))
    for (a, b), ab in Y.composition.items():
        for cs, g in cosets(images[Y.i(b)]):
            comp[((coset(g * phi_a[b].inverse(), Y.i(a)), a), (cs, b))] = (cs, ab)
    return Development(Scwol(verts, edges, comp), G)
