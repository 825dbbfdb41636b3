"""Finite groups and their actions on finite sets.

Every group exposes a canonical, enumerable element universe.  Elements are
:class:`GroupElement` wrappers around a hashable payload whose form depends on
the kind of group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .errors import InvalidOrder
from .gf import FieldElement, FieldSpec, field_of_order
from .words import Word, free_reduce, inverse as word_inverse, power


class GroupElement:
    __slots__ = ("group", "payload")

    def __init__(self, group: "FiniteGroup", payload: Hashable):
        self.group = group
        self.payload = payload

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.group is not self.group:
            raise TypeError(f"cannot multiply elements of {self.group} and {other.group}")
        return GroupElement(self.group, self.group._mul(self.payload, other.payload))

    def __invert__(self) -> "GroupElement":
        return self.inverse()

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.group._inv(self.payload))

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = self.group.identity
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, GroupElement) and other.group is self.group
                and other.payload == self.payload)

    def __hash__(self):
        return hash(self.payload)

    def __repr__(self):
        return self.group.format(self.payload)

    def is_identity(self) -> bool:
        return self.payload == self.group.identity.payload

    def order(self) -> int:
        k, g = 1, self
        while not g.is_identity():
            g = g * self
            k += 1
        return k


def commutator(a: GroupElement, b: GroupElement) -> GroupElement:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


class FiniteGroup:
    """Abstract finite group; subclasses supply payload arithmetic."""

    kind = "abstract"

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        raise NotImplementedError

    def _identity_payload(self):
        raise NotImplementedError

    def _payloads(self) -> Iterable[Hashable]:
        raise NotImplementedError

    def format(self, payload) -> str:
        return repr(payload)

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self, self._identity_payload())

    def element(self, payload) -> GroupElement:
        return GroupElement(self, payload)

    def elements(self) -> list[GroupElement]:
        cached = getattr(self, "_elements", None)
        if cached is None:
            cached = [GroupElement(self, p) for p in self._payloads()]
            self._elements = cached
        return cached

    def order(self) -> int:
        return len(self.elements())

    def __len__(self):
        return self.order()

    def __contains__(self, g) -> bool:
        return isinstance(g, GroupElement) and g.group is self

    def is_abelian(self) -> bool:
        els = self.elements()
        return all(a * b == b * a for a in els for b in els)

    def center(self) -> list[GroupElement]:
        els = self.elements()
        return [z for z in els if all(z * g == g * z for g in els)]

    def derived_subgroup(self) -> list[GroupElement]:
        els = self.elements()
        return generate_subgroup(self, {commutator(a, b) for a in els for b in els})

    # presentations; subclasses override with structured versions

    def generators(self) -> list[tuple[str, GroupElement]]:
        """Named generating set, built greedily when not overridden."""
        gens: list[tuple[str, GroupElement]] = []
        span = {self.identity}
        for g in self.elements():
            if g not in span:
                gens.append((f"g{len(gens)}", g))
                span = set(generate_subgroup(self, [h for _, h in gens]))
        return gens

    def _word_table(self) -> dict:
        cached = getattr(self, "_words", None)
        if cached is None:
            gens = self.generators()
            cached = {self.identity: ()}
            queue = deque([self.identity])
            while queue:
                g = queue.popleft()
                for name, s in gens:
                    h = g * s
                    if h not in cached:
                        cached[h] = cached[g] + ((name, 1),)
                        queue.append(h)
            self._words = cached
        return cached

    def word_for(self, g: GroupElement) -> Word:
        return self._word_table()[g]

    def relators(self) -> list[Word]:
        """Cayley-graph relators w(g) s w(gs)^-1: a complete presentation."""
        table = self._word_table()
        out = []
        for g, w in table.items():
            for name, s in self.generators():
                r = free_reduce(w + ((name, 1),) + word_inverse(table[g * s]))
                if r and r not in out:
                    out.append(r)
        return out

    def evaluate(self, w: Word, names: dict | None = None) -> GroupElement:
        """Evaluate a word in this group's generator names."""
        lookup = names or dict(self.generators())
        g = self.identity
        for n, e in w:
            h = lookup[n]
            g = g * (h if e > 0 else h.inverse())
        return g


def generate_subgroup(group: FiniteGroup, gens: Iterable[GroupElement]) -> list[GroupElement]:
    """Closure of ``gens`` under multiplication, in discovery order."""
    gens = list(gens)
    seen = {group.identity}
    queue = deque([group.identity])
    out = [group.identity]
    while queue:
        g = queue.popleft()
        for s in gens:
            h = g * s
            if h not in seen:
                seen.add(h)
                out.append(h)
                queue.append(h)
    return out


class CyclicGroup(FiniteGroup):
    """Integers mod n under addition."""

    kind = "cyclic"

    def __init__(self, n: int, name: str = "s"):
        if n < 1:
            raise InvalidOrder(n)
        self.n = n
        self.name = name

    def __repr__(self):
        return f"Cyclic({self.n})"

    def _mul(self, a, b):
        return (a + b) % self.n

    def _inv(self, a):
        return -a % self.n

    def _identity_payload(self):
        return 0

    def _payloads(self):
        return range(self.n)

    def format(self, payload):
        return f"{self.name}^{payload}" if payload else "1"

    @property
    def generator(self) -> GroupElement:
        return GroupElement(self, 1 % self.n)

    def generators(self):
        return [(self.name, self.generator)] if self.n > 1 else []

    def word_for(self, g: GroupElement) -> Word:
        return power(self.name, g.payload)

    def relators(self):
        return [power(self.name, self.n)] if self.n > 1 else []


def cyclic_group(n: int, name: str = "s") -> CyclicGroup:
    return CyclicGroup(n, name)


class ElementaryAbelianGroup(FiniteGroup):
    """The additive group of GF(q)^rank."""

    kind = "elementary_abelian"

    def __init__(self, q: int, rank: int, name: str = "a"):
        self.field = field_of_order(q)
        self.q = q
        self.rank = rank
        self.name = name

    def __repr__(self):
        return f"ElementaryAbelian({self.q}, {self.rank})"

    def _mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _inv(self, a):
        return tuple(-x for x in a)

    def _identity_payload(self):
        return (self.field.zero,) * self.rank

    def _payloads(self):
        els = list(self.field.elements())

        def rec(k):
            if k == 0:
                yield ()
                return
            for rest in rec(k - 1):
                for x in els:
                    yield rest + (x,)
        return rec(self.rank)

    def vector(self, *coords) -> GroupElement:
        return GroupElement(self, tuple(self.field(c) for c in coords))

    def _gen_name(self, coord: int, i: int) -> str:
        name = self.name if self.rank == 1 else f"{self.name}{coord + 1}"
        return name if self.field.e == 1 else f"{name}_{i}"

    def generators(self):
        F = self.field
        out = []
        for coord in range(self.rank):
            for i in range(F.e):
                v = [F.zero] * self.rank
                v[coord] = F.from_int(F.p ** i)
                out.append((self._gen_name(coord, i), GroupElement(self, tuple(v))))
        return out

    def word_for(self, g: GroupElement) -> Word:
        out: Word = ()
        for coord, c in enumerate(g.payload):
            for i, k in enumerate(c.coeffs):
                out += power(self._gen_name(coord, i), k)
        return out

    def relators(self):
        return _abelian_relators([n for n, _ in self.generators()], self.field.p)


def _abelian_relators(names: list[str], p: int) -> list[Word]:
    out = [power(n, p) for n in names]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            out.append(((a, 1), (b, 1), (a, -1), (b, -1)))
    return out


Matrix = tuple  # tuple of row tuples of FieldElement


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    m = len(b[0])
    zero = a[0][0].spec.zero
    rows = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for k in range(len(b)):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        rows.append(tuple(row))
    return tuple(rows)


def mat_vec(a: Matrix, v: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    zero = a[0][0].spec.zero
    out = []
    for row in a:
        acc = zero
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return tuple(out)


class HeisenbergGroup(FiniteGroup):
    """The group E generated by the unitriangular matrices x(a), y(b), z(c).

    Elements are literal 4x4 matrices over GF(q) acting on coordinates
    ordered (e_-2, e_-1, e_1, e_2).
    """

    kind = "heisenberg"

    def __init__(self, q: int, suffix: str = ""):
        if q <= 2:
            raise InvalidOrder(f"Heisenberg group needs q > 2, got {q}")
        self.q = q
        self.suffix = suffix
        self.field: FieldSpec = field_of_order(q)
        self._cache: dict = {}

    def __repr__(self):
        return f"Heisenberg({self.q})"

    def _mat(self, entries) -> GroupElement:
        F = self.field
        return GroupElement(self, tuple(tuple(F(v) for v in row) for row in entries))

    def x(self, a=1) -> GroupElement:
        a = self.field(a)
        return self._mat([[1, a, 0, 0], [0, 1, 0, 0], [0, 0, 1, -a], [0, 0, 0, 1]])

    def y(self, b=1) -> GroupElement:
        b = self.field(b)
        return self._mat([[1, 0, b, 0], [0, 1, 0, b], [0, 0, 1, 0], [0, 0, 0, 1]])

    def z(self, c=2) -> GroupElement:
        c = self.field(c)
        return self._mat([[1, 0, 0, c], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])

    def _mul(self, a, b):
        key = (a, b)
        r = self._cache.get(key)
        if r is None:
            r = mat_mul(a, b)
            if len(self._cache) < 200000:
                self._cache[key] = r
        return r

    def _inv(self, a):
        # unipotent: (I + N)^-1 = I - N + N^2 - N^3
        F = self.field
        ident = tuple(tuple(F.one if i == j else F.zero for j in range(4)) for i in range(4))
        n = tuple(tuple(a[i][j] - ident[i][j] for j in range(4)) for i in range(4))
        n2 = mat_mul(n, n)
        n3 = mat_mul(n2, n)
        return tuple(tuple(ident[i][j] - n[i][j] + n2[i][j] - n3[i][j] for j in range(4))
                     for i in range(4))

    def _identity_payload(self):
        F = self.field
        return tuple(tuple(F.one if i == j else F.zero for j in range(4)) for i in range(4))

    def _payloads(self):
        F = list(self.field.elements())
        for a in F:
            for b in F:
                for c in F:
                    yield (self.x(a) * self.y(b) * self.z(c)).payload

    def format(self, payload):
        return "[" + "; ".join(" ".join(map(repr, row)) for row in payload) + "]"

    def act(self, g: GroupElement, v: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        return mat_vec(g.payload, v)

    def coordinates(self, g: GroupElement) -> tuple[FieldElement, FieldElement, FieldElement]:
        """(a, b, c) with g = x(a) y(b) z(c)."""
        m = g.payload
        a, b = m[0][1], m[1][3]
        return a, b, m[0][3] - a * b

    # generators x(e_i), y(e_i), z(2 e_i) (odd q) or z(e_i) (even q), e_i = θ^i

    def _name(self, letter: str, i: int) -> str:
        base = letter if self.field.e == 1 else f"{letter}{i}"
        return base + self.suffix

    def _zscale(self) -> FieldElement:
        return self.field(2) if self.field.p != 2 else self.field.one

    def generators(self):
        F = self.field
        basis = [F.from_int(F.p ** i) for i in range(F.e)]
        out = []
        for letter, make in (("x", self.x), ("y", self.y)):
            out.extend((self._name(letter, i), make(t)) for i, t in enumerate(basis))
        out.extend((self._name("z", i), self.z(self._zscale() * t)) for i, t in enumerate(basis))
        return out

    def word_for(self, g: GroupElement) -> Word:
        a, b, c = self.coordinates(g)
        c = c / self._zscale()
        out: Word = ()
        for letter, val in (("x", a), ("y", b), ("z", c)):
            for i, k in enumerate(val.coeffs):
                out += power(self._name(letter, i), k)
        return out

    def relators(self):
        """Exponent p, and each commutator of generators equals its z-word."""
        gens = self.generators()
        p = self.field.p
        out = [power(n, p) for n, _ in gens]
        for i, (a, ga) in enumerate(gens):
            for b, gb in gens[i + 1:]:
                w = ((a, 1), (b, 1), (a, -1), (b, -1)) + word_inverse(self.word_for(commutator(ga, gb)))
                out.append(w)
        return out


def heisenberg_group(q: int, suffix: str = "") -> HeisenbergGroup:
    return HeisenbergGroup(q, suffix)


class DirectProduct(FiniteGroup):
    """Direct product of two groups; payloads are pairs."""

    kind = "product"

    def __init__(self, left: FiniteGroup, right: FiniteGroup):
        self.left = left
        self.right = right

    def __repr__(self):
        return f"({self.left!r} x {self.right!r})"

    def _mul(self, a, b):
        return (self.left._mul(a[0], b[0]), self.right._mul(a[1], b[1]))

    def _inv(self, a):
        return (self.left._inv(a[0]), self.right._inv(a[1]))

    def _identity_payload(self):
        return (self.left._identity_payload(), self.right._identity_payload())

    def _payloads(self):
        for a in self.left.elements():
            for b in self.right.elements():
                yield (a.payload, b.payload)

    def format(self, payload):
        return f"({self.left.format(payload[0])}, {self.right.format(payload[1])})"

    def inject_left(self, g: GroupElement) -> GroupElement:
        return GroupElement(self, (g.payload, self.right._identity_payload()))

    def inject_right(self, g: GroupElement) -> GroupElement:
        return GroupElement(self, (self.left._identity_payload(), g.payload))

    def generators(self):
        return ([(n, self.inject_left(g)) for n, g in self.left.generators()]
                + [(n, self.inject_right(g)) for n, g in self.right.generators()])

    def word_for(self, g: GroupElement) -> Word:
        a = GroupElement(self.left, g.payload[0])
        b = GroupElement(self.right, g.payload[1])
        return self.left.word_for(a) + self.right.word_for(b)

    def relators(self):
        out = list(self.left.relators()) + list(self.right.relators())
        for a, _ in self.left.generators():
            for b, _ in self.right.generators():
                out.append(((a, 1), (b, 1), (a, -1), (b, -1)))
        return out


class TableGroup(FiniteGroup):
    """A group given by its multiplication table on indices 0..n-1."""

    kind = "table"

    def __init__(self, table: Sequence[Sequence[int]], identity: int = 0):
        self.table = [list(row) for row in table]
        n = len(self.table)
        self._id = identity
        self._inverse = [next(j for j in range(n) if self.table[i][j] == identity)
                         for i in range(n)]

    def __repr__(self):
        return f"Table({len(self.table)})"

    def _mul(self, a, b):
        return self.table[a][b]

    def _inv(self, a):
        return self._inverse[a]

    def _identity_payload(self):
        return self._id

    def _payloads(self):
        return range(len(self.table))


class Subgroup(FiniteGroup):
    """A subgroup of ``parent`` given by its elements; arithmetic is the parent's."""

    kind = "subgroup"

    def __init__(self, parent: FiniteGroup, elements: Iterable[GroupElement], name: str = "H"):
        self.parent = parent
        self.name = name
        self._members = tuple(dict.fromkeys(g.payload for g in elements))
        member_set = set(self._members)
        if parent.identity.payload not in member_set:
            raise ValueError("subgroup must contain the identity")
        for a in self._members:
            for b in self._members:
                if parent._mul(a, b) not in member_set:
                    raise ValueError("elements are not closed under multiplication")
        self._set = member_set

    def __repr__(self):
        return f"{self.name}≤{self.parent!r} of order {len(self._members)}"

    def _mul(self, a, b):
        return self.parent._mul(a, b)

    def _inv(self, a):
        return self.parent._inv(a)

    def _identity_payload(self):
        return self.parent._identity_payload()

    def _payloads(self):
        return self._members

    def format(self, payload):
        return self.parent.format(payload)

    def embed(self, g: GroupElement) -> GroupElement:
        return GroupElement(self.parent, g.payload)

    def restrict(self, g: GroupElement) -> GroupElement:
        """The parent element g viewed in this subgroup."""
        if g.payload not in self._set:
            raise ValueError(f"{g!r} is not in {self!r}")
        return GroupElement(self, g.payload)


def trivial_group() -> CyclicGroup:
    return CyclicGroup(1)


def check_group_axioms(group: FiniteGroup, limit: int = 512) -> bool:
    """Exhaustive axiom check for small groups."""
    els = group.elements()
    if len(els) > limit:
        raise ValueError("group too large for exhaustive check")
    e = group.identity
    if len(set(els)) != len(els):
        return False
    for a in els:
        if a * e != a or e * a != a or a * a.inverse() != e:
            return False
    for a in els:
        for b in els:
            ab = a * b
            for c in els:
                if ab * c != a * (b * c):
                    return False
    return True


@dataclass
class GroupAction:
    """A group acting on a finite point set by ``action(g, x)``."""

    group: FiniteGroup
    points: Sequence[Hashable]
    action: Callable[[GroupElement, Hashable], Hashable]

    def __call__(self, g: GroupElement, x: Hashable) -> Hashable:
        return self.action(g, x)

    def orbit(self, x: Hashable) -> list:
        seen = {x}
        out = [x]
        for g in self.group.elements():
            y = self.action(g, x)
            if y not in seen:
                seen.add(y)
                out.append(y)
        return out


@dataclass
class RegularityResult:
    regular: bool
    unreached: Hashable = None
    stabilizing: tuple | None = None

    def __bool__(self):
        return self.regular


def is_regular_action(act: GroupAction) -> RegularityResult:
    """Transitive and free; on failure report an unreached point or a fixing pair."""
    points = list(act.points)
    if not points:
        return RegularityResult(act.group.order() == 0)
    base = points[0]
    reached = {}
    for g in act.group.elements():
        y = act(g, base)
        if y in reached:
            h = reached[y]
            # h^-1 g fixes base and is nontrivial
            return RegularityResult(False, stabilizing=(h.inverse() * g, base))
        reached[y] = g
    for x in points:
        if x not in reached:
            return RegularityResult(False, unreached=x)
    return RegularityResult(True)


def stabilizer(act: GroupAction, point: Hashable) -> list[GroupElement]:
    return [g for g in act.group.elements() if act(g, point) == point]
