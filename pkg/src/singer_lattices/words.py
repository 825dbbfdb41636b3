"""Words in free generators and finite presentations.

A word is a tuple of letters ``(name, ±1)``.  Relators are words that are
trivial in the presented group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Letter = tuple[str, int]
Word = tuple[Letter, ...]


def word(*items) -> Word:
    """Build a word from names (optionally with '^k' exponents) or letters."""
    out: list[Letter] = []
    for it in items:
        if isinstance(it, tuple) and len(it) == 2 and isinstance(it[1], int) and isinstance(it[0], str):
            name, k = it
            out.extend([(name, 1 if k > 0 else -1)] * abs(k))
        elif isinstance(it, str):
            out.append((it, 1))
        else:
            out.extend(it)
    return tuple(out)


def power(name: str, k: int) -> Word:
    return tuple([(name, 1 if k > 0 else -1)] * abs(k))


def inverse(w: Sequence[Letter]) -> Word:
    return tuple((n, -e) for n, e in reversed(w))


def free_reduce(w: Iterable[Letter]) -> Word:
    out: list[Letter] = []
    for n, e in w:
        if out and out[-1][0] == n and out[-1][1] == -e:
            out.pop()
        else:
            out.append((n, e))
    return tuple(out)


def cyclic_reduce(w: Sequence[Letter]) -> Word:
    w = list(free_reduce(w))
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return tuple(w)


def relator_normal_form(w: Sequence[Letter]) -> Word:
    """Smallest cyclic rotation of w or w^-1 after cyclic reduction."""
    w = cyclic_reduce(w)
    if not w:
        return ()
    cands = []
    for base in (w, inverse(w)):
        for i in range(len(base)):
            cands.append(base[i:] + base[:i])
    return min(cands)


def reduce_exponents(w: Sequence[Letter], orders: dict[str, int]) -> Word:
    """Rewrite each maximal run x^k of a generator of known order o as x^(k mod o)."""
    out: list[Letter] = []
    i = 0
    w = list(w)
    while i < len(w):
        n = w[i][0]
        k = 0
        while i < len(w) and w[i][0] == n:
            k += w[i][1]
            i += 1
        if n in orders and orders[n]:
            k %= orders[n]
        out.extend(power(n, k))
    return free_reduce(out)


def _seam_free(w: Word) -> Word:
    """Rotate so that no run of one generator wraps around the end."""
    if len({n for n, _ in w}) <= 1:
        return w
    k = next(i for i in range(len(w)) if w[i][0] != w[i - 1][0])
    return w[k:] + w[:k]


def _run_rotations(w: Word) -> list[Word]:
    return [w[i:] + w[:i] for i in range(len(w)) if i == 0 or w[i][0] != w[i - 1][0]]


def relator_canonical(w: Sequence[Letter], orders: dict[str, int]) -> Word:
    """Like relator_normal_form, with exponents reduced modulo generator orders.

    Runs are merged across the rotation seam before reducing, and the result
    is the shortest, then smallest, rotation of the word or its inverse.
    """
    w = cyclic_reduce(w)
    while w:
        nxt = cyclic_reduce(reduce_exponents(_seam_free(w), orders))
        if nxt == w:
            break
        w = nxt
    if not w:
        return ()
    inv = cyclic_reduce(reduce_exponents(_seam_free(inverse(w)), orders))
    cands = _run_rotations(w) + _run_rotations(inv)
    return min(cands, key=lambda c: (len(c), c))


def exponent_sum(w: Sequence[Letter], name: str) -> int:
    return sum(e for n, e in w if n == name)


def occurrences(w: Sequence[Letter], name: str) -> int:
    return sum(1 for n, _ in w if n == name)


def substitute(w: Sequence[Letter], name: str, replacement: Sequence[Letter]) -> Word:
    out: list[Letter] = []
    inv = inverse(replacement)
    for n, e in w:
        if n == name:
            out.extend(replacement if e > 0 else inv)
        else:
            out.append((n, e))
    return free_reduce(out)


def format_word(w: Sequence[Letter]) -> str:
    """Compact form with exponents, e.g. 'σ1^3 σ2 σ3^-1'."""
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        n, e = w[i]
        k = 0
        while i < len(w) and w[i] == (n, e):
            k += e
            i += 1
        parts.append(n if k == 1 else f"{n}^{k}")
    return " ".join(parts)


def letters_to_json(w: Sequence[Letter]) -> list[str]:
    return [n if e > 0 else "~" + n for n, e in w]


def letters_from_json(items: Sequence[str]) -> Word:
    return tuple((s[1:], -1) if s.startswith("~") else (s, 1) for s in items)


@dataclass
class Generator:
    name: str
    order: int | None = None
    origin: str | None = None


@dataclass
class Presentation:
    generators: list[Generator] = field(default_factory=list)
    relators: list[Word] = field(default_factory=list)

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def generator(self, name: str) -> Generator:
        return next(g for g in self.generators if g.name == name)

    def to_json(self) -> str:
        return json.dumps({
            "generators": [{"name": g.name, "order": g.order} for g in self.generators],
            "relators": [letters_to_json(r) for r in self.relators],
        }, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "Presentation":
        data = json.loads(text)
        gens = [Generator(g["name"], g.get("order")) for g in data["generators"]]
        return cls(gens, [letters_from_json(r) for r in data["relators"]])

    def normalized_relators(self) -> set[Word]:
        return {nf for nf in (relator_normal_form(r) for r in self.relators) if nf}

    def orders(self) -> dict[str, int]:
        return {g.name: g.order for g in self.generators if g.order}

    def canonical_relators(self, orders: dict[str, int] | None = None) -> set[Word]:
        """Relators up to rotation, inversion and exponents reduced modulo orders."""
        orders = self.orders() if orders is None else orders
        return {c for c in (relator_canonical(r, orders) for r in self.relators) if c}

    def __str__(self):
        gens = ", ".join(self.names)
        rels = ", ".join(format_word(r) for r in self.relators)
        return f"⟨ {gens} | {rels} ⟩"

    def validate(self) -> None:
        known = set(self.names)
        for r in self.relators:
            for n, e in r:
                if n not in known or e not in (1, -1):
                    raise ValueError(f"malformed relator letter {(n, e)!r}")
