"""Smith normal form, abelianizations and the homology tables of the lattices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod
from typing import Sequence

from .errors import SingerLatticeError
from .gf import prime_power
from .lattice import ONE_PANEL, A2LatticeSpec, C2LatticeSpec, c2_presentation
from .words import Presentation, exponent_sum

Matrix = list[list[int]]

SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
ENUMERATION_LIMIT = 10 ** 5


class FamilyMismatch(SingerLatticeError, ValueError):
    pass


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return [[0] * (len(b[0]) if b else 0) for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[Matrix, list[int], Matrix]:
    """Return (S, diag, T) with S·M·T diagonal, S and T unimodular, diag a divisibility chain.

    ``diag`` has min(rows, cols) entries, all nonnegative.
    """
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    S = identity_matrix(m)
    T = identity_matrix(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        S[i], S[j] = S[j], S[i]

    def swap_cols(i, j):
        for R in (A, T):
            for r in R:
                r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):      # row dst += k * row src
        for R in (A, S):
            R[dst] = [x + k * y for x, y in zip(R[dst], R[src])]

    def add_col(src, dst, k):
        for R in (A, T):
            for r in R:
                r[dst] += k * r[src]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        S[i] = [-x for x in S[i]]

    for t in range(min(m, n)):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    k = A[i][t] // A[t][t]
                    add_row(t, i, -k)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    k = A[t][j] // A[t][t]
                    add_col(t, j, -k)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # pivot must divide the rest of the block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if A[t][t] < 0:
            neg_row(t)
    diag = [A[i][i] for i in range(min(m, n))]
    return S, diag, T


def is_unimodular(U: Matrix) -> bool:
    return abs(determinant(U)) == 1


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination (Bareiss)."""
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


@dataclass(frozen=True)
class AbelianGroup:
    """ℤ^rank ⊕ ℤ/d1 ⊕ … ⊕ ℤ/dk with d1 | d2 | … | dk, all > 1."""
    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError(f"negative rank {self.rank}")
        t = tuple(self.torsion)
        if any(d <= 1 for d in t) or any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion {t} is not an invariant-factor chain")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_cyclic_orders(cls, orders: Sequence[int], rank: int = 0) -> "AbelianGroup":
        """Normalize ⊕ ℤ/a_i (a_i = 0 meaning ℤ) into invariant factors."""
        rank += sum(1 for a in orders if a == 0)
        primes: dict[int, list[int]] = {}
        for a in orders:
            a = abs(a)
            if a <= 1:
                continue
            p = 2
            while a > 1:
                if a % p == 0:
                    e = 0
                    while a % p == 0:
                        a //= p
                        e += 1
                    primes.setdefault(p, []).append(p ** e)
                p += 1
        width = max((len(v) for v in primes.values()), default=0)
        factors = [1] * width
        for powers in primes.values():
            powers.sort()
            for k, pe in enumerate(powers):
                factors[width - len(powers) + k] *= pe
        return cls(rank, tuple(f for f in factors if f > 1))

    @property
    def order(self) -> int | None:
        return None if self.rank else prod(self.torsion)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self):
        return self.render("ℤ")

    def render(self, ring: str = "ℤ") -> str:
        parts = []
        if self.rank:
            parts.append(ring if self.rank == 1 else f"{ring}{str(self.rank).translate(SUPERSCRIPTS)}")
        i = 0
        while i < len(self.torsion):
            d = self.torsion[i]
            k = 1
            while i + k < len(self.torsion) and self.torsion[i + k] == d:
                k += 1
            parts.append(f"ℤ/{d}" if k == 1 else f"(ℤ/{d}){str(k).translate(SUPERSCRIPTS)}")
            i += k
        return " ⊕ ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


def cokernel(M: Sequence[Sequence[int]], cols: int) -> AbelianGroup:
    """ℤ^cols modulo the row span of M."""
    if not M:
        return AbelianGroup(cols)
    _, diag, _ = smith_normal_form(M)
    nonzero = [d for d in diag if d]
    return AbelianGroup.from_cyclic_orders(nonzero, cols - len(nonzero))


def relation_matrix(P: Presentation) -> Matrix:
    names = P.names
    return [[exponent_sum(r, g) for g in names] for r in P.relators]


def abelianization(P: Presentation) -> AbelianGroup:
    """Cokernel of the exponent-sum matrix of the relators."""
    return cokernel(relation_matrix(P), len(P.generators))


def _kernel_by_enumeration(M: Matrix, n: int, cols: int) -> dict[int, int]:
    """For each divisor k of n, the number of kernel elements killed by k."""
    counts = {k: 0 for k in range(1, n + 1) if n % k == 0}
    for x in product(range(n), repeat=cols):
        if all(sum(a * b for a, b in zip(row, x)) % n == 0 for row in M):
            for k in counts:
                if all((k * c) % n == 0 for c in x):
                    counts[k] += 1
    return counts


def _torsion_counts(G: AbelianGroup, n: int) -> dict[int, int]:
    return {k: prod(gcd(k, d) for d in G.torsion) for k in range(1, n + 1) if n % k == 0}


def kernel_mod_n(M: Sequence[Sequence[int]], n: int, cols: int | None = None, verify: bool = True) -> AbelianGroup:
    """Kernel of x ↦ Mx on (ℤ/n)^cols.

    With M = S⁻¹ diag T⁻¹ the kernel is ⊕ ℤ/gcd(d_i, n), taking d_i = 0
    past the rank.  When n^cols is at most ENUMERATION_LIMIT the result is
    re-derived by listing the kernel and counting its k-torsion for every
    divisor k of n, which pins down a finite abelian group of exponent n.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    M = [[int(a) for a in r] for r in M]
    if cols is None:
        if not M:
            raise ValueError("cols is required for an empty matrix")
        cols = len(M[0])
    if M and any(len(r) != cols for r in M):
        raise ValueError("ragged matrix")
    diag = smith_normal_form(M)[1] if M else []
    diag = diag + [0] * (cols - len(diag))
    G = AbelianGroup.from_cyclic_orders([gcd(d, n) for d in diag[:cols]])
    if verify and n ** cols <= ENUMERATION_LIMIT:
        if _kernel_by_enumeration(M, n, cols) != _torsion_counts(G, n):
            raise ArithmeticError(f"kernel of {M} mod {n}: enumeration disagrees with {G}")
    return G


def difference_matrix(spec: A2LatticeSpec) -> Matrix:
    """𝒟 = (δ_α(j)) for j = 1..q (rows) and α = 1..3 (columns)."""
    return [[spec.delta(a)[j] for a in (1, 2, 3)] for j in range(1, spec.q + 1)]


@dataclass
class HomologyTable:
    ring: str                                  # "ℤ" or "ℚ"
    entries: dict = field(default_factory=dict)   # degree -> AbelianGroup or symbolic str
    note: str = ""

    def __getitem__(self, degree: int):
        return self.entries[degree]

    def render_entry(self, degree: int) -> str:
        e = self.entries[degree]
        if isinstance(e, AbelianGroup):
            return e.render(self.ring) if self.ring == "ℚ" or e.rank else str(e)
        return str(e)

    def lines(self) -> list[str]:
        return [f"H_{d}(Γ;{self.ring}) = {self.render_entry(d)}" for d in sorted(self.entries)]

    def __str__(self):
        out = self.lines()
        if self.note:
            out.append(self.note)
        return "\n".join(out)

    def to_json(self) -> str:
        rows = []
        for d in sorted(self.entries):
            e = self.entries[d]
            rows.append({"degree": d, "group": e.to_dict() if isinstance(e, AbelianGroup) else e})
        return json.dumps({"ring": "Z" if self.ring == "ℤ" else "Q", "entries": rows, "note": self.note},
                          ensure_ascii=False)


def a2_homology_table(spec: A2LatticeSpec, max_degree: int = 6) -> tuple[HomologyTable, HomologyTable]:
    """Integral and rational homology of the cyclic Ã2 lattice up to max_degree."""
    spec.validate()
    n, q = spec.n, spec.q
    h1 = kernel_mod_n(difference_matrix(spec), n, 3)
    integral = HomologyTable("ℤ", note=f"periodic from degree 3: (ℤ/{n})³ in odd degrees, 0 in even degrees")
    rational = HomologyTable("ℚ", note="zero outside degrees 0 and 2")
    for d in range(max_degree + 1):
        if d == 0:
            integral.entries[d] = AbelianGroup(1)
        elif d == 1:
            integral.entries[d] = h1
        elif d == 2:
            integral.entries[d] = AbelianGroup(q)
        elif d % 2:
            integral.entries[d] = AbelianGroup(0, (n, n, n))
        else:
            integral.entries[d] = AbelianGroup()
        rational.entries[d] = AbelianGroup({0: 1, 2: q}.get(d, 0))
    return integral, rational


@dataclass
class C2Homology:
    closed_form_h1: AbelianGroup       # (F_q, +)^6 as stated for the one-panel family
    abelianization_h1: AbelianGroup    # computed from the presentation; authoritative
    h2: str
    integral: HomologyTable
    rational: HomologyTable

    @property
    def agrees(self) -> bool:
        return self.closed_form_h1 == self.abelianization_h1


def c2_rational_homology(spec: C2LatticeSpec, max_degree: int = 4) -> HomologyTable:
    spec.validate()
    return HomologyTable("ℚ", {d: AbelianGroup(int(d == 0)) for d in range(max_degree + 1)},
                         note="the quotient scwol is contractible")


def c2_homology(spec: C2LatticeSpec, presentation: Presentation | None = None) -> C2Homology:
    """H₁ two ways and H₂ symbolically for the one-panel family.

    The degree-1 table entry is the abelianization; disagreement with the
    closed form is reported through ``agrees`` and the table note.
    """
    spec.validate()
    if spec.family != ONE_PANEL:
        raise FamilyMismatch("integral homology is only available for the OnePanel family")
    q = spec.q
    p, e = prime_power(q)
    P = c2_presentation(spec) if presentation is None else presentation
    ab = abelianization(P)
    # ℤ/q read as the additive group of F_q, which is (ℤ/p)^e
    closed = AbelianGroup(0, (p,) * (6 * e))
    h2 = "H₂(S) ⊕ H₂(S′)"
    note = "" if ab == closed else f"closed form {closed} disagrees with the abelianization {ab}"
    integral = HomologyTable("ℤ", {0: AbelianGroup(1), 1: ab, 2: h2}, note=note)
    return C2Homology(closed, ab, h2, integral, c2_rational_homology(spec))
