"""Panel-regular lattices of type Ã2 and C̃2 and their complexes of groups."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .errors import SingerLatticeError
from .gf import prime_power
from .groups import (
    DirectProduct,
    ElementaryAbelianGroup,
    GroupElement,
    HeisenbergGroup,
    cyclic_group,
    heisenberg_group,
    trivial_group,
)
from .scwol import ComplexOfGroups, Homomorphism, Scwol, discrete_scwol, fundamental_group, scwol_of_incidence
from .singer import (
    DifferenceSet,
    SlantedQuadrangle,
    ordered_difference_set,
    plane_from_difference_set,
    singer_difference_set,
    slanted_quadrangle,
)
from .words import Generator, Presentation, Word, free_reduce, inverse, power

TWO_PANEL = "TwoPanel"
ONE_PANEL = "OnePanel"


class SpecInvalid(SingerLatticeError, ValueError):
    pass


# Ã2

@dataclass
class A2LatticeSpec:
    q: int
    deltas: tuple[DifferenceSet, DifferenceSet, DifferenceSet]
    orderings: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    @classmethod
    def cyclic(cls, q: int, orderings=None, deltas=None) -> "A2LatticeSpec":
        """Equal Singer difference sets and ascending orderings unless given."""
        if deltas is None:
            d = singer_difference_set(q)
            deltas = (d, d, d)
        if orderings is None:
            orderings = tuple(tuple(range(q + 1)) for _ in range(3))
        return cls(q, tuple(deltas), tuple(tuple(o) for o in orderings))

    def validate(self) -> None:
        if len(self.deltas) != 3 or len(self.orderings) != 3:
            raise SpecInvalid("need three difference sets and three orderings")
        n = self.q * self.q + self.q + 1
        for d in self.deltas:
            if d.n != n or len(d) != self.q + 1:
                raise SpecInvalid(f"{d} does not have order {self.q}")
            if not d.is_perfect():
                raise SpecInvalid(f"{d} is not a perfect difference set")
        for d, o in zip(self.deltas, self.orderings):
            try:
                ordered_difference_set(d, o)
            except ValueError as exc:
                raise SpecInvalid(str(exc)) from exc

    @property
    def n(self) -> int:
        return self.q * self.q + self.q + 1

    def delta(self, alpha: int) -> tuple[int, ...]:
        """δ_α as a tuple indexed by J, alpha in 1..3."""
        return ordered_difference_set(self.deltas[alpha - 1], self.orderings[alpha - 1])

    def to_json(self) -> str:
        return json.dumps({"type": "A2", "q": self.q,
                           "deltas": [list(d.residues) for d in self.deltas],
                           "orderings": [list(o) for o in self.orderings]})

    @classmethod
    def from_dict(cls, data: dict) -> "A2LatticeSpec":
        q = int(data["q"])
        n = q * q + q + 1
        deltas = data.get("deltas")
        if deltas is not None:
            deltas = tuple(DifferenceSet(n, tuple(d)) for d in deltas)
        spec = cls.cyclic(q, data.get("orderings"), deltas)
        spec.validate()
        return spec


def a2_names() -> tuple[str, str, str]:
    return ("σ1", "σ2", "σ3")


def a2_scwol(q: int) -> Scwol:
    J = range(q + 1)
    verts = ["v1", "v2", "v3", "e1", "e2", "e3"] + [f"f{j}" for j in J]
    edges = {}
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            if a != b:
                edges[f"v{a}<-e{b}"] = (f"e{b}", f"v{a}")
    for j in J:
        for a in (1, 2, 3):
            edges[f"v{a}<-f{j}"] = (f"f{j}", f"v{a}")
        for b in (1, 2, 3):
            edges[f"e{b}<-f{j}"] = (f"f{j}", f"e{b}")
    comp = {}
    for j in J:
        for a in (1, 2, 3):
            for b in (1, 2, 3):
                if a != b:
                    comp[(f"v{a}<-e{b}", f"e{b}<-f{j}")] = f"v{a}<-f{j}"
    return Scwol(verts, edges, comp)


A2_TREE = ["v1<-e2", "v1<-e3", "v2<-e3", "v2<-e1", "v3<-e1"]


def a2_tree(q: int) -> list[str]:
    return A2_TREE + [f"e3<-f{j}" for j in range(q + 1)]


def a2_complex_of_groups(spec: A2LatticeSpec, twists: dict | None = None) -> ComplexOfGroups:
    """Ã2 complex: S_α at v_α and the twist d_α(j)^-1 when β - α ≡ 2 mod 3.

    ``twists`` overrides individual twist elements, given as residues
    keyed by ``(alpha, beta, j)``.
    """
    spec.validate()
    Y = a2_scwol(spec.q)
    groups = {}
    for a, name in zip((1, 2, 3), a2_names()):
        groups[f"v{a}"] = cyclic_group(spec.n, name)
    for v in Y.vertices:
        groups.setdefault(v, trivial_group())
    tw = {}
    for j in range(spec.q + 1):
        for a in (1, 2, 3):
            S = groups[f"v{a}"]
            for b in (1, 2, 3):
                if a == b:
                    continue
                if twists is not None and (a, b, j) in twists:
                    g = S.element(twists[(a, b, j)] % spec.n)
                elif (b - a) % 3 == 1:
                    g = S.identity
                else:
                    g = S.element((-spec.delta(a)[j]) % spec.n)
                tw[(f"v{a}<-e{b}", f"e{b}<-f{j}")] = g
    return ComplexOfGroups(Y, groups, {}, tw, name=f"A2(q={spec.q})")


def a2_presentation(spec: A2LatticeSpec) -> Presentation:
    """⟨σ1, σ2, σ3 | σ_α^n, σ1^δ1(j) σ2^δ2(j) σ3^δ3(j) for j ≠ 0⟩.

    The j = 0 relator is empty because δ_α(0) = 0.
    """
    spec.validate()
    names = a2_names()
    gens = [Generator(s, spec.n) for s in names]
    rels: list[Word] = [power(s, spec.n) for s in names]
    for j in range(spec.q + 1):
        w = free_reduce(sum((power(s, spec.delta(a)[j]) for a, s in zip((1, 2, 3), names)), ()))
        if w:
            rels.append(w)
    return Presentation(gens, rels)


def a2_expected_links(spec: A2LatticeSpec) -> dict:
    out = {}
    for a in (1, 2, 3):
        out[f"v{a}"] = scwol_of_incidence(plane_from_difference_set(spec.deltas[a - 1]).plane)
    for b in (1, 2, 3):
        out[f"e{b}"] = discrete_scwol(spec.q + 1)
    for j in range(spec.q + 1):
        out[f"f{j}"] = discrete_scwol(0)
    return out


# C̃2

@dataclass
class C2LatticeSpec:
    q: int
    family: str = TWO_PANEL
    lam: tuple[int, ...] = ()
    lam_prime: tuple[int, ...] = ()
    quadrangle: SlantedQuadrangle | None = field(default=None, repr=False)

    @classmethod
    def default(cls, q: int, family: str = TWO_PANEL, lam=None, lam_prime=None) -> "C2LatticeSpec":
        """λ and λ' default to the identity onto the representative list."""
        k = q + 2
        return cls(q, family, tuple(lam if lam is not None else range(k)),
                   tuple(lam_prime if lam_prime is not None else range(k)))

    def validate(self) -> None:
        pe = prime_power(self.q)
        if pe is None or self.q <= 2:
            raise SpecInvalid(f"C̃2 construction needs a prime power q > 2, got {self.q}")
        if self.family not in (TWO_PANEL, ONE_PANEL):
            raise SpecInvalid(f"unknown family {self.family!r}")
        k = self.q + 2
        for name, perm in (("λ", self.lam), ("λ'", self.lam_prime)):
            if sorted(perm) != list(range(k)):
                raise SpecInvalid(f"{name} = {list(perm)} is not a bijection J -> L with |J| = {k}")

    def quad(self) -> SlantedQuadrangle:
        if self.quadrangle is None:
            self.quadrangle = slanted_quadrangle(self.q)
        return self.quadrangle

    def to_json(self) -> str:
        return json.dumps({"type": "C2", "q": self.q, "family": self.family,
                           "lambda": list(self.lam), "lambda_prime": list(self.lam_prime)})

    @classmethod
    def from_dict(cls, data: dict) -> "C2LatticeSpec":
        spec = cls.default(int(data["q"]), data.get("family", TWO_PANEL),
                           data.get("lambda"), data.get("lambda_prime"))
        spec.validate()
        return spec


@dataclass
class _C2Data:
    S: HeisenbergGroup
    Sp: HeisenbergGroup
    labels: list
    abstract: list      # S_j (TwoPanel) or (A_j, A'_j) (OnePanel)
    psi: list           # element maps F_q -> S
    psi_prime: list


def _field_map(E: HeisenbergGroup, label, A: ElementaryAbelianGroup):
    """The isomorphism A = (F_q, +) -> stabilizer, f -> displayed matrix."""
    def fn(g: GroupElement) -> GroupElement:
        return displayed_stabilizer_element(E, label, g.payload[0])
    return fn


def displayed_stabilizer_element(E: HeisenbergGroup, label, f) -> GroupElement:
    if label == 0:
        return E.z(E._zscale() * f)
    a, b = label
    return E._mat([[1, f * a, f * b, 0], [0, 1, 0, f * b], [0, 0, 1, -(f * a)], [0, 0, 0, 1]])


def _abstract_field_group(q: int, name: str) -> ElementaryAbelianGroup:
    return ElementaryAbelianGroup(q, 1, name=name)


def _c2_data(spec: C2LatticeSpec, names: Sequence[str]) -> _C2Data:
    sq = spec.quad()
    S = heisenberg_group(spec.q)
    Sp = heisenberg_group(spec.q, "'")
    labels = sq.rep_labels
    abstract, psi, psi_p = [], [], []
    for j, nm in zip(range(spec.q + 2), names):
        A = _abstract_field_group(spec.q, nm)
        abstract.append(A)
        psi.append(_field_map(S, labels[spec.lam[j]], A))
        psi_p.append(_field_map(Sp, labels[spec.lam_prime[j]], A))
    return _C2Data(S, Sp, labels, abstract, psi, psi_p)


def c2_two_panel_scwol(q: int) -> Scwol:
    J = range(q + 2)
    verts = ["v", "v'", "w", "e", "e'"] + [f"e{j}" for j in J] + [f"f{j}" for j in J]
    edges = {"w<-e": ("e", "w"), "w<-e'": ("e'", "w"), "v<-e": ("e", "v"), "v'<-e'": ("e'", "v'")}
    comp = {}
    for j in J:
        ej, fj = f"e{j}", f"f{j}"
        edges[f"v<-{ej}"] = (ej, "v")
        edges[f"v'<-{ej}"] = (ej, "v'")
        for t in ("v", "v'", "w"):
            edges[f"{t}<-{fj}"] = (fj, t)
        for t in ("e", "e'", ej):
            edges[f"{t}<-{fj}"] = (fj, t)
        comp[("w<-e", f"e<-{fj}")] = f"w<-{fj}"
        comp[("w<-e'", f"e'<-{fj}")] = f"w<-{fj}"
        comp[("v<-e", f"e<-{fj}")] = f"v<-{fj}"
        comp[(f"v<-{ej}", f"{ej}<-{fj}")] = f"v<-{fj}"
        comp[("v'<-e'", f"e'<-{fj}")] = f"v'<-{fj}"
        comp[(f"v'<-{ej}", f"{ej}<-{fj}")] = f"v'<-{fj}"
    return Scwol(verts, edges, comp)


def c2_one_panel_scwol(q: int) -> Scwol:
    J = range(q + 2)
    verts = ["v", "v'"] + [f"v{j}" for j in J] + ["e"] + [f"e{j}" for j in J] + [f"e'{j}" for j in J] + [f"f{j}" for j in J]
    edges = {"v<-e": ("e", "v"), "v'<-e": ("e", "v'")}
    comp = {}
    for j in J:
        vj, ej, epj, fj = f"v{j}", f"e{j}", f"e'{j}", f"f{j}"
        edges[f"v<-{ej}"] = (ej, "v")
        edges[f"{vj}<-{ej}"] = (ej, vj)
        edges[f"v'<-{epj}"] = (epj, "v'")
        edges[f"{vj}<-{epj}"] = (epj, vj)
        for t in ("v", "v'", vj, "e", ej, epj):
            edges[f"{t}<-{fj}"] = (fj, t)
        comp[("v<-e", f"e<-{fj}")] = f"v<-{fj}"
        comp[("v'<-e", f"e<-{fj}")] = f"v'<-{fj}"
        comp[(f"v<-{ej}", f"{ej}<-{fj}")] = f"v<-{fj}"
        comp[(f"{vj}<-{ej}", f"{ej}<-{fj}")] = f"{vj}<-{fj}"
        comp[(f"v'<-{epj}", f"{epj}<-{fj}")] = f"v'<-{fj}"
        comp[(f"{vj}<-{epj}", f"{epj}<-{fj}")] = f"{vj}<-{fj}"
    return Scwol(verts, edges, comp)


def c2_tree(spec: C2LatticeSpec) -> list[str]:
    J = range(spec.q + 2)
    if spec.family == TWO_PANEL:
        return ["w<-e", "w<-e'", "v<-e", "v'<-e'"] + [e for j in J for e in (f"w<-f{j}", f"e{j}<-f{j}")]
    return ["v<-e", "v'<-e"] + [e for j in J for e in (f"v<-f{j}", f"e{j}<-f{j}", f"e'{j}<-f{j}", f"v{j}<-f{j}")]


def c2_kept_vertices(spec: C2LatticeSpec) -> list[str]:
    return ["v", "v'", "w"] if spec.family == TWO_PANEL else ["v", "v'"]


def c2_complex_of_groups(spec: C2LatticeSpec) -> ComplexOfGroups:
    spec.validate()
    q = spec.q
    J = range(q + 2)
    if spec.family == TWO_PANEL:
        Y = c2_two_panel_scwol(q)
        data = _c2_data(spec, [f"s{j}" for j in J])
        c = cyclic_group(q + 2, "c")
        groups = {"v": data.S, "v'": data.Sp, "w": c}
        monos = {}
        for j in J:
            A = data.abstract[j]
            groups[f"e{j}"] = A
            monos[f"v<-e{j}"] = Homomorphism(A, data.S, data.psi[j])
            monos[f"v'<-e{j}"] = Homomorphism(A, data.Sp, data.psi_prime[j])
        for v in Y.vertices:
            groups.setdefault(v, trivial_group())
        twists = {("w<-e", f"e<-f{j}"): c.element(j % (q + 2)) for j in J}
        return ComplexOfGroups(Y, groups, monos, twists, name=f"C2 TwoPanel (q={q})")

    Y = c2_one_panel_scwol(q)
    data = _c2_data(spec, [f"a{j}" for j in J])
    groups = {"v": data.S, "v'": data.Sp}
    monos = {}
    for j in J:
        A = data.abstract[j]
        Ap = _abstract_field_group(q, f"a'{j}")
        left = _abstract_field_group(q, f"u{j}")
        right = _abstract_field_group(q, f"u'{j}")
        P = DirectProduct(left, right)
        groups[f"v{j}"] = P
        groups[f"e{j}"] = A
        groups[f"e'{j}"] = Ap
        monos[f"v<-e{j}"] = Homomorphism(A, data.S, data.psi[j])
        monos[f"v'<-e'{j}"] = Homomorphism(Ap, data.Sp, _relabelled(data.psi_prime[j], A))
        monos[f"v{j}<-e{j}"] = Homomorphism(A, P, lambda g, P=P, L=left: P.inject_left(L.element(g.payload)))
        monos[f"v{j}<-e'{j}"] = Homomorphism(Ap, P, lambda g, P=P, R=right: P.inject_right(R.element(g.payload)))
    for v in Y.vertices:
        groups.setdefault(v, trivial_group())
    return ComplexOfGroups(Y, groups, monos, {}, name=f"C2 OnePanel (q={q})")


def _relabelled(fn, A: ElementaryAbelianGroup):
    """Apply a map defined on A to an element of an isomorphic copy of A."""
    return lambda g: fn(A.element(g.payload))


def _commutator_word(u: Word, v: Word) -> Word:
    return free_reduce(u + v + inverse(u) + inverse(v))


def c2_presentation(spec: C2LatticeSpec) -> Presentation:
    """The hand-written presentation of either C̃2 family.

    TwoPanel: ⟨S, S', c | relations of S and S', c^(q+2), c^-j ψ_j(s) c^j = ψ'_j(s)⟩.
    OnePanel: ⟨S, S' | relations of S and S', [S_λ(j), S'_λ'(j)]⟩.
    Here s runs over the generators of the abstract group (F_q, +).
    """
    spec.validate()
    q = spec.q
    J = range(q + 2)
    data = _c2_data(spec, [f"s{j}" for j in J])
    S, Sp = data.S, data.Sp
    gens = [Generator(n, g.order()) for n, g in S.generators()] + [Generator(n, g.order()) for n, g in Sp.generators()]
    rels: list[Word] = list(S.relators()) + list(Sp.relators())
    if spec.family == TWO_PANEL:
        gens.append(Generator("c", q + 2))
        rels.append(power("c", q + 2))
        for j in J:
            for _, s in data.abstract[j].generators():
                lhs = power("c", -j) + S.word_for(data.psi[j](s)) + power("c", j)
                rels.append(free_reduce(lhs + inverse(Sp.word_for(data.psi_prime[j](s)))))
    else:
        for j in J:
            A = data.abstract[j]
            for _, s in A.generators():
                for _, t in A.generators():
                    rels.append(_commutator_word(S.word_for(data.psi[j](s)), Sp.word_for(data.psi_prime[j](t))))
    return Presentation(gens, rels)


def c2_prime_presentation(spec: C2LatticeSpec) -> Presentation:
    """Closed form for odd prime q with c_[a:b] = x^a y^b z^(-ab/2) and c_0 = z."""
    spec.validate()
    q = spec.q
    pe = prime_power(q)
    if pe is None or pe[1] != 1 or q % 2 == 0:
        raise SpecInvalid(f"closed form needs an odd prime, got {q}")
    labels = spec.quad().rep_labels
    half = pow(2, -1, q)

    def c_word(label, prime: str) -> Word:
        if label == 0:
            return (("z" + prime, 1),)
        a, b = int(label[0]), int(label[1])
        return power("x" + prime, a) + power("y" + prime, b) + power("z" + prime, (-a * b * half) % q)

    names = ["x", "y", "z", "x'", "y'", "z'"]
    gens = [Generator(n, q) for n in names]
    rels: list[Word] = []
    for pr in ("", "'"):
        x, y, z = "x" + pr, "y" + pr, "z" + pr
        rels += [power(x, q), power(y, q), power(z, q),
                 ((x, 1), (y, 1), (x, -1), (y, -1), (z, -1)),
                 ((x, 1), (z, 1), (x, -1), (z, -1)),
                 ((y, 1), (z, 1), (y, -1), (z, -1))]
    if spec.family == TWO_PANEL:
        gens.append(Generator("c", q + 2))
        rels.append(power("c", q + 2))
        for j in range(q + 2):
            w = power("c", -j) + c_word(labels[spec.lam[j]], "") + power("c", j)
            rels.append(free_reduce(w + inverse(c_word(labels[spec.lam_prime[j]], "'"))))
    else:
        for j in range(q + 2):
            rels.append(_commutator_word(c_word(labels[spec.lam[j]], ""), c_word(labels[spec.lam_prime[j]], "'")))
    return Presentation(gens, rels)


def c2_expected_links(spec: C2LatticeSpec) -> dict:
    q = spec.q
    Z = scwol_of_incidence(spec.quad().quadrangle)
    from .polygon import complete_bipartite
    out = {"v": Z, "v'": Z}
    J = range(q + 2)
    if spec.family == TWO_PANEL:
        out["w"] = scwol_of_incidence(complete_bipartite(q + 2, q + 2))
        out["e"] = discrete_scwol(q + 2)
        out["e'"] = discrete_scwol(q + 2)
        for j in J:
            out[f"e{j}"] = discrete_scwol(q)
    else:
        out["e"] = discrete_scwol(q + 2)
        for j in J:
            out[f"v{j}"] = scwol_of_incidence(complete_bipartite(q, q))
            out[f"e{j}"] = discrete_scwol(q)
            out[f"e'{j}"] = discrete_scwol(q)
    for j in J:
        out[f"f{j}"] = discrete_scwol(0)
    return out


# mechanical presentations

def a2_mechanical_presentation(spec: A2LatticeSpec) -> Presentation:
    C = a2_complex_of_groups(spec)
    return fundamental_group(C, a2_tree(spec.q), keep=["v1", "v2", "v3"])


def c2_mechanical_presentation(spec: C2LatticeSpec) -> Presentation:
    C = c2_complex_of_groups(spec)
    return fundamental_group(C, c2_tree(spec), keep=c2_kept_vertices(spec))


# building skeleton

@dataclass
class BuildingSkeleton:
    """V(X) as a union of coset classes Γ/G_v and the orbit edge templates."""

    vertex_classes: list[tuple[str, list[str]]]
    edge_templates: list[tuple[str, str]]

    def chamber_of(self, g: Word = ()) -> list[tuple[Word, str]]:
        """The chamber {g G_v : v} spanned by one lattice element."""
        return [(g, label) for label, _ in self.vertex_classes]

    def __str__(self):
        verts = " ⊔ ".join(f"Γ/{label}" for label, _ in self.vertex_classes)
        edges = ", ".join(f"(g{a}, g{b})" for a, b in self.edge_templates)
        return f"V(X) = {verts}; E(X) = {{{edges} : g ∈ Γ}}"


def building_skeleton(spec) -> BuildingSkeleton:
    if isinstance(spec, A2LatticeSpec):
        classes = [(f"S{a}", [n]) for a, n in zip((1, 2, 3), a2_names())]
        return BuildingSkeleton(classes, [("S1", "S2"), ("S2", "S3"), ("S3", "S1")])
    if isinstance(spec, C2LatticeSpec):
        S = heisenberg_group(spec.q)
        Sp = heisenberg_group(spec.q, "'")
        if spec.family == TWO_PANEL:
            classes = [("S", [n for n, _ in S.generators()]), ("S'", [n for n, _ in Sp.generators()]), ("⟨c⟩", ["c"])]
            return BuildingSkeleton(classes, [("S", "S'"), ("S", "⟨c⟩"), ("S'", "⟨c⟩")])
        classes = [("S", [n for n, _ in S.generators()]), ("S'", [n for n, _ in Sp.generators()])]
        return BuildingSkeleton(classes, [("S", "S'")])
    raise SpecInvalid(f"unsupported spec {spec!r}")
