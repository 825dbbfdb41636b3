"""Round trips: act on a finite scwol, take the quotient complex, develop, re-quotient."""

import itertools

import pytest
from hypothesis import given, strategies as st

from singer_lattices.groups import Subgroup, cyclic_group, generate_subgroup, heisenberg_group
from singer_lattices.scwol import (
    Scwol,
    ScwolError,
    development,
    is_morphism,
    quotient_complex,
    scwol_isomorphism,
    scwol_of_incidence,
    star_of,
    upper_link,
)
from singer_lattices.singer import plane_from_difference_set, singer_difference_set, slanted_quadrangle


def coset_scwol(G, subgroups):
    """Cells g·K_S for K_S the intersection of the subgroups indexed by S; edges go to larger cosets."""
    types = [S for r in range(1, len(subgroups) + 1) for S in itertools.combinations(range(len(subgroups)), r)]
    K = {S: frozenset.intersection(*(frozenset(subgroups[i]) for i in S)) for S in types}
    cells = {}
    for S in types:
        for g in G.elements():
            cells.setdefault((S, frozenset(g * k for k in K[S])), None)
    verts = list(cells)
    edges = {}
    for (S, cs), (T, ct) in itertools.product(verts, verts):
        if set(T) < set(S) and cs <= ct:
            edges[((S, cs), (T, ct))] = ((S, cs), (T, ct))
    comp = {}
    for a, (x, y) in edges.items():
        for b, (w, z) in edges.items():
            if x == z:
                comp[(a, b)] = (w, y)
    return Scwol(verts, edges, comp)


def coset_act(g, x):
    S, cs = x
    return (S, frozenset(g * k for k in cs))


def heisenberg_case(trivial_face):
    E = heisenberg_group(3)
    x, y, z = E.x(), E.y(), E.z()
    if trivial_face:
        gens = [[x], [y], [x * y]]
    else:
        gens = [[x, z], [y, z], [x * y, z]]
    subs = [generate_subgroup(E, g) for g in gens]
    return E, coset_scwol(E, subs), coset_act, subs


def incidence_action(act_point, act_line):
    def act(g, v):
        kind, obj = v
        if kind == "P":
            return ("P", act_point(g, obj))
        if kind == "L":
            return ("L", act_line(g, obj))
        p, l = obj
        return ("F", (act_point(g, p), act_line(g, l)))
    return act


def singer_case():
    sp = plane_from_difference_set(singer_difference_set(2))
    X = scwol_of_incidence(sp.plane)
    return sp.group, X, incidence_action(sp.point_action(), sp.line_action())


def slanted_case():
    sq = slanted_quadrangle(3)
    X = scwol_of_incidence(sq.quadrangle)
    return sq.singer, X, incidence_action(sq.action, sq.line_action)


def development_map_is_isomorphism(Q, dev, X, act):
    """(g G_v̄, v) ↦ g·v̄ and (g G_v̄, ā) ↦ g·ā is an isomorphism D → X."""
    by_ends = {e: a for a, e in X.edges.items()}

    def vmap(node):
        cs, v = node
        return act(next(iter(cs)), v)

    def emap(edge):
        cs, a = edge
        g = next(iter(cs))
        return by_ends[(act(g, X.i(a)), act(g, X.t(a)))]

    D = dev.scwol
    vimg = {v: vmap(v) for v in D.vertices}
    if len(vimg) != len(X.vertices) or set(vimg.values()) != set(X.vertices):
        return False
    eimg = {a: emap(a) for a in D.edges}
    if len(set(eimg.values())) != len(X.edges) or len(D.edges) != len(X.edges):
        return False
    for a, (i, t) in D.edges.items():
        if X.edges[eimg[a]] != (vimg[i], vimg[t]):
            return False
    image_comp = {(eimg[a], eimg[b]): eimg[ab] for (a, b), ab in D.composition.items()}
    return image_comp == X.composition


def coset_cases():
    return [heisenberg_case(True), heisenberg_case(False)]


@pytest.mark.parametrize("case", [0, 1])
def test_coset_quotient_shape(case):
    E, X, act, subs = coset_cases()[case]
    Q = quotient_complex(X, E, act)
    Y = Q.complex.scwol
    assert len(Y.vertices) == 7 and len(Y.edges) == 12 and len(Y.composition) == 6
    for v in Y.vertices:
        S, cs = v
        expected = len(frozenset.intersection(*(frozenset(subs[i]) for i in S)))
        assert Q.complex.group(v).order() == expected
    Q.complex.validate()


@pytest.mark.parametrize("case", [0, 1])
def test_coset_round_trip(case):
    E, X, act, _ = coset_cases()[case]
    Q = quotient_complex(X, E, act)
    phi_v, phi_a = Q.morphism()
    assert is_morphism(Q.complex, E, phi_v, phi_a)
    dev = development(Q.complex, E, phi_v, phi_a)
    assert development_map_is_isomorphism(Q, dev, X, act)
    again = quotient_complex(dev.scwol, E, dev.act)
    assert scwol_isomorphism(again.complex.scwol, Q.complex.scwol)
    assert sorted(again.complex.group(v).order() for v in again.complex.scwol.vertices) == \
        sorted(Q.complex.group(v).order() for v in Q.complex.scwol.vertices)


@pytest.mark.parametrize("case", [0, 1])
def test_upper_links_are_stars(case):
    E, X, act, _ = coset_cases()[case]
    Q = quotient_complex(X, E, act)
    for v in Q.complex.scwol.vertices:
        assert scwol_isomorphism(upper_link(Q.complex, v), star_of(X, Q.representative[v]))


@given(st.lists(st.integers(min_value=0, max_value=50), min_size=12, max_size=12), st.booleans())
def test_arbitrary_choices_of_h_still_round_trip(picks, trivial_face):
    E, X, act, _ = heisenberg_case(trivial_face)
    order = iter(picks)
    Q = quotient_complex(X, E, act, choose=lambda a, cands: cands[next(order) % len(cands)])
    Q.complex.validate()
    phi_v, phi_a = Q.morphism()
    dev = development(Q.complex, E, phi_v, phi_a)
    assert development_map_is_isomorphism(Q, dev, X, act)
    for v in Q.complex.scwol.vertices:
        assert scwol_isomorphism(upper_link(Q.complex, v), star_of(X, Q.representative[v]))


def test_some_choice_gives_a_nontrivial_twist():
    E, X, act, _ = heisenberg_case(False)
    Q = quotient_complex(X, E, act, choose=lambda a, cands: cands[-1])
    assert Q.complex.twists
    Q.complex.validate()
    phi_v, phi_a = Q.morphism()
    assert development_map_is_isomorphism(Q, development(Q.complex, E, phi_v, phi_a), X, act)


def test_singer_plane_quotient_has_trivial_groups():
    G, X, act = singer_case()
    Q = quotient_complex(X, G, act)
    Y = Q.complex.scwol
    assert len(Y.vertices) == 1 + 1 + 3 and len(Y.edges) == 6
    assert all(Q.complex.group(v).order() == 1 for v in Y.vertices)
    phi_v, phi_a = Q.morphism()
    assert development_map_is_isomorphism(Q, development(Q.complex, G, phi_v, phi_a), X, act)


def test_slanted_quadrangle_quotient():
    q = 3
    E, X, act = slanted_case()
    Q = quotient_complex(X, E, act)
    Y = Q.complex.scwol
    kinds = sorted(v[0] for v in Y.vertices)
    assert kinds == ["F"] * (q + 2) + ["L"] * (q + 2) + ["P"]
    for v in Y.vertices:
        assert Q.complex.group(v).order() == (q if v[0] == "L" else 1)
        assert scwol_isomorphism(upper_link(Q.complex, v), star_of(X, v))
    phi_v, phi_a = Q.morphism()
    assert development_map_is_isomorphism(Q, development(Q.complex, E, phi_v, phi_a), X, act)


def test_action_moving_an_edge_at_a_fixed_vertex_is_rejected():
    X = Scwol(["x", "y1", "y2"], {"a1": ("x", "y1"), "a2": ("x", "y2")})
    G = cyclic_group(2)
    swap = {"x": "x", "y1": "y2", "y2": "y1"}

    def act(g, v):
        return swap[v] if g.payload else v
    with pytest.raises(ScwolError):
        quotient_complex(X, G, act)


def test_development_rejects_non_morphism():
    E, X, act, _ = heisenberg_case(False)
    Q = quotient_complex(X, E, act)
    phi_v, phi_a = Q.morphism()
    a = next(a for a in Q.complex.scwol.edges if Q.complex.group(Q.complex.scwol.i(a)).order() > 1)
    bad = dict(phi_a)
    bad[a] = E.x() * bad[a]
    assert not is_morphism(Q.complex, E, phi_v, bad)
    with pytest.raises(ScwolError):
        development(Q.complex, E, phi_v, bad)


def test_subgroup_checks_closure():
    E = heisenberg_group(3)
    with pytest.raises(ValueError):
        Subgroup(E, [E.identity, E.x()])
    H = Subgroup(E, generate_subgroup(E, [E.z()]))
    assert H.order() == 3
    with pytest.raises(ValueError):
        H.restrict(E.x())
