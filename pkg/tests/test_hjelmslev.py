import itertools
import json

import networkx as nx
import pytest

from singer_lattices.hjelmslev import (
    HypothesisViolated,
    MissingTriangleRelation,
    NotCyclic,
    closed_form_applies,
    cmsz_test,
    cyclic_adjacency,
    general_adjacency,
    general_position_quadruple,
    generate_substructure,
    hjelmslev_plane,
    incidence_counts,
    splitting_map,
    triangle_relations,
)
from singer_lattices.lattice import A2LatticeSpec, C2LatticeSpec, a2_complex_of_groups, a2_tree
from singer_lattices.polygon import verify_generalized_polygon
from singer_lattices.scwol import universal_cover_ball
from singer_lattices.words import power

SWAP = ((0, 2, 1), (0, 1, 2), (0, 1, 2))


@pytest.fixture(scope="module", params=[2, 3])
def plane(request):
    return hjelmslev_plane(A2LatticeSpec.cyclic(request.param))


def test_sizes(plane):
    q, n = plane.q, plane.n
    assert len(plane.points) == len(plane.lines) == n * q * q
    assert plane.closed_form


def test_cmsz_dichotomy_for_points(plane):
    for a, b in itertools.combinations(plane.points, 2):
        k = incidence_counts(plane, a, b)
        assert k == (plane.q if plane.psi(a) == plane.psi(b) else 1)


def test_cmsz_dichotomy_for_lines(plane):
    for a, b in itertools.combinations(plane.lines, 2):
        k = incidence_counts(plane, a, b, kind="line")
        assert k == (plane.q if plane.psi(a) == plane.psi(b) else 1)


def test_closed_form_equals_general(plane):
    general = hjelmslev_plane(plane.spec, "general")
    assert general.adjacency == plane.adjacency


def test_adjacency_projects_to_base_plane(plane):
    base = plane.base_plane()
    flags = set(base.flags)
    for p in plane.points:
        for l in plane.lines_through(p):
            assert (plane.psi(p), plane.psi(l)) in flags


def test_splitting_map(plane):
    iota = splitting_map(plane)
    assert iota.m == 2
    base = plane.base_plane()
    for j, p in iota.points.items():
        assert plane.psi(p) == j
    for k, l in iota.lines.items():
        assert plane.psi(l) == k
    for j, k in base.flags:
        assert plane.adjacent(iota.points[j], iota.lines[k])


def test_cmsz_verdict(plane):
    verdict = cmsz_test(plane)
    assert verdict.kind == "ProjectivePlaneOfOrder" and verdict.order == plane.q
    sub = verdict.substructure
    assert len(sub.points) == len(sub.lines) == plane.q ** 2 + plane.q + 1
    assert verify_generalized_polygon(sub.incidence(plane), 3).order == (plane.q, plane.q)
    assert str(verdict).startswith(f"ProjectivePlaneOfOrder({plane.q})")


def test_general_position_quadruple_fano():
    base = hjelmslev_plane(A2LatticeSpec.cyclic(2)).base_plane()
    quad = general_position_quadruple(base)
    for l in base.lines:
        assert sum(p in base.points_on[l] for p in quad) <= 2


def test_substructure_of_two_points():
    H = hjelmslev_plane(A2LatticeSpec.cyclic(2))
    a, b = H.points[0], next(p for p in H.points if p[0] != H.points[0][0])
    sub = generate_substructure(H, [a, b])
    assert len(sub.points) == 2 and len(sub.lines) == 1
    with pytest.raises(KeyError):
        generate_substructure(H, [(0, 6)])


def test_incidence_counts_rejects_equal_pair():
    H = hjelmslev_plane(A2LatticeSpec.cyclic(2))
    with pytest.raises(ValueError):
        incidence_counts(H, H.points[0], H.points[0])


def test_not_cyclic():
    with pytest.raises(NotCyclic):
        hjelmslev_plane(C2LatticeSpec.default(3))


def test_missing_triangle_relation():
    spec = A2LatticeSpec.cyclic(2)
    with pytest.raises(MissingTriangleRelation):
        general_adjacency(spec, (0, 0), (1, 0), relations=[(0, 0, 0)])


def test_triangle_relations_are_relators():
    spec = A2LatticeSpec.cyclic(2, SWAP)
    assert triangle_relations(spec) == [(0, 0, 0), (3, 1, 1), (1, 3, 3)]


def test_swapped_ordering_needs_general_adjacency():
    spec = A2LatticeSpec.cyclic(2, SWAP)
    assert not closed_form_applies(spec)
    H = hjelmslev_plane(spec)
    assert not H.closed_form
    with pytest.raises(HypothesisViolated):
        hjelmslev_plane(spec, "closed")
    with pytest.raises(HypothesisViolated):
        splitting_map(H)
    closed = {p: {l for l in H.lines if cyclic_adjacency(7, (0, 1, 3), p, l)} for p in H.points}
    assert any(closed[p] != H.adjacency[p] for p in H.points)


def test_cmsz_requires_prime():
    H = hjelmslev_plane(A2LatticeSpec.cyclic(4))
    with pytest.raises(HypothesisViolated):
        cmsz_test(H)


def test_json_and_dot():
    H = hjelmslev_plane(A2LatticeSpec.cyclic(2))
    data = json.loads(H.to_json())
    assert len(data["points"]) == 28
    assert len(data["adjacency"]) == sum(len(v) for v in H.adjacency.values())
    assert H.to_dot().count("--") == len(data["adjacency"])


# building oracle: the radius-2 ball of the universal cover around v1

def ball_triangles(B):
    X, kinds = B.scwol, B.kinds
    return {frozenset(t for i, t in X.edges.values() if i == c and kinds[t] in ("v1", "v2", "v3"))
            for c in X.vertices if kinds[c].startswith("f")}


def ball_adjacency(B, H):
    """Point (j1, j3) = σ1^j1 σ3^j3 v2 is adjacent to line (k1, k2) = σ1^k1 σ2^k2 v3
    when the four triangles spanning them exist in the ball."""
    tris = ball_triangles(B)
    nbr = {}
    for t in tris:
        for a in t:
            nbr.setdefault(a, set()).update(t - {a})
    P1 = {j: B.locate(power("σ1", j), "v3") for j in range(H.n)}
    L1 = {k: B.locate(power("σ1", k), "v2") for k in range(H.n)}
    P2 = {p: B.locate(power("σ1", p[0]) + power("σ3", p[1]), "v2") for p in H.points}
    L2 = {l: B.locate(power("σ1", l[0]) + power("σ2", l[1]), "v3") for l in H.lines}

    def adjacent(p, l):
        a, b = P1[p[0]], L1[l[0]]
        if frozenset({B.base, a, b}) not in tris:
            return False
        x, y = P2[p], L2[l]
        return any(B.kinds[w] == "v1" and {frozenset({a, w, x}), frozenset({b, y, w}), frozenset({a, b, w})} <= tris
                   for w in nbr[x] & nbr[y])

    return P1, L1, P2, L2, tris, {p: frozenset(l for l in H.lines if adjacent(p, l)) for p in H.points}


@pytest.fixture(scope="module", params=[None, SWAP], ids=["identity", "swapped"])
def ball(request):
    spec = A2LatticeSpec.cyclic(2, request.param)
    B = universal_cover_ball(a2_complex_of_groups(spec), "v1", 2, a2_tree(2), keep=["v1", "v2", "v3"])
    H = hjelmslev_plane(spec, "general")
    return spec, B, H, ball_adjacency(B, H)


def test_parametrization_is_bijective(ball):
    _, B, H, (P1, L1, P2, L2, _, _) = ball
    assert set(P1.values()) == set(B.sphere(1, "v3"))
    assert set(L1.values()) == set(B.sphere(1, "v2"))
    assert set(P2.values()) == set(B.sphere(2, "v2")) and len(set(P2.values())) == len(H.points)
    assert set(L2.values()) == set(B.sphere(2, "v3")) and len(set(L2.values())) == len(H.lines)


def test_base_plane_matches_ball(ball):
    _, B, H, (P1, L1, _, _, tris, _) = ball
    flags = set(H.base_plane().flags)
    for j in range(H.n):
        for k in range(H.n):
            assert (frozenset({B.base, P1[j], L1[k]}) in tris) == ((j, k) in flags)


def test_general_adjacency_matches_ball(ball):
    _, _, H, (*_, adjacency) = ball
    assert adjacency == H.adjacency


def test_closed_form_matches_ball_only_for_equal_orderings(ball):
    spec, _, H, (*_, adjacency) = ball
    closed = {p: frozenset(l for l in H.lines if cyclic_adjacency(H.n, (0, 1, 3), p, l)) for p in H.points}
    assert (closed == adjacency) == closed_form_applies(spec)


def plane_graph(H, adjacency):
    G = nx.Graph()
    for j in range(H.n):
        G.add_node(("P1", j), kind="P1")
        G.add_node(("L1", j), kind="L1")
    for p in H.points:
        G.add_node(("P2", p), kind="P2")
        G.add_edge(("P2", p), ("P1", H.psi(p)))
    for l in H.lines:
        G.add_node(("L2", l), kind="L2")
        G.add_edge(("L2", l), ("L1", H.psi(l)))
    G.add_edges_from((("P1", j), ("L1", k)) for j, k in H.base_plane().flags)
    G.add_edges_from((("P2", p), ("L2", l)) for p in H.points for l in adjacency[p])
    return G


def test_ball_and_plane_are_isomorphic_graphs(ball):
    # label-free check: the ball's P1, L1, P2, L2 layers with triangle adjacency
    _, B, H, (P1, L1, P2, L2, tris, adjacency) = ball
    inv = {v: ("P1", j) for j, v in P1.items()} | {v: ("L1", k) for k, v in L1.items()}
    inv |= {v: ("P2", p) for p, v in P2.items()} | {v: ("L2", l) for l, v in L2.items()}
    G = nx.Graph()
    G.add_nodes_from(((x, {"kind": inv[x][0]}) for x in inv))
    for t in tris:
        G.add_edges_from((a, b) for a, b in itertools.combinations(t, 2)
                         if a in inv and b in inv and {inv[a][0], inv[b][0]} in ({"P1", "L1"}, {"P1", "P2"}, {"L1", "L2"}))
    G.add_edges_from((P2[p], L2[l]) for p in H.points for l in adjacency[p])
    assert nx.vf2pp_is_isomorphic(G, plane_graph(H, H.adjacency), node_label="kind")
