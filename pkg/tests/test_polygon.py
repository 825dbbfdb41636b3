import pytest
from hypothesis import given, strategies as st

from singer_lattices.polygon import (
    IncidenceStructure,
    NonConstantOrder,
    NotConnected,
    NotPolygon,
    UnknownPoint,
    collinear,
    complete_bipartite,
    diameter_and_girth,
    double_perp,
    fano_plane,
    incidence_graph,
    perp_set,
    projective_plane_axioms,
    restrict,
    structure_order,
    verify_generalized_polygon,
)
from singer_lattices.singer import slanted_quadrangle, symplectic_quadrangle


def test_fano_incidence_graph():
    G = incidence_graph(fano_plane())
    assert len(G.adjacency) == 14
    assert G.edge_count == 21


def test_empty_incidence_graph():
    G = incidence_graph(IncidenceStructure([], [], []))
    assert len(G.adjacency) == 0 and G.edge_count == 0


def test_slanted_quadrangle_q3_graph_counts():
    Q = slanted_quadrangle(3).quadrangle
    G = incidence_graph(Q)
    assert len(G.adjacency) == 27 + 45
    # 27 points on 5 lines each
    assert G.edge_count == 135


def test_fano_certificate():
    cert = verify_generalized_polygon(fano_plane(), expected_m=3)
    assert (cert.m, cert.order, cert.thick) == (3, (2, 2), True)


def test_k44_is_digon():
    cert = verify_generalized_polygon(complete_bipartite(4, 4))
    assert (cert.m, cert.order) == (2, (3, 3))


def test_slanted_q3_certificate():
    cert = verify_generalized_polygon(slanted_quadrangle(3).quadrangle, expected_m=4)
    assert cert.order == (2, 4)


def test_w3_is_quadrangle_of_order_3():
    cert = verify_generalized_polygon(symplectic_quadrangle(3), expected_m=4)
    assert cert.order == (3, 3)


def test_removing_a_flag_breaks_fano():
    I = fano_plane()
    broken = IncidenceStructure(I.points, I.lines, I.flags[1:])
    with pytest.raises(NotPolygon) as exc:
        verify_generalized_polygon(broken)
    assert exc.value.girth != 2 * exc.value.diameter


def test_wrong_expected_m():
    with pytest.raises(NotPolygon) as exc:
        verify_generalized_polygon(fano_plane(), expected_m=4)
    assert exc.value.diameter == 3 and exc.value.expected_m == 4


def test_disconnected():
    I = IncidenceStructure([0, 1], [0, 1], [(0, 0), (1, 1)])
    with pytest.raises(NotConnected):
        verify_generalized_polygon(I)
    with pytest.raises(NotConnected):
        verify_generalized_polygon(IncidenceStructure([], [], []))


def test_non_constant_order_has_witness():
    I = IncidenceStructure([0, 1, 2], [0, 1], [(p, l) for p in range(3) for l in range(2)])
    assert verify_generalized_polygon(I).order == (2, 1)
    J = IncidenceStructure([0, 1, 2], [0, 1], [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)])
    with pytest.raises(NonConstantOrder) as exc:
        structure_order(J)
    assert exc.value.witness is not None


def test_perp_counts_in_w3():
    W = symplectic_quadrangle(3)
    assert len(W.points) == 40
    for p in W.points:
        brute = {r for r in W.points if r == p or any(r in l for l in W.lines if p in l)}
        assert perp_set(W, p) == brute
        assert len(brute) == 13


def test_double_perp_hyperbolic_lines_in_w3():
    W = symplectic_quadrangle(3)
    p = W.points[0]
    far = [r for r in W.points if not collinear(W, p, r)]
    assert far
    for r in far[:10]:
        assert len(double_perp(W, p, r)) == 4
    assert p in double_perp(W, p, p)


def test_unknown_point():
    with pytest.raises(UnknownPoint):
        perp_set(fano_plane(), 99)


def test_json_round_trip():
    I = slanted_quadrangle(3).quadrangle
    J = IncidenceStructure.from_json(I.to_json())
    assert len(J.points) == len(I.points) and len(J.lines) == len(I.lines)
    assert verify_generalized_polygon(J).order == (2, 4)
    F = fano_plane()
    G = IncidenceStructure.from_json(F.to_json())
    assert set(G.flags) == set(F.flags)


def test_dot_export_shapes():
    dot = fano_plane().to_dot()
    assert dot.startswith("graph")
    assert dot.count("--") == 21


def test_projective_plane_axioms_on_fano():
    assert projective_plane_axioms(fano_plane())
    assert not projective_plane_axioms(complete_bipartite(3, 3))



@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_feit_higman_never_violated(np, nl, data):
    flags = data.draw(st.sets(st.tuples(st.integers(0, np - 1), st.integers(0, nl - 1))))
    I = IncidenceStructure(range(np), range(nl), sorted(flags))
    try:
        cert = verify_generalized_polygon(I)
    except (NotPolygon, NotConnected, NonConstantOrder):
        return
    assert cert.m >= 2
    if cert.thick:
        assert cert.m in (2, 3, 4, 6, 8)
    if cert.m == 3:
        assert projective_plane_axioms(I)


@pytest.mark.parametrize("k", [0, 3, 5])
def test_restriction_of_fano_is_not_plane(k):
    I = fano_plane()
    pts = [p for p in I.points if p != k]
    with pytest.raises((NotPolygon, NotConnected, NonConstantOrder)):
        verify_generalized_polygon(restrict(I, pts, I.lines))


def test_diameter_girth_of_cycle():
    # hexagon: 3 points and 3 lines in a cycle
    I = IncidenceStructure(range(3), range(3), [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)])
    assert diameter_and_girth(incidence_graph(I)) == (3, 6)
    assert verify_generalized_polygon(I).order == (1, 1)
