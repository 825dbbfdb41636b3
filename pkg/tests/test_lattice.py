import pytest

from singer_lattices.lattice import (
    ONE_PANEL,
    TWO_PANEL,
    A2LatticeSpec,
    C2LatticeSpec,
    SpecInvalid,
    a2_complex_of_groups,
    a2_expected_links,
    a2_mechanical_presentation,
    a2_presentation,
    building_skeleton,
    c2_complex_of_groups,
    c2_expected_links,
    c2_mechanical_presentation,
    c2_presentation,
    c2_prime_presentation,
)
from singer_lattices.scwol import local_development_check, presentations_match
from singer_lattices.singer import DifferenceSet
from singer_lattices.words import Presentation, format_word

SWAP = [(0, 2, 1), (0, 1, 2), (0, 1, 2)]


def a2_specs():
    yield A2LatticeSpec.cyclic(2)
    yield A2LatticeSpec.cyclic(2, SWAP)
    yield A2LatticeSpec.cyclic(3)
    yield A2LatticeSpec.cyclic(3, [(0, 2, 1, 3), (0, 1, 2, 3), (0, 1, 2, 3)])


def test_gamma2_relators():
    P = a2_presentation(A2LatticeSpec.cyclic(2))
    assert [format_word(r) for r in P.relators] == ["σ1^7", "σ2^7", "σ3^7", "σ1 σ2 σ3", "σ1^3 σ2^3 σ3^3"]


def test_gamma2_prime_relators():
    P = a2_presentation(A2LatticeSpec.cyclic(2, SWAP))
    assert [format_word(r) for r in P.relators[3:]] == ["σ1^3 σ2 σ3", "σ1 σ2^3 σ3^3"]


@pytest.mark.parametrize("spec", list(a2_specs()), ids=lambda s: f"q{s.q}-{s.orderings[0]}")
def test_a2_presentation_matches_fundamental_group(spec):
    assert presentations_match(a2_presentation(spec), a2_mechanical_presentation(spec))


@pytest.mark.parametrize("spec", list(a2_specs()), ids=lambda s: f"q{s.q}-{s.orderings[0]}")
def test_a2_local_developments(spec):
    C = a2_complex_of_groups(spec)
    C.validate()
    expected = a2_expected_links(spec)
    for v in C.scwol.vertices:
        assert local_development_check(C, v, expected[v]), v


def test_a2_zero_twists_are_not_developable():
    spec = A2LatticeSpec.cyclic(2)
    zero = {(a, b, j): 0 for a in (1, 2, 3) for b in (1, 2, 3) if a != b for j in range(3)}
    C = a2_complex_of_groups(spec, zero)
    expected = a2_expected_links(spec)
    for v in ("v1", "v2", "v3"):
        res = local_development_check(C, v, expected[v])
        assert not res and res.reason


def test_a2_spec_validation():
    with pytest.raises(SpecInvalid):
        A2LatticeSpec.cyclic(2, deltas=[DifferenceSet(7, (0, 1, 2))] * 3).validate()
    with pytest.raises(SpecInvalid):
        A2LatticeSpec.cyclic(2, [(1, 0, 2), (0, 1, 2), (0, 1, 2)]).validate()
    spec = A2LatticeSpec.from_dict({"q": 2, "orderings": SWAP})
    assert spec.delta(1) == (0, 3, 1)


def c2_specs():
    for q in (3, 4):
        for fam in (TWO_PANEL, ONE_PANEL):
            yield C2LatticeSpec.default(q, fam)


@pytest.mark.parametrize("spec", list(c2_specs()), ids=lambda s: f"q{s.q}-{s.family}")
def test_c2_presentation_matches_fundamental_group(spec):
    assert presentations_match(c2_presentation(spec), c2_mechanical_presentation(spec))


@pytest.mark.parametrize("spec", list(c2_specs()), ids=lambda s: f"q{s.q}-{s.family}")
def test_c2_local_developments(spec):
    C = c2_complex_of_groups(spec)
    C.validate()
    expected = c2_expected_links(spec)
    for v in C.scwol.vertices:
        assert local_development_check(C, v, expected[v]), v


@pytest.mark.parametrize("q", [3, 4])
def test_two_panel_conjugation_sign(q):
    spec = C2LatticeSpec.default(q)
    P = c2_presentation(spec)
    mech = c2_mechanical_presentation(spec)
    # replacing c^-j ψ_j c^j by c^j ψ_j c^-j gives a different presentation
    flipped = [tuple((n, -e) if n == "c" else (n, e) for n, e in r) if len(r) > q + 2 and any(n == "c" for n, _ in r) else r
               for r in P.relators]
    assert presentations_match(P, mech)
    assert not presentations_match(Presentation(P.generators, flipped), mech)


@pytest.mark.parametrize("fam", [TWO_PANEL, ONE_PANEL])
def test_prime_closed_form(fam):
    spec = C2LatticeSpec.default(3, fam)
    assert presentations_match(c2_prime_presentation(spec), c2_presentation(spec))


def test_prime_closed_form_rejects_prime_powers():
    with pytest.raises(SpecInvalid):
        c2_prime_presentation(C2LatticeSpec.default(4))


def test_nontrivial_lambda():
    spec = C2LatticeSpec.default(3, ONE_PANEL, lam=[1, 0, 2, 3, 4], lam_prime=[4, 3, 2, 1, 0])
    assert presentations_match(c2_presentation(spec), c2_mechanical_presentation(spec))
    spec = C2LatticeSpec.default(3, TWO_PANEL, lam=[1, 0, 2, 3, 4])
    assert presentations_match(c2_presentation(spec), c2_mechanical_presentation(spec))


def test_c2_spec_validation():
    with pytest.raises(SpecInvalid):
        C2LatticeSpec.default(2).validate()
    with pytest.raises(SpecInvalid):
        C2LatticeSpec.default(3, "ThreePanel").validate()
    with pytest.raises(SpecInvalid):
        C2LatticeSpec.default(3, lam=[0, 0, 1, 2, 3]).validate()


def test_building_skeleton():
    sk = building_skeleton(A2LatticeSpec.cyclic(2))
    assert str(sk).startswith("V(X) = Γ/S1 ⊔ Γ/S2 ⊔ Γ/S3")
    assert len(sk.chamber_of()) == 3
    assert len(building_skeleton(C2LatticeSpec.default(3)).vertex_classes) == 3
    assert len(building_skeleton(C2LatticeSpec.default(3, ONE_PANEL)).vertex_classes) == 2
    with pytest.raises(SpecInvalid):
        building_skeleton(object())


def _perfect(n, residues):
    return sorted((a - b) % n for a in residues for b in residues if a != b) == list(range(1, n))


def test_undetected_twist_mutations_are_other_difference_sets():
    # the link at v_a only sees the residues t1(j) - t2(j), where t1 and t2 are the
    # twists along the edges e_(a+1) and e_(a+2); a mutation escapes every local check
    # exactly when these residues still form a perfect difference set
    spec = A2LatticeSpec.cyclic(2)
    expected = a2_expected_links(spec)
    base = a2_complex_of_groups(spec)
    escaped = 0
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            if a == b:
                continue
            for j in range(3):
                current = base.twist(f"v{a}<-e{b}", f"e{b}<-f{j}").payload
                for r in range(7):
                    if r == current:
                        continue
                    C = a2_complex_of_groups(spec, {(a, b, j): r})
                    passes = all(local_development_check(C, v, expected[v]) for v in ("v1", "v2", "v3"))
                    t1 = [C.twist(f"v{a}<-e{a % 3 + 1}", f"e{a % 3 + 1}<-f{k}").payload for k in range(3)]
                    t2 = [C.twist(f"v{a}<-e{(a + 1) % 3 + 1}", f"e{(a + 1) % 3 + 1}<-f{k}").payload for k in range(3)]
                    residues = {(x - y) % 7 for x, y in zip(t1, t2)}
                    assert passes == (len(residues) == 3 and _perfect(7, residues)), (a, b, j, r)
                    escaped += passes
    assert escaped == 18
