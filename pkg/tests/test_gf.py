import itertools

import pytest
from hypothesis import given, strategies as st

from singer_lattices.errors import DegreeMismatch, DivisionByZero, NonPrime, SpecMismatch, TooLarge
from singer_lattices.gf import (
    field_of_order,
    inv,
    is_irreducible,
    make_field,
    mul,
    primitive_element,
    trace_to_subfield,
)


def brute_irreducible(poly, p):
    """No monic factor of degree 1..deg/2, found by trial division over all candidates."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            g = list(low) + [1]
            r = list(poly)
            while len(r) - 1 >= d:
                c = r[-1]
                shift = len(r) - 1 - d
                for i, gc in enumerate(g):
                    r[shift + i] = (r[shift + i] - c * gc) % p
                r.pop()
            if not any(r):
                return False
    return True


def smallest_irreducible(p, e):
    for n in range(p ** e):
        poly = [(n // p ** i) % p for i in range(e)] + [1]
        if brute_irreducible(poly, p):
            return tuple(poly)


@pytest.mark.parametrize("p,e", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 1)])
def test_modulus_is_smallest_irreducible(p, e):
    assert make_field(p, e).modulus == smallest_irreducible(p, e)


def test_documented_moduli():
    assert make_field(2, 2).modulus == (1, 1, 1)
    assert make_field(3, 3).modulus == (1, 2, 0, 1)
    assert make_field(2, 1).modulus == (0, 1)


def test_rabin_agrees_with_trial_division():
    for p, e in [(2, 5), (3, 3), (5, 2)]:
        for low in itertools.product(range(p), repeat=e):
            poly = list(low) + [1]
            assert is_irreducible(poly, p) == brute_irreducible(poly, p)


def test_make_field_errors():
    with pytest.raises(NonPrime):
        make_field(4, 1)
    with pytest.raises(TooLarge):
        make_field(2, 40)


def test_gf4_x_times_x_plus_one():
    F = make_field(2, 2)
    x = F.gen()
    assert mul(x, x + 1) == F.one


def test_gf7_inverse_of_three():
    F = make_field(7)
    assert inv(F(3)) == F(5)
    with pytest.raises(DivisionByZero):
        inv(F.zero)


def test_spec_mismatch():
    with pytest.raises(SpecMismatch):
        make_field(2, 2).one + make_field(2, 3).one


@pytest.mark.parametrize("q,expected", [(7, 3), (2, 1), (8, 2)])
def test_primitive_element(q, expected):
    F = field_of_order(q)
    g = primitive_element(F)
    assert int(g) == expected
    # brute-force multiplicative orders of all smaller elements
    for n in range(1, expected):
        a, k = F.from_int(n), 1
        while a ** k != F.one:
            k += 1
        assert k < q - 1


def test_gf8_primitive_is_x():
    F = make_field(2, 3)
    assert primitive_element(F) == F.gen()
    assert F.gen().order() == 7


def test_trace_examples():
    F8 = make_field(2, 3)
    F2 = make_field(2)
    # x + x^2 + x^4 with x^4 = x^2 + x under x^3 + x + 1, so the sum vanishes;
    # equivalently the trace is minus the x^2 coefficient of the minimal polynomial
    assert trace_to_subfield(F8.gen(), 3) == F2.zero
    assert trace_to_subfield(F8.gen() ** 3, 3) == F2.one
    assert trace_to_subfield(F8.one, 3) == F2.one
    assert trace_to_subfield(F8.zero, 3) == F2.zero
    with pytest.raises(DegreeMismatch):
        trace_to_subfield(F8.gen(), 2)


@pytest.mark.parametrize("p,e", [(2, 3), (3, 2), (2, 4), (5, 1)])
def test_field_axioms_exhaustive(p, e):
    F = make_field(p, e)
    els = list(F.elements())
    for a in els:
        if a:
            assert a * a.inverse() == F.one
        for b in els:
            assert a + b == b + a and a * b == b * a
    sample = els[:6]
    for a, b, c in itertools.product(sample, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)


fields = st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3), (5, 2), (7, 1), (2, 6)])


@given(fields, st.data())
def test_field_laws_property(pe, data):
    F = make_field(*pe)
    a, b, c = (F.from_int(data.draw(st.integers(0, F.size - 1))) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == F.zero
    if a:
        assert a / a == F.one


@given(st.sampled_from([(2, 1, 3), (3, 1, 3), (2, 2, 3), (2, 1, 2)]), st.data())
def test_trace_additive_and_fixed(spec, data):
    p, e, k = spec
    big = make_field(p, e * k)
    a = big.from_int(data.draw(st.integers(0, big.size - 1)))
    b = big.from_int(data.draw(st.integers(0, big.size - 1)))
    assert trace_to_subfield(a + b, k) == trace_to_subfield(a, k) + trace_to_subfield(b, k)
    t = trace_to_subfield(a, k)
    assert t ** (p ** e) == t
