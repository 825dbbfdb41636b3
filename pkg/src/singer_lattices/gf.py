"""Arithmetic in finite fields GF(p^e).

Elements are coefficient tuples of a polynomial in a fixed root of the
field modulus, lowest degree first.  Elements and polynomials are ordered by
the integer whose base-p digits are the coefficients.  The modulus is the
smallest monic irreducible polynomial of degree ``e`` in that order, so every
field is built deterministically.
"""

from __future__ import annotations

import os
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import (
    DegreeMismatch,
    DivisionByZero,
    NonPrime,
    SpecMismatch,
    TooLarge,
)

DEFAULT_MAX_SIZE = 2 ** 20
SIZE_ENV = "SINGER_LATTICE_MAX_SIZE"


def max_field_size() -> int:
    raw = os.environ.get(SIZE_ENV)
    return int(raw) if raw else DEFAULT_MAX_SIZE


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, e) with q = p^e, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while q % p:
        p += 1
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    return (p, e) if r == 1 else None


# polynomial helpers over GF(p), coefficient lists lowest degree first

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
           for i in range(n)]
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: list[int], n: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, m, p)
    while n:
        if n & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        n >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over GF(p)."""
    f = _trim([c % p for c in poly])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    for r in _prime_factors(n):
        h = _psub(_ppowmod(x, p ** (n // r), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return not _psub(_ppowmod(x, p ** n, f, p), x, p)


class FieldSpec:
    """The field GF(p^e) together with its defining modulus."""

    __slots__ = ("p", "e", "modulus", "size", "_zero", "_one", "__weakref__")

    def __init__(self, p: int, e: int, modulus: Sequence[int]):
        self.p = p
        self.e = e
        self.modulus = tuple(modulus)
        self.size = p ** e
        self._zero = FieldElement(self, (0,) * e)
        self._one = FieldElement(self, (1,) + (0,) * (e - 1))

    def __repr__(self):
        return f"GF({self.p}^{self.e})"

    def __eq__(self, other):
        return (isinstance(other, FieldSpec) and self.p == other.p
                and self.e == other.e and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    @property
    def zero(self) -> "FieldElement":
        return self._zero

    @property
    def one(self) -> "FieldElement":
        return self._one

    def __call__(self, value) -> "FieldElement":
        """Coerce an int (reduced mod p) or a coefficient sequence."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise SpecMismatch(f"{value.spec} vs {self}")
            return value
        if isinstance(value, int):
            return FieldElement(self, (value % self.p,) + (0,) * (self.e - 1))
        coeffs = [c % self.p for c in value]
        if len(coeffs) > self.e:
            coeffs = _pmod(coeffs, self.modulus, self.p)
        coeffs = list(coeffs) + [0] * (self.e - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def gen(self) -> "FieldElement":
        """The class of x modulo the field modulus."""
        return self([0, 1])

    def from_int(self, n: int) -> "FieldElement":
        """Element whose coefficients are the base-p digits of n."""
        if not 0 <= n < self.size:
            raise ValueError(f"{n} out of range for {self}")
        digits = []
        for _ in range(self.e):
            n, d = divmod(n, self.p)
            digits.append(d)
        return FieldElement(self, tuple(digits))

    def elements(self) -> Iterator["FieldElement"]:
        """All elements in increasing integer order."""
        for n in range(self.size):
            yield self.from_int(n)


class FieldElement:
    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: FieldSpec, coeffs: tuple[int, ...]):
        self.spec = spec
        self.coeffs = coeffs

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return self.spec(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.spec is not self.spec and other.spec != self.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")
        return other

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.spec(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.spec.p, self.spec.e, self.coeffs))

    def __int__(self):
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.spec.p + c
        return n

    def __lt__(self, other):
        return int(self) < int(self._check(other))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        if self.spec.e == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                coef = "" if (c == 1 and i) else str(c)
                terms.append(coef + mono)
        return "+".join(reversed(terms)) or "0"

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.spec.p
        return FieldElement(self.spec, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.spec.p
        return FieldElement(self.spec, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        spec = self.spec
        if spec.e == 1:
            return FieldElement(spec, (self.coeffs[0] * other.coeffs[0] % spec.p,))
        prod = _pmod(_pmul(self.coeffs, other.coeffs, spec.p), spec.modulus, spec.p)
        return FieldElement(spec, tuple(prod) + (0,) * (spec.e - len(prod)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.spec.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if not self:
            raise DivisionByZero(f"inverse of zero in {self.spec}")
        return self ** (self.spec.size - 2)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def order(self) -> int:
        """Multiplicative order."""
        if not self:
            raise DivisionByZero("zero has no multiplicative order")
        n = self.spec.size - 1
        k = n
        for r in _prime_factors(n):
            while k % r == 0 and (self ** (k // r)) == self.spec.one:
                k //= r
        return k


@lru_cache(maxsize=None)
def make_field(p: int, e: int = 1) -> FieldSpec:
    """Build GF(p^e) using the smallest monic irreducible modulus."""
    if not is_prime(p):
        raise NonPrime(p)
    if e < 1:
        raise ValueError("exponent must be positive")
    bound = max_field_size()
    if p ** e > bound:
        raise TooLarge(f"{p}^{e} exceeds size bound {bound}")
    # integer order of the low coefficients read as base-p digits
    for n in range(p ** e):
        poly = [(n // p ** i) % p for i in range(e)] + [1]
        if is_irreducible(poly, p):
            return FieldSpec(p, e, poly)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def field_of_order(q: int) -> FieldSpec:
    pe = prime_power(q)
    if pe is None:
        raise NonPrime(q)
    return make_field(*pe)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


@lru_cache(maxsize=None)
def primitive_element(spec: FieldSpec) -> FieldElement:
    """Smallest element (in integer order) generating the multiplicative group."""
    target = spec.size - 1
    for n in range(1, spec.size):
        a = spec.from_int(n)
        if a.order() == target:
            return a
    raise AssertionError("multiplicative group is not cyclic")  # pragma: no cover


@lru_cache(maxsize=None)
def _embedding(sub: FieldSpec, big: FieldSpec) -> dict:
    """Map from the image of sub inside big back to sub."""
    theta = None
    for cand in big.elements():
        acc = big.zero
        for c in reversed(sub.modulus):
            acc = acc * cand + c
        if not acc:
            theta = cand
            break
    if theta is None:  # pragma: no cover
        raise DegreeMismatch(f"{sub} does not embed in {big}")
    back = {}
    for s in sub.elements():
        img = big.zero
        for c in reversed(s.coeffs):
            img = img * theta + c
        back[img] = s
    return back


def trace_to_subfield(a: FieldElement, k: int, subfield: FieldSpec | None = None) -> FieldElement:
    """Relative trace from GF(p^(e*k)) down to GF(p^e).

    The result is returned as an element of ``subfield`` (default
    ``make_field(p, e)``), identified through a fixed embedding.
    """
    big = a.spec
    if k < 1 or big.e % k:
        raise DegreeMismatch(f"degree {big.e} not divisible by {k}")
    e = big.e // k
    sub = subfield or make_field(big.p, e)
    if sub.p != big.p or sub.e != e:
        raise DegreeMismatch(f"{sub} is not the degree-{e} subfield of {big}")
    q = big.p ** e
    total, term = big.zero, a
    for _ in range(k):
        total = total + term
        term = term ** q
    if total ** q != total:  # pragma: no cover
        raise AssertionError("trace not fixed by Frobenius")
    return _embedding(sub, big)[total]
