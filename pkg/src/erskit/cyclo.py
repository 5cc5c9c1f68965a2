"""Exact arithmetic in the 24th cyclotomic field.

Elements are represented by 8 rational coordinates in the power basis
1, z, ..., z^7 where z is a primitive 24th root of unity, reduced modulo
the minimal polynomial x^8 - x^4 + 1.  The field contains sqrt(-1) = z^6,
sqrt(2) = z^3 + z^21 and every exp(pi*i/k) for k = 1, 2, 3, 4, which is all
the realization formulas ever need.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

_ZERO8 = (Fraction(0),) * 8

Scalar = Union[int, Fraction, "Cyc"]


class Cyc:
    """An element of Q(zeta_24), immutable and hashable."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable[Fraction] = _ZERO8):
        c = tuple(Fraction(x) for x in coeffs)
        if len(c) != 8:
            raise ValueError("need exactly 8 coordinates")
        self.c = c

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_rational(q) -> "Cyc":
        return Cyc((Fraction(q),) + (Fraction(0),) * 7)

    @staticmethod
    def zeta_pow(n: int) -> "Cyc":
        """z^n for any integer n (z has order 24)."""
        n %= 24
        coeffs = [Fraction(0)] * 8
        if n < 8:
            coeffs[n] = Fraction(1)
            return Cyc(coeffs)
        # reduce z^n by repeated x^8 = x^4 - 1
        poly = {n: Fraction(1)}
        return Cyc(_reduce(poly))

    # -- ring ops -----------------------------------------------------
    def __add__(self, other: Scalar) -> "Cyc":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Cyc(tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self) -> "Cyc":
        return Cyc(tuple(-a for a in self.c))

    def __sub__(self, other: Scalar) -> "Cyc":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Cyc(tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other: Scalar) -> "Cyc":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Scalar) -> "Cyc":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        prod: dict[int, Fraction] = {}
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(o.c):
                if b == 0:
                    continue
                prod[i + j] = prod.get(i + j, Fraction(0)) + a * b
        return Cyc(_reduce(prod))

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "Cyc":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Scalar) -> "Cyc":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "Cyc":
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "Cyc":
        """Multiplicative inverse via extended Euclid in Q[x] mod x^8-x^4+1."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic")
        # extended gcd of self (as poly) and the minimal polynomial
        a = list(self.c)
        m = [Fraction(1), 0, 0, 0, Fraction(-1), 0, 0, 0, Fraction(1)]
        m = [Fraction(x) for x in m]
        # invariant: g = u * self mod minpoly, tracked only for the
        # first argument
        r0, r1 = m, _trim(a)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while _deg(r1) >= 0:
            q, rem = _polydivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _polysub(s0, _polymul(q, s1))
        # r0 is gcd (a nonzero constant since minpoly is irreducible)
        g = r0[0]
        inv = [x / g for x in s0]
        return Cyc(_reduce({i: c for i, c in enumerate(inv)}))

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.c)

    def is_rational(self) -> bool:
        return all(a == 0 for a in self.c[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.c[0]

    def __eq__(self, other) -> bool:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_rational():
            return f"Cyc({self.c[0]})"
        terms = [f"{a}*z^{i}" for i, a in enumerate(self.c) if a != 0]
        return "Cyc(" + " + ".join(terms) + ")"

    def serialize(self) -> list[str]:
        """The 8 coordinates as exact fraction strings."""
        return [str(a) for a in self.c]


def _coerce(x) -> Cyc | None:
    if isinstance(x, Cyc):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyc.from_rational(x)
    return None


def _reduce(poly: dict[int, Fraction]) -> tuple[Fraction, ...]:
    """Reduce a sparse polynomial in z modulo x^8 = x^4 - 1."""
    work = dict(poly)
    while True:
        high = [e for e in work if e >= 8 and work[e] != 0]
        if not high:
            break
        for e in high:
            coef = work.pop(e)
            work[e - 4] = work.get(e - 4, Fraction(0)) + coef
            work[e - 8] = work.get(e - 8, Fraction(0)) - coef
    out = [Fraction(0)] * 8
    for e, coef in work.items():
        if coef != 0:
            out[e] += coef
    return tuple(out)


# -- dense Q[x] helpers for the inverse -------------------------------

def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _deg(p: list[Fraction]) -> int:
    return len(p) - 1


def _polysub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    return _trim(out)


def _polymul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _polydivmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while _deg(a) >= _deg(b) >= 0:
        shift = _deg(a) - _deg(b)
        coef = a[-1] / b[-1]
        q[shift] += coef
        for i, y in enumerate(b):
            a[i + shift] -= coef * y
        _trim(a)
    return _trim(q), a


ZERO = Cyc()
ONE = Cyc.from_rational(1)
ZETA24 = Cyc.zeta_pow(1)
SQRT_M1 = Cyc.zeta_pow(6)
SQRT2 = Cyc.zeta_pow(3) + Cyc.zeta_pow(-3)


def exp_pi_i_over(k: int) -> Cyc:
    """exp(pi*i/k) for k in {1, 2, 3, 4}."""
    if k not in (1, 2, 3, 4):
        raise ValueError(f"no exact primitive value for k={k}")
    return Cyc.zeta_pow(12 // k)
