"""Exact univariate polynomials and rational functions in z.

A polynomial is a tuple of integer coefficients in ascending order of power,
with no trailing zeros; the empty tuple is the zero polynomial.  A rational
function is a reduced pair num/den of such tuples.  Everything here is exact:
no floats enter until `RatZ.evaluate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple

ZPoly = Tuple[int, ...]

ZP_ZERO: ZPoly = ()
ZP_ONE: ZPoly = (1,)


def zp_normal(coeffs: Iterable[int]) -> ZPoly:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def zp_degree(p: ZPoly) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(p) - 1


def zp_add(a: ZPoly, b: ZPoly) -> ZPoly:
    n = max(len(a), len(b))
    return zp_normal((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def zp_neg(a: ZPoly) -> ZPoly:
    return tuple(-c for c in a)


def zp_sub(a: ZPoly, b: ZPoly) -> ZPoly:
    return zp_add(a, zp_neg(b))


def zp_mul(a: ZPoly, b: ZPoly) -> ZPoly:
    if not a or not b:
        return ZP_ZERO
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return zp_normal(out)


def zp_pow(a: ZPoly, n: int) -> ZPoly:
    if n < 0:
        raise ValueError("negative power")
    out = ZP_ONE
    for _ in range(n):
        out = zp_mul(out, a)
    return out


def zp_scale(a: ZPoly, k: int) -> ZPoly:
    if k == 0:
        return ZP_ZERO
    return tuple(c * k for c in a)


def zp_eval(a: ZPoly, z: complex) -> complex:
    acc: complex = 0
    for c in reversed(a):
        acc = acc * z + c
    return acc


def zp_content(a: ZPoly) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, abs(c))
    return g


def zp_primitive(a: ZPoly) -> ZPoly:
    """Divide out the content; leading coefficient made positive."""
    if not a:
        return ZP_ZERO
    g = zp_content(a)
    if a[-1] < 0:
        g = -g
    return tuple(c // g for c in a)


def _frac_divmod(a: list, b: list) -> tuple:
    # Division with remainder over Q; inputs are Fraction lists, ascending.
    r = list(a)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    db = len(b) - 1
    lead = b[-1]
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        shift = len(r) - 1 - db
        factor = r[-1] / lead
        q[shift] += factor
        for i, cb in enumerate(b):
            r[shift + i] -= factor * cb
        r.pop()
    return q, r


def zp_gcd(a: ZPoly, b: ZPoly) -> ZPoly:
    """Primitive gcd with positive leading coefficient."""
    fa = [Fraction(c) for c in a]
    fb = [Fraction(c) for c in b]
    while any(fb):
        _, rem = _frac_divmod(fa, fb)
        while rem and rem[-1] == 0:
            rem.pop()
        fa, fb = fb, rem
    if not any(fa):
        return ZP_ZERO
    # clear denominators, then primitivize
    denom = math.lcm(*(f.denominator for f in fa))
    ints = zp_normal(int(f * denom) for f in fa)
    return zp_primitive(ints)


def zp_divexact(a: ZPoly, b: ZPoly) -> ZPoly:
    """Exact quotient a/b; raises if b does not divide a over Q."""
    fa = [Fraction(c) for c in a]
    fb = [Fraction(c) for c in b]
    q, rem = _frac_divmod(fa, fb)
    if any(rem):
        raise ArithmeticError("inexact polynomial division")
    out = []
    for f in q:
        if f.denominator != 1:
            raise ArithmeticError("quotient not integral")
        out.append(int(f))
    return zp_normal(out)


def zp_text(a: ZPoly) -> str:
    """Canonical text, descending powers: 'z^2+1', '2*z', '-3', '0'."""
    if not a:
        return "0"
    parts = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else ("+" if parts else "")
        mag = abs(c)
        if k == 0:
            body = str(mag)
        elif k == 1:
            body = "z" if mag == 1 else f"{mag}*z"
        else:
            body = f"z^{k}" if mag == 1 else f"{mag}*z^{k}"
        parts.append(sign + body)
    return "".join(parts)


@dataclass(frozen=True)
class RatZ:
    """Reduced rational function num/den with integer-coefficient parts.

    Canonical form: den not zero, gcd(num, den) constant, joint content 1,
    den's leading coefficient positive.  Construct through `ratz`.
    """

    num: ZPoly
    den: ZPoly

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_one(self) -> bool:
        return self.num == ZP_ONE and self.den == ZP_ONE

    def __add__(self, other: "RatZ") -> "RatZ":
        return ratz(
            zp_add(zp_mul(self.num, other.den), zp_mul(other.num, self.den)),
            zp_mul(self.den, other.den),
        )

    def __neg__(self) -> "RatZ":
        return RatZ(zp_neg(self.num), self.den)

    def __sub__(self, other: "RatZ") -> "RatZ":
        return self + (-other)

    def __mul__(self, other: "RatZ") -> "RatZ":
        return ratz(zp_mul(self.num, other.num), zp_mul(self.den, other.den))

    def __truediv__(self, other: "RatZ") -> "RatZ":
        if other.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return ratz(zp_mul(self.num, other.den), zp_mul(self.den, other.num))

    def evaluate(self, z: complex) -> complex:
        d = zp_eval(self.den, z)
        if d == 0:
            raise ZeroDivisionError("pole of coefficient")
        return zp_eval(self.num, z) / d

    def text(self) -> str:
        if self.den == ZP_ONE:
            return zp_text(self.num)
        return f"({zp_text(self.num)})/({zp_text(self.den)})"


def ratz(num: Iterable[int], den: Iterable[int] = (1,)) -> RatZ:
    n = zp_normal(num)
    d = zp_normal(den)
    if not d:
        raise ZeroDivisionError("zero denominator")
    if not n:
        return RatZ(ZP_ZERO, ZP_ONE)
    g = zp_gcd(n, d)
    if zp_degree(g) > 0 or zp_content(g) > 1:
        n = zp_divexact(n, g)
        d = zp_divexact(d, g)
    c = math.gcd(zp_content(n), zp_content(d))
    if d[-1] < 0:
        c = -c
    n = tuple(x // c for x in n)
    d = tuple(x // c for x in d)
    return RatZ(n, d)


RZ_ZERO = RatZ(ZP_ZERO, ZP_ONE)
RZ_ONE = RatZ(ZP_ONE, ZP_ONE)


def ratz_const(k: int) -> RatZ:
    return ratz((k,))
