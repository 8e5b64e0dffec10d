"""Exact arithmetic substrate.

Rationals are :class:`fractions.Fraction`.  Univariate Laurent polynomials are
stored densely (lowest exponent plus a trimmed coefficient tuple), which is
the natural shape for the products of ``(1 - q^m)`` factors that dominate this
package.  Large integer products go through Kronecker substitution so the
multiplication itself runs inside CPython's big-integer code.

Rational functions whose denominators are products of cyclotomic polynomials
remember that factorization; reduction to lowest terms then needs only trial
division by the known ``Phi_d`` instead of a Euclidean gcd on polynomials of
degree several thousand.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd
from typing import Iterable, Mapping, Union

BigRational = Fraction
Scalar = Union[int, Fraction]

_SCHOOLBOOK_CUTOFF = 24


# --------------------------------------------------------------------------
# coefficient helpers

def _rat(c) -> Scalar:
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        return _rat(Fraction(c))
    raise TypeError(f"unsupported coefficient {c!r}")


def _div_scalar(c: Scalar, d: Scalar) -> Scalar:
    if type(c) is int and type(d) is int:
        if c % d == 0:
            return c // d
        return Fraction(c, d)
    r = Fraction(c) / d
    return r.numerator if r.denominator == 1 else r


def _trim(low: int, c: list) -> tuple[int, tuple]:
    i, j = 0, len(c)
    while i < j and not c[i]:
        i += 1
    while j > i and not c[j - 1]:
        j -= 1
    if i == j:
        return 0, ()
    out = c[i:j]
    for t, v in enumerate(out):
        if type(v) is Fraction and v.denominator == 1:
            out[t] = v.numerator
    return low + i, tuple(out)


# --------------------------------------------------------------------------
# dense integer multiplication

def _mul_school(a, b) -> list:
    res = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    res[i + j] += x * y
    return res


def _pack(a, nb: int) -> int:
    pos = b"".join((x if x > 0 else 0).to_bytes(nb, "little") for x in a)
    value = int.from_bytes(pos, "little")
    if any(x < 0 for x in a):
        neg = b"".join((-x if x < 0 else 0).to_bytes(nb, "little") for x in a)
        value -= int.from_bytes(neg, "little")
    return value


def _unpack(z: int, n: int, nb: int) -> list:
    half = 1 << (8 * nb - 1)
    bias = int.from_bytes((b"\x00" * (nb - 1) + b"\x80") * n, "little")
    data = (z + bias).to_bytes(n * nb, "little")
    return [int.from_bytes(data[i * nb:(i + 1) * nb], "little") - half for i in range(n)]


def _mul_int(a, b) -> list:
    if min(len(a), len(b)) < _SCHOOLBOOK_CUTOFF:
        return _mul_school(a, b)
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    nb = (bound.bit_length() + 2) // 8 + 1
    x = _pack(a, nb)
    y = x if a is b else _pack(b, nb)
    return _unpack(x * y, len(a) + len(b) - 1, nb)


def _common_den(c) -> int:
    den = 1
    for v in c:
        if type(v) is Fraction:
            d = v.denominator
            den = den * d // igcd(den, d)
    return den


def _mul_dense(a, b) -> list:
    da, db = _common_den(a), _common_den(b)
    if da == 1 and db == 1:
        return _mul_int(a, b)
    ia = [int(v * da) for v in a] if da != 1 else list(a)
    ib = [int(v * db) for v in b] if db != 1 else list(b)
    d = da * db
    return [Fraction(v, d) for v in _mul_int(ia, ib)]


def _divrem_dense(p, d) -> tuple[list, list]:
    """Long division of ordinary polynomials given low-to-high coefficient lists."""
    dd = len(d) - 1
    r = list(p)
    if len(p) <= dd:
        return [], r
    lc = d[-1]
    nz = [(j, c) for j, c in enumerate(d[:-1]) if c]
    qlen = len(p) - dd
    quot = [0] * qlen
    for i in range(qlen - 1, -1, -1):
        c = r[i + dd]
        if not c:
            continue
        if lc != 1:
            c = _div_scalar(c, lc)
        quot[i] = c
        r[i + dd] = 0
        for j, dj in nz:
            r[i + j] -= c * dj
    return quot, r[:dd]


# --------------------------------------------------------------------------

class LaurentPoly:
    """Univariate Laurent polynomial in ``q`` with rational coefficients.

    Immutable.  Two equal polynomials have identical internal state, so
    ``==`` is mathematical equality.
    """

    __slots__ = ("_low", "_c")

    def __init__(self, terms: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]] | None = None):
        if not terms:
            self._low, self._c = 0, ()
            return
        items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        if not items:
            self._low, self._c = 0, ()
            return
        lo = min(e for e, _ in items)
        hi = max(e for e, _ in items)
        c: list = [0] * (hi - lo + 1)
        for e, v in items:
            c[e - lo] += _rat(v)
        self._low, self._c = _trim(lo, c)

    @classmethod
    def _raw(cls, low: int, coeffs: list) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._low, obj._c = _trim(low, coeffs)
        return obj

    @classmethod
    def const(cls, c: Scalar) -> "LaurentPoly":
        return cls._raw(0, [_rat(c)])

    @classmethod
    def monomial(cls, e: int, c: Scalar = 1) -> "LaurentPoly":
        return cls._raw(e, [_rat(c)])

    # -- inspection --------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return {self._low + i: Fraction(v) for i, v in enumerate(self._c) if v}

    @property
    def low(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no exponents")
        return self._low

    @property
    def high(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no exponents")
        return self._low + len(self._c) - 1

    def coeff(self, e: int) -> Fraction:
        i = e - self._low
        if 0 <= i < len(self._c):
            return Fraction(self._c[i])
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self._c

    def is_one(self) -> bool:
        return self._low == 0 and self._c == (1,)

    def is_monomial(self) -> bool:
        return len(self._c) == 1

    def is_integral(self) -> bool:
        return all(type(v) is int for v in self._c)

    @property
    def leading_coeff(self) -> Fraction:
        if not self._c:
            raise ValueError("zero polynomial has no leading coefficient")
        return Fraction(self._c[-1])

    def degree_span(self) -> tuple[int, int]:
        return (self.low, self.high)

    def nnz(self) -> int:
        return sum(1 for v in self._c if v)

    # -- arithmetic ----------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._c:
            return self
        if not self._c:
            return o
        lo = min(self._low, o._low)
        hi = max(self._low + len(self._c), o._low + len(o._c))
        c = [0] * (hi - lo)
        off = self._low - lo
        for i, v in enumerate(self._c):
            c[off + i] = v
        off = o._low - lo
        for i, v in enumerate(o._c):
            if v:
                c[off + i] += v
        return LaurentPoly._raw(lo, c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self._low, [-v for v in self._c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return LaurentPoly()
            return LaurentPoly._raw(self._low, [v * other for v in self._c])
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not self._c or not other._c:
            return LaurentPoly()
        return LaurentPoly._raw(self._low + other._low, _mul_dense(self._c, other._c))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if self.is_monomial():
                return LaurentPoly.monomial(self._low * k, Fraction(1) / Fraction(self._c[0]) ** -k)
            raise ValueError("negative power of a non-monomial Laurent polynomial")
        result = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, e: int) -> "LaurentPoly":
        """Multiply by ``q**e``."""
        if not self._c:
            return self
        return LaurentPoly._raw(self._low + e, list(self._c))

    def scale(self, c: Scalar) -> "LaurentPoly":
        return self * c

    def monic(self) -> "LaurentPoly":
        """Divide by the leading coefficient and shift to minimal exponent 0."""
        if not self._c:
            return self
        lc = self._c[-1]
        return LaurentPoly._raw(0, [_div_scalar(v, lc) for v in self._c])

    def substitute(self, m: int) -> "LaurentPoly":
        """``q -> q**m``."""
        if m == 0:
            raise ValueError("substitution exponent must be nonzero")
        return LaurentPoly((m * (self._low + i), v) for i, v in enumerate(self._c) if v)

    def evaluate(self, x) -> Fraction:
        x = Fraction(x)
        if not self._c:
            return Fraction(0)
        if x == 0:
            if self._low < 0:
                raise ZeroDivisionError("pole at q = 0")
            return Fraction(self._c[0]) if self._low == 0 else Fraction(0)
        acc = Fraction(0)
        for v in reversed(self._c):
            acc = acc * x + v
        return acc * x ** self._low

    __call__ = evaluate

    def divrem(self, d: "LaurentPoly") -> tuple["LaurentPoly", "LaurentPoly"]:
        return poly_divrem(self, d)

    def __floordiv__(self, d):
        return poly_divrem(self, d)[0]

    def __mod__(self, d):
        return poly_divrem(self, d)[1]

    # -- identity ------------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._low == o._low and self._c == o._c

    def __hash__(self):
        return hash((self._low, self._c))

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for i in range(len(self._c) - 1, -1, -1):
            v = self._c[i]
            if not v:
                continue
            e = self._low + i
            sign = "-" if v < 0 else "+"
            mag = abs(v)
            if e == 0:
                body = str(mag)
            else:
                mono = "q" if e == 1 else f"q^{e}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


q = LaurentPoly.monomial(1)
ONE = LaurentPoly.const(1)
ZERO = LaurentPoly()


# --------------------------------------------------------------------------
# module-level operations

def poly_add(p: LaurentPoly, r: LaurentPoly) -> LaurentPoly:
    return p + r


def poly_mul(p: LaurentPoly, r: LaurentPoly) -> LaurentPoly:
    return p * r


def poly_neg(p: LaurentPoly) -> LaurentPoly:
    return -p


def poly_pow(p: LaurentPoly, k: int) -> LaurentPoly:
    if k < 0:
        raise ValueError("poly_pow needs k >= 0")
    return p ** k


def poly_divrem(p: LaurentPoly, d: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Division with remainder after shifting both operands to ordinary polynomials.

    With ``p = q^lp * P0`` and ``d = q^ld * D0`` this returns
    ``(q^(lp-ld) * Q0, q^lp * R0)`` where ``P0 = Q0*D0 + R0``.
    """
    if d.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if p.is_zero():
        return ZERO, ZERO
    quot, rem = _divrem_dense(list(p._c), list(d._c))
    return LaurentPoly._raw(p._low - d._low, quot), LaurentPoly._raw(p._low, rem)


def exact_div(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly:
    quot, rem = poly_divrem(p, d)
    if not rem.is_zero():
        raise ArithmeticError(f"inexact division: remainder {rem}")
    return quot


def poly_gcd(p: LaurentPoly, r: LaurentPoly) -> LaurentPoly:
    """Monic gcd with minimal exponent 0 (monomials are units)."""
    if p.is_zero() and r.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if p.is_zero():
        return r.monic()
    if r.is_zero():
        return p.monic()
    a, b = p.monic(), r.monic()
    if a.is_one() or b.is_one():
        return ONE
    if len(a._c) < len(b._c):
        a, b = b, a
    while not b.is_zero():
        _, rem = _divrem_dense(list(a._c), list(b._c))
        a, b = b, LaurentPoly._raw(0, rem).monic()
    return a.monic()


def substitute_qpow(p: LaurentPoly, m: int) -> LaurentPoly:
    return p.substitute(m)


def evaluate(p: LaurentPoly, x) -> Fraction:
    return p.evaluate(x)


# --------------------------------------------------------------------------
# cyclotomic polynomials (memoized; the rest of the kernel leans on them)

def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> LaurentPoly:
    """The n-th cyclotomic polynomial, by exact division of ``q^n - 1``."""
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    if n == 1:
        return LaurentPoly({0: -1, 1: 1})
    prod = ONE
    for d in divisors(n)[:-1]:
        prod = prod * cyclotomic(d)
    return exact_div(LaurentPoly({0: -1, n: 1}), prod)


def _divisible_by_cyclotomic(p: LaurentPoly, d: int) -> bool:
    # q^d == 1 modulo Phi_d, so fold exponents first
    folded = [0] * d
    for i, v in enumerate(p._c):
        if v:
            folded[(p._low + i) % d] += v
    phi = cyclotomic(d)
    _, rem = _divrem_dense(folded, list(phi._c))
    return not any(rem)


def strip_cyclotomic(p: LaurentPoly, d: int, limit: int) -> tuple[LaurentPoly, int]:
    """Divide ``p`` by ``Phi_d`` as often as possible, at most ``limit`` times."""
    count = 0
    if p.is_zero():
        return p, 0
    phi = cyclotomic(d)
    while count < limit and _divisible_by_cyclotomic(p, d):
        p = exact_div(p, phi)
        count += 1
    return p, count


@lru_cache(maxsize=4096)
def _expand_mult(items: tuple[tuple[int, int], ...]) -> LaurentPoly:
    polys = []
    for d, m in items:
        if m < 0:
            raise ValueError("cannot expand a negative multiplicity")
        if m:
            polys.append(cyclotomic(d) ** m)
    if not polys:
        return ONE
    while len(polys) > 1:
        polys.sort(key=lambda x: len(x._c))
        nxt = [polys[i] * polys[i + 1] for i in range(0, len(polys) - 1, 2)]
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


def expand_cyclotomic(mult: Mapping[int, int]) -> LaurentPoly:
    return _expand_mult(tuple(sorted((d, m) for d, m in mult.items() if m)))


class CycloProduct:
    """``unit * q^shift * prod Phi_d^m`` with integer (possibly negative) m."""

    __slots__ = ("unit", "shift", "mult")

    def __init__(self, unit: Scalar = 1, shift: int = 0, mult: Mapping[int, int] | None = None):
        unit = _rat(unit)
        if not unit:
            raise ValueError("CycloProduct unit must be nonzero")
        self.unit = unit
        self.shift = shift
        self.mult = {d: m for d, m in sorted((mult or {}).items()) if m}

    @classmethod
    def one_minus_qpow(cls, m: int) -> "CycloProduct":
        """``1 - q^m``."""
        if m == 0:
            raise ZeroDivisionError("1 - q^0 is zero")
        mult = {d: 1 for d in divisors(abs(m))}
        if m > 0:
            return cls(-1, 0, mult)
        return cls(1, m, mult)

    @classmethod
    def one_plus_qpow(cls, m: int) -> "CycloProduct":
        """``1 + q^m`` for nonzero m."""
        return cls.one_minus_qpow(2 * m) / cls.one_minus_qpow(m)

    def __mul__(self, other: "CycloProduct") -> "CycloProduct":
        if isinstance(other, (int, Fraction)):
            return CycloProduct(self.unit * other, self.shift, self.mult)
        mult = Counter(self.mult)
        for d, m in other.mult.items():
            mult[d] += m
        return CycloProduct(self.unit * other.unit, self.shift + other.shift, mult)

    __rmul__ = __mul__

    def inverse(self) -> "CycloProduct":
        return CycloProduct(Fraction(1) / self.unit, -self.shift, {d: -m for d, m in self.mult.items()})

    def __truediv__(self, other: "CycloProduct") -> "CycloProduct":
        return self * other.inverse()

    def __pow__(self, k: int) -> "CycloProduct":
        return CycloProduct(Fraction(self.unit) ** k, self.shift * k, {d: m * k for d, m in self.mult.items()})

    def is_polynomial(self) -> bool:
        return all(m > 0 for m in self.mult.values())

    def numerator_mult(self) -> dict[int, int]:
        return {d: m for d, m in self.mult.items() if m > 0}

    def denominator_mult(self) -> dict[int, int]:
        return {d: -m for d, m in self.mult.items() if m < 0}

    def expand(self) -> LaurentPoly:
        if not self.is_polynomial():
            raise ValueError("product has denominator factors")
        return expand_cyclotomic(self.mult).shift(self.shift) * self.unit

    def __eq__(self, other):
        return (isinstance(other, CycloProduct) and self.unit == other.unit
                and self.shift == other.shift and self.mult == other.mult)

    def __repr__(self):
        return f"CycloProduct({self.unit}, {self.shift}, {self.mult})"


# --------------------------------------------------------------------------

class RationalFunction:
    """Reduced quotient ``num/den`` of Laurent polynomials.

    ``den`` is monic with minimal exponent 0, and ``gcd(num, den) = 1``.
    ``_dfac``/``_nfac`` cache cyclotomic factorizations when they are known;
    they never change the value, only the speed of later operations.
    """

    __slots__ = ("num", "den", "_dfac", "_nfac")

    def __init__(self, num, den=None):
        reduced = rf_reduce(_as_poly(num), ONE if den is None else _as_poly(den))
        self.num, self.den = reduced.num, reduced.den
        self._dfac, self._nfac = reduced._dfac, reduced._nfac

    @classmethod
    def _make(cls, num: LaurentPoly, den: LaurentPoly, dfac, nfac) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.num, obj.den, obj._dfac, obj._nfac = num, den, dfac, nfac
        return obj

    @classmethod
    def from_cyclo(cls, cp: CycloProduct, cofactor: LaurentPoly | None = None) -> "RationalFunction":
        """The value ``cofactor * cp`` in lowest terms."""
        dmult = cp.denominator_mult()
        nmult = cp.numerator_mult()
        if cofactor is None:
            nfac = CycloProduct(cp.unit, cp.shift, nmult)
            return cls._make(nfac.expand(), expand_cyclotomic(dmult), dmult, nfac)
        if cofactor.is_zero():
            return cls._make(ZERO, ONE, {}, None)
        cofactor, dmult = _cancel_against(cofactor, dmult)
        num = cofactor * expand_cyclotomic(nmult).shift(cp.shift) * cp.unit
        return cls._make(num, expand_cyclotomic(dmult), dmult, None)

    @classmethod
    def from_parts(cls, num: LaurentPoly, dmult: Mapping[int, int]) -> "RationalFunction":
        """``num / prod Phi_d^m`` in lowest terms."""
        if num.is_zero():
            return cls._make(ZERO, ONE, {}, None)
        num, dmult = _cancel_against(num, dmult)
        return cls._make(num, expand_cyclotomic(dmult), dmult, None)

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RationalFunction":
        nfac = CycloProduct(p._c[0], p._low, {}) if p.is_monomial() else None
        return cls._make(p, ONE, {}, nfac)

    # -- inspection ------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def as_poly(self) -> LaurentPoly:
        if not self.is_polynomial():
            raise ValueError("rational function is not a Laurent polynomial")
        return self.num

    def den_factors(self) -> dict[int, int] | None:
        return None if self._dfac is None else dict(self._dfac)

    def evaluate(self, x) -> Fraction:
        d = self.den.evaluate(x)
        if d == 0:
            raise ZeroDivisionError("pole")
        return self.num.evaluate(x) / d

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self._dfac is not None and o._dfac is not None:
            keys = set(self._dfac) | set(o._dfac)
            lcm = {d: max(self._dfac.get(d, 0), o._dfac.get(d, 0)) for d in keys}
            cx = expand_cyclotomic({d: lcm[d] - self._dfac.get(d, 0) for d in keys})
            co = expand_cyclotomic({d: lcm[d] - o._dfac.get(d, 0) for d in keys})
            return RationalFunction.from_parts(self.num * cx + o.num * co, lcm)
        return rf_reduce(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        nfac = None if self._nfac is None else self._nfac * -1
        return RationalFunction._make(-self.num, self.den, self._dfac, nfac)

    def __sub__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RationalFunction._make(ZERO, ONE, {}, None)
        if self._dfac is not None and o._dfac is not None:
            n1, d2 = _cancel_against(self.num, o._dfac)
            n2, d1 = _cancel_against(o.num, self._dfac)
            dmult = Counter(d1)
            dmult.update(d2)
            dmult = {d: m for d, m in dmult.items() if m}
            nfac = None
            if self._nfac is not None and o._nfac is not None and n1 is self.num and n2 is o.num:
                nfac = self._nfac * o._nfac
            return RationalFunction._make(n1 * n2, expand_cyclotomic(dmult), dmult, nfac)
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        return rf_reduce(exact_div(self.num, g1) * exact_div(o.num, g2),
                         exact_div(self.den, g2) * exact_div(o.den, g1))

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        if self._nfac is not None:
            nf = self._nfac
            num = self.den.shift(-nf.shift) * (Fraction(1) / Fraction(nf.unit))
            new_nfac = None
            if self._dfac is not None:
                new_nfac = CycloProduct(Fraction(1) / Fraction(nf.unit), -nf.shift, self._dfac)
            return RationalFunction._make(num, expand_cyclotomic(nf.mult), dict(nf.mult), new_nfac)
        return rf_reduce(self.den, self.num)

    def __truediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** -k
        if k == 0:
            return RationalFunction.from_poly(ONE)
        if self._dfac is not None:
            dmult = {d: m * k for d, m in self._dfac.items()}
            nfac = None if self._nfac is None else self._nfac ** k
            return RationalFunction._make(self.num ** k, expand_cyclotomic(dmult), dmult, nfac)
        return RationalFunction._make(self.num ** k, self.den ** k, None, None)

    # -- identity --------------------------------------------------------
    def __eq__(self, other):
        o = _as_rf(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.is_one():
            return f"RationalFunction({self.num})"
        return f"RationalFunction(({self.num}) / ({self.den}))"

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"


def _as_poly(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly.const(x)


def _as_rf(x) -> RationalFunction | None:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFunction.from_poly(x)
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return RationalFunction.from_poly(LaurentPoly.const(x))
    return None


def _cancel_against(p: LaurentPoly, dmult: Mapping[int, int]) -> tuple[LaurentPoly, dict[int, int]]:
    out = {}
    for d, m in dmult.items():
        if m <= 0:
            continue
        p, k = strip_cyclotomic(p, d, m)
        if m - k:
            out[d] = m - k
    return p, out


def rf_reduce(num: LaurentPoly, den: LaurentPoly) -> RationalFunction:
    """Lowest terms by Euclidean gcd; ``den`` comes out monic with minimal exponent 0."""
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return RationalFunction._make(ZERO, ONE, {}, None)
    if not den.is_monomial():
        g = poly_gcd(num, den)
        if not g.is_one():
            num, den = exact_div(num, g), exact_div(den, g)
    num = num.shift(-den.low) * (Fraction(1) / den.leading_coeff)
    den = den.monic()
    if den.is_one():
        return RationalFunction.from_poly(num)
    return RationalFunction._make(num, den, None, None)


# --------------------------------------------------------------------------
# bivariate

class BiLaurentPoly:
    """Laurent polynomial in ``(a, q)``, stored as ``{a-exponent: LaurentPoly in q}``."""

    __slots__ = ("_rows",)

    def __init__(self, terms: Mapping[tuple[int, int], Scalar] | None = None):
        grouped: dict[int, dict[int, Scalar]] = {}
        for (i, j), v in (terms or {}).items():
            row = grouped.setdefault(i, {})
            row[j] = row.get(j, 0) + _rat(v)
        self._rows = {}
        for i in sorted(grouped):
            p = LaurentPoly(grouped[i])
            if not p.is_zero():
                self._rows[i] = p

    @classmethod
    def from_rows(cls, rows: Mapping[int, LaurentPoly]) -> "BiLaurentPoly":
        obj = cls.__new__(cls)
        obj._rows = {i: rows[i] for i in sorted(rows) if not rows[i].is_zero()}
        return obj

    @classmethod
    def from_q(cls, p: LaurentPoly) -> "BiLaurentPoly":
        return cls.from_rows({0: p})

    @classmethod
    def atom(cls, sign: int, s: int) -> "BiLaurentPoly":
        """``1 - a^sign * q^s``."""
        return cls.from_rows({0: ONE, sign: LaurentPoly.monomial(s, -1)} if sign else {0: ONE - LaurentPoly.monomial(s)})

    @property
    def rows(self) -> dict[int, LaurentPoly]:
        return dict(self._rows)

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return {(i, j): v for i, p in self._rows.items() for j, v in p.terms.items()}

    def a_span(self) -> tuple[int, int]:
        if not self._rows:
            raise ValueError("zero polynomial")
        ks = list(self._rows)
        return ks[0], ks[-1]

    def is_zero(self) -> bool:
        return not self._rows

    def __add__(self, other):
        o = _as_bi(other)
        if o is None:
            return NotImplemented
        rows = dict(self._rows)
        for i, p in o._rows.items():
            rows[i] = rows[i] + p if i in rows else p
        return BiLaurentPoly.from_rows(rows)

    __radd__ = __add__

    def __neg__(self):
        return BiLaurentPoly.from_rows({i: -p for i, p in self._rows.items()})

    def __sub__(self, other):
        o = _as_bi(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_bi(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (LaurentPoly, int, Fraction)) and not isinstance(other, bool):
            return BiLaurentPoly.from_rows({i: p * other for i, p in self._rows.items()})
        if not isinstance(other, BiLaurentPoly):
            return NotImplemented
        rows: dict[int, LaurentPoly] = {}
        for i, p in self._rows.items():
            for j, r in other._rows.items():
                prod = p * r
                rows[i + j] = rows[i + j] + prod if i + j in rows else prod
        return BiLaurentPoly.from_rows(rows)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("bipoly_pow needs k >= 0")
        result = BiLaurentPoly.from_q(ONE)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def specialize_a(self, e: int) -> LaurentPoly:
        """``a -> q^e``."""
        out = ZERO
        for i, p in self._rows.items():
            out = out + p.shift(e * i)
        return out

    def divide_atom(self, sign: int, s: int) -> "BiLaurentPoly | None":
        """Exact quotient by ``1 - a^sign q^s`` (sign = +-1), or None if it does not divide."""
        if not self._rows:
            return self
        lo, hi = self.a_span()
        c = LaurentPoly.monomial(s)
        quot: dict[int, LaurentPoly] = {}
        if sign == 1:
            prev = ZERO
            for i in range(lo, hi):
                cur = self._rows.get(i, ZERO) + c * prev
                quot[i] = cur
                prev = cur
            if not (self._rows.get(hi, ZERO) + c * prev).is_zero():
                return None
        elif sign == -1:
            prev = ZERO
            for i in range(hi, lo, -1):
                cur = self._rows.get(i, ZERO) + c * prev
                quot[i] = cur
                prev = cur
            if not (self._rows.get(lo, ZERO) + c * prev).is_zero():
                return None
        else:
            raise ValueError("sign must be +1 or -1")
        return BiLaurentPoly.from_rows(quot)

    def __eq__(self, other):
        o = _as_bi(other)
        if o is None:
            return NotImplemented
        return self._rows == o._rows

    def __hash__(self):
        return hash(tuple(self._rows.items()))

    def __repr__(self):
        if not self._rows:
            return "BiLaurentPoly(0)"
        parts = [f"a^{i}*({p})" if i else f"({p})" for i, p in self._rows.items()]
        return "BiLaurentPoly(" + " + ".join(parts) + ")"


def _as_bi(x) -> BiLaurentPoly | None:
    if isinstance(x, BiLaurentPoly):
        return x
    if isinstance(x, LaurentPoly):
        return BiLaurentPoly.from_q(x)
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return BiLaurentPoly.from_q(LaurentPoly.const(x))
    return None


def bipoly_add(x: BiLaurentPoly, y: BiLaurentPoly) -> BiLaurentPoly:
    return x + y


def bipoly_mul(x: BiLaurentPoly, y: BiLaurentPoly) -> BiLaurentPoly:
    return x * y


def bipoly_pow(x: BiLaurentPoly, k: int) -> BiLaurentPoly:
    return x ** k


def specialize_a(b: BiLaurentPoly, e: int) -> LaurentPoly:
    return b.specialize_a(e)


Atom = tuple[int, int]  # (sign, s) for 1 - a^sign q^s


class BiFraction:
    """Bivariate quotient with a factored denominator.

    value = num / (prod_atoms (1 - a^sign q^s)^m * prod_d Phi_d(q)^m)

    There is no bivariate gcd: cancellation is tried one atom (and one
    cyclotomic factor) at a time.
    """

    __slots__ = ("num", "atoms", "qden")

    def __init__(self, num: BiLaurentPoly, atoms: Mapping[Atom, int] | None = None,
                 qden: Mapping[int, int] | None = None):
        self.num = num
        self.atoms = {k: v for k, v in sorted((atoms or {}).items()) if v}
        self.qden = {k: v for k, v in sorted((qden or {}).items()) if v}
        if any(v < 0 for v in self.atoms.values()) or any(v < 0 for v in self.qden.values()):
            raise ValueError("denominator multiplicities must be nonnegative")
        for sign, s in self.atoms:
            if sign not in (1, -1):
                raise ValueError("atom sign must be +1 or -1")

    @classmethod
    def from_rf(cls, r: RationalFunction) -> "BiFraction":
        if r._dfac is None:
            raise ValueError("only cyclotomic denominators lift to BiFraction")
        return cls(BiLaurentPoly.from_q(r.num), {}, r._dfac)

    def den_poly(self) -> BiLaurentPoly:
        out = BiLaurentPoly.from_q(expand_cyclotomic(self.qden))
        for (sign, s), m in self.atoms.items():
            out = out * BiLaurentPoly.atom(sign, s) ** m
        return out

    def cleared(self) -> tuple[BiLaurentPoly, BiLaurentPoly]:
        return self.num, self.den_poly()

    def _cofactor(self, atoms: Mapping[Atom, int], qden: Mapping[int, int]) -> BiLaurentPoly:
        out = BiLaurentPoly.from_q(expand_cyclotomic({d: m - self.qden.get(d, 0) for d, m in qden.items()}))
        for (sign, s), m in atoms.items():
            extra = m - self.atoms.get((sign, s), 0)
            if extra:
                out = out * BiLaurentPoly.atom(sign, s) ** extra
        return out

    def __add__(self, other):
        o = _as_bif(other)
        if o is None:
            return NotImplemented
        atoms = {k: max(self.atoms.get(k, 0), o.atoms.get(k, 0)) for k in set(self.atoms) | set(o.atoms)}
        qden = {k: max(self.qden.get(k, 0), o.qden.get(k, 0)) for k in set(self.qden) | set(o.qden)}
        num = self.num * self._cofactor(atoms, qden) + o.num * o._cofactor(atoms, qden)
        return BiFraction(num, atoms, qden)

    __radd__ = __add__

    def __neg__(self):
        return BiFraction(-self.num, self.atoms, self.qden)

    def __sub__(self, other):
        o = _as_bif(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __mul__(self, other):
        o = _as_bif(other)
        if o is None:
            return NotImplemented
        atoms = Counter(self.atoms)
        atoms.update(o.atoms)
        qden = Counter(self.qden)
        qden.update(o.qden)
        return BiFraction(self.num * o.num, atoms, qden)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        return BiFraction(self.num ** k, {a: m * k for a, m in self.atoms.items()},
                          {d: m * k for d, m in self.qden.items()})

    def cancel(self) -> "BiFraction":
        """Cancel denominator atoms and cyclotomic factors that divide the numerator."""
        num = self.num
        atoms = dict(self.atoms)
        for atom in list(atoms):
            while atoms[atom]:
                quot = num.divide_atom(*atom)
                if quot is None:
                    break
                num = quot
                atoms[atom] -= 1
        qden = dict(self.qden)
        for d in list(qden):
            while qden[d] and all(_divisible_by_cyclotomic(p, d) for p in num._rows.values()):
                phi = cyclotomic(d)
                num = BiLaurentPoly.from_rows({i: exact_div(p, phi) for i, p in num._rows.items()})
                qden[d] -= 1
        return BiFraction(num, atoms, qden)

    def specialize_a(self, e: int) -> RationalFunction:
        den = CycloProduct(1, 0, self.qden)
        for (sign, s), m in self.atoms.items():
            exp = sign * e + s
            if exp == 0:
                raise ZeroDivisionError(f"atom (1 - a^{sign} q^{s}) vanishes at a = q^{e}")
            den = den * CycloProduct.one_minus_qpow(exp) ** m
        return RationalFunction.from_cyclo(den.inverse(), self.num.specialize_a(e))

    def __eq__(self, other):
        o = _as_bif(other)
        if o is None:
            return NotImplemented
        atoms = {k: max(self.atoms.get(k, 0), o.atoms.get(k, 0)) for k in set(self.atoms) | set(o.atoms)}
        qden = {k: max(self.qden.get(k, 0), o.qden.get(k, 0)) for k in set(self.qden) | set(o.qden)}
        return self.num * self._cofactor(atoms, qden) == o.num * o._cofactor(atoms, qden)

    __hash__ = None

    def __repr__(self):
        return f"BiFraction(num={self.num!r}, atoms={self.atoms}, qden={self.qden})"


def _as_bif(x) -> BiFraction | None:
    if isinstance(x, BiFraction):
        return x
    if isinstance(x, RationalFunction):
        if x._dfac is None:
            return None
        return BiFraction.from_rf(x)
    b = _as_bi(x)
    if b is None:
        return None
    return BiFraction(b)
