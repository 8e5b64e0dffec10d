"""q-integers, q-shifted factorials, Gaussian binomials, cyclotomic polynomials.

Every builder returning a :class:`LaurentPoly` has a ``*_factors`` twin that
returns the same quantity as a :class:`CycloProduct`; the series module uses
the factored forms so its rational functions reduce without polynomial gcds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .arith import (
    ONE,
    ZERO,
    BiLaurentPoly,
    CycloProduct,
    LaurentPoly,
    cyclotomic,
    exact_div,
)

__all__ = [
    "qint", "qint_factors", "qpoch", "qpoch_factors", "qpoch_param", "qpoch_param_atoms",
    "minus_qpoch", "minus_qpoch_factors", "qbinom", "qbinom_factors", "cyclotomic",
    "cyclotomic_q2", "FactorProduct", "factor_limit_q1", "central_binom_limit",
]


def qint(n: int, e: int = 1) -> LaurentPoly:
    """``(1 - q^(e n)) / (1 - q^e)``; negative n gives a Laurent polynomial."""
    if e <= 0:
        raise ValueError("q-integer base exponent must be positive")
    if n > 0:
        return LaurentPoly({e * j: 1 for j in range(n)})
    if n == 0:
        return ZERO
    return LaurentPoly({e * j: -1 for j in range(n, 0)})


def qint_factors(n: int, e: int = 1) -> CycloProduct:
    if n == 0:
        raise ValueError("[0] is zero and has no factorization")
    if e <= 0:
        raise ValueError("q-integer base exponent must be positive")
    return CycloProduct.one_minus_qpow(e * n) / CycloProduct.one_minus_qpow(e)


def qpoch(s: int, e: int, k: int) -> LaurentPoly:
    """``(q^s; q^e)_k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = ONE
    for j in range(k):
        out = out * (ONE - LaurentPoly.monomial(s + e * j))
    return out


def qpoch_factors(s: int, e: int, k: int) -> CycloProduct:
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = CycloProduct()
    for j in range(k):
        out = out * CycloProduct.one_minus_qpow(s + e * j)
    return out


def qpoch_param(sign: int, s: int, e: int, k: int) -> BiLaurentPoly:
    """``(a^sign q^s; q^e)_k`` for sign = +1 or -1."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    out = BiLaurentPoly.from_q(ONE)
    for j in range(k):
        out = out * BiLaurentPoly.atom(sign, s + e * j)
    return out


def qpoch_param_atoms(sign: int, s: int, e: int, k: int) -> Counter:
    """Same product as a multiset of ``(sign, exponent)`` atoms."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return Counter((sign, s + e * j) for j in range(k))


def minus_qpoch(e: int, k: int) -> LaurentPoly:
    """``(-q^e; q^e)_k = prod_{j=1..k} (1 + q^(e j))``."""
    out = ONE
    for j in range(1, k + 1):
        out = out * (ONE + LaurentPoly.monomial(e * j))
    return out


def minus_qpoch_factors(e: int, k: int) -> CycloProduct:
    out = CycloProduct()
    for j in range(1, k + 1):
        out = out * CycloProduct.one_plus_qpow(e * j)
    return out


def qbinom(n: int, k: int, e: int = 1) -> LaurentPoly:
    """Gaussian binomial in base ``q^e``; zero outside ``0 <= k <= n``."""
    if k < 0 or k > n:
        return ZERO
    num = qpoch(e, e, n)
    den = qpoch(e, e, k) * qpoch(e, e, n - k)
    return exact_div(num, den)


def qbinom_factors(n: int, k: int, e: int = 1) -> CycloProduct:
    if k < 0 or k > n:
        raise ValueError("q-binomial is zero outside 0 <= k <= n")
    cp = qpoch_factors(e, e, n) / (qpoch_factors(e, e, k) * qpoch_factors(e, e, n - k))
    assert cp.is_polynomial()
    return cp


def cyclotomic_q2(n: int) -> LaurentPoly:
    return cyclotomic(n).substitute(2)


def cyclotomic_q2_factors(n: int) -> dict[int, int]:
    """``Phi_n(q^2)`` as a product of ``Phi_d(q)``: ``Phi_2n`` for even n, ``Phi_n Phi_2n`` for odd n."""
    if n % 2:
        return {n: 1, 2 * n: 1}
    return {2 * n: 1}


@dataclass(frozen=True)
class FactorProduct:
    """``prod (1 - q^m)^mult`` over nonzero m."""

    factors: tuple[tuple[int, int], ...] = field(default=())

    @classmethod
    def from_counts(cls, counts) -> "FactorProduct":
        merged: Counter = Counter()
        for m, k in (counts.items() if hasattr(counts, "items") else counts):
            if m == 0:
                raise ValueError("factor 1 - q^0 is zero")
            merged[m] += k
        return cls(tuple(sorted((m, k) for m, k in merged.items() if k)))

    def __mul__(self, other: "FactorProduct") -> "FactorProduct":
        return FactorProduct.from_counts(list(self.factors) + list(other.factors))

    def __pow__(self, k: int) -> "FactorProduct":
        return FactorProduct.from_counts([(m, c * k) for m, c in self.factors])

    def inverse(self) -> "FactorProduct":
        return self ** -1

    def balance(self) -> int:
        return sum(k for _, k in self.factors)

    def to_cyclo(self) -> CycloProduct:
        out = CycloProduct()
        for m, k in self.factors:
            out = out * CycloProduct.one_minus_qpow(m) ** k
        return out

    @classmethod
    def qpoch(cls, s: int, e: int, k: int) -> "FactorProduct":
        return cls.from_counts([(s + e * j, 1) for j in range(k)])


def factor_limit_q1(fp: FactorProduct) -> Fraction:
    """Exact ``q -> 1`` limit of a balanced product; ``1 - q^m ~ m (1 - q)`` near 1."""
    if fp.balance() != 0:
        raise ValueError(f"unbalanced product (net order {fp.balance()} of 1-q): pole or zero at q=1")
    out = Fraction(1)
    for m, k in fp.factors:
        out *= Fraction(m) ** k
    return out


def central_binom_limit(k: int) -> Fraction:
    """``-C(2k, k) / (4^k (2k - 1))``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return Fraction(-comb(2 * k, k), 4 ** k * (2 * k - 1))
