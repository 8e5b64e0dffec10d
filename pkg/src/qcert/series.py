"""Truncated q-sums, their closed forms, and the auxiliary polynomials.

All truncated sums take an inclusive upper index ``M``: ``sum_S(M)`` is
``sum_{k=0}^{M}``, so the classical notation ``S(n)`` is ``sum_S(n - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .arith import (
    ONE,
    BiFraction,
    BiLaurentPoly,
    CycloProduct,
    LaurentPoly,
    RationalFunction,
    exact_div,
)
from .qkit import (
    FactorProduct,
    factor_limit_q1,
    minus_qpoch_factors,
    qbinom_factors,
    qbinom,
    qint,
    qint_factors,
    qpoch_factors,
    qpoch_param,
    qpoch_param_atoms,
)

Q = LaurentPoly.monomial(1)


def _mono(e: int, c=1) -> LaurentPoly:
    return LaurentPoly.monomial(e, c)


def _require_odd(n: int) -> None:
    if n % 2 == 0 or n <= 1:
        raise ValueError(f"n must be an odd integer > 1, got {n}")


@dataclass(frozen=True)
class SumSpec:
    upper: int
    parametric: bool = False

    def __post_init__(self):
        if self.upper < 0:
            raise ValueError("upper summation index must be >= 0")

    def evaluate(self):
        return sum_S_param(self.upper) if self.parametric else sum_S(self.upper)


# -- main family ---------------------------------------------------------------

def summand_factors(k: int) -> CycloProduct:
    """The k-th summand as a product of cyclotomic factors."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = qint_factors(4 * k - 1, 2) * qint_factors(4 * k - 1, 1) ** 2
    out = out * qpoch_factors(-2, 4, k) ** 4 / qpoch_factors(4, 4, k) ** 4
    return out * CycloProduct(1, 4 * k)


def summand(k: int) -> RationalFunction:
    return RationalFunction.from_cyclo(summand_factors(k))


@lru_cache(maxsize=None)
def sum_S(M: int) -> RationalFunction:
    """``sum_{k=0}^{M} summand(k)``, reduced after each addition."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    if M == 0:
        return summand(0)
    return sum_S(M - 1) + summand(M)


def f_numerator(n: int) -> LaurentPoly:
    """``q^5 + q^(4n+1) (q^(4n-2) - q^2 - 1)``."""
    return _mono(5) + _mono(4 * n + 1) * (_mono(4 * n - 2) - _mono(2) - 1)


@lru_cache(maxsize=None)
def f_poly(n: int) -> LaurentPoly:
    if n < 1:
        raise ValueError("f_n needs n >= 1")
    two_num = f_numerator(n) * 2
    return exact_div(two_num, (_mono(2) - 1) ** 2) - _mono(4 * n)


def closed_T(n: int) -> RationalFunction:
    if n < 1:
        raise ValueError("closed form needs n >= 1")
    cp = CycloProduct.one_plus_qpow(2 * n) ** 4 * qint_factors(n, 2) ** 4
    cp = cp * qpoch_factors(-2, 4, n) ** 4 / qpoch_factors(4, 4, n) ** 4
    return RationalFunction.from_cyclo(cp, f_poly(n))


def induction_residual(n: int) -> LaurentPoly:
    if n < 1:
        raise ValueError("n must be >= 1")
    one = ONE
    lhs = (one - _mono(4 * n)) ** 4 * f_poly(n)
    lhs = lhs + ((one - _mono(2 * (4 * n - 1))) * (one - _mono(4 * n - 1)) ** 2
                 * (one - Q) * (one + Q) ** 3 * _mono(4 * n))
    rhs = (one - _mono(4 * n - 2)) ** 4 * f_poly(n + 1)
    return lhs - rhs


def restated_rhs(n: int) -> RationalFunction:
    """The same closed form written with ``[2n, n]_{q^2}`` and ``(-q^2; q^2)_n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cp = CycloProduct.one_plus_qpow(2 * n) ** 4 * qint_factors(n, 2) ** 4
    cp = cp * CycloProduct.one_minus_qpow(2) ** 4  # (q^2 - 1)^4 = (1 - q^2)^4
    # q^2 - q^(4n) = q^2 (1 - q^(4n-2))
    cp = cp / (CycloProduct(1, 2) * CycloProduct.one_minus_qpow(4 * n - 2)) ** 4
    cp = cp / minus_qpoch_factors(2, n) ** 8
    cp = cp * qbinom_factors(2 * n, n, 2) ** 4
    return RationalFunction.from_cyclo(cp, f_poly(n))


def halfcase_rhs(n: int) -> RationalFunction:
    """Closed form of ``sum_S((n+1)/2)`` for odd n > 1."""
    _require_odd(n)
    h = (n + 1) // 2
    cp = qint_factors(n, 2) ** 4 * qpoch_factors(-2, 4, h) ** 4 / qpoch_factors(4, 4, h) ** 4
    return RationalFunction.from_cyclo(cp, f_poly((n + 3) // 2))


# -- parametric family (parameter a) -----------------------------------------

def summand_param(k: int) -> BiFraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    qpart = qint_factors(4 * k - 1, 2) * qint_factors(4 * k - 1, 1) ** 2
    qpart = qpart * qpoch_factors(-2, 4, k) ** 2 / qpoch_factors(4, 4, k) ** 2
    qpart = qpart * CycloProduct(1, 4 * k)
    numq = CycloProduct(qpart.unit, qpart.shift, qpart.numerator_mult()).expand()
    num = qpoch_param(-1, -2, 4, k) * qpoch_param(1, -2, 4, k) * numq
    atoms = qpoch_param_atoms(-1, 4, 4, k) + qpoch_param_atoms(1, 4, 4, k)
    return BiFraction(num, atoms, qpart.denominator_mult())


@lru_cache(maxsize=None)
def sum_S_param(M: int) -> BiFraction:
    if M < 0:
        raise ValueError("M must be nonnegative")
    if M == 0:
        return summand_param(0)
    return sum_S_param(M - 1) + summand_param(M)


def f_param_a_part(n: int) -> LaurentPoly:
    """``(q^(8n-5) - 2q^(4n-1) + 2q^(4n-2) - 2q^(4n-3) + q) / (q - 1)^2``, division asserted exact."""
    top = (_mono(8 * n - 5) - _mono(4 * n - 1, 2) + _mono(4 * n - 2, 2)
           - _mono(4 * n - 3, 2) + Q)
    return exact_div(top, (Q - 1) ** 2)


@lru_cache(maxsize=None)
def f_param(n: int) -> BiLaurentPoly:
    if n < 2:
        raise ValueError("parametric f_n needs n > 1")
    terms: dict[int, int] = {0: 2}
    for i in range(1, 4 * n - 5):
        terms[i] = terms.get(i, 0) + 2 * i
        terms[8 * n - 6 - i] = terms.get(8 * n - 6 - i, 0) + 2 * i
    qonly = LaurentPoly(terms)
    qonly = qonly + _mono(4 * n - 4, 8 * n - 10) * (ONE + _mono(2))
    qonly = qonly + _mono(4 * n - 5, 8 * n - 11) * (ONE + _mono(4))
    qonly = qonly + _mono(4 * n - 3, 8 * n - 8) + _mono(8 * n - 6, 2)
    apart = f_param_a_part(n)
    # -(a^2 + 1)/a * apart = -(a + a^-1) * apart
    return BiLaurentPoly.from_rows({-1: -apart, 0: qonly, 1: -apart})


def closed_param_T(n: int) -> BiFraction:
    if n < 2:
        raise ValueError("parametric closed form needs n > 1")
    qpart = CycloProduct(1, 1) * CycloProduct.one_plus_qpow(2 * n) ** 2 * qint_factors(n, 2) ** 2
    qpart = qpart * qbinom_factors(2 * n, n, 2) ** 2 * CycloProduct.one_minus_qpow(-2) ** 2
    qpart = qpart / CycloProduct.one_minus_qpow(4 * n - 2) ** 2 / minus_qpoch_factors(2, n) ** 4
    numq = CycloProduct(qpart.unit, qpart.shift, qpart.numerator_mult()).expand()
    num = qpoch_param(-1, 6, 4, n - 2) * qpoch_param(1, 6, 4, n - 2) * f_param(n) * numq
    atoms = qpoch_param_atoms(1, 4, 4, n - 1) + qpoch_param_atoms(-1, 4, 4, n - 1)
    return BiFraction(num, atoms, qpart.denominator_mult())


def halfcase_param_relation(n: int) -> LaurentPoly:
    """Cross-multiplied difference of the q-binomial relation used for the half truncation.

    lhs = [(n+3)/2]^2 [n+3, (n+3)/2]^2 / (1 - q^(2n+4))^2
    rhs = [n]^2 [n-1, (n-1)/2]^2 (1 + q^(n+3))^2 (1 + q^(n+1))^2 / (1 - q^(n+1))^2
    (all brackets in base q^2); returns lhs_num*rhs_den - rhs_num*lhs_den.
    """
    _require_odd(n)
    h = (n + 3) // 2
    lhs_num = qint(h, 2) ** 2 * qbinom(n + 3, h, 2) ** 2
    lhs_den = (ONE - _mono(2 * n + 4)) ** 2
    rhs_num = (qint(n, 2) ** 2 * qbinom(n - 1, (n - 1) // 2, 2) ** 2
               * (ONE + _mono(n + 3)) ** 2 * (ONE + _mono(n + 1)) ** 2)
    rhs_den = (ONE - _mono(n + 1)) ** 2
    return lhs_num * rhs_den - rhs_num * lhs_den


# -- classical (q -> 1) ----------------------------------------------------------

def classical_summand(k: int) -> Fraction:
    return Fraction((4 * k - 1) ** 3 * comb(2 * k, k) ** 4, 256 ** k * (2 * k - 1) ** 4)


def classical_sum(M: int) -> Fraction:
    if M < 0:
        raise ValueError("M must be nonnegative")
    return sum((classical_summand(k) for k in range(M + 1)), Fraction(0))


def classical_closed(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(16 * n ** 4 * (8 * n * n - 12 * n + 3) * comb(2 * n, n) ** 4,
                    256 ** n * (2 * n - 1) ** 4)


def summand_factor_product(k: int) -> FactorProduct:
    """The k-th summand as ``prod (1 - q^m)^mult`` (the q^(4k) monomial tends to 1)."""
    fp = FactorProduct.from_counts([(2 * (4 * k - 1), 1), (2, -1), (4 * k - 1, 2), (1, -2)])
    ratio = FactorProduct.qpoch(-2, 4, k) * FactorProduct.qpoch(4, 4, k).inverse()
    return fp * ratio ** 4


def summand_limit_q1(k: int) -> Fraction:
    """q -> 1 limit of ``summand(k)`` through :func:`factor_limit_q1`."""
    if k == 0:
        return summand(0).evaluate(1)
    return factor_limit_q1(summand_factor_product(k))
