from fractions import Fraction

import pytest
import sympy as sp

from qcert.arith import ONE, LaurentPoly, RationalFunction
from qcert.series import (
    SumSpec,
    classical_closed,
    classical_sum,
    classical_summand,
    closed_T,
    closed_param_T,
    f_param,
    f_poly,
    halfcase_param_relation,
    halfcase_rhs,
    induction_residual,
    restated_rhs,
    sum_S,
    sum_S_param,
    summand,
    summand_limit_q1,
    summand_param,
)

Q = sp.Symbol("q")
A = sp.Symbol("a")


def to_sympy(r):
    """Convert a LaurentPoly or RationalFunction into a sympy expression in q."""
    if isinstance(r, RationalFunction):
        return to_sympy(r.num) / to_sympy(r.den)
    return sum((sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.Integer(c)) * Q ** e
               for e, c in r.terms.items()) if not r.is_zero() else sp.Integer(0)


def sp_qint(n, e):
    return (1 - Q ** (e * n)) / (1 - Q ** e)


def sp_poch(x, e, k):
    out = sp.Integer(1)
    for j in range(k):
        out *= 1 - x * Q ** (e * j)
    return out


def sp_summand(k):
    return (sp_qint(4 * k - 1, 2) * sp_qint(4 * k - 1, 1) ** 2 * sp_poch(Q ** -2, 4, k) ** 4
            / sp_poch(Q ** 4, 4, k) ** 4 * Q ** (4 * k))


def sp_f(n):
    num = Q ** 5 + Q ** (4 * n + 1) * (Q ** (4 * n - 2) - Q ** 2 - 1)
    return 2 * num / (Q ** 2 - 1) ** 2 - Q ** (4 * n)


def sp_T(n):
    return ((Q ** (2 * n) + 1) ** 4 * sp_qint(n, 2) ** 4 * sp_poch(Q ** -2, 4, n) ** 4
            / sp_poch(Q ** 4, 4, n) ** 4 * sp_f(n))


def equal_sym(ours, expr):
    return sp.cancel(sp.together(to_sympy(ours) - expr)) == 0


# -- small values ----------------------------------------------------------------

def test_first_values():
    minus_q4 = RationalFunction(LaurentPoly.monomial(-4, -1))
    assert summand(0) == minus_q4
    assert sum_S(0) == minus_q4
    assert closed_T(1) == minus_q4
    assert restated_rhs(1) == minus_q4
    assert f_poly(1) == LaurentPoly.monomial(4, -1)


def test_bad_arguments():
    for bad in (lambda: sum_S(-1), lambda: f_poly(0), lambda: closed_T(0), lambda: halfcase_rhs(4),
                lambda: f_param(1), lambda: halfcase_param_relation(6), lambda: SumSpec(-1)):
        with pytest.raises(ValueError):
            bad()


def test_sumspec():
    assert SumSpec(3).evaluate() == sum_S(3)
    assert SumSpec(2, parametric=True).evaluate() == sum_S_param(2)


# -- independent oracle --------------------------------------------------------

@pytest.mark.parametrize("k", range(0, 4))
def test_summand_against_sympy(k):
    assert equal_sym(summand(k), sp_summand(k))


@pytest.mark.parametrize("n", range(1, 5))
def test_closed_form_against_sympy(n):
    assert equal_sym(closed_T(n), sp_T(n))
    assert equal_sym(f_poly(n), sp_f(n))


def test_sympy_identity_small():
    for n in (1, 2, 3):
        lhs = sum(sp_summand(k) for k in range(n))
        assert sp.cancel(sp.together(lhs - sp_T(n))) == 0


# -- identities ----------------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 21))
def test_main_identity(n):
    assert sum_S(n - 1) == closed_T(n)


@pytest.mark.parametrize("n", range(1, 51))
def test_induction_relation(n):
    assert induction_residual(n).is_zero()


@pytest.mark.parametrize("n", range(1, 31))
def test_f_at_one(n):
    # f_n(1) = 8n^2 - 12n + 3 links the q-form with the classical closed form
    assert f_poly(n).evaluate(1) == 8 * n * n - 12 * n + 3


@pytest.mark.parametrize("n", range(1, 13))
def test_restated_rhs(n):
    assert restated_rhs(n) == closed_T(n)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11])
def test_halfcase(n):
    assert halfcase_rhs(n) == sum_S((n + 1) // 2)
    assert halfcase_rhs(n) == closed_T((n + 3) // 2)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11])
def test_halfcase_param_relation(n):
    assert halfcase_param_relation(n).is_zero()


# -- parametric family ----------------------------------------------------------

def test_summand_param_examples():
    assert summand_param(0).specialize_a(0) == summand(0)
    for k in range(7):
        assert summand_param(k).specialize_a(0) == summand(k)
    s1 = summand_param(1)
    assert dict(s1.atoms) == {(1, 4): 1, (-1, 4): 1}


@pytest.mark.parametrize("n", range(2, 9))
def test_f_param_shape(n):
    f = f_param(n)
    assert f.a_span() == (-1, 1)
    assert f.rows[1] == f.rows[-1]


@pytest.mark.parametrize("n", range(2, 9))
def test_parametric_identity(n):
    rhs = closed_param_T(n)
    assert sum_S_param(n - 1) == rhs
    assert rhs.specialize_a(0) == closed_T(n)


def test_parametric_against_sympy_n2():
    def sp_poch_a(x, e, k):
        out = sp.Integer(1)
        for j in range(k):
            out *= 1 - x * Q ** (e * j)
        return out

    def sp_summand_a(k):
        return (sp_qint(4 * k - 1, 2) * sp_qint(4 * k - 1, 1) ** 2 * sp_poch_a(Q ** -2, 4, k) ** 2
                * sp_poch_a(Q ** -2 / A, 4, k) * sp_poch_a(A * Q ** -2, 4, k)
                / (sp_poch_a(Q ** 4, 4, k) ** 2 * sp_poch_a(Q ** 4 / A, 4, k) * sp_poch_a(A * Q ** 4, 4, k))
                * Q ** (4 * k))

    num, den = sum_S_param(1).cleared()
    ours = sum(sp.Rational(c.numerator, c.denominator) * A ** i * Q ** j if isinstance(c, Fraction)
               else c * A ** i * Q ** j for (i, j), c in num.terms.items())
    dens = sum((c * A ** i * Q ** j for (i, j), c in den.terms.items()), sp.Integer(0))
    assert sp.cancel(sp.together(ours / dens - sp_summand_a(0) - sp_summand_a(1))) == 0


# -- classical -------------------------------------------------------------------

def test_classical_examples():
    assert classical_sum(0) == -1
    assert classical_sum(1) == Fraction(11, 16)
    assert classical_closed(1) == -1
    assert classical_closed(2) == Fraction(11, 16)
    assert classical_closed(3) == classical_sum(2)


@pytest.mark.parametrize("n", range(1, 31))
def test_classical_identity(n):
    assert classical_sum(n - 1) == classical_closed(n)


@pytest.mark.parametrize("k", range(0, 13))
def test_q_to_one_bridge(k):
    assert summand_limit_q1(k) == classical_summand(k)


def test_sum_limits_match_classical():
    # the reduced closed form is regular at q = 1 and its value is the classical one
    for n in range(1, 8):
        assert closed_T(n).evaluate(1) == classical_closed(n)
        assert sum_S(n - 1).evaluate(1) == classical_sum(n - 1)
