from fractions import Fraction

import pytest

from qcert.arith import ONE, BiLaurentPoly, LaurentPoly, RationalFunction, cyclotomic, poly_gcd
from qcert.congruence import (
    FAIL,
    ILL_POSED,
    PASS,
    Modulus,
    check_bivariate,
    check_congruence,
    divides_bivariate_direct,
    gcd_facts,
    half_or_full,
    is_prime,
    padic_valuation,
    param_cleared,
    param_modulus,
    refined_modulus,
    refined_rhs,
    verify_corollary,
    verify_lemma_poch_ratio,
    verify_minus_poch,
    verify_param,
    verify_qbinom_central,
    verify_refined,
    verify_weak,
    weak_modulus,
)
from qcert.qkit import cyclotomic_q2
from qcert.series import classical_sum, sum_S

q = LaurentPoly.monomial(1)
ODD = [3, 5, 7, 9, 11, 13, 15]


def test_half_or_full():
    assert half_or_full(3, "half") == half_or_full(3, "full") == 2
    assert half_or_full(9, "full") == 8
    with pytest.raises(ValueError):
        half_or_full(9, "most")


# -- check_congruence ----------------------------------------------------------

def test_reflexivity():
    r = RationalFunction(q + 3, q ** 2 + 2)
    assert check_congruence(r, r, Modulus.univariate(cyclotomic(7))).status == PASS


def test_simplifies_exactly():
    a = RationalFunction(q ** 2 - 1, q + 1)
    assert check_congruence(a, q - 1, Modulus.univariate(cyclotomic(5))).status == PASS


def test_monomial_denominators_are_units():
    a = RationalFunction(LaurentPoly.monomial(-3))
    b = a + cyclotomic(5) * 4
    assert check_congruence(a, b, Modulus.univariate(cyclotomic(5))).status == PASS


def test_ill_posed_when_denominator_meets_modulus():
    a = RationalFunction(ONE, ONE + q)
    v = check_congruence(a, 0, Modulus.univariate(q ** 2 - 1))
    assert v.status == ILL_POSED


def test_fail_reports_residual():
    v = check_congruence(q, 0, Modulus.univariate(cyclotomic(3)))
    assert v.status == FAIL and v.residual_degree_span is not None


def test_univariate_modulus_required():
    with pytest.raises(ValueError):
        check_congruence(q, q, param_modulus(3))


# -- refined and weak -------------------------------------------------------------

@pytest.mark.parametrize("n", ODD)
@pytest.mark.parametrize("choice", ["half", "full"])
def test_refined(n, choice):
    assert verify_refined(n, choice).status == PASS


@pytest.mark.parametrize("n", ODD)
@pytest.mark.parametrize("choice", ["half", "full"])
def test_weak(n, choice):
    assert verify_weak(n, choice).status == PASS


def test_refined_rejects_even():
    with pytest.raises(ValueError):
        verify_refined(4, "half")


@pytest.mark.parametrize("n", [3, 5, 7])
def test_negative_control_wrong_rhs(n):
    s = sum_S(n - 1)
    wrong = refined_rhs(n) + 1
    assert check_congruence(s, wrong, refined_modulus(n)).status == FAIL


@pytest.mark.parametrize("n", [3, 5, 7])
def test_negative_control_extra_modulus_factor(n):
    s = sum_S(n - 1)
    bigger = Modulus.univariate(refined_modulus(n).poly * cyclotomic_q2(n))
    assert check_congruence(s, refined_rhs(n), bigger).status == FAIL
    # one more [n]_{q^2} is also too much
    bigger = Modulus.univariate(refined_modulus(n).poly * cyclotomic(n))
    assert check_congruence(s, refined_rhs(n), bigger).status == FAIL


@pytest.mark.parametrize("n", [3, 5, 7])
def test_monotone_consistency(n):
    # the refined congruence implies the weak one since the weak modulus divides the refined one
    s = sum_S(n - 1)
    refined, weak = refined_modulus(n).poly, weak_modulus(n).poly
    assert (refined // weak) * weak == refined
    assert check_congruence(s, 0, weak_modulus(n)).status == PASS
    assert check_congruence(s, refined_rhs(n), weak_modulus(n)).status == PASS


# -- lemmas ----------------------------------------------------------------------

@pytest.mark.parametrize("n", ODD)
def test_lemmas(n):
    assert verify_lemma_poch_ratio(n).status == PASS
    assert verify_qbinom_central(n).status == PASS
    assert verify_minus_poch(n).status == PASS


def test_gcd_facts():
    assert gcd_facts(25, 25).status == PASS
    assert poly_gcd(ONE - q ** 3, ONE + q ** 3).is_one()
    for m in range(1, 10):
        assert poly_gcd(ONE - q, ONE + q ** m).is_one()


def test_gcd_counter_sanity():
    # even n is excluded for a reason
    assert poly_gcd(ONE - q ** 2, ONE + q) == ONE + q


# -- bivariate ---------------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 5, 7, 9, 11])
@pytest.mark.parametrize("choice", ["half", "full"])
def test_param(n, choice):
    assert verify_param(n, choice).status == PASS


def test_bivariate_trivial_cases():
    m = param_modulus(3)
    assert check_bivariate(BiLaurentPoly(), m).status == PASS
    f1 = m.factors[1][0]
    v = check_bivariate(f1 * BiLaurentPoly({(2, 1): 3, (0, 0): 1}), m)
    assert v.status == FAIL  # root check (i) passes, the other factors fail


def test_bivariate_full_modulus_passes():
    m = param_modulus(5)
    prod = BiLaurentPoly.from_q(ONE)
    for f, k in m.factors:
        prod = prod * f ** k
    assert check_bivariate(prod * BiLaurentPoly({(1, 3): 2, (-2, 0): 1}), m).status == PASS


def test_factor_decomposition_equivalence_n3():
    m = param_modulus(3)
    for choice in ("half", "full"):
        num = param_cleared(3, choice).num
        full = BiLaurentPoly.from_q(ONE)
        for f, k in m.factors:
            full = full * f ** k
        assert divides_bivariate_direct(num, full)
        assert check_bivariate(num, m).status == PASS
        # both methods must also agree on a non-multiple
        bumped = num + BiLaurentPoly({(0, 0): 1})
        assert not divides_bivariate_direct(bumped, full)
        assert check_bivariate(bumped, m).status == FAIL


def test_bivariate_ill_posed_clearing():
    n = 3
    m = param_modulus(n)
    frac = param_cleared(n, "full")
    frac_bad = type(frac)(frac.num, {(1, -2 * n): 1})   # atom vanishing at a = q^(2n)
    assert check_bivariate(frac.num, m, clearing=frac_bad).status == ILL_POSED


# -- p-adic ------------------------------------------------------------------------

def test_padic_examples():
    assert padic_valuation(243, 3) == 5
    assert padic_valuation(Fraction(343, 4096), 3) == 0
    assert padic_valuation(Fraction(1, 5), 5) == -1
    assert padic_valuation(0, 7) == float("inf")
    with pytest.raises(ValueError):
        padic_valuation(3, 9)


def test_is_prime():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("choice", ["half", "full"])
def test_corollary(p, choice):
    assert verify_corollary(p, 1, choice).status == PASS


@pytest.mark.parametrize("choice", ["half", "full"])
def test_corollary_prime_square(choice):
    assert verify_corollary(3, 2, choice).status == PASS


def test_corollary_rejects_bad_input():
    with pytest.raises(ValueError):
        verify_corollary(9, 1, "half")
    with pytest.raises(ValueError):
        verify_corollary(3, 0, "half")


def test_corollary_is_sharp_at_p3():
    # the sum exceeds the claimed precision at p = 3, but a shifted target must fail
    s = classical_sum(2)
    assert padic_valuation(s - 3 * 3 ** 4, 3) >= 5
    assert padic_valuation(s - 3 * 3 ** 4 - 3 ** 4, 3) < 5
