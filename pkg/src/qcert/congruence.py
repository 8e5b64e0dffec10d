"""Congruence semantics and one verification entry point per stated result.

Convention: for rational functions ``A = P_A/Q_A`` and ``B = P_B/Q_B`` in
lowest terms, ``A == B (mod m)`` means ``m | P_A Q_B - P_B Q_A`` and is only
meaningful when ``gcd(Q_A Q_B, m) = 1``.  A shared factor gives the verdict
``ill-posed`` instead of a pass or a fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import series
from .arith import (
    ONE,
    BiFraction,
    BiLaurentPoly,
    LaurentPoly,
    RationalFunction,
    _divisible_by_cyclotomic,
    exact_div,
    poly_divrem,
    poly_gcd,
)
from .qkit import (
    FactorProduct,
    central_binom_limit,
    cyclotomic_q2,
    factor_limit_q1,
    minus_qpoch,
    qbinom,
    qint,
    qpoch_factors,
)

PASS, FAIL, ILL_POSED = "pass", "fail", "ill-posed"
M_CHOICES = ("half", "full")


@dataclass(frozen=True)
class Modulus:
    kind: str
    description: str
    poly: LaurentPoly | None = None
    factors: tuple[tuple[BiLaurentPoly, int], ...] = ()

    def __post_init__(self):
        if self.kind == "univariate":
            if self.poly is None or self.poly.is_zero():
                raise ValueError("univariate modulus must be a nonzero polynomial")
        elif self.kind == "bivariate-factored":
            if not self.factors:
                raise ValueError("bivariate modulus needs factors")
        else:
            raise ValueError(f"unknown modulus kind {self.kind!r}")

    @classmethod
    def univariate(cls, poly: LaurentPoly, description: str = "") -> "Modulus":
        return cls("univariate", description or str(poly), poly=poly)


@dataclass(frozen=True)
class Verdict:
    status: str
    notes: str = ""
    modulus: str = ""
    residual_degree_span: tuple[int, int] | None = None
    quotient_degree: int | None = None
    degrees: tuple[int, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _combine(verdicts: list[Verdict], modulus: str = "", notes: str = "") -> Verdict:
    for status in (ILL_POSED, FAIL):
        bad = [v for v in verdicts if v.status == status]
        if bad:
            return Verdict(status, "; ".join(filter(None, [notes] + [v.notes for v in bad])), modulus,
                           residual_degree_span=bad[0].residual_degree_span)
    degs = tuple(d for v in verdicts for d in v.degrees)
    return Verdict(PASS, notes, modulus, degrees=degs)


def half_or_full(n: int, choice: str) -> int:
    if choice == "half":
        return (n + 1) // 2
    if choice == "full":
        return n - 1
    raise ValueError(f"M choice must be 'half' or 'full', got {choice!r}")


def _require_odd(n: int) -> None:
    if n % 2 == 0 or n <= 1:
        raise ValueError(f"n must be an odd integer > 1, got {n}")


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction(x)


def _coprime(r: RationalFunction, m: LaurentPoly) -> bool:
    factors = r.den_factors()
    if factors is not None:
        return not any(_divisible_by_cyclotomic(m, d) for d in factors)
    return poly_gcd(r.den, m).is_one()


# -- univariate --------------------------------------------------------------

def check_congruence(a, b, m: Modulus) -> Verdict:
    if m.kind != "univariate":
        raise ValueError("check_congruence needs a univariate modulus")
    a, b = _as_rf(a), _as_rf(b)
    mod = m.poly
    if not (_coprime(a, mod) and _coprime(b, mod)):
        return Verdict(ILL_POSED, "a denominator shares a factor with the modulus", m.description)
    diff = a.num * b.den - b.num * a.den
    quot, rem = poly_divrem(diff, mod)
    if not rem.is_zero():
        return Verdict(FAIL, f"nonzero remainder with {rem.nnz()} terms", m.description,
                       residual_degree_span=rem.degree_span())
    # witness: re-multiplying the quotient must give back the difference
    if quot * mod != diff:
        raise ArithmeticError("division witness does not reproduce the difference")
    qdeg = 0 if quot.is_zero() else quot.high - quot.low
    return Verdict(PASS, "", m.description, quotient_degree=qdeg,
                   degrees=(0 if diff.is_zero() else diff.high - diff.low,))


def refined_modulus(n: int) -> Modulus:
    return Modulus.univariate(qint(n, 2) ** 4 * cyclotomic_q2(n), f"[{n}]_{{q^2}}^4 Phi_{n}(q^2)")


def weak_modulus(n: int) -> Modulus:
    return Modulus.univariate(qint(n, 2) * cyclotomic_q2(n) ** 3, f"[{n}]_{{q^2}} Phi_{n}(q^2)^3")


def phi_q2_modulus(n: int) -> Modulus:
    return Modulus.univariate(cyclotomic_q2(n), f"Phi_{n}(q^2)")


def refined_rhs(n: int) -> RationalFunction:
    """``(2q + 2q^-1 - 1) [n]_{q^2}^4``."""
    poly = LaurentPoly({1: 2, -1: 2, 0: -1}) * qint(n, 2) ** 4
    return RationalFunction.from_poly(poly)


def verify_refined(n: int, M_choice: str) -> Verdict:
    _require_odd(n)
    M = half_or_full(n, M_choice)
    v = check_congruence(series.sum_S(M), refined_rhs(n), refined_modulus(n))
    # the source writes Phi(q^2) without a subscript; read as Phi_n(q^2)
    return _with_notes(v, f"M={M}; modulus Phi(q^2) read as Phi_n(q^2)")


def verify_weak(n: int, M_choice: str) -> Verdict:
    _require_odd(n)
    M = half_or_full(n, M_choice)
    v = check_congruence(series.sum_S(M), 0, weak_modulus(n))
    return _with_notes(v, f"M={M}")


def _with_notes(v: Verdict, extra: str) -> Verdict:
    notes = "; ".join(filter(None, [extra, v.notes]))
    return Verdict(v.status, notes, v.modulus, v.residual_degree_span, v.quotient_degree, v.degrees)


# -- lemmas ----------------------------------------------------------------------

def verify_lemma_poch_ratio(n: int) -> Verdict:
    _require_odd(n)
    h = (n + 1) // 2
    ratio = RationalFunction.from_cyclo(qpoch_factors(-2, 4, h) / qpoch_factors(4, 4, h))
    target = LaurentPoly.monomial((n - 1) ** 2 // 2 - 2, (-1) ** h)
    return check_congruence(ratio, target, phi_q2_modulus(n))


def verify_qbinom_central(n: int) -> Verdict:
    _require_odd(n)
    m = phi_q2_modulus(n)
    central = qbinom(2 * n, n, 2)
    factored = (ONE + LaurentPoly.monomial(2 * n)) * qbinom(2 * n - 1, n - 1, 2)
    exact = Verdict(PASS) if central == factored else Verdict(FAIL, "factorization identity fails")
    mid = LaurentPoly.monomial(n * (n - 1), 2 * (-1) ** (n - 1))
    first = check_congruence(central, mid, m)
    second = check_congruence(mid, 2, m)
    return _combine([exact, first, second], m.description)


def qbinom_factorization_holds(n: int) -> bool:
    """``[2n, n]_{q^2} = (1 + q^{2n}) [2n-1, n-1]_{q^2}``, valid for every n >= 1."""
    return qbinom(2 * n, n, 2) == (ONE + LaurentPoly.monomial(2 * n)) * qbinom(2 * n - 1, n - 1, 2)


def verify_minus_poch(n: int) -> Verdict:
    _require_odd(n)
    m = phi_q2_modulus(n)
    full = minus_qpoch(2, n)
    split = (ONE + LaurentPoly.monomial(2 * n)) * minus_qpoch(2, n - 1)
    exact = Verdict(PASS) if full == split else Verdict(FAIL, "factorization identity fails")
    return _combine([exact, check_congruence(full, 2, m)], m.description)


def gcd_facts(n_max: int, m_max: int) -> Verdict:
    if n_max < 1 or m_max < 1:
        raise ValueError("bounds must be >= 1")
    bad = []
    for n in range(1, n_max + 1, 2):
        one_minus = ONE - LaurentPoly.monomial(n)
        for m in range(1, m_max + 1):
            if not poly_gcd(one_minus, ONE + LaurentPoly.monomial(m)).is_one():
                bad.append(f"gcd(1-q^{n}, 1+q^{m})")
        if not poly_gcd(qint(n), qint(2 * n - 1)).is_one():
            bad.append(f"gcd([{n}], [{2 * n - 1}])")
    if bad:
        return Verdict(FAIL, ", ".join(bad[:5]), "gcd = 1")
    return Verdict(PASS, f"odd n <= {n_max}, m <= {m_max}", "gcd = 1")


# -- identities as verdicts (used by the CLI) ---------------------------------

def _equal(lhs, rhs, what: str) -> Verdict:
    if lhs == rhs:
        return Verdict(PASS, what)
    return Verdict(FAIL, f"{what}: sides differ")


def _rf_degrees(r: RationalFunction) -> tuple[int, ...]:
    span = 0 if r.num.is_zero() else r.num.high - r.num.low
    return (span, r.den.high)


def verify_identity(n: int) -> Verdict:
    lhs = series.sum_S(n - 1)
    v = _equal(lhs, series.closed_T(n), f"sum_{{k<={n - 1}}} = T({n})")
    return Verdict(v.status, v.notes, "identity", degrees=_rf_degrees(lhs))


def verify_identity_param(n: int) -> Verdict:
    lhs = series.sum_S_param(n - 1)
    rhs = series.closed_param_T(n)
    main = _equal(lhs, rhs, "parametric sum = closed form")
    spec = _equal(rhs.specialize_a(0), series.closed_T(n), "a=1 specialization")
    return _combine([main, spec], "identity", f"n={n}")


def verify_induction(n: int) -> Verdict:
    res = series.induction_residual(n)
    if res.is_zero():
        return Verdict(PASS, "", "identity")
    return Verdict(FAIL, "nonzero residual", "identity", residual_degree_span=res.degree_span())


def verify_restated(n: int) -> Verdict:
    return _equal(series.restated_rhs(n), series.closed_T(n), "q-binomial restatement")


def verify_halfcase(n: int) -> Verdict:
    _require_odd(n)
    return _equal(series.halfcase_rhs(n), series.sum_S((n + 1) // 2), "half-truncated closed form")


def verify_halfcase_param(n: int) -> Verdict:
    res = series.halfcase_param_relation(n)
    if res.is_zero():
        return Verdict(PASS, "q-binomial relation")
    return Verdict(FAIL, "q-binomial relation residual", residual_degree_span=res.degree_span())


def verify_classical(n: int) -> Verdict:
    return _equal(series.classical_sum(n - 1), series.classical_closed(n), "classical identity")


def verify_limit(k: int) -> Verdict:
    """Pochhammer-ratio limit and the full summand limit at q = 1."""
    ratio = FactorProduct.qpoch(-2, 4, k) * FactorProduct.qpoch(4, 4, k).inverse()
    first = _equal(factor_limit_q1(ratio), central_binom_limit(k), "Pochhammer ratio limit")
    second = _equal(series.summand_limit_q1(k), series.classical_summand(k), "summand limit")
    return _combine([first, second], "q -> 1")


# -- bivariate -------------------------------------------------------------------

def param_modulus(n: int) -> Modulus:
    qn = BiLaurentPoly.from_q(qint(n, 2))
    f1 = BiLaurentPoly.atom(1, 2 * n)                                  # 1 - a q^(2n)
    f2 = BiLaurentPoly.from_rows({1: ONE, 0: LaurentPoly.monomial(2 * n, -1)})  # a - q^(2n)
    return Modulus("bivariate-factored", f"[{n}]_{{q^2}}^2 (1 - a q^{2 * n}) (a - q^{2 * n})",
                   factors=((qn, 2), (f1, 1), (f2, 1)))


def _linear_root(f: BiLaurentPoly) -> int | None:
    """For ``c0 q^j0 a^i + c1 q^j1 a^(i+1)`` with root ``a = q^e``, return e."""
    rows = f.rows
    if len(rows) != 2:
        return None
    (i0, p0), (i1, p1) = sorted(rows.items())
    if i1 != i0 + 1 or not (p0.is_monomial() and p1.is_monomial()):
        return None
    if p0.leading_coeff != -p1.leading_coeff:
        return None
    return p0.low - p1.low


def check_bivariate(num: BiLaurentPoly, m: Modulus, clearing: BiFraction | None = None) -> Verdict:
    """Divisibility of a cleared numerator by a factored modulus, one factor at a time."""
    if m.kind != "bivariate-factored":
        raise ValueError("check_bivariate needs a factored bivariate modulus")
    checks = []
    for factor, mult in m.factors:
        rows = factor.rows
        if list(rows) == [0]:
            qf = rows[0]
            if clearing is not None:
                if any(_divisible_by_cyclotomic(qf, d) for d in clearing.qden):
                    return Verdict(ILL_POSED, "q-only clearing factor meets the modulus", m.description)
            target = qf ** mult
            ok = all(poly_divrem(p, target)[1].is_zero() for p in num.rows.values())
            checks.append(Verdict(PASS if ok else FAIL, "" if ok else f"rows not divisible by ({qf})^{mult}"))
            continue
        e = _linear_root(factor)
        if e is None or mult != 1:
            raise NotImplementedError("only q-only factors and simple factors linear in a are supported")
        if clearing is not None:
            for sign, s in clearing.atoms:
                if sign * e + s == 0:
                    return Verdict(ILL_POSED, f"clearing atom (1 - a^{sign} q^{s}) meets the modulus",
                                   m.description)
        spec = num.specialize_a(e)
        if spec.is_zero():
            checks.append(Verdict(PASS))
        else:
            checks.append(Verdict(FAIL, f"nonzero at a = q^{e}", residual_degree_span=spec.degree_span()))
    return _combine(checks, m.description)


def divides_bivariate_direct(num: BiLaurentPoly, divisor: BiLaurentPoly) -> bool:
    """Long division in ``a`` over ``Q[q, 1/q]``; exact iff ``divisor | num``."""
    if divisor.is_zero():
        raise ZeroDivisionError("division by zero")
    if num.is_zero():
        return True
    dlo, dhi = divisor.a_span()
    drows = {i - dlo: p for i, p in divisor.rows.items()}
    dtop = dhi - dlo
    lc = drows[dtop]
    nlo, _ = num.a_span()
    rows = {i - nlo: p for i, p in num.rows.items()}
    while rows:
        top = max(rows)
        if top < dtop:
            return False
        quot, rem = poly_divrem(rows[top], lc)
        if not rem.is_zero():
            return False
        shift = top - dtop
        for i, p in drows.items():
            key = i + shift
            val = rows.get(key, LaurentPoly()) - quot * p
            if val.is_zero():
                rows.pop(key, None)
            else:
                rows[key] = val
    return True


def param_cleared(n: int, M_choice: str) -> BiFraction:
    _require_odd(n)
    return series.sum_S_param(half_or_full(n, M_choice)).cancel()


def verify_param(n: int, M_choice: str) -> Verdict:
    _require_odd(n)
    M = half_or_full(n, M_choice)
    frac = param_cleared(n, M_choice)
    v = check_bivariate(frac.num, param_modulus(n), clearing=frac)
    lo, hi = frac.num.a_span() if not frac.num.is_zero() else (0, 0)
    return Verdict(v.status, "; ".join(filter(None, [f"M={M}", v.notes])), v.modulus,
                   v.residual_degree_span, None, (lo, hi))


# -- p-adic ----------------------------------------------------------------------

def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def padic_valuation(x, p: int) -> float | int:
    """``ord_p(x)``; returns ``math.inf`` for 0."""
    if not is_prime(p):
        raise ValueError(f"{p} is not a prime")
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    a, b = abs(x.numerator), x.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def verify_corollary(p: int, r: int, M_choice: str) -> Verdict:
    if p % 2 == 0 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if r < 1:
        raise ValueError("r must be >= 1")
    pr = p ** r
    M = half_or_full(pr, M_choice)
    terms = [series.classical_summand(k) for k in range(M + 1)]
    min_term = min(padic_valuation(t, p) for t in terms)
    total = sum(terms, Fraction(0))
    desc = f"{p}^{4 * r + 1}"
    if padic_valuation(total, p) < 0:
        return Verdict(ILL_POSED, f"sum is not {p}-integral", desc)
    v = padic_valuation(total - 3 * p ** (4 * r), p)
    notes = f"M={M}; ord_{p}(sum - 3p^{4 * r}) = {v}; min term valuation {min_term}"
    status = PASS if v >= 4 * r + 1 else FAIL
    return Verdict(status, notes, desc, degrees=(v if v != float("inf") else -1,))
