"""A small expression language for truncated q-sums, closed forms and moduli.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := INT | '-' INT | NAME | '(' expr ')'      integer-linear
    atom     := INT | NAME | 'q' | call | '(' expr ')'
    call     := NAME '(' expr ((',' | ';') expr)* ')'

Functions: ``qint(e; base)``, ``poch(s; step; count)``,
``pochp(sign, s; step; count)``, ``qbinom(n, k; base)``, ``cyc(n)``,
``cyc2(n)`` (``Phi_n(q^2)``) and ``sum(var, lo, hi, body)``.  Every argument
except a sum body must be integer-linear in bound variables.

Example, the truncated sum of the main identity::

    sum(k, 0, n-1, qint(4*k-1;2)*qint(4*k-1;1)^2*poch(-2;4;k)^4/poch(4;4;k)^4*q^(4*k))
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .arith import ONE, BiFraction, BiLaurentPoly, CycloProduct, LaurentPoly, RationalFunction
from .congruence import Modulus, Verdict, check_congruence
from .qkit import cyclotomic_q2_factors, qbinom_factors, qint_factors, qpoch_factors

# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Rat:
    num: int
    den: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class QPow:
    exponent: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Sum:
    var: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"


Expr = Union[Int, Rat, Var, QPow, Neg, BinOp, Pow, Call, Sum]
Binding = Mapping[str, int]

ARITY = {"qint": (1, 2), "poch": (3, 3), "pochp": (4, 4), "qbinom": (2, 3),
         "cyc": (1, 1), "cyc2": (1, 1), "sum": (4, 4)}


class DSLError(ValueError):
    pass


class ParseError(DSLError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.reason = message


class EvalError(DSLError):
    pass


# -- parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^(),;":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("eof", "", len(text.rstrip()) if text.strip() else len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind != "op":
            what = "end of input" if kind == "eof" else repr(val)
            raise ParseError(f"expected {value!r}, found {what}", pos)

    def fail(self, message: str):
        kind, val, pos = self.peek()
        what = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"{message}, found {what}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "eof":
            self.fail("expected operator or end of input")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        first = True
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op_pos = self.peek()[2]
            op = self.take()[1]
            right = self.unary()
            if op == "/" and first and type(left) is Int and type(right) is Int:
                if right.value == 0:
                    raise ParseError("division by zero literal", op_pos)
                f = Fraction(left.value, right.value)
                left = Rat(f.numerator, f.denominator)
            else:
                left = BinOp(op, left, right)
            first = False
        return left

    def unary(self) -> Expr:
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            exp = self.exponent()
            if isinstance(base, QPow) and base.exponent == Int(1):
                return QPow(exp)
            return Pow(base, exp)
        return base

    def exponent(self) -> Expr:
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            return Int(int(val))
        if kind == "op" and val == "-":
            self.take()
            kind2, val2, pos2 = self.take()
            if kind2 != "int":
                raise ParseError("expected integer after '-' in exponent", pos2)
            return Neg(Int(int(val2)))
        if kind == "name" and val != "q":
            self.take()
            return Var(val)
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            _check_linear(e, pos)
            return e
        self.fail("expected exponent")

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "int":
            return Int(int(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if val == "q":
                return QPow(Int(1))
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                return self.call(val, pos)
            if val in ARITY:
                raise ParseError(f"function {val!r} needs arguments", pos)
            return Var(val)
        what = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"expected a number, name or '(', found {what}", pos)

    def call(self, name: str, pos: int) -> Expr:
        if name not in ARITY:
            raise ParseError(f"unknown function {name!r}", pos)
        self.expect("(")
        args = []
        arg_pos = []
        if name == "sum":
            kind, val, vpos = self.take()
            if kind != "name" or val == "q" or val in ARITY:
                raise ParseError("sum needs a variable name first", vpos)
            args.append(Var(val))
            arg_pos.append(vpos)
            self._separator()
        while True:
            arg_pos.append(self.peek()[2])
            args.append(self.expr())
            if self.peek()[1] in (",", ";") and self.peek()[0] == "op":
                self.take()
                continue
            self.expect(")")
            break
        lo, hi = ARITY[name]
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo}-{hi}"
            raise ParseError(f"{name} takes {want} arguments, got {len(args)}", pos)
        if name == "sum":
            for a, p in zip(args[1:3], arg_pos[1:3]):
                _check_linear(a, p)
            return Sum(args[0].name, args[1], args[2], args[3])
        for a, p in zip(args, arg_pos):
            _check_linear(a, p)
        return Call(name, tuple(args))

    def _separator(self):
        kind, val, pos = self.take()
        if val not in (",", ";") or kind != "op":
            raise ParseError("expected ',' or ';'", pos)


def _is_const(e: Expr) -> bool:
    if isinstance(e, Int):
        return True
    if isinstance(e, Neg):
        return _is_const(e.operand)
    if isinstance(e, BinOp) and e.op in "+-*":
        return _is_const(e.left) and _is_const(e.right)
    return False


def _check_linear(e: Expr, pos: int) -> None:
    if isinstance(e, (Int, Var)):
        return
    if isinstance(e, Neg):
        return _check_linear(e.operand, pos)
    if isinstance(e, BinOp):
        if e.op in "+-":
            _check_linear(e.left, pos)
            _check_linear(e.right, pos)
            return
        if e.op == "*" and (_is_const(e.left) or _is_const(e.right)):
            _check_linear(e.left, pos)
            _check_linear(e.right, pos)
            return
    raise ParseError("integer argument must be linear in bound variables", pos)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# -- rendering ----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    if isinstance(e, Rat):
        return 0  # always wrapped unless it stands alone
    return 5


def _wrap(e: Expr, need: int) -> str:
    s = render(e)
    return f"({s})" if _prec(e) < need else s


def _render_exp(e: Expr) -> str:
    if isinstance(e, (Int, Var)):
        return render(e)
    if isinstance(e, Neg) and isinstance(e.operand, Int):
        return f"-{e.operand.value}"
    return f"({render(e)})"


def render(e: Expr) -> str:
    if isinstance(e, Int):
        return str(e.value)
    if isinstance(e, Rat):
        return f"{e.num}/{e.den}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, QPow):
        if e.exponent == Int(1):
            return "q"
        return f"q^{_render_exp(e.exponent)}"
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, 3)
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        return f"{_wrap(e.left, p)}{e.op}{_wrap(e.right, p + 1)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{_render_exp(e.exponent)}"
    if isinstance(e, Call):
        args = [render(a) for a in e.args]
        if e.name in ("qint", "qbinom") and len(args) == ARITY[e.name][1]:
            return f"{e.name}({', '.join(args[:-1])}; {args[-1]})"
        if e.name == "poch":
            return f"poch({args[0]}; {args[1]}; {args[2]})"
        if e.name == "pochp":
            return f"pochp({args[0]}, {args[1]}; {args[2]}; {args[3]})"
        return f"{e.name}({', '.join(args)})"
    if isinstance(e, Sum):
        return f"sum({e.var}, {render(e.lo)}, {render(e.hi)}, {render(e.body)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- evaluation ------------------------------------------------------------------


@dataclass(frozen=True)
class _AtomProduct:
    """Bivariate value ``rf * prod (1 - a^sign q^s)^m`` with signed multiplicities."""

    rf: RationalFunction
    atoms: tuple[tuple[tuple[int, int], int], ...]

    def to_bifraction(self) -> BiFraction:
        if self.rf.den_factors() is None:
            raise EvalError("bivariate expression with a non-cyclotomic denominator")
        num = BiLaurentPoly.from_q(self.rf.num)
        den_atoms = {}
        for (sign, s), m in self.atoms:
            if m > 0:
                num = num * BiLaurentPoly.atom(sign, s) ** m
            else:
                den_atoms[(sign, s)] = -m
        return BiFraction(num, den_atoms, self.rf.den_factors())


def _atoms_merge(a, b, sign=1):
    c = Counter(dict(a))
    for k, m in b:
        c[k] += sign * m
    return tuple(sorted((k, m) for k, m in c.items() if m))


def _zero() -> RationalFunction:
    return RationalFunction.from_poly(LaurentPoly())


def _const(c) -> RationalFunction:
    return RationalFunction.from_poly(LaurentPoly.const(c))


def _add(x, y):
    if isinstance(x, RationalFunction) and isinstance(y, RationalFunction):
        return x + y
    return _to_bif(x) + _to_bif(y)


def _to_bif(x) -> BiFraction:
    if isinstance(x, BiFraction):
        return x
    if isinstance(x, _AtomProduct):
        return x.to_bifraction()
    if x.den_factors() is None:
        raise EvalError("bivariate expression with a non-cyclotomic denominator")
    return BiFraction.from_rf(x)


def _mul(x, y):
    if isinstance(x, RationalFunction) and isinstance(y, RationalFunction):
        return x * y
    if isinstance(x, RationalFunction) and isinstance(y, _AtomProduct):
        x, y = y, x
    if isinstance(x, _AtomProduct) and isinstance(y, RationalFunction):
        return _AtomProduct(x.rf * y, x.atoms)
    if isinstance(x, _AtomProduct) and isinstance(y, _AtomProduct):
        return _AtomProduct(x.rf * y.rf, _atoms_merge(x.atoms, y.atoms))
    return _to_bif(x) * _to_bif(y)


def _div(x, y):
    if isinstance(y, RationalFunction):
        if y.is_zero():
            raise EvalError("division by the zero rational function")
        if isinstance(x, RationalFunction):
            return x / y
        if isinstance(x, _AtomProduct):
            return _AtomProduct(x.rf / y, x.atoms)
        return x * _to_bif(y.inverse())
    if isinstance(y, _AtomProduct):
        if isinstance(x, RationalFunction):
            return _AtomProduct(x / y.rf, _atoms_merge((), y.atoms, -1))
        if isinstance(x, _AtomProduct):
            return _AtomProduct(x.rf / y.rf, _atoms_merge(x.atoms, y.atoms, -1))
        inv = _AtomProduct(ONE_RF / y.rf, _atoms_merge((), y.atoms, -1))
        return x * inv.to_bifraction()
    raise EvalError("division by a general bivariate expression is not supported")


ONE_RF = RationalFunction.from_poly(ONE)


def _neg(x):
    if isinstance(x, _AtomProduct):
        return _AtomProduct(-x.rf, x.atoms)
    return -x


def _pow(x, k: int):
    if isinstance(x, RationalFunction):
        if k < 0 and x.is_zero():
            raise EvalError("division by the zero rational function")
        return x ** k
    if isinstance(x, _AtomProduct):
        return _AtomProduct(x.rf ** k, tuple((a, m * k) for a, m in x.atoms))
    if k < 0:
        raise EvalError("negative power of a general bivariate expression")
    return x ** k


def _eval_int(e: Expr, b: Binding) -> int:
    if isinstance(e, Int):
        return e.value
    if isinstance(e, Var):
        if e.name not in b:
            raise EvalError(f"unbound variable {e.name!r}")
        v = b[e.name]
        if not isinstance(v, int):
            raise EvalError(f"variable {e.name!r} must be bound to an integer")
        return v
    if isinstance(e, Neg):
        return -_eval_int(e.operand, b)
    if isinstance(e, BinOp) and e.op in "+-*":
        l, r = _eval_int(e.left, b), _eval_int(e.right, b)
        return l + r if e.op == "+" else l - r if e.op == "-" else l * r
    raise EvalError(f"expected an integer-valued expression, got {render(e)!r}")


def _poch_rf(s: int, step: int, count: int) -> RationalFunction:
    if count < 0:
        raise EvalError("Pochhammer count must be nonnegative")
    if any(s + step * j == 0 for j in range(count)):
        return _zero()
    return RationalFunction.from_cyclo(qpoch_factors(s, step, count))


def _call(name: str, args: list[int]):
    if name == "qint":
        n, base = args[0], (args[1] if len(args) > 1 else 1)
        if base <= 0:
            raise EvalError("qint base must be positive")
        return _zero() if n == 0 else RationalFunction.from_cyclo(qint_factors(n, base))
    if name == "poch":
        return _poch_rf(*args)
    if name == "pochp":
        sign, s, step, count = args
        if sign not in (1, -1):
            raise EvalError("pochp sign must be 1 or -1")
        if count < 0:
            raise EvalError("Pochhammer count must be nonnegative")
        atoms = Counter((sign, s + step * j) for j in range(count))
        return _AtomProduct(ONE_RF, tuple(sorted(atoms.items())))
    if name == "qbinom":
        n, k, base = args[0], args[1], (args[2] if len(args) > 2 else 1)
        if base <= 0:
            raise EvalError("qbinom base must be positive")
        if k < 0 or k > n:
            return _zero()
        return RationalFunction.from_cyclo(qbinom_factors(n, k, base))
    if name in ("cyc", "cyc2"):
        n = args[0]
        if n < 1:
            raise EvalError("cyclotomic index must be >= 1")
        mult = {n: 1} if name == "cyc" else cyclotomic_q2_factors(n)
        return RationalFunction.from_cyclo(CycloProduct(1, 0, mult))
    raise EvalError(f"unknown function {name!r}")


def _eval(e: Expr, b: Binding):
    if isinstance(e, Int):
        return _const(e.value)
    if isinstance(e, Rat):
        return _const(Fraction(e.num, e.den))
    if isinstance(e, Var):
        return _const(_eval_int(e, b))
    if isinstance(e, QPow):
        return RationalFunction.from_poly(LaurentPoly.monomial(_eval_int(e.exponent, b)))
    if isinstance(e, Neg):
        return _neg(_eval(e.operand, b))
    if isinstance(e, BinOp):
        x, y = _eval(e.left, b), _eval(e.right, b)
        if e.op == "+":
            return _add(x, y)
        if e.op == "-":
            return _add(x, _neg(y))
        if e.op == "*":
            return _mul(x, y)
        return _div(x, y)
    if isinstance(e, Pow):
        return _pow(_eval(e.base, b), _eval_int(e.exponent, b))
    if isinstance(e, Call):
        return _call(e.name, [_eval_int(a, b) for a in e.args])
    if isinstance(e, Sum):
        lo, hi = _eval_int(e.lo, b), _eval_int(e.hi, b)
        if lo > hi + 1:
            raise EvalError(f"sum bounds {lo}..{hi} are not a valid range")
        total = _zero()
        inner = dict(b)
        for k in range(lo, hi + 1):
            inner[e.var] = k
            total = _add(total, _eval(e.body, inner))
        return total
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr | str, b: Binding | None = None):
    """Evaluate to a :class:`RationalFunction`, or a :class:`BiFraction` when the value depends on ``a``.

    A ``pochp`` whose factors all cancel (or are empty) yields a univariate result.
    """
    if isinstance(e, str):
        e = parse(e)
    v = _eval(e, dict(b or {}))
    if isinstance(v, _AtomProduct):
        v = v.to_bifraction()
    if isinstance(v, BiFraction) and not v.atoms and not any(i for i in v.num.rows):
        # every a cancelled out
        return v.specialize_a(0)
    return v


eval_expr = evaluate


def congruence_eval(lhs: Expr | str, rhs: Expr | str, modulus: Expr | str,
                    b: Binding | None = None) -> Verdict:
    values = [evaluate(x, b) for x in (lhs, rhs, modulus)]
    if any(not isinstance(v, RationalFunction) for v in values):
        raise EvalError("congruence_eval handles univariate expressions only")
    left, right, mod = values
    if mod.is_zero():
        raise EvalError("modulus evaluates to zero")
    if not mod.is_polynomial():
        raise EvalError("modulus must be a Laurent polynomial (monomial denominator at most)")
    text = modulus if isinstance(modulus, str) else render(modulus)
    return check_congruence(left, right, Modulus.univariate(mod.num, text))


def parse_binding(text: str) -> dict[str, int]:
    """``"n=3,k=2"`` -> ``{"n": 3, "k": 2}``."""
    out: dict[str, int] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise DSLError(f"bad binding {part!r}")
        if name in out:
            raise DSLError(f"variable {name!r} bound twice")
        try:
            out[name] = int(value)
        except ValueError:
            raise DSLError(f"binding for {name!r} is not an integer") from None
    return out


S_TEXT = "sum(k, 0, M, qint(4*k-1; 2)*qint(4*k-1; 1)^2*poch(-2; 4; k)^4/poch(4; 4; k)^4*q^(4*k))"
S_PARAM_TEXT = ("sum(k, 0, M, qint(4*k-1; 2)*qint(4*k-1; 1)^2*poch(-2; 4; k)^2"
                "*pochp(-1, -2; 4; k)*pochp(1, -2; 4; k)"
                "/(poch(4; 4; k)^2*pochp(-1, 4; 4; k)*pochp(1, 4; 4; k))*q^(4*k))")
