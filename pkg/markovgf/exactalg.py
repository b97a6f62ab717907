"""
Exact Arithmetic

Rational scalars, dense univariate polynomials and reduced rational functions
over the rationals. Everything here is immutable and exact: no floats, no
rounding.

- Rational: fractions.Fraction (arbitrary precision, always reduced)
- Polynomial: coefficient tuple, index i = coefficient of x^i
- RationalFunction: num/den pair, gcd-reduced, den(0) pinned to 1 when nonzero
"""

import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence, Union
import logging

from .errors import DivisionByZeroFunction, DivisionNotExact, PoleAtPoint

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction]

# optional sign, digits, optional "/digits"; or a decimal literal
_RATIONAL_PATTERN = re.compile(r'^[+-]?(\d+(/\d+)?|\d*\.\d+|\d+\.\d*)$')


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse "p", "p/q" or a decimal literal such as "0.25" exactly."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not _RATIONAL_PATTERN.match(s):
        raise ValueError(f"not a rational: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator: {text!r}") from None


def format_rational(q: Scalar) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Scalar, digits: int = 12) -> str:
    """Display rendering: `digits` significant digits, round-half-even."""
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        value = Decimal(q.numerator) / Decimal(q.denominator)
    return format(value, 'f') if abs(value.adjusted()) < digits else str(value)


def _as_fraction(c) -> Fraction:
    return c if type(c) is Fraction else Fraction(c)


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial over Q. The zero polynomial has no coefficients."""
    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [_as_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, 'coeffs', tuple(cs))

    # constructors

    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: Scalar = 1) -> "Polynomial":
        return cls((0,) * k + (c,))

    @classmethod
    def from_strings(cls, items: Iterable[str]) -> "Polynomial":
        return cls(tuple(parse_rational(s) for s in items))

    # basic properties

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = format_rational(abs(c))
            if k == 0:
                body = mag
            else:
                power = "x" if k == 1 else f"x^{k}"
                body = power if mag == "1" else f"{mag}*{power}"
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(tuple(out))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(tuple(c * other for c in self.coeffs))
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        result = Polynomial.constant(1)
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Euclidean division over Q: self = other*q + r, deg r < deg other."""
        if other.is_zero():
            raise DivisionByZeroFunction("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        lead = other.leading
        if len(rem) - 1 < db:
            return Polynomial(), self
        quot = [Fraction(0)] * (len(rem) - db)
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db] / lead
            quot[k] = c
            if c:
                for j, bc in enumerate(other.coeffs):
                    rem[k + j] -= c * bc
        return Polynomial(tuple(quot)), Polynomial(tuple(rem[:db]))

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise DivisionNotExact(self, other, r)
        return q

    def shift(self, t: int) -> "Polynomial":
        """Multiply by x^t."""
        if not self.coeffs or t == 0:
            return self
        return Polynomial((Fraction(0),) * t + self.coeffs)

    # calculus and evaluation

    def __call__(self, x0: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def derivative(self, order: int = 1) -> "Polynomial":
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [k * c for k, c in enumerate(cs)][1:]
        return Polynomial(tuple(cs))

    def taylor_shift(self, x0: Scalar) -> "Polynomial":
        """Coefficients of p(x0 + h) as a polynomial in h."""
        x0 = _as_fraction(x0)
        if x0 == 0:
            return self
        cs = list(self.coeffs)
        n = len(cs)
        # repeated synthetic division (Horner-Ruffini)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] += x0 * cs[j + 1]
        return Polynomial(tuple(cs))

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            return self
        return self * (1 / self.leading)


X = Polynomial((0, 1))
ONE = Polynomial((1,))
ZERO = Polynomial()


# integer-lifted gcd

def _primitive_ints(coeffs: Sequence[Fraction]) -> list[int]:
    """Integer primitive part: clear denominators, divide out the content,
    make the leading coefficient positive."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [c.numerator * (den // c.denominator) for c in coeffs]
    g = 0
    for i in ints:
        g = math.gcd(g, i)
    if g > 1:
        ints = [i // g for i in ints]
    if ints and ints[-1] < 0:
        ints = [-i for i in ints]
    return ints


def _int_primitive(ints: list[int]) -> list[int]:
    while ints and ints[-1] == 0:
        ints.pop()
    g = 0
    for i in ints:
        g = math.gcd(g, i)
    if g > 1:
        ints = [i // g for i in ints]
    if ints and ints[-1] < 0:
        ints = [-i for i in ints]
    return ints


def _pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """A nonzero integer multiple of the remainder of a by b."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while r and len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [lb * c for c in r]
        for i, bc in enumerate(b):
            r[i + shift] -= lr * bc
        while r and r[-1] == 0:
            r.pop()
    return r


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd by primitive polynomial remainder sequences over Z."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    p = _primitive_ints(a.coeffs)
    q = _primitive_ints(b.coeffs)
    if len(p) < len(q):
        p, q = q, p
    while len(q) > 1:
        r = _int_primitive(_pseudo_rem(p, q))
        p, q = q, r
        if not q:
            break
    if q and len(q) == 1:
        return ONE
    return Polynomial(tuple(p)).monic()


@dataclass(frozen=True)
class RationalFunction:
    """num/den reduced to lowest terms; den(0) = 1 when den(0) != 0,
    otherwise den is monic."""
    num: Polynomial
    den: Polynomial = ONE

    def __post_init__(self):
        num, den = self.num, self.den
        if not isinstance(num, Polynomial):
            num = Polynomial((num,))
        if not isinstance(den, Polynomial):
            den = Polynomial((den,))
        if den.is_zero():
            raise DivisionByZeroFunction("rational function with zero denominator")
        if num.is_zero():
            num, den = ZERO, ONE
        else:
            if den.degree > 0 and num.degree > 0:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
            scale = den.coeffs[0] if den.coeffs[0] != 0 else den.leading
            if scale != 1:
                inv = 1 / scale
                num = num * inv
                den = den * inv
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'den', den)

    @classmethod
    def of(cls, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        return cls(value if isinstance(value, Polynomial) else Polynomial((value,)))

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    # arithmetic

    def __add__(self, other):
        other = _rf_coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = _rf_coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _rf_coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _rf_coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _rf_coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZeroFunction("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _rf_coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    # evaluation and expansions

    def __call__(self, x0: Scalar) -> Fraction:
        d = self.den(x0)
        if d == 0:
            raise PoleAtPoint(x0, self)
        return self.num(x0) / d

    def series(self, n: int) -> list[Fraction]:
        """First n power-series coefficients around 0."""
        return series_divide(self.num.coeffs, self.den.coeffs, n)

    def taylor_at(self, x0: Scalar, n: int) -> list[Fraction]:
        """First n Taylor coefficients of f(x0 + h) in h."""
        num = self.num.taylor_shift(x0)
        den = self.den.taylor_shift(x0)
        if den.coeff(0) == 0:
            raise PoleAtPoint(x0, self)
        return series_divide(num.coeffs, den.coeffs, n)

    def derivative_at(self, x0: Scalar, k: int) -> Fraction:
        """Exact k-th derivative at x0."""
        return self.taylor_at(x0, k + 1)[k] * math.factorial(k)

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )


def _rf_coerce(other):
    if isinstance(other, RationalFunction):
        return other
    if isinstance(other, (Polynomial, int, Fraction)):
        return RationalFunction.of(other)
    return NotImplemented


def series_divide(num: Sequence[Fraction], den: Sequence[Fraction], n: int) -> list[Fraction]:
    """Power-series coefficients of num/den up to x^(n-1); den[0] != 0."""
    if not den or den[0] == 0:
        raise PoleAtPoint(0)
    d0 = den[0]
    out: list[Fraction] = []
    for m in range(n):
        acc = num[m] if m < len(num) else Fraction(0)
        for s in range(1, min(m, len(den) - 1) + 1):
            acc -= den[s] * out[m - s]
        out.append(acc / d0)
    return out


# operation-style entry points

def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'exact_div':
        return a.exact_div(b)
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_derivative(p: Polynomial, order: int = 1) -> Polynomial:
    return p.derivative(order)


def ratfunc_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'div':
        return a / b
    raise ValueError(f"unknown rational-function operation {op!r}")


def eval_at(f: Union[Polynomial, RationalFunction], x0: Scalar) -> Fraction:
    return f(_as_fraction(x0))


# small dense linear algebra over Q

Matrix = tuple[tuple[Fraction, ...], ...]


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    cols = list(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols)
        for row in a
    )


def mat_pow(a: Sequence[Sequence[Fraction]], k: int) -> Matrix:
    result = identity(len(a))
    base = tuple(tuple(row) for row in a)
    while k > 0:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result
