"""Capped absolute-precision p-adic numbers and the polynomial toolkit built on them.

A :class:`PadicNumber` is a value of Q_p known modulo ``p**precision``.  Results
of arithmetic never claim more precision than the inputs justify, so two
numbers compare equal exactly when they agree modulo the smaller of their two
precisions.  Polynomials come in two flavours: :class:`PadicPoly` (dense,
univariate, coefficients are :class:`PadicNumber`) and :class:`MultiPoly`
(sparse, multivariate, coefficients in Z/p^k).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    DegreeBoundExceeded,
    DivisionByZero,
    InsufficientSamples,
    NoRoot,
    NotAUnit,
    PrecisionExhausted,
    RepeatedRootModP,
    SingularJacobian,
    SingularRoot,
)

Rational = Union[int, Fraction]


def valuation(n: Rational, p: int) -> int:
    """p-adic valuation of a nonzero integer or fraction."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def floor_log(n: int, p: int) -> int:
    """Largest e with p**e <= n, for n >= 1."""
    e, q = 0, p
    while q <= n:
        q *= p
        e += 1
    return e


class PadicNumber:
    """An element of Q_p known modulo ``p**precision``.

    The value is ``unit * p**valuation`` with ``unit`` coprime to p and
    reduced modulo ``p**(precision - valuation)``.  A value that is zero at
    its precision stores ``unit == 0`` and ``valuation == precision``.
    """

    __slots__ = ("prime", "unit", "valuation", "precision")
    __hash__ = None  # equality is precision-dependent, hence not transitive

    def __init__(self, prime: int, unit: int, valuation: int, precision: int):
        if prime < 3:
            raise ValueError("prime must be odd")
        if unit == 0:
            valuation = precision
        else:
            if unit % prime == 0:
                raise ValueError("unit must be coprime to p")
            if valuation >= precision:
                raise ValueError("nonzero value needs valuation < precision")
            unit %= prime ** (precision - valuation)
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "precision", precision)

    def __setattr__(self, name, value):
        raise AttributeError("PadicNumber is immutable")

    # construction -------------------------------------------------------
    @classmethod
    def _scaled(cls, p: int, x: int, shift: int, precision: int) -> "PadicNumber":
        """The value ``x * p**shift`` modulo ``p**precision``, normalized."""
        if x == 0:
            return cls(p, 0, precision, precision)
        v = valuation(x, p)
        if shift + v >= precision:
            return cls(p, 0, precision, precision)
        return cls(p, x // p**v, shift + v, precision)

    @classmethod
    def zero(cls, p: int, precision: int) -> "PadicNumber":
        return cls(p, 0, precision, precision)

    @classmethod
    def from_rational(cls, p: int, q: Rational, precision: int) -> "PadicNumber":
        """Embed an integer or fraction with absolute precision ``precision``."""
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, precision)
        v = valuation(q, p)
        if v >= precision:
            return cls.zero(p, precision)
        num = q.numerator // p ** max(v, 0)
        den = q.denominator // p ** max(-v, 0)
        modulus = p ** (precision - v)
        return cls(p, num * pow(den, -1, modulus) % modulus, v, precision)

    from_int = from_rational

    @classmethod
    def from_digits(cls, p: int, digits: Sequence[int], val: int = 0) -> "PadicNumber":
        """Inverse of :meth:`digits`; precision is ``val + len(digits)``."""
        if any(not 0 <= d < p for d in digits):
            raise ValueError("digits must lie in [0, p)")
        x = sum(d * p**i for i, d in enumerate(digits))
        return cls._scaled(p, x, val, val + len(digits))

    @classmethod
    def from_json(cls, data: Mapping) -> "PadicNumber":
        return cls.from_digits(int(data["p"]), [int(d) for d in data["digits"]], int(data["val"]))

    def to_json(self) -> dict:
        return {"p": self.prime, "digits": self.digits(), "val": self.valuation}

    # inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return self.unit == 0

    def is_unit(self) -> bool:
        return self.unit != 0 and self.valuation == 0

    def is_integral(self) -> bool:
        return self.valuation >= 0

    @property
    def relative_precision(self) -> int:
        return self.precision - self.valuation

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, least significant first."""
        n = self.precision - self.valuation
        u, out = self.unit, []
        for _ in range(n if self.unit else 0):
            u, d = divmod(u, self.prime)
            out.append(d)
        return out

    def to_fraction(self) -> Fraction:
        """A rational representative (exact for the stored digits)."""
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def to_int(self) -> int:
        """Representative in ``[0, p**precision)``; the value must be integral."""
        if self.valuation < 0:
            raise NotAUnit(f"{self} is not integral")
        if self.precision <= 0 or self.unit == 0:
            return 0
        return self.unit * self.prime**self.valuation % self.prime**self.precision

    def residue(self) -> int:
        """Reduction modulo p of an integral value."""
        if self.precision < 1:
            raise PrecisionExhausted("value not known modulo p")
        return self.to_int() % self.prime

    def unit_part(self) -> "PadicNumber":
        """``self / p**valuation`` as an element of Z_p^x."""
        if self.is_zero():
            raise NotAUnit("zero has no unit part")
        return PadicNumber(self.prime, self.unit, 0, self.relative_precision)

    def reduce(self, precision: int) -> "PadicNumber":
        """Forget digits beyond ``p**precision`` (never adds precision)."""
        n = min(precision, self.precision)
        return PadicNumber._scaled(self.prime, self.unit, self.valuation, n)

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise ValueError("cannot mix different primes")
            return other
        if isinstance(other, (int, Fraction)):
            v = valuation(other, self.prime) if other != 0 else 0
            extra = abs(self.precision) + abs(self.valuation) + 2 * abs(v) + 2
            return PadicNumber.from_rational(self.prime, other, self.precision + extra)
        return NotImplemented

    def _val(self) -> int:
        return self.valuation  # equals precision for zero values

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        m = min(self.valuation, b.valuation)
        x = self.unit * self.prime ** (self.valuation - m) + b.unit * self.prime ** (b.valuation - m)
        return PadicNumber._scaled(self.prime, x, m, min(self.precision, b.precision))

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.prime, -self.unit, self.valuation, self.precision)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self + (-b)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return b + (-self)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        va, vb = self._val(), b._val()
        n = min(self.precision, b.precision, va + b.precision, vb + self.precision)
        return PadicNumber._scaled(self.prime, self.unit * b.unit, va + vb, n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        if b.is_zero():
            raise DivisionByZero(f"division by {b}")
        va, vb = self._val(), b.valuation
        n = min(self.precision, b.precision, va + b.relative_precision) - vb
        if self.is_zero():
            return PadicNumber.zero(self.prime, n)
        val = va - vb
        if val >= n:
            return PadicNumber.zero(self.prime, n)
        modulus = self.prime ** (n - val)
        return PadicNumber(self.prime, self.unit * pow(b.unit, -1, modulus), val, n)

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return b / self

    def __pow__(self, n: int):
        if n < 0:
            return (1 / self) ** (-n)
        result = PadicNumber.from_rational(self.prime, 1, max(self.relative_precision, 0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "PadicNumber":
        return 1 / self

    def __eq__(self, other) -> bool:
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return (self - b).is_zero()

    def __repr__(self) -> str:
        return f"PadicNumber({self.prime}, {self})"

    def __str__(self) -> str:
        p = self.prime
        terms = []
        for i, d in enumerate(self.digits()):
            e = self.valuation + i
            if d == 0:
                continue
            if e == 0:
                terms.append(str(d))
            else:
                power = f"{p}" if e == 1 else f"{p}^{e}"
                terms.append(power if d == 1 else f"{d}*{power}")
        terms.append(f"O({p}^{self.precision})")
        return " + ".join(terms)


def padic(p: int, value: Rational, precision: int) -> PadicNumber:
    """Shorthand for :meth:`PadicNumber.from_rational`."""
    return PadicNumber.from_rational(p, value, precision)


class ArithOp(str, enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"


def qp_arith(a: PadicNumber, b: PadicNumber, op: ArithOp | str) -> PadicNumber:
    """Apply one of the four field operations with precision propagation."""
    if a.prime != b.prime:
        raise ValueError("operands live over different primes")
    op = ArithOp(op)
    if op is ArithOp.ADD:
        return a + b
    if op is ArithOp.SUB:
        return a - b
    if op is ArithOp.MUL:
        return a * b
    return a / b


# ---------------------------------------------------------------------------
# logarithm


def iwasawa_log(u: PadicNumber) -> PadicNumber:
    """Iwasawa logarithm of a unit of Z_p (log p = 0, roots of unity map to 0).

    Computed as ``log(u**(p-1)) / (p-1)`` with the series for ``log(1 + z)``;
    the result is known to the same absolute precision as ``u``.
    """
    if u.is_zero() or u.valuation != 0:
        raise NotAUnit(f"{u} is not a unit of Z_p")
    p, n = u.prime, u.precision
    modulus = p**n
    z = (pow(u.unit, p - 1, modulus) - 1) % modulus
    if z == 0:
        return PadicNumber.zero(p, n)
    vz = valuation(z, p)
    last = n + floor_log(n, p) + 1
    while last * vz - floor_log(last, p) < n:
        last += 1
    guard = floor_log(last, p)
    big = p ** (n + guard)
    acc, zn = 0, 1
    for k in range(1, last + 1):
        zn = zn * z % big
        e = valuation(k, p)
        term = (zn // p**e) * pow(k // p**e, -1, modulus)
        acc += term if k % 2 else -term
    acc = acc * pow(p - 1, -1, modulus) % modulus
    return PadicNumber.from_rational(p, acc, n)


def iwasawa_log_qp(x: PadicNumber) -> PadicNumber:
    """Iwasawa logarithm on Q_p^x: the p-power part contributes nothing."""
    if x.is_zero():
        raise NotAUnit("log of zero")
    return iwasawa_log(x.unit_part())


# ---------------------------------------------------------------------------
# univariate polynomials


Scalar = Union[PadicNumber, int, Fraction]


class PadicPoly:
    """Dense univariate polynomial with p-adic coefficients, lowest degree first."""

    __slots__ = ("prime", "coeffs")
    __hash__ = None

    def __init__(self, prime: int, coeffs: Iterable[Scalar] = (), precision: int | None = None):
        coeffs = list(coeffs)
        if precision is None and not all(isinstance(c, PadicNumber) for c in coeffs):
            known = [c.precision for c in coeffs if isinstance(c, PadicNumber)]
            if known:
                exact_precision = max(known)
            else:
                raise ValueError("precision is required for exact coefficients")
        else:
            exact_precision = precision
        out = []
        for c in coeffs:
            if isinstance(c, PadicNumber):
                if c.prime != prime:
                    raise ValueError("coefficient over a different prime")
                if precision is not None:
                    c = c.reduce(precision)
                out.append(c)
            else:
                out.append(PadicNumber.from_rational(prime, c, exact_precision))
        while out and out[-1].is_zero():
            out.pop()
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "coeffs", tuple(out))

    def __setattr__(self, name, value):
        raise AttributeError("PadicPoly is immutable")

    @classmethod
    def from_ints(cls, p: int, coeffs: Iterable[Rational], precision: int) -> "PadicPoly":
        return cls(p, coeffs, precision)

    @classmethod
    def monomial(cls, p: int, degree: int, precision: int) -> "PadicPoly":
        return cls(p, [0] * degree + [1], precision)

    @classmethod
    def constant(cls, p: int, c: Scalar, precision: int) -> "PadicPoly":
        return cls(p, [c], precision)

    @classmethod
    def from_json(cls, p: int, data: Sequence[Mapping]) -> "PadicPoly":
        return cls(p, [PadicNumber.from_json(d) for d in data])

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.coeffs]

    # inspection
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> PadicNumber:
        if not self.coeffs:
            raise PrecisionExhausted("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> PadicNumber:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return PadicNumber.zero(self.prime, self.precision())

    def precision(self) -> int:
        """Smallest absolute precision among the coefficients (large for 0)."""
        return min((c.precision for c in self.coeffs), default=10**9)

    def min_valuation(self) -> int:
        return min((c.valuation for c in self.coeffs), default=10**9)

    def to_ints(self) -> list[int]:
        return [c.to_int() for c in self.coeffs]

    def reduce(self, precision: int) -> "PadicPoly":
        return PadicPoly(self.prime, [c.reduce(precision) for c in self.coeffs])

    # arithmetic
    def _lift(self, other) -> "PadicPoly":
        if isinstance(other, PadicPoly):
            return other
        if isinstance(other, (PadicNumber, int, Fraction)):
            if isinstance(other, PadicNumber):
                return PadicPoly(self.prime, [other])
            prec = self.precision() if self.coeffs else 10**6
            return PadicPoly(self.prime, [other], prec + 2 * abs(valuation(other, self.prime) if other else 0))
        return NotImplemented

    def __add__(self, other):
        b = self._lift(other)
        if b is NotImplemented:
            return b
        n = max(len(self.coeffs), len(b.coeffs))
        out = []
        for i in range(n):
            if i >= len(self.coeffs):
                out.append(b.coeffs[i])
            elif i >= len(b.coeffs):
                out.append(self.coeffs[i])
            else:
                out.append(self.coeffs[i] + b.coeffs[i])
        return PadicPoly(self.prime, out)

    __radd__ = __add__

    def __neg__(self):
        return PadicPoly(self.prime, [-c for c in self.coeffs])

    def __sub__(self, other):
        b = self._lift(other)
        if b is NotImplemented:
            return b
        return self + (-b)

    def __rsub__(self, other):
        b = self._lift(other)
        if b is NotImplemented:
            return b
        return b + (-self)

    def __mul__(self, other):
        if isinstance(other, (PadicNumber, int, Fraction)):
            return PadicPoly(self.prime, [c * other for c in self.coeffs])
        if not isinstance(other, PadicPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return PadicPoly(self.prime, [])
        out: list = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                t = a * b
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        return PadicPoly(self.prime, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PadicPoly":
        result = PadicPoly(self.prime, [1], self.precision())
        for _ in range(n):
            result = result * self
        return result

    def divmod(self, divisor: "PadicPoly") -> tuple["PadicPoly", "PadicPoly"]:
        """Euclidean division; the divisor's leading coefficient must be invertible."""
        if divisor.is_zero():
            raise DivisionByZero("polynomial division by zero")
        lead = divisor.leading()
        if lead.is_zero():
            raise PrecisionExhausted("leading coefficient vanishes at working precision")
        inv = 1 / lead
        rem = list(self.coeffs)
        dq = divisor.degree
        quot: list = [PadicNumber.zero(self.prime, self.precision())] * max(0, len(rem) - dq)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] * inv
            quot[k] = c
            for i, d in enumerate(divisor.coeffs):
                rem[k + i] = rem[k + i] - c * d
        return PadicPoly(self.prime, quot), PadicPoly(self.prime, rem[:dq])

    def __floordiv__(self, other: "PadicPoly") -> "PadicPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "PadicPoly") -> "PadicPoly":
        return self.divmod(other)[1]

    def exact_div(self, other: "PadicPoly") -> "PadicPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise PrecisionExhausted(f"division is not exact (remainder {r})")
        return q

    def monic(self) -> "PadicPoly":
        lead = self.leading()
        if lead.is_zero():
            raise PrecisionExhausted("cannot normalize: leading coefficient is zero")
        return self * (1 / lead)

    def __call__(self, x: Scalar) -> PadicNumber:
        if not self.coeffs:
            return PadicNumber.zero(self.prime, 10**6)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> "PadicPoly":
        return PadicPoly(self.prime, [c * i for i, c in enumerate(self.coeffs)][1:])

    def compose(self, inner: "PadicPoly") -> "PadicPoly":
        """The polynomial ``self(inner(x))``."""
        if not self.coeffs:
            return self
        acc = PadicPoly(self.prime, [self.coeffs[-1]])
        for c in reversed(self.coeffs[:-1]):
            acc = acc * inner + PadicPoly(self.prime, [c])
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicPoly):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if not self.coeffs:
            return "PadicPoly(0)"
        parts = [f"({c})*x^{i}" for i, c in enumerate(self.coeffs)]
        return "PadicPoly(" + " + ".join(parts) + ")"


def poly_xgcd(a: PadicPoly, b: PadicPoly) -> tuple[PadicPoly, PadicPoly, PadicPoly]:
    """Return ``(d, s, t)`` with ``s*a + t*b = d`` and ``d`` monic.

    Raises PrecisionExhausted when a remainder's leading coefficient becomes
    indistinguishable from zero while the remainder itself is not.
    """
    p = a.prime
    prec = min(a.precision(), b.precision())
    one = PadicPoly(p, [1], prec)
    zero = PadicPoly(p, [])
    r0, r1, s0, s1, t0, t1 = a, b, one, zero, zero, one
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = 1 / r0.leading()
    return r0 * inv, s0 * inv, t0 * inv


# ---------------------------------------------------------------------------
# Hensel lifting and roots


def _int_coeffs(f: PadicPoly, k: int) -> tuple[list[int], int]:
    if any(c.valuation < 0 for c in f.coeffs):
        raise NotAUnit("polynomial must have coefficients in Z_p")
    n = min(k, f.precision())
    modulus = f.prime**n
    return [c.to_int() % modulus for c in f.coeffs], n


def _eval_mod(coeffs: Sequence[int], x: int, modulus: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % modulus
    return acc


def hensel_lift_univariate(f: PadicPoly, r0: int, k: int) -> PadicNumber:
    """Lift a simple root ``r0`` of ``f`` mod p to a root mod ``p**k``.

    The result carries precision ``min(k, precision of f)``.
    """
    p = f.prime
    coeffs, n = _int_coeffs(f, k)
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    if _eval_mod(coeffs, r0, p) != 0:
        raise NoRoot(f"{r0} is not a root modulo {p}")
    if _eval_mod(deriv, r0, p) == 0:
        raise SingularRoot(f"derivative vanishes at {r0} modulo {p}")
    modulus = p**n
    r, known = r0 % p, 1
    while known < n:
        known = min(2 * known, n)
        m = p**known
        r = (r - _eval_mod(coeffs, r, m) * pow(_eval_mod(deriv, r, m), -1, m)) % m
    return PadicNumber.from_rational(p, r % modulus, n)


@dataclass(frozen=True)
class NotSplit:
    """Marker returned when a polynomial does not split into distinct linear factors mod p."""

    reason: str = "does not split into distinct linear factors mod p"

    def __bool__(self) -> bool:
        return False


def poly_roots_qp(f: PadicPoly, k: int) -> list[PadicNumber] | NotSplit:
    """All roots of ``f`` in Z_p modulo ``p**k``, or :class:`NotSplit`."""
    p = f.prime
    if f.degree < 1:
        return []
    if not f.leading().is_unit():
        return NotSplit("leading coefficient is not a unit")
    coeffs, _ = _int_coeffs(f, max(k, 1))
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    roots = [r for r in range(p) if _eval_mod(coeffs, r, p) == 0]
    for r in roots:
        if _eval_mod(deriv, r, p) == 0:
            raise RepeatedRootModP(f"{r} is a repeated root modulo {p}")
    if len(roots) < f.degree:
        return NotSplit()
    return [hensel_lift_univariate(f, r, k) for r in roots]


# ---------------------------------------------------------------------------
# multivariate polynomials over Z/p^k


Monomial = tuple[int, ...]


class MultiPoly:
    """Sparse multivariate polynomial with coefficients in Z/p^k."""

    __slots__ = ("prime", "exponent", "nvars", "terms")
    __hash__ = None

    def __init__(self, prime: int, exponent: int, nvars: int, terms: Mapping[Monomial, int] | None = None):
        modulus = prime**exponent
        clean: dict[Monomial, int] = {}
        for mono, c in (terms or {}).items():
            if len(mono) != nvars:
                raise ValueError("monomial length does not match nvars")
            c %= modulus
            if c:
                clean[tuple(mono)] = c
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    @property
    def modulus(self) -> int:
        return self.prime**self.exponent

    @classmethod
    def constant(cls, p: int, k: int, nvars: int, c: int) -> "MultiPoly":
        return cls(p, k, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, p: int, k: int, nvars: int, i: int) -> "MultiPoly":
        mono = [0] * nvars
        mono[i] = 1
        return cls(p, k, nvars, {tuple(mono): 1})

    @classmethod
    def from_padic_poly(cls, f: PadicPoly, k: int) -> "MultiPoly":
        modulus = f.prime**k
        terms = {(i,): c.to_int() % modulus for i, c in enumerate(f.coeffs)}
        return cls(f.prime, k, 1, terms)

    def _check(self, other: "MultiPoly") -> int:
        if other.prime != self.prime or other.nvars != self.nvars:
            raise ValueError("incompatible polynomials")
        return min(self.exponent, other.exponent)

    def _other(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, int):
            return MultiPoly.constant(self.prime, self.exponent, self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        k = self._check(other)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, 0) + c
        return MultiPoly(self.prime, k, self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.prime, self.exponent, self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return MultiPoly(self.prime, self.exponent, self.nvars, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        k = self._check(other)
        terms: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return MultiPoly(self.prime, k, self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        result = MultiPoly.constant(self.prime, self.exponent, self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if other.prime != self.prime or other.nvars != self.nvars:
            return False
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def coefficient(self, mono: Sequence[int]) -> int:
        return self.terms.get(tuple(mono), 0)

    def constant_term(self) -> int:
        return self.coefficient((0,) * self.nvars)

    def linear_coefficient(self, i: int) -> int:
        mono = [0] * self.nvars
        mono[i] = 1
        return self.coefficient(mono)

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly(self.prime, self.exponent, self.nvars, {m: c for m, c in self.terms.items() if sum(m) == d})

    def reduce(self, k: int) -> "MultiPoly":
        return MultiPoly(self.prime, min(k, self.exponent), self.nvars, self.terms)

    def scale_unit(self, c: int) -> "MultiPoly":
        return self * c

    def divide_by_p(self) -> "MultiPoly":
        """Exact division by p, landing in Z/p^(k-1)."""
        p = self.prime
        if any(c % p for c in self.terms.values()):
            raise ValueError("coefficients are not all divisible by p")
        return MultiPoly(p, self.exponent - 1, self.nvars, {m: c // p for m, c in self.terms.items()})

    def __call__(self, *point: int) -> int:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.nvars:
            raise ValueError("wrong number of coordinates")
        modulus = self.modulus
        total = 0
        for mono, c in self.terms.items():
            t = c
            for x, e in zip(point, mono):
                if e:
                    t = t * pow(x, e, modulus) % modulus
            total += t
        return total % modulus

    def partial(self, i: int) -> "MultiPoly":
        terms: dict[Monomial, int] = {}
        for mono, c in self.terms.items():
            if mono[i]:
                m = list(mono)
                m[i] -= 1
                terms[tuple(m)] = c * mono[i]
        return MultiPoly(self.prime, self.exponent, self.nvars, terms)

    def compose(self, subs: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``subs[i]`` for the i-th variable."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        target = subs[0].nvars if subs else 0
        k = min([self.exponent] + [s.exponent for s in subs])
        acc = MultiPoly(self.prime, k, target)
        cache: dict[tuple[int, int], MultiPoly] = {}
        for mono, c in self.terms.items():
            t = MultiPoly.constant(self.prime, k, target, c)
            for i, e in enumerate(mono):
                if e:
                    if (i, e) not in cache:
                        cache[(i, e)] = subs[i].reduce(k) ** e
                    t = t * cache[(i, e)]
            acc = acc + t
        return acc

    def substitute_into_univariate(self) -> PadicPoly:
        if self.nvars != 1:
            raise ValueError("polynomial is not univariate")
        deg = max((m[0] for m in self.terms), default=-1)
        coeffs = [self.terms.get((i,), 0) for i in range(deg + 1)]
        return PadicPoly(self.prime, coeffs, self.exponent)

    def symmetric_terms(self) -> dict[Monomial, int]:
        """Coefficients lifted to the symmetric range around zero."""
        modulus, half = self.modulus, self.modulus // 2
        return {m: (c - modulus if c > half else c) for m, c in self.terms.items()}

    def format(self, names: Sequence[str] | None = None) -> str:
        names = list(names or [f"x{i + 1}" for i in range(self.nvars)])
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.symmetric_terms().items(), key=lambda t: (-sum(t[0]), [-e for e in t[0]])):
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mono) if e]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MultiPoly(mod {self.prime}^{self.exponent}: {self.format()})"


def _solve_mod(matrix: list[list[int]], rhs: list[int], p: int, k: int) -> list[int]:
    """Solve ``matrix * x = rhs`` mod p^k for a matrix invertible mod p."""
    n = len(matrix)
    modulus = p**k
    a = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] % p), None)
        if pivot is None:
            raise SingularJacobian("matrix is not invertible modulo p")
        a[col], a[pivot] = a[pivot], a[col]
        inv = pow(a[col][col], -1, modulus)
        a[col] = [x * inv % modulus for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % modulus for x, y in zip(a[r], a[col])]
    return [row[n] for row in a]


def solve_linear_mod(matrix: Sequence[Sequence[int]], rhs: Sequence[int], p: int, k: int) -> list[int]:
    """Public wrapper around the unit-pivot Gauss-Jordan solver mod p^k."""
    return _solve_mod([list(r) for r in matrix], list(rhs), p, k)


def hensel_lift_multivariate(system: Sequence[MultiPoly], x0: Sequence[int], k: int) -> tuple[PadicNumber, ...]:
    """Newton-lift a simple common zero of a square system from mod p to mod p^k."""
    if not system:
        raise ValueError("empty system")
    p = system[0].prime
    r = system[0].nvars
    if len(system) != r or any(f.nvars != r for f in system):
        raise ValueError("system must be square")
    n = min([k] + [f.exponent for f in system])
    if any(f.evaluate([x % p for x in x0]) % p for f in system):
        raise NoRoot("starting point is not a zero modulo p")
    jac = [[f.partial(j) for j in range(r)] for f in system]
    x = [c % p for c in x0]
    known = 1
    first = [[jac[i][j].evaluate(x) % p for j in range(r)] for i in range(r)]
    _solve_mod(first, [0] * r, p, 1)  # raises SingularJacobian if needed
    while known < n:
        known = min(2 * known, n)
        m = p**known
        vals = [f.evaluate(x) % m for f in system]
        mat = [[jac[i][j].evaluate(x) % m for j in range(r)] for i in range(r)]
        step = _solve_mod(mat, vals, p, known)
        x = [(a - b) % m for a, b in zip(x, step)]
    return tuple(PadicNumber.from_rational(p, c, n) for c in x)


# ---------------------------------------------------------------------------
# valuation profiles and interpolation


class ProfileKind(str, enum.Enum):
    LOG_SERIES = "log-series"
    EMBEDDING_FIRST_G = "embedding-first-g"
    EMBEDDING_HEIGHT = "embedding-height"


@dataclass(frozen=True)
class ValuationProfile:
    """Lower bounds for the valuations of power-series coefficients."""

    kind: ProfileKind
    v: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))

    def lower_bound(self, n: int, p: int) -> int | None:
        """Bound for the degree-n coefficient (``None`` for the constant term)."""
        if n <= 0:
            return None
        if self.kind is ProfileKind.LOG_SERIES:
            return max(1, n - valuation(n, p))
        if self.kind is ProfileKind.EMBEDDING_FIRST_G:
            return n - 1 - valuation(n, p)
        return n - 1 - 2 * floor_log(n, p) + self.v

    def degree_bound(self, k: int, p: int) -> int:
        """Largest n whose coefficient can be nonzero modulo p^k."""
        best, n, streak = 0, 1, 0
        # the bounds grow at least like n - 1 - 2 log_p(n) + v, so a long run
        # of bounds >= k means nothing larger can drop below k again
        while streak < 4 * (k + abs(self.v) + 4) * p:
            lb = self.lower_bound(n, p)
            if lb < k:
                best, streak = n, 0
            else:
                streak += 1
            n += 1
        return best


def interpolate_poly_mod_pk(
    samples: Sequence[tuple[Scalar, Scalar]],
    profile: ValuationProfile,
    k: int,
    prime: int | None = None,
) -> PadicPoly:
    """Fit the unique profile-bounded polynomial mod p^k through ``samples``.

    The first ``degree_bound + 1`` samples determine the fit; any further
    samples are checked and a mismatch raises DegreeBoundExceeded.
    """
    if prime is None:
        prime = next(
            (v.prime for pair in samples for v in pair if isinstance(v, PadicNumber)),
            None,
        )
        if prime is None:
            raise ValueError("prime is required when samples are plain integers")
    p = prime
    modulus = p**k

    def as_int(v: Scalar) -> int:
        if isinstance(v, PadicNumber):
            if v.precision < k:
                raise PrecisionExhausted(f"sample {v} known to fewer than {k} digits")
            return v.to_int() % modulus
        q = Fraction(v)
        return q.numerator * pow(q.denominator, -1, modulus) % modulus

    pts = [(as_int(x), as_int(y)) for x, y in samples]
    d = profile.degree_bound(k, p)
    if len(pts) < d + 1:
        raise InsufficientSamples(f"need {d + 1} samples for degree bound {d}, got {len(pts)}")
    fit = pts[: d + 1]
    xs = [x for x, _ in fit]
    if len({x % p for x in xs}) != len(xs):
        raise ValueError("sample inputs must be distinct modulo p")
    # Newton divided differences; all denominators are units
    coef = [y for _, y in fit]
    for j in range(1, len(fit)):
        for i in range(len(fit) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * pow(xs[i] - xs[i - j], -1, modulus) % modulus
    poly = [0]
    for i in range(len(fit) - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        shifted = [0] + poly
        for t in range(len(poly)):
            shifted[t] -= xs[i] * poly[t]
        shifted[0] += coef[i]
        poly = [c % modulus for c in shifted]
    result = PadicPoly(p, poly, k)
    for x, y in pts[d + 1 :]:
        if (result(x).to_int() - y) % modulus:
            raise DegreeBoundExceeded(f"sample ({x}, {y}) does not fit a degree-{d} polynomial")
    return result


def profile_violations(poly: PadicPoly, profile: ValuationProfile, k: int) -> list[int]:
    """Degrees whose coefficient breaks the profile's valuation bound mod p^k."""
    bad = []
    for n, c in enumerate(poly.coeffs):
        lb = profile.lower_bound(n, poly.prime)
        if lb is None or c.is_zero():
            continue
        if c.valuation < min(lb, k):
            bad.append(n)
    return bad


def enumerate_residues(p: int, r: int) -> Iterator[tuple[int, ...]]:
    """All points of F_p^r in lexicographic order."""
    return itertools.product(range(p), repeat=r)
