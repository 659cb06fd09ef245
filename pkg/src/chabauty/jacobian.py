"""Hyperelliptic models, residue disks, and Mumford divisor arithmetic.

Curves are written ``y^2 + h(x) y = f(x)``.  Cantor's algorithm is provided for
imaginary models (``deg f = 2g + 1`` and ``deg h <= g``), where a reduced
divisor class is ``div(u, v) - deg(u) * infinity``.  Every compose and reduce
step also returns the rational function that witnesses the linear equivalence,
so that heights can be corrected by ``log r(D)`` afterwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import (
    DimensionMismatch,
    NoFifthRoot,
    NotAUnit,
    PoleAtBeta,
    PoleHit,
    PrecisionExhausted,
    RamifiedDisk,
)
from .padic_core import (
    NotSplit,
    PadicNumber,
    PadicPoly,
    hensel_lift_univariate,
    iwasawa_log_qp,
    poly_roots_qp,
    poly_xgcd,
    valuation,
)

Coefficient = Union[int, Fraction, PadicNumber]


class ModelFlavor(str, enum.Enum):
    REGULAR_CHART = "regular-model-chart"
    ODD_DEGREE = "odd-degree"
    EVEN_DEGREE = "even-degree"


def _degree(coeffs: Sequence[Coefficient]) -> int:
    d = len(coeffs) - 1
    while d >= 0 and (coeffs[d].is_zero() if isinstance(coeffs[d], PadicNumber) else coeffs[d] == 0):
        d -= 1
    return d


def _rational_det(rows: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in rows]
    n, det = len(m), Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def resultant(a: Sequence[Rational], b: Sequence[Rational]) -> Fraction:
    """Resultant of two rational polynomials (coefficients low to high)."""
    a = [Fraction(c) for c in a[: _degree(a) + 1]]
    b = [Fraction(c) for c in b[: _degree(b) + 1]]
    m, n = len(a) - 1, len(b) - 1
    if m < 0 or n < 0:
        return Fraction(0)
    size = m + n
    if size == 0:
        return Fraction(1)
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + a[::-1] + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + b[::-1] + [Fraction(0)] * (size - n - 1 - i))
    return _rational_det(rows)


Rational = Union[int, Fraction]


def binary_discriminant(coeffs: Sequence[Rational], degree: int) -> Fraction:
    """Discriminant of the binary form of the given degree with these coefficients."""
    c = [Fraction(x) for x in coeffs] + [Fraction(0)] * (degree + 1 - len(coeffs))
    d = _degree(c)
    if d < degree - 1:
        return Fraction(0)
    if d == degree - 1:
        core = binary_discriminant(c[:degree], degree - 1)
        return c[degree - 1] ** 2 * core
    deriv = [i * x for i, x in enumerate(c)][1:]
    sign = -1 if (degree * (degree - 1) // 2) % 2 else 1
    return sign * resultant(c, deriv) / c[degree]


@dataclass(frozen=True)
class HyperellipticModel:
    """A plane model ``y^2 + h(x) y = f(x)`` with coefficients listed from degree 0."""

    h: tuple[Coefficient, ...]
    f: tuple[Coefficient, ...]
    flavor: ModelFlavor = ModelFlavor.REGULAR_CHART

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(self.h))
        object.__setattr__(self, "f", tuple(self.f))
        object.__setattr__(self, "flavor", ModelFlavor(self.flavor))
        if _degree(self.f) < 3:
            raise ValueError("f must have degree at least 3")
        if self.flavor is ModelFlavor.ODD_DEGREE and (_degree(self.h) >= 0 or _degree(self.f) % 2 == 0):
            raise ValueError("odd-degree models need h = 0 and deg f odd")
        if self.flavor is ModelFlavor.EVEN_DEGREE and _degree(self.h) >= 0:
            raise ValueError("even-degree models need h = 0")

    @property
    def genus(self) -> int:
        d = max(_degree(self.f), 2 * _degree(self.h))
        return (d - 1) // 2

    @property
    def is_exact(self) -> bool:
        return not any(isinstance(c, PadicNumber) for c in self.h + self.f)

    @property
    def is_imaginary(self) -> bool:
        """True when there is one point at infinity: deg f = 2g+1 and deg h <= g."""
        return _degree(self.f) == 2 * self.genus + 1 and _degree(self.h) <= self.genus

    def h_poly(self, p: int, k: int) -> PadicPoly:
        return PadicPoly(p, self.h, k)

    def f_poly(self, p: int, k: int) -> PadicPoly:
        return PadicPoly(p, self.f, k)

    def discriminant_form(self) -> list[Fraction]:
        """Coefficients of ``4f + h^2``, the right side of the completed-square model."""
        h = [Fraction(c) for c in self.h]
        out = [4 * Fraction(c) for c in self.f]
        out += [Fraction(0)] * (2 * len(h))
        for i, a in enumerate(h):
            for j, b in enumerate(h):
                out[i + j] += a * b
        return out[: _degree(out) + 1]

    def discriminant(self) -> Fraction:
        if not self.is_exact:
            raise ValueError("discriminant needs exact coefficients")
        return binary_discriminant(self.discriminant_form(), 2 * self.genus + 2)

    def has_good_reduction(self, p: int) -> bool:
        if p == 2:
            return False
        disc = self.discriminant()
        return disc != 0 and valuation(disc, p) == 0

    def even_model(self) -> "HyperellipticModel":
        """The model ``Y^2 = 4f + h^2`` with ``Y = 2y + h(x)``."""
        flavor = ModelFlavor.EVEN_DEGREE if len(self.discriminant_form()) % 2 else ModelFlavor.ODD_DEGREE
        return HyperellipticModel((), tuple(self.discriminant_form()), flavor)

    def equation(self, x: PadicNumber, y: PadicNumber) -> PadicNumber:
        p = x.prime
        k = max(x.precision, 1) + 10
        return y * y + self.h_poly(p, k)(x) * y - self.f_poly(p, k)(x)

    def contains(self, point: "CurvePoint") -> bool:
        if point.at_infinity:
            return True
        return self.equation(point.x, point.y).is_zero()

    def involution(self, point: "CurvePoint") -> "CurvePoint":
        if point.at_infinity:
            return CurvePoint(None, None, -point.at_infinity)
        p = point.x.prime
        hx = self.h_poly(p, point.x.precision + 10)(point.x)
        return CurvePoint(point.x, -point.y - hx)

    def to_json(self) -> dict:
        return {"h": [_coef_json(c) for c in self.h], "f": [_coef_json(c) for c in self.f], "flavor": self.flavor.value}

    @classmethod
    def from_json(cls, data: Mapping) -> "HyperellipticModel":
        return cls(tuple(_coef_from_json(c) for c in data.get("h", [])), tuple(_coef_from_json(c) for c in data["f"]), data.get("flavor", "regular-model-chart"))


def _coef_json(c: Coefficient):
    if isinstance(c, PadicNumber):
        return c.to_json()
    if isinstance(c, Fraction) and c.denominator != 1:
        return str(c)
    return int(c)


def _coef_from_json(c):
    if isinstance(c, dict):
        return PadicNumber.from_json(c)
    if isinstance(c, str):
        return Fraction(c)
    return int(c)


@dataclass(frozen=True, eq=False)
class CurvePoint:
    """An affine point ``(x, y)`` or a point at infinity.

    ``at_infinity`` is 0 for affine points, and +1 / -1 picks the branch at
    infinity on even-degree models (the odd-degree point at infinity uses +1).
    """

    x: PadicNumber | None
    y: PadicNumber | None
    at_infinity: int = 0

    @classmethod
    def from_rational(cls, p: int, x: Rational, y: Rational, k: int) -> "CurvePoint":
        return cls(PadicNumber.from_rational(p, x, k), PadicNumber.from_rational(p, y, k))

    @classmethod
    def infinity(cls, sign: int = 1) -> "CurvePoint":
        return cls(None, None, sign)

    @property
    def precision(self) -> int:
        if self.at_infinity:
            return 10**9
        return min(self.x.precision, self.y.precision)

    def reduce(self, k: int) -> "CurvePoint":
        if self.at_infinity:
            return self
        return CurvePoint(self.x.reduce(k), self.y.reduce(k))

    def residue(self) -> tuple[int, int]:
        return self.x.residue(), self.y.residue()

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if self.at_infinity or other.at_infinity:
            return self.at_infinity == other.at_infinity
        return self.x == other.x and self.y == other.y

    __hash__ = None

    def to_json(self) -> dict:
        if self.at_infinity:
            return {"infinity": self.at_infinity}
        return {"x": self.x.to_json(), "y": self.y.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "CurvePoint":
        if "infinity" in data:
            return cls.infinity(int(data["infinity"]))
        return cls(PadicNumber.from_json(data["x"]), PadicNumber.from_json(data["y"]))

    def __repr__(self) -> str:
        if self.at_infinity:
            return f"CurvePoint(inf{'+' if self.at_infinity > 0 else '-'})"
        return f"CurvePoint({self.x}, {self.y})"


# ---------------------------------------------------------------------------
# residue disks


def disk_point(model: HyperellipticModel, center: tuple[int, int] | CurvePoint, nu: PadicNumber | int, k: int) -> CurvePoint:
    """The point of the residue disk of ``center`` with ``x = x0 + p*nu``, mod p^k.

    ``x0`` is the integer x-coordinate of the center; y is found by Hensel
    lifting the center's y-residue.  ``nu`` may itself be a p-adic number,
    which is how points of higher residue disks ``nu0 + p*mu`` are reached.
    """
    p, x0, y0 = _center_data(center, nu)
    x = PadicNumber.from_rational(p, x0, k) + p * _as_padic(p, nu, k)
    x = x.reduce(k)
    if x.valuation < 0:
        raise NotAUnit("disk parameter must be integral")
    h = model.h_poly(p, k)
    f = model.f_poly(p, k)
    hx, fx = h(x), f(x)
    slope = (2 * y0 + hx.to_int()) % p
    if slope == 0:
        raise RamifiedDisk(f"2y + h(x) vanishes at the center ({x0}, {y0}) mod {p}")
    poly = PadicPoly(p, [-fx, hx, PadicNumber.from_rational(p, 1, k)])
    y = hensel_lift_univariate(poly, y0 % p, k)
    return CurvePoint(x, y)


def disk_point_y(model: HyperellipticModel, center: tuple[int, int] | CurvePoint, nu: PadicNumber | int, k: int) -> CurvePoint:
    """Parametrize a ramified disk by ``y = y0 + p*nu`` and solve for x."""
    p, x0, y0 = _center_data(center, nu)
    y = (PadicNumber.from_rational(p, y0, k) + p * _as_padic(p, nu, k)).reduce(k)
    h = model.h_poly(p, k)
    f = model.f_poly(p, k)
    poly = h * y + PadicPoly(p, [y * y]) - f
    return CurvePoint(hensel_lift_univariate(poly, x0 % p, k), y)


def _center_data(center, nu) -> tuple[int, int, int]:
    if isinstance(center, CurvePoint):
        p = center.x.prime
        return p, center.x.to_int(), center.y.to_int()
    if not isinstance(nu, PadicNumber):
        raise ValueError("with an integer center, nu must be a PadicNumber to fix p")
    return nu.prime, int(center[0]), int(center[1])


def _as_padic(p: int, nu, k: int) -> PadicNumber:
    if isinstance(nu, PadicNumber):
        return nu
    return PadicNumber.from_rational(p, nu, k)


def disk_center(p: int, x: int, y: int, k: int) -> CurvePoint:
    """A center given by integer residues, embedded at precision k."""
    return CurvePoint(PadicNumber.from_rational(p, x, k), PadicNumber.from_rational(p, y, k))


# ---------------------------------------------------------------------------
# rational functions and tracked equivalences


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """The function ``(a(x) + b(x) y) / d(x)`` on a hyperelliptic curve."""

    a: PadicPoly
    b: PadicPoly
    d: PadicPoly

    @classmethod
    def from_x_poly(cls, num: PadicPoly, den: PadicPoly | None = None) -> "RationalFunction":
        p = num.prime
        one = PadicPoly(p, [1], num.precision() if num.coeffs else 40)
        return cls(num, PadicPoly(p, []), den if den is not None else one)

    def _values(self, model: HyperellipticModel, pt: CurvePoint):
        x, y = pt.x, pt.y
        num = self.a(x) + self.b(x) * y if self.b.coeffs else self.a(x)
        return num, self.d(x)

    def __call__(self, model: HyperellipticModel, pt: CurvePoint) -> PadicNumber:
        if pt.at_infinity:
            raise PoleHit("evaluation at infinity is not supported")
        num, den = self._values(model, pt)
        if not den.is_zero() and not num.is_zero():
            return num / den
        if den.is_zero() and not num.is_zero():
            raise PoleHit(f"pole at {pt}")
        if not den.is_zero():
            raise PoleHit(f"zero at {pt}")
        return self._conjugate_value(model, pt)

    def _conjugate_value(self, model: HyperellipticModel, pt: CurvePoint) -> PadicNumber:
        # numerator and denominator both vanish: rewrite the numerator through
        # its norm N(x) = (a + b y)(a + b ybar) and cancel powers of (x - x_P)
        p = pt.x.prime
        k = max(self.a.precision(), self.d.precision())
        h, f = model.h_poly(p, k), model.f_poly(p, k)
        a, b = self.a, self.b
        norm = a * a - a * b * h - b * b * f
        ybar = -pt.y - h(pt.x)
        conj = a(pt.x) + b(pt.x) * ybar
        if conj.is_zero():
            raise PoleHit(f"cannot resolve 0/0 at {pt}")
        lin = PadicPoly(p, [-pt.x, PadicNumber.from_rational(p, 1, k)])
        den = self.d
        for _ in range(max(norm.degree, den.degree) + 1):
            if not (norm(pt.x).is_zero() and den(pt.x).is_zero()):
                break
            norm, _ = norm.divmod(lin)
            den, _ = den.divmod(lin)
        nv, dv = norm(pt.x), den(pt.x)
        if nv.is_zero() or dv.is_zero():
            raise PoleHit(f"zero or pole at {pt}")
        return nv / (dv * conj)


@dataclass(frozen=True, eq=False)
class TrackedFunction:
    """A product of rational functions with integer exponents.

    Constant factors are irrelevant: tracked functions are only ever evaluated
    on degree-zero divisors.
    """

    model: HyperellipticModel
    factors: tuple[tuple[RationalFunction, int], ...] = ()

    @classmethod
    def one(cls, model: HyperellipticModel) -> "TrackedFunction":
        return cls(model, ())

    def __mul__(self, other: "TrackedFunction") -> "TrackedFunction":
        return TrackedFunction(self.model, self.factors + other.factors)

    def __pow__(self, n: int) -> "TrackedFunction":
        return TrackedFunction(self.model, tuple((r, e * n) for r, e in self.factors if e * n))

    def is_one(self) -> bool:
        return not self.factors

    def __call__(self, pt: CurvePoint) -> PadicNumber:
        value = None
        for r, e in self.factors:
            term = r(self.model, pt) ** e
            value = term if value is None else value * term
        if value is None:
            p = pt.x.prime
            return PadicNumber.from_rational(p, 1, pt.precision)
        return value

    def log_at(self, pt: CurvePoint) -> PadicNumber:
        """Iwasawa log of the value at ``pt``, computed factor by factor."""
        total = None
        for r, e in self.factors:
            term = iwasawa_log_qp(r(self.model, pt)) * e
            total = term if total is None else total + term
        if total is None:
            return PadicNumber.zero(pt.x.prime, pt.precision)
        return total


# ---------------------------------------------------------------------------
# Mumford divisors and Cantor's algorithm


@dataclass(frozen=True, eq=False)
class MumfordDivisor:
    """``div(u, v) - inf_multiple * infinity`` on an imaginary model."""

    model: HyperellipticModel
    u: PadicPoly
    v: PadicPoly
    inf_multiple: int | None = None

    def __post_init__(self):
        if self.u.is_zero() or not (self.u.leading() - 1).is_zero():
            raise ValueError("u must be monic")
        if self.v.degree >= self.u.degree and not self.v.is_zero():
            object.__setattr__(self, "v", self.v % self.u)
        if self.inf_multiple is None:
            object.__setattr__(self, "inf_multiple", self.u.degree)

    @property
    def prime(self) -> int:
        return self.u.prime

    @property
    def degree(self) -> int:
        return self.u.degree

    def precision(self) -> int:
        return min(self.u.precision(), self.v.precision())

    @classmethod
    def zero(cls, model: HyperellipticModel, p: int, k: int) -> "MumfordDivisor":
        return cls(model, PadicPoly(p, [1], k), PadicPoly(p, []), 0)

    @classmethod
    def from_point(cls, model: HyperellipticModel, pt: CurvePoint) -> "MumfordDivisor":
        p, k = pt.x.prime, pt.precision
        return cls(model, PadicPoly(p, [-pt.x, PadicNumber.from_rational(p, 1, k)]), PadicPoly(p, [pt.y]))

    @classmethod
    def from_points(cls, model: HyperellipticModel, points: Sequence[CurvePoint]) -> "MumfordDivisor":
        """Sum of affine points (with distinct x, or repeated non-Weierstrass points)."""
        if not points:
            raise ValueError("no points given")
        p = points[0].x.prime
        k = min(pt.precision for pt in points)
        total = cls.zero(model, p, k)
        for pt in points:
            total, _ = cantor_compose(total, cls.from_point(model, pt))
        return total

    def is_zero(self) -> bool:
        return self.u.degree == 0

    def is_valid(self) -> bool:
        """Check ``u | v^2 + h v - f`` at working precision."""
        p, k = self.prime, self.precision()
        h, f = self.model.h_poly(p, k), self.model.f_poly(p, k)
        return ((self.v * self.v + h * self.v - f) % self.u).is_zero()

    def is_reduced(self) -> bool:
        return self.u.degree <= self.model.genus

    def negate(self) -> "MumfordDivisor":
        p, k = self.prime, self.precision()
        h = self.model.h_poly(p, k)
        return MumfordDivisor(self.model, self.u, (-h - self.v) % self.u, self.inf_multiple)

    def reduce_precision(self, k: int) -> "MumfordDivisor":
        return MumfordDivisor(self.model, self.u.reduce(k), self.v.reduce(k), self.inf_multiple)

    def same_class_as(self, other: "MumfordDivisor") -> bool:
        """Equality of reduced representatives (both must be reduced)."""
        return self.u == other.u and (self.v - other.v).is_zero()

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "v": self.v.to_json(), "inf_multiple": self.inf_multiple}

    @classmethod
    def from_json(cls, model: HyperellipticModel, p: int, data: Mapping) -> "MumfordDivisor":
        return cls(model, PadicPoly.from_json(p, data["u"]), PadicPoly.from_json(p, data["v"]), data.get("inf_multiple"))

    def __repr__(self) -> str:
        return f"MumfordDivisor(u={self.u}, v={self.v})"


def _check_imaginary(model: HyperellipticModel) -> None:
    if not model.is_imaginary:
        raise ValueError("Cantor arithmetic needs an imaginary model (deg f = 2g+1, deg h <= g)")


def cantor_compose(d1: MumfordDivisor, d2: MumfordDivisor) -> tuple[MumfordDivisor, TrackedFunction]:
    """Semi-reduced sum with the function ``s`` such that div(u, v) + div(s) = D1 + D2."""
    model = d1.model
    _check_imaginary(model)
    if d2.model != model:
        raise ValueError("divisors live on different models")
    p = d1.prime
    k = min(d1.precision(), d2.precision())
    h, f = model.h_poly(p, k), model.f_poly(p, k)
    u1, v1, u2, v2 = d1.u, d1.v, d2.u, d2.v
    d0, e1, e2 = poly_xgcd(u1, u2)
    if d0.degree == 0:
        d, s1, s2, s3 = d0, e1, e2, PadicPoly(p, [])
    else:
        d, c1, c2 = poly_xgcd(d0, v1 + v2 + h)
        s1, s2, s3 = c1 * e1, c1 * e2, c2
    u = (u1 * u2).exact_div(d * d) if d.degree > 0 else u1 * u2
    num = s1 * u1 * v2 + s2 * u2 * v1
    if not s3.is_zero():
        num = num + s3 * (v1 * v2 + f)
    v = num.exact_div(d) if d.degree > 0 else num
    u = u.monic()
    v = v % u
    result = MumfordDivisor(model, u, v)
    fn = TrackedFunction.one(model)
    if d.degree > 0:
        fn = TrackedFunction(model, ((RationalFunction.from_x_poly(d), 1),))
    return result, fn


def cantor_reduce(d: MumfordDivisor) -> tuple[MumfordDivisor, TrackedFunction]:
    """Reduced representative with the product of the ``(y - v)/u'`` step functions."""
    model = d.model
    _check_imaginary(model)
    p, k = d.prime, d.precision()
    h, f = model.h_poly(p, k), model.f_poly(p, k)
    g = model.genus
    u, v = d.u, d.v
    factors: list[tuple[RationalFunction, int]] = []
    one = PadicPoly(p, [1], k)
    while u.degree > g:
        nxt = (f - v * h - v * v).exact_div(u)
        if nxt.is_zero():
            raise PrecisionExhausted("reduction step lost all precision")
        nxt = nxt.monic()
        factors.append((RationalFunction(-v, one, nxt), 1))
        v = (-h - v) % nxt
        u = nxt
    if not factors:
        return d, TrackedFunction.one(model)
    return MumfordDivisor(model, u, v), TrackedFunction(model, tuple(factors))


def cantor_add(d1: MumfordDivisor, d2: MumfordDivisor) -> tuple[MumfordDivisor, TrackedFunction]:
    """Compose then reduce, returning the combined tracked function."""
    semi, s1 = cantor_compose(d1, d2)
    red, s2 = cantor_reduce(semi)
    return red, s1 * s2


def divisor_multiple(d: MumfordDivisor, n: int) -> tuple[MumfordDivisor, TrackedFunction]:
    """Reduced ``n*D`` and ``s_n`` with div(u_n, v_n) + div(s_n) = n*D."""
    if n < 1:
        raise ValueError("n must be positive")
    base, s_base = cantor_reduce(d)
    acc, s_acc = base, s_base
    for bit in bin(n)[3:]:
        acc, s_step = cantor_add(acc, acc)
        s_acc = (s_acc ** 2) * s_step
        if bit == "1":
            acc, s_step = cantor_add(acc, base)
            s_acc = s_acc * s_base * s_step
    return acc, s_acc


def split_divisor(d: MumfordDivisor, k: int) -> list[CurvePoint] | NotSplit:
    """Points ``(x_j, v(x_j))`` for the roots of u, or NotSplit."""
    roots = poly_roots_qp(d.u, k)
    if isinstance(roots, NotSplit):
        return roots
    return [CurvePoint(x, d.v(x).reduce(min(k, x.precision))) for x in roots]


# ---------------------------------------------------------------------------
# model change to an odd-degree model


def _root_of_degree(value: PadicNumber, n: int, k: int) -> PadicNumber:
    p = value.prime
    if not value.is_unit():
        raise NoFifthRoot(f"{value} is not a unit")
    target = value.to_int() % p
    residues = [r for r in range(1, p) if pow(r, n, p) == target]
    if not residues:
        raise NoFifthRoot(f"{value} has no {n}-th root modulo {p}")
    poly = PadicPoly(p, [-value] + [0] * (n - 1) + [1], k)
    return hensel_lift_univariate(poly, residues[0], k)


@dataclass(frozen=True, eq=False)
class OddModelChange:
    """Map ``(x, Y) -> (c0 x/(x - beta), beta^(g+1) Y/(x - beta)^(g+1))``.

    ``beta`` is a root of the even sextic in Z_p, moved to infinity, and
    ``c0`` is chosen so that the image model is monic of degree 2g+1.
    """

    source: HyperellipticModel
    even: HyperellipticModel
    beta: PadicNumber
    c0: PadicNumber
    target: HyperellipticModel

    @property
    def prime(self) -> int:
        return self.beta.prime

    @property
    def genus(self) -> int:
        return self.even.genus

    @classmethod
    def build(cls, model: HyperellipticModel, beta_residue: int, p: int, k: int) -> "OddModelChange":
        even = model.even_model() if model.flavor is ModelFlavor.REGULAR_CHART else model
        g = even.genus
        F = even.f_poly(p, k)
        if F.degree != 2 * g + 2:
            raise ValueError("expected an even-degree model")
        beta = hensel_lift_univariate(F, beta_residue, k)
        lead = beta * F.derivative()(beta)
        c0 = _root_of_degree(lead, 2 * g + 1, k)
        ic = 1 / c0
        xc = PadicPoly(p, [0, ic])
        xc1 = PadicPoly(p, [-1, ic], k)
        H = PadicPoly(p, [])
        for i, fi in enumerate(F.coeffs):
            H = H + (xc**i) * (xc1 ** (2 * g + 2 - i)) * (fi * beta**i)
        coeffs = [H.coeff(i) for i in range(2 * g + 2)]
        if not (coeffs[2 * g + 1] - 1).is_zero():
            raise NoFifthRoot("transformed model is not monic")
        target = HyperellipticModel((), tuple(coeffs[: 2 * g + 2]), ModelFlavor.ODD_DEGREE)
        return cls(model, even, beta, c0, target)

    def to_even(self, pt: CurvePoint) -> CurvePoint:
        if self.source is self.even or pt.at_infinity:
            return pt
        p = pt.x.prime
        hx = self.source.h_poly(p, pt.precision + 10)(pt.x)
        return CurvePoint(pt.x, 2 * pt.y + hx)

    def from_even(self, pt: CurvePoint) -> CurvePoint:
        if self.source is self.even or pt.at_infinity:
            return pt
        p = pt.x.prime
        hx = self.source.h_poly(p, pt.precision + 10)(pt.x)
        return CurvePoint(pt.x, (pt.y - hx) / 2)

    def forward(self, pt: CurvePoint) -> CurvePoint:
        """Image on the odd model of a point of the source model."""
        e = self.to_even(pt)
        diff = e.x - self.beta
        if diff.is_zero() or diff.valuation > 0:
            raise PoleAtBeta(f"{pt} lies in the residue disk of beta")
        n = self.genus + 1
        return CurvePoint(self.c0 * e.x / diff, self.beta**n * e.y / diff**n)

    def backward(self, pt: CurvePoint) -> CurvePoint:
        """Inverse map from the odd model back to the source model."""
        diff = pt.x - self.c0
        if diff.is_zero() or diff.valuation > 0:
            raise PoleAtBeta(f"{pt} maps into the disk at infinity")
        n = self.genus + 1
        x = self.beta * pt.x / diff
        y_even = pt.y * self.c0**n / diff**n
        return self.from_even(CurvePoint(x, y_even))

    def forward_divisor(self, u: PadicPoly, v: PadicPoly) -> MumfordDivisor:
        """Transport an effective divisor div(u, v) of the source model."""
        p = self.prime
        k = min(u.precision(), v.precision(), self.beta.precision)
        if self.source is not self.even:
            v = (v * 2 + self.source.h_poly(p, k)) % u
        deg = u.degree
        one = PadicNumber.from_rational(p, 1, k)
        shifted = PadicPoly(p, [-self.c0, one])
        xnum = PadicPoly(p, [0, self.beta])
        uo = PadicPoly(p, [])
        for i, c in enumerate(u.coeffs):
            uo = uo + (xnum**i) * (shifted ** (deg - i)) * c
        uo = uo.monic()
        _, inv, _ = poly_xgcd(shifted, uo)
        xm = (xnum * inv) % uo
        vx = PadicPoly(p, [])
        power = PadicPoly(p, [one])
        for c in v.coeffs:
            vx = (vx + power * c) % uo
            power = (power * xm) % uo
        n = self.genus + 1
        vo = (vx * (shifted**n) * (1 / self.c0**n)) % uo
        return MumfordDivisor(self.target, uo, vo)


def change_model_odd_degree(change: OddModelChange, pt: CurvePoint) -> CurvePoint:
    """Image of a point under the odd-degree model change."""
    return change.forward(pt)


# ---------------------------------------------------------------------------
# Mordell-Weil lattice coordinates


@dataclass(frozen=True)
class MWVector:
    """Coordinates of a point of J(Q) in a fixed generating set."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def __getitem__(self, i: int) -> int:
        return self.coefficients[i]

    def _same(self, other: "MWVector") -> None:
        if len(other) != len(self):
            raise DimensionMismatch("vectors of different lengths")

    def __add__(self, other: "MWVector") -> "MWVector":
        self._same(other)
        return MWVector(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "MWVector") -> "MWVector":
        self._same(other)
        return MWVector(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "MWVector":
        return MWVector(tuple(-a for a in self))

    def __mul__(self, n: int) -> "MWVector":
        return MWVector(tuple(n * a for a in self))

    __rmul__ = __mul__

    @classmethod
    def basis(cls, r: int, i: int) -> "MWVector":
        return cls(tuple(1 if j == i else 0 for j in range(r)))

    @classmethod
    def zero(cls, r: int) -> "MWVector":
        return cls((0,) * r)


@dataclass(frozen=True)
class EndoData:
    """An endomorphism on the Mordell-Weil lattice with its rigidifying point.

    Row i of ``mw_matrix`` holds the coordinates of f(G_i).
    """

    mw_matrix: tuple[tuple[int, ...], ...]
    c: MWVector
    m: int = 1
    differential_matrix: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "mw_matrix", tuple(tuple(int(x) for x in row) for row in self.mw_matrix))
        if not isinstance(self.c, MWVector):
            object.__setattr__(self, "c", MWVector(tuple(self.c)))
        if self.differential_matrix is not None:
            object.__setattr__(self, "differential_matrix", tuple(tuple(int(x) for x in row) for row in self.differential_matrix))
        n = len(self.mw_matrix)
        if any(len(row) != n for row in self.mw_matrix) or len(self.c) != n:
            raise DimensionMismatch("endomorphism data has inconsistent sizes")
        if self.m < 1:
            raise ValueError("m must be positive")

    @property
    def rank(self) -> int:
        return len(self.mw_matrix)

    def trace_zero(self) -> bool | None:
        if self.differential_matrix is None:
            return None
        return sum(self.differential_matrix[i][i] for i in range(len(self.differential_matrix))) == 0


def mw_apply_endo(endo: EndoData, v: MWVector) -> MWVector:
    """f(sum v_i G_i) = sum v_i f(G_i)."""
    if len(v) != endo.rank:
        raise DimensionMismatch(f"vector of length {len(v)} for a rank-{endo.rank} lattice")
    out = [0] * endo.rank
    for vi, row in zip(v, endo.mw_matrix):
        for j, x in enumerate(row):
            out[j] += vi * x
    return MWVector(tuple(out))


def mw_change_basis(e: Sequence[Sequence[int]], v: MWVector) -> MWVector:
    """Rewrite ``sum v_i Gt_i`` with ``Gt_i = sum_j e_ij G_j`` in generator coordinates."""
    if len(v) != len(e):
        raise DimensionMismatch("coefficient vector does not match the number of rows")
    width = len(e[0]) if e else 0
    out = [0] * width
    for vi, row in zip(v, e):
        if len(row) != width:
            raise DimensionMismatch("ragged basis-change matrix")
        for j, x in enumerate(row):
            out[j] += vi * x
    return MWVector(tuple(out))
