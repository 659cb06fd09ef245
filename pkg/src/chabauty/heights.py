"""Heights: the at-p oracle interface, away-from-p terms and psi of the section.

The local height at p is never computed here.  It enters through a
:class:`LocalHeightOracle`; everything around it (splitting multiples of a
divisor, log corrections from linear equivalences, the contribution of the
bad fibres and the bilinear expansion over a Mordell-Weil basis) is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Protocol, Sequence, Union

from .errors import (
    MissingFixture,
    NonUniqueSolution,
    NoSolution,
    NoSplitFound,
    PrecisionExhausted,
    RepeatedRootModP,
)
from .jacobian import (
    CurvePoint,
    HyperellipticModel,
    MumfordDivisor,
    MWVector,
    OddModelChange,
    TrackedFunction,
    divisor_multiple,
    split_divisor,
)
from .padic_core import (
    NotSplit,
    PadicNumber,
    PadicPoly,
    floor_log,
    iwasawa_log,
)

PointKey = Union[CurvePoint, str]


def _same_key(a: PointKey, b: PointKey) -> bool:
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    return a == b


@dataclass(frozen=True, eq=False)
class SignedDivisor:
    """A formal integer combination of points and named points.

    Named points (strings) stand for points that are only ever used as
    bookkeeping, such as the points at infinity of the even model.
    """

    terms: tuple[tuple[int, PointKey], ...] = ()

    def __post_init__(self):
        merged: list[list] = []
        for c, key in self.terms:
            for slot in merged:
                if _same_key(slot[1], key):
                    slot[0] += c
                    break
            else:
                merged.append([c, key])
        object.__setattr__(self, "terms", tuple((c, k) for c, k in merged if c))

    @classmethod
    def of(cls, *terms: tuple[int, PointKey]) -> "SignedDivisor":
        return cls(tuple(terms))

    def __add__(self, other: "SignedDivisor") -> "SignedDivisor":
        return SignedDivisor(self.terms + other.terms)

    def __neg__(self) -> "SignedDivisor":
        return SignedDivisor(tuple((-c, k) for c, k in self.terms))

    def __sub__(self, other: "SignedDivisor") -> "SignedDivisor":
        return self + (-other)

    def __mul__(self, n: int) -> "SignedDivisor":
        return SignedDivisor(tuple((n * c, k) for c, k in self.terms))

    __rmul__ = __mul__

    @property
    def degree(self) -> int:
        return sum(c for c, _ in self.terms)

    def points(self) -> list[tuple[int, CurvePoint]]:
        return [(c, k) for c, k in self.terms if isinstance(k, CurvePoint)]

    def matches(self, other: "SignedDivisor") -> bool:
        """Equality as formal sums, points compared at shared precision."""
        if len(self.terms) != len(other.terms):
            return False
        unused = list(other.terms)
        for c, key in self.terms:
            for i, (c2, key2) in enumerate(unused):
                if c == c2 and _same_key(key, key2):
                    del unused[i]
                    break
            else:
                return False
        return True

    def __repr__(self) -> str:
        return "SignedDivisor(" + " + ".join(f"{c}*{k!r}" for c, k in self.terms) + ")"


class LocalHeightOracle(Protocol):
    """Source of the local height h_p on divisors with disjoint support."""

    def height(self, left: SignedDivisor, right: SignedDivisor) -> PadicNumber:
        ...


@dataclass(frozen=True, eq=False)
class HeightRecord:
    left: SignedDivisor
    right: SignedDivisor
    value: PadicNumber
    source: str = "fixture"


@dataclass(eq=False)
class FixtureHeightOracle:
    """Looks local heights up in a list of records; symmetric in its arguments."""

    records: list[HeightRecord] = field(default_factory=list)
    queries: list[HeightRecord] = field(default_factory=list)

    def add(self, left: SignedDivisor, right: SignedDivisor, value: PadicNumber, source: str = "fixture") -> None:
        self.records.append(HeightRecord(left, right, value, source))

    def height(self, left: SignedDivisor, right: SignedDivisor) -> PadicNumber:
        for rec in self.records:
            if rec.left.matches(left) and rec.right.matches(right):
                self.queries.append(rec)
                return rec.value
            if rec.left.matches(right) and rec.right.matches(left):
                self.queries.append(rec)
                return rec.value
        raise MissingFixture(f"no local height recorded for ({left}, {right})")


@dataclass(frozen=True, eq=False)
class BilinearOracle:
    """Synthetic oracle: a symmetric bilinear form on labelled points.

    The height of two divisors is ``sum c_i d_j B(P_i, Q_j)`` where the form is
    looked up through ``key`` (a function sending a point to a hashable
    label).  It is used to test assembly identities without real data.
    """

    form: Mapping[tuple[str, str], Fraction]
    key: callable
    p: int
    precision: int

    def pair(self, a: str, b: str) -> Fraction:
        if (a, b) in self.form:
            return Fraction(self.form[(a, b)])
        return Fraction(self.form[(b, a)])

    def height(self, left: SignedDivisor, right: SignedDivisor) -> PadicNumber:
        total = Fraction(0)
        for c1, k1 in left.terms:
            for c2, k2 in right.terms:
                total += c1 * c2 * self.pair(self.key(k1), self.key(k2))
        return PadicNumber.from_rational(self.p, total, self.precision)


# ---------------------------------------------------------------------------
# tables and bilinear expansion


@dataclass(eq=False)
class HeightTable:
    """Pair heights ``h_v(left, right)`` keyed by labels and place."""

    prime: int
    entries: dict[tuple[str, str, str], PadicNumber] = field(default_factory=dict)

    def set(self, left: str, right: str, value: PadicNumber, place: str = "p") -> None:
        self.entries[(left, right, str(place))] = value

    def get(self, left: str, right: str, place: str = "p") -> PadicNumber:
        try:
            return self.entries[(left, right, str(place))]
        except KeyError:
            raise MissingFixture(f"missing height entry ({left}, {right}) at place {place}") from None

    def places(self, left: str, right: str) -> list[str]:
        return [pl for (l, r, pl) in self.entries if l == left and r == right]

    def total(self, left: str, right: str) -> PadicNumber:
        """Global height: the sum over every recorded place."""
        places = self.places(left, right)
        if not places:
            raise MissingFixture(f"missing height entry ({left}, {right})")
        value = None
        for pl in places:
            v = self.entries[(left, right, pl)]
            value = v if value is None else value + v
        return value

    def symmetry_conflicts(self) -> list[tuple[str, str, str]]:
        bad = []
        for (l, r, pl), v in self.entries.items():
            mirror = self.entries.get((r, l, pl))
            if mirror is not None and not (mirror == v):
                bad.append((l, r, pl))
        return bad

    def to_json(self) -> list[dict]:
        return [{"left": l, "right": r, "value": v.to_json(), "place": pl if pl == "p" else int(pl)} for (l, r, pl), v in self.entries.items()]

    @classmethod
    def from_json(cls, p: int, data: Sequence[Mapping]) -> "HeightTable":
        table = cls(p)
        for row in data:
            table.set(row["left"], row["right"], PadicNumber.from_json(row["value"]), str(row.get("place", "p")))
        return table


Combination = Union[Mapping[str, int], Sequence[tuple[str, int]]]


def _combination(x, labels: Sequence[str] | None) -> list[tuple[str, int]]:
    if isinstance(x, MWVector):
        if labels is None or len(labels) != len(x):
            raise ValueError("labels are required to expand a Mordell-Weil vector")
        return [(lab, c) for lab, c in zip(labels, x) if c]
    if isinstance(x, Mapping):
        return [(lab, c) for lab, c in x.items() if c]
    return [(lab, c) for lab, c in x if c]


def global_height(
    d,
    e,
    table: HeightTable,
    away: HeightTable | None = None,
    left_labels: Sequence[str] | None = None,
    right_labels: Sequence[str] | None = None,
    precision: int | None = None,
) -> PadicNumber:
    """``h(D, E)`` by bilinear expansion of labelled pair heights."""
    left = _combination(d, left_labels)
    right = _combination(e, right_labels)
    p = table.prime
    total = PadicNumber.zero(p, precision if precision is not None else _table_precision(table))
    for a, ca in left:
        for b, cb in right:
            total = total + table.total(a, b) * (ca * cb)
            if away is not None and away.places(a, b):
                total = total + away.total(a, b) * (ca * cb)
    return total


def _table_precision(table: HeightTable) -> int:
    return min((v.precision for v in table.entries.values()), default=20)


# ---------------------------------------------------------------------------
# the bad fibres


@dataclass(frozen=True)
class FiberComponentData:
    """Multidegree data for the special fibre at a bad prime q.

    ``multidegrees[i][j]`` is the degree on component j of component i (the
    intersection matrix).  ``meets_b[i]`` flags the components met by the
    closure of b; ``target`` is the multidegree of the restricted divisor.
    """

    q: int
    multidegrees: tuple[tuple[int, ...], ...]
    u_component: int
    meets_b: tuple[bool, ...]
    target: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "multidegrees", tuple(tuple(r) for r in self.multidegrees))
        object.__setattr__(self, "meets_b", tuple(bool(x) for x in self.meets_b))
        object.__setattr__(self, "target", tuple(self.target))
        n = len(self.multidegrees)
        if any(len(r) != len(self.target) for r in self.multidegrees) or len(self.meets_b) != n:
            raise ValueError("inconsistent fibre data")
        if not 0 <= self.u_component < n:
            raise ValueError("u_component out of range")


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rows[0]) if rows else 0
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots, row = [], 0
    for col in range(n):
        piv = next((r for r in range(row, len(a)) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for r in range(len(a)):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
    if any(all(x == 0 for x in r[:n]) and r[n] != 0 for r in a):
        raise NoSolution("vertical divisor system is inconsistent")
    if len(pivots) < n:
        raise NonUniqueSolution("vertical divisor system has free parameters")
    sol = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = a[r][n]
    return sol


def compute_vq(data: FiberComponentData) -> int | Fraction:
    """Coefficient on U's component of the vertical divisor cancelling the multidegree."""
    comps = len(data.multidegrees)
    if comps == 1:
        if any(data.target):
            raise NoSolution("one-component fibre with nonzero multidegree")
        return 0
    free = [i for i in range(comps) if not data.meets_b[i]]
    if not free or not any(data.target):
        if any(data.target):
            raise NoSolution("every component meets b")
        return 0
    rows = [[Fraction(data.multidegrees[i][j]) for i in free] for j in range(len(data.target))]
    rhs = [Fraction(-t) for t in data.target]
    sol = _solve_rational(rows, rhs)
    coeffs = dict(zip(free, sol))
    v = coeffs.get(data.u_component, Fraction(0))
    return int(v) if v.denominator == 1 else v


def height_away_from_p(vq: Mapping[int, int | Fraction], p: int, k: int) -> PadicNumber:
    """The constant ``-sum_q V_q log q`` attached to a simple open."""
    total = PadicNumber.zero(p, k)
    for q, v in vq.items():
        if q % p == 0:
            raise ValueError("bad primes must differ from p")
        total = total - iwasawa_log(PadicNumber.from_rational(p, q, k)) * v
    return total


def linear_equivalence_correction(r: TrackedFunction, d: SignedDivisor | Sequence[tuple[int, CurvePoint]]) -> PadicNumber:
    """``log r(D)`` for a degree-zero combination of points."""
    terms = d.points() if isinstance(d, SignedDivisor) else list(d)
    if isinstance(d, SignedDivisor) and len(terms) != len(d.terms):
        raise ValueError("named points cannot be evaluated")
    if sum(c for c, _ in terms) != 0:
        raise ValueError("divisor must have degree zero")
    total = None
    for c, pt in terms:
        term = r.log_at(pt) * c
        total = term if total is None else total + term
    if total is None:
        raise ValueError("empty divisor")
    return total


INFINITY = "inf"


def height_via_splitting(
    d1: SignedDivisor,
    d2: MumfordDivisor,
    oracle: LocalHeightOracle,
    n_max: int,
    k: int,
    extra: SignedDivisor | None = None,
    d1_on_model: SignedDivisor | None = None,
) -> PadicNumber:
    """``h_p(D1, D2 + extra)`` via the least multiple n <= n_max of D2 that splits.

    ``d2`` is the effective divisor div(u, v); a multiple n*d2 is replaced by
    its reduced representative plus the right number of copies of the point
    at infinity, and the tracked function is evaluated on ``d1_on_model``
    (the points of D1 on the model of d2, defaulting to D1 itself).
    """
    extra = extra or SignedDivisor()
    on_model = d1_on_model if d1_on_model is not None else d1
    for n in range(1, n_max + 1):
        dn, s_n = divisor_multiple(d2, n)
        try:
            pts = split_divisor(dn, k)
        except RepeatedRootModP:
            continue
        if isinstance(pts, NotSplit):
            continue
        right = SignedDivisor(tuple((1, q) for q in pts))
        surplus = n * d2.degree - dn.degree
        if surplus:
            right = right + SignedDivisor.of((surplus, INFINITY))
        right = right + extra * n
        value = oracle.height(d1, right)
        if not s_n.is_one():
            value = value + linear_equivalence_correction(s_n, on_model)
        return value / n
    raise NoSplitFound(f"no multiple n <= {n_max} splits over Q_p")


@dataclass(frozen=True, eq=False)
class RestrictedDivisor:
    """A description of A|_{z x X} as ``div(u, v) + split + div(function)``."""

    mumford: MumfordDivisor | None = None
    split: SignedDivisor = SignedDivisor()
    function: TrackedFunction | None = None


def psi_of_section(
    z: CurvePoint,
    restricted: RestrictedDivisor,
    oracle: LocalHeightOracle,
    away: PadicNumber | None,
    base: CurvePoint,
    change: OddModelChange | None = None,
    n_max: int = 6,
    k: int = 10,
) -> PadicNumber:
    """``h_p(z - b, A|_{z x X}) - sum_q V_q log q``.

    ``z`` and ``base`` live on the source model; the Mumford part, if any,
    lives on ``change.target``.
    """
    d1 = SignedDivisor.of((1, z), (-1, base))
    if restricted.mumford is not None:
        on_model = d1
        if change is not None:
            on_model = SignedDivisor.of((1, change.forward(z)), (-1, change.forward(base)))
        value = height_via_splitting(d1, restricted.mumford, oracle, n_max, k, restricted.split, on_model)
    else:
        value = oracle.height(d1, restricted.split)
    if restricted.function is not None:
        value = value + linear_equivalence_correction(restricted.function, d1)
    if away is not None:
        value = value + away
    return value


# ---------------------------------------------------------------------------
# tiny integrals


def tiny_integrals(model: HyperellipticModel, start: CurvePoint, end: CurvePoint, k: int) -> list[PadicNumber]:
    """``int_start^end x^i dx / 2y`` for i < g on an odd model ``y^2 = f(x)``.

    Both points must lie in one non-Weierstrass residue disk; the integrand
    is expanded in ``t = x - x(start)`` and integrated term by term.
    """
    if any(c for c in model.h if c != 0):
        raise ValueError("tiny integrals are implemented for h = 0 models")
    p = start.x.prime
    if not start.y.is_unit():
        raise PrecisionExhausted("start point must have a unit y-coordinate")
    t_end = end.x - start.x
    if t_end.valuation < 1 or not ((end.y - start.y).valuation >= 1):
        raise ValueError("points are not in the same residue disk")
    vt = t_end.valuation if not t_end.is_zero() else k
    # enough terms that (n+1)*vt - log_p(n+1) >= k
    terms = 1
    while (terms + 1) * vt - floor_log(terms + 1, p) < k:
        terms += 1
    guard = floor_log(terms + 1, p) + 2
    work = k + guard
    modulus = p**work
    f = model.f_poly(p, work)
    x0 = start.x.reduce(work)
    shifted = [c.to_int() % modulus for c in f.compose(PadicPoly(p, [x0, 1], work)).coeffs]
    y0 = start.y.to_int() % modulus
    inv_y0sq = pow(y0 * y0, -1, modulus)
    z = [c * inv_y0sq % modulus for c in shifted]
    z[0] = (z[0] - 1) % modulus  # f(x0 + t)/y0^2 = 1 + z(t)
    # (1 + z)^(-1/2) by the binomial series, truncated at degree `terms`
    series = _truncated_inverse_sqrt(z, terms + 1, p, modulus)
    inv_2y0 = pow(2 * y0, -1, modulus)
    g = model.genus
    results = []
    x0i = x0.to_int() % modulus
    for i in range(g):
        # (x0 + t)^i * series / (2 y0)
        poly = [1]
        for _ in range(i):
            poly = _mul_trunc(poly, [x0i, 1], terms + 1, modulus)
        integrand = _mul_trunc(poly, series, terms + 1, modulus)
        total = Fraction(0)
        tval = t_end.to_fraction()
        for n, c in enumerate(integrand):
            total += Fraction(c * inv_2y0 % modulus) * tval ** (n + 1) / (n + 1)
        results.append(PadicNumber.from_rational(p, total, min(k, t_end.precision, start.precision)))
    return results


def _mul_trunc(a: list[int], b: list[int], n: int, modulus: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] = (out[i + j] + x * y) % modulus
    return out


def _truncated_inverse_sqrt(z: list[int], n: int, p: int, modulus: int) -> list[int]:
    # sum_j binom(-1/2, j) z^j; binom(-1/2, j) = (-1)^j (2j choose j) / 4^j is a p-adic unit multiple
    result = [0] * n
    power = [1] + [0] * (n - 1)
    coeff = Fraction(1)
    for j in range(n):
        if j:
            power = _mul_trunc(power, z, n, modulus)
            coeff *= Fraction(-1, 2) - (j - 1)
            coeff /= j
        c = coeff.numerator * pow(coeff.denominator, -1, modulus) % modulus
        result = [(r + c * q) % modulus for r, q in zip(result, power)]
    return result
