"""The trivial biextension J(Q_p) x J(Q_p) x Q_p and the kappa parametrization.

Points of the Jacobian are stored through their logarithms, so both partial
group laws are plain vector additions.  A point may also remember which
Mordell-Weil combination each leg came from; that is what lets
:func:`rho_N` compare its height coordinate with the global height.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    DimensionMismatch,
    FitMismatch,
    LegMismatch,
    MissingFixture,
    NotInDisk,
    PrecisionExhausted,
)
from .heights import HeightTable, global_height
from .jacobian import EndoData, MWVector, mw_apply_endo, mw_change_basis
from .padic_core import MultiPoly, PadicNumber

Legs = Mapping[str, int]


class Leg(str, enum.Enum):
    FIRST = "first"
    SECOND = "second"


def _add_combo(a: Legs | None, b: Legs | None, sa: int = 1, sb: int = 1) -> dict[str, int] | None:
    if a is None or b is None:
        return None
    out = {k: sa * v for k, v in a.items()}
    for k, v in b.items():
        out[k] = out.get(k, 0) + sb * v
    return {k: v for k, v in out.items() if v}


def _same_combo(a: Legs | None, b: Legs | None) -> bool:
    if a is None or b is None:
        return True
    return {k: v for k, v in a.items() if v} == {k: v for k, v in b.items() if v}


@dataclass(frozen=True, eq=False)
class BiextPoint:
    """``(log D, log E, h)``, optionally with the combinations behind D and E."""

    log_d: tuple[PadicNumber, ...]
    log_e: tuple[PadicNumber, ...]
    height: PadicNumber
    left: Legs | None = None
    right: Legs | None = None

    def __post_init__(self):
        object.__setattr__(self, "log_d", tuple(self.log_d))
        object.__setattr__(self, "log_e", tuple(self.log_e))
        if len(self.log_d) != len(self.log_e):
            raise DimensionMismatch("log vectors must both have length g")

    @property
    def genus(self) -> int:
        return len(self.log_d)

    @classmethod
    def neutral_first(cls, log_e: Sequence[PadicNumber], right: Legs | None = None) -> "BiextPoint":
        """The zero of the first law over a fixed second leg."""
        zero = [PadicNumber.zero(x.prime, x.precision) for x in log_e]
        p = log_e[0].prime
        return cls(tuple(zero), tuple(log_e), PadicNumber.zero(p, max(x.precision for x in log_e)), {}, right)

    def equals(self, other: "BiextPoint") -> bool:
        return (
            all(a == b for a, b in zip(self.log_d, other.log_d))
            and all(a == b for a, b in zip(self.log_e, other.log_e))
            and self.height == other.height
        )

    def to_json(self) -> dict:
        return {
            "log_d": [x.to_json() for x in self.log_d],
            "log_e": [x.to_json() for x in self.log_e],
            "height": self.height.to_json(),
        }


def biext_add(a: BiextPoint, b: BiextPoint, leg: Leg | str) -> BiextPoint:
    """Add along the first leg (second leg fixed) or along the second leg."""
    leg = Leg(leg)
    if a.genus != b.genus:
        raise DimensionMismatch("points over Jacobians of different dimension")
    if leg is Leg.FIRST:
        if not all(x == y for x, y in zip(a.log_e, b.log_e)) or not _same_combo(a.right, b.right):
            raise LegMismatch("first-leg addition needs equal second legs")
        log_d = tuple(x + y for x, y in zip(a.log_d, b.log_d))
        return BiextPoint(log_d, a.log_e, a.height + b.height, _add_combo(a.left, b.left), a.right if a.right is not None else b.right)
    if not all(x == y for x, y in zip(a.log_d, b.log_d)) or not _same_combo(a.left, b.left):
        raise LegMismatch("second-leg addition needs equal first legs")
    log_e = tuple(x + y for x, y in zip(a.log_e, b.log_e))
    return BiextPoint(a.log_d, log_e, a.height + b.height, a.left if a.left is not None else b.left, _add_combo(a.right, b.right))


def scalar_leg(a: BiextPoint, n: int, leg: Leg | str) -> BiextPoint:
    """``n`` times ``a`` for one partial group law (n = 0 gives that law's zero)."""
    leg = Leg(leg)
    if leg is Leg.FIRST:
        left = None if a.left is None else {k: n * v for k, v in a.left.items() if n * v}
        return BiextPoint(tuple(x * n for x in a.log_d), a.log_e, a.height * n, left, a.right)
    right = None if a.right is None else {k: n * v for k, v in a.right.items() if n * v}
    return BiextPoint(a.log_d, tuple(x * n for x in a.log_e), a.height * n, a.left, right)


def biext_sum(points: Sequence[BiextPoint], leg: Leg | str) -> BiextPoint:
    acc = points[0]
    for pt in points[1:]:
        acc = biext_add(acc, pt, leg)
    return acc


def rho_N(point: BiextPoint, table: HeightTable, away: HeightTable | None = None) -> PadicNumber:
    """``h(D, E) - x``, which vanishes on points coming from integral points."""
    if point.left is None or point.right is None:
        raise MissingFixture("point does not carry Mordell-Weil coordinates for both legs")
    h = global_height(point.left, point.right, table, away, precision=point.height.precision)
    return h - point.height


# ---------------------------------------------------------------------------
# context


@dataclass(frozen=True, eq=False)
class EndoContext:
    """One trace-zero endomorphism with the table labels of f(G_j) and of c."""

    endo: EndoData
    right_labels: tuple[str, ...]
    c_label: str

    def __post_init__(self):
        object.__setattr__(self, "right_labels", tuple(self.right_labels))
        if len(self.right_labels) != self.endo.rank:
            raise DimensionMismatch("one right label per generator is required")


@dataclass(frozen=True, eq=False)
class KappaContext:
    """Everything needed to write down phi o kappa on one torsor residue disk."""

    p: int
    g: int
    rho: int
    generator_labels: tuple[str, ...]
    logs: Mapping[str, tuple[PadicNumber, ...]]
    e_base: tuple[int, ...]
    e_kernel: tuple[tuple[int, ...], ...]
    endos: tuple[EndoContext, ...]
    table: HeightTable
    away: HeightTable | None = None
    log_offset: tuple[PadicNumber, ...] | None = None
    height_offsets: tuple[PadicNumber, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "generator_labels", tuple(self.generator_labels))
        object.__setattr__(self, "e_base", tuple(int(x) for x in self.e_base))
        object.__setattr__(self, "e_kernel", tuple(tuple(int(x) for x in row) for row in self.e_kernel))
        object.__setattr__(self, "endos", tuple(self.endos))
        rp = len(self.generator_labels)
        if len(self.e_base) != rp or any(len(row) != rp for row in self.e_kernel):
            raise DimensionMismatch("e-coefficients must have one column per generator")
        if len(self.endos) != self.rho - 1:
            raise DimensionMismatch(f"expected {self.rho - 1} endomorphisms, got {len(self.endos)}")
        for lab in self.generator_labels:
            if lab not in self.logs:
                raise MissingFixture(f"missing log vector for {lab}")
            if len(self.logs[lab]) != self.g:
                raise DimensionMismatch(f"log vector of {lab} has the wrong length")
        if any(e.endo.rank != rp for e in self.endos):
            raise DimensionMismatch("endomorphism rank differs from the generator count")

    @property
    def r(self) -> int:
        return len(self.e_kernel)

    @property
    def rank(self) -> int:
        return len(self.generator_labels)

    def _precision(self) -> int:
        return min(x.precision for v in self.logs.values() for x in v)

    def log_of(self, v: MWVector) -> tuple[PadicNumber, ...]:
        """Logarithm of a Mordell-Weil combination of the generators."""
        out = [PadicNumber.zero(self.p, self._precision()) for _ in range(self.g)]
        for c, lab in zip(v, self.generator_labels):
            if c:
                out = [o + x * c for o, x in zip(out, self.logs[lab])]
        return tuple(out)

    def base_log(self) -> tuple[PadicNumber, ...]:
        return self.log_of(MWVector(self.e_base))

    def offsets(self) -> tuple[tuple[PadicNumber, ...], tuple[PadicNumber, ...]]:
        log_off = self.log_offset if self.log_offset is not None else self.base_log()
        if self.height_offsets is not None:
            h_off = self.height_offsets
        else:
            h_off = tuple(PadicNumber.zero(self.p, self._precision()) for _ in self.endos)
        return tuple(log_off), tuple(h_off)

    def right_combo(self, t: int, v: MWVector, with_c: int = 0) -> tuple[dict[str, int], MWVector]:
        """Labels for ``f_t(v) + with_c * c`` and the same point in generator coordinates."""
        ectx = self.endos[t]
        combo = {lab: c for lab, c in zip(ectx.right_labels, v) if c}
        if with_c:
            combo[ectx.c_label] = combo.get(ectx.c_label, 0) + with_c
        mw = mw_apply_endo(ectx.endo, v) + ectx.endo.c * with_c
        return combo, mw


# ---------------------------------------------------------------------------
# Q_ij and the P, R, S points


def build_Qij(ctx: KappaContext, i: int, j: int, t: int = 0) -> BiextPoint:
    """``(G_i, f_t(G_j), h)`` for j >= 1 and ``(G_i, c_t, h)`` for j = 0 (1-based i, j)."""
    ectx = ctx.endos[t]
    rp = ctx.rank
    if not (1 <= i <= rp and 0 <= j <= rp):
        raise IndexError("generator index out of range")
    left_lab = ctx.generator_labels[i - 1]
    if j == 0:
        right_lab = ectx.c_label
        right_mw = ectx.endo.c
    else:
        right_lab = ectx.right_labels[j - 1]
        right_mw = mw_apply_endo(ectx.endo, MWVector.basis(rp, j - 1))
    height = ctx.table.total(left_lab, right_lab)
    if ctx.away is not None and ctx.away.places(left_lab, right_lab):
        height = height + ctx.away.total(left_lab, right_lab)
    return BiextPoint(ctx.logs[left_lab], ctx.log_of(right_mw), height, {left_lab: 1}, {right_lab: 1})


@dataclass(frozen=True, eq=False)
class PRS:
    """The points P_ij, R_i, S_j and the base point T (indices 1-based in P, R, S)."""

    P: dict[tuple[int, int], BiextPoint]
    R: dict[int, BiextPoint]
    S: dict[int, BiextPoint]
    T: BiextPoint


def _second_sum(ctx: KappaContext, t: int, k: int, weights: Sequence[int], c_weight: int, m: int) -> BiextPoint:
    """``m *_2 (c_weight Q_k0 +_2 sum_l weights[l] Q_kl)`` for fixed k."""
    pieces = []
    if c_weight:
        pieces.append(scalar_leg(build_Qij(ctx, k, 0, t), m * c_weight, Leg.SECOND))
    for l, w in enumerate(weights, start=1):
        if w:
            pieces.append(scalar_leg(build_Qij(ctx, k, l, t), m * w, Leg.SECOND))
    if not pieces:
        zero = build_Qij(ctx, k, 1, t)
        return scalar_leg(zero, 0, Leg.SECOND)
    return biext_sum(pieces, Leg.SECOND)


def _first_sum(ctx: KappaContext, t: int, outer: Sequence[int], weights: Sequence[int], c_weight: int) -> BiextPoint:
    m = ctx.endos[t].endo.m
    pieces = []
    for k, w in enumerate(outer, start=1):
        inner = _second_sum(ctx, t, k, weights, c_weight, m)
        pieces.append(scalar_leg(inner, w, Leg.FIRST))
    return biext_sum(pieces, Leg.FIRST)


def build_PRS(ctx: KappaContext, t: int = 0) -> PRS:
    """The combinations of Q_kl that make up kappa over the Z-points."""
    e, e0 = ctx.e_kernel, ctx.e_base
    P = {(i, j): _first_sum(ctx, t, e[i - 1], e[j - 1], 0) for i in range(1, ctx.r + 1) for j in range(1, ctx.r + 1)}
    R = {i: _first_sum(ctx, t, e[i - 1], e0, 1) for i in range(1, ctx.r + 1)}
    S = {j: _first_sum(ctx, t, e0, e[j - 1], 0) for j in range(1, ctx.r + 1)}
    T = _first_sum(ctx, t, e0, e0, 1)
    return PRS(P, R, S, T)


# ---------------------------------------------------------------------------
# kappa


def kappa_point_direct(ctx: KappaContext, n: Sequence[int], t: int = 0) -> BiextPoint:
    """The point over ``D = G_t + sum (p-1) n_i Gt_i`` and ``m (f_t(D) + c_t)``.

    Its height coordinate is the bilinear expansion of the global height; this
    is the integral-point value that kappa interpolates.
    """
    if len(n) != ctx.r:
        raise DimensionMismatch("n must have r coordinates")
    d = MWVector(ctx.e_base) + mw_change_basis(ctx.e_kernel, MWVector(tuple((ctx.p - 1) * x for x in n)))
    m = ctx.endos[t].endo.m
    right_combo, right_mw = ctx.right_combo(t, d * m, with_c=m)
    left_combo = {lab: c for lab, c in zip(ctx.generator_labels, d) if c}
    height = global_height(left_combo, right_combo, ctx.table, ctx.away, precision=ctx._precision())
    return BiextPoint(ctx.log_of(d), ctx.log_of(right_mw), height, left_combo, right_combo)


def kappa_point(ctx: KappaContext, n: Sequence[int], t: int = 0, prs: PRS | None = None) -> BiextPoint:
    """kappa_Z(n) assembled from P, R, S, T with the two group laws."""
    prs = prs or build_PRS(ctx, t)
    q = ctx.p - 1
    sn = [q * x for x in n]
    rows = []
    # for each i (and the base), second-leg combination over j
    for i in range(ctx.r + 1):
        parts = []
        for j in range(ctx.r + 1):
            if i == 0 and j == 0:
                pt, w = prs.T, 1
            elif i == 0:
                pt, w = prs.S[j], sn[j - 1]
            elif j == 0:
                pt, w = prs.R[i], sn[i - 1]
            else:
                pt, w = prs.P[(i, j)], sn[i - 1] * sn[j - 1]
            parts.append((pt, w))
        rows.append(parts)
    # the j-sum at fixed i needs equal first legs, so scale along the first
    # law on the i side and the second law on the j side
    total = None
    for i, parts in enumerate(rows):
        scaled = []
        for j, (pt, w) in enumerate(parts):
            wi = 1 if i == 0 else sn[i - 1]
            wj = 1 if j == 0 else sn[j - 1]
            scaled.append(scalar_leg(scalar_leg(pt, wi, Leg.FIRST), wj, Leg.SECOND))
        row = biext_sum(scaled, Leg.SECOND)
        total = row if total is None else biext_add(total, row, Leg.FIRST)
    return total


@dataclass(frozen=True, eq=False)
class PolyMapKappa:
    """phi o kappa: g linear forms followed by rho - 1 quadratics over Z/p^k."""

    linear: tuple[MultiPoly, ...]
    quadratic: tuple[MultiPoly, ...]

    @property
    def entries(self) -> tuple[MultiPoly, ...]:
        return self.linear + self.quadratic

    def evaluate(self, n: Sequence[int]) -> tuple[int, ...]:
        return tuple(f.evaluate(n) for f in self.entries)

    def reduce(self, k: int) -> "PolyMapKappa":
        return PolyMapKappa(tuple(f.reduce(k) for f in self.linear), tuple(f.reduce(k) for f in self.quadratic))

    def shape_ok(self) -> bool:
        lin = all(f.total_degree() <= 1 and f.constant_term() == 0 for f in self.linear)
        quad = all(f.total_degree() <= 2 for f in self.quadratic)
        return lin and quad

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMapKappa):
            return NotImplemented
        return all(a == b for a, b in zip(self.entries, other.entries)) and len(self.entries) == len(other.entries)

    __hash__ = None


def _fit_quadratic(values: Mapping[tuple[int, ...], int], r: int, p: int, k: int) -> MultiPoly:
    """Quadratic through the values on {0,1,2}-grid with total degree <= 2."""
    modulus = p**k
    inv2 = pow(2, -1, modulus)
    zero = (0,) * r

    def unit(i):
        v = [0] * r
        v[i] = 1
        return v

    def at(vec):
        return values[tuple(vec)]

    c0 = at(zero) % modulus
    terms: dict[tuple[int, ...], int] = {zero: c0}
    lin, sq = [0] * r, [0] * r
    for i in range(r):
        e1 = unit(i)
        e2 = [2 * x for x in e1]
        f1, f2 = at(e1), at(e2)
        a = (f2 - 2 * f1 + c0) * inv2 % modulus  # coefficient of n_i^2
        b = (f1 - c0 - a) % modulus
        sq[i], lin[i] = a, b
        mono = [0] * r
        mono[i] = 2
        terms[tuple(mono)] = a
        mono[i] = 1
        terms[tuple(mono)] = b
    for i, j in itertools.combinations(range(r), 2):
        v = [0] * r
        v[i] = v[j] = 1
        cross = (at(v) - c0 - lin[i] - lin[j] - sq[i] - sq[j]) % modulus
        mono = [0] * r
        mono[i] = mono[j] = 1
        terms[tuple(mono)] = cross
    return MultiPoly(p, k, r, terms)


def _grid(r: int) -> list[tuple[int, ...]]:
    pts = {(0,) * r}
    for i in range(r):
        for s in (1, 2):
            v = [0] * r
            v[i] = s
            pts.add(tuple(v))
    for i, j in itertools.combinations(range(r), 2):
        v = [0] * r
        v[i] = v[j] = 1
        pts.add(tuple(v))
    return sorted(pts)


def _check_points(r: int, count: int = 20) -> list[tuple[int, ...]]:
    # deterministic lattice points away from the fitting grid
    out = []
    for s in itertools.count(3):
        for v in itertools.product(range(-s, s + 1), repeat=r):
            if max(abs(x) for x in v) == s:
                out.append(v)
                if len(out) == count:
                    return out


def _scaled_int(x: PadicNumber, p: int, k: int, what: str) -> int:
    if x.valuation < 1 and not x.is_zero():
        raise NotInDisk(f"{what} is not divisible by p")
    if x.precision < k + 1:
        raise PrecisionExhausted(f"{what} known only mod p^{x.precision}, need p^{k + 1}")
    return (x.to_int() // p) % p**k


def kappa_z_values(ctx: KappaContext, n: Sequence[int]) -> tuple[PadicNumber, ...]:
    """Raw coordinates of kappa_Z(n): first log, second log per endomorphism, then heights."""
    pts = [kappa_point(ctx, n, t) for t in range(len(ctx.endos))]
    second = tuple(x for pt in pts for x in pt.log_e)
    return tuple(pts[0].log_d) + second + tuple(pt.height for pt in pts)


def kappa_z_poly(ctx: KappaContext, k: int) -> tuple[MultiPoly, ...]:
    """Polynomials in n (mod p^k) for every raw coordinate of kappa_Z."""
    grid = _grid(ctx.r)
    samples = {v: kappa_z_values(ctx, v) for v in grid}
    width = len(next(iter(samples.values())))
    polys = []
    for idx in range(width):
        vals = {}
        for v, vals_v in samples.items():
            x = vals_v[idx]
            if x.valuation < 0:
                raise NotInDisk("kappa coordinate is not integral")
            if x.precision < k:
                raise PrecisionExhausted(f"kappa coordinate known only mod p^{x.precision}")
            vals[v] = x.to_int()
        polys.append(_fit_quadratic(vals, ctx.r, ctx.p, k))
    return tuple(polys)


def kappa_poly(ctx: KappaContext, k: int, check_points: int = 20) -> PolyMapKappa:
    """phi o kappa modulo p^k, fitted on a small grid and checked elsewhere."""
    p, r = ctx.p, ctx.r
    log_off, h_off = ctx.offsets()
    grid = _grid(r)

    def phi_values(n):
        pts = [kappa_point(ctx, n, t) for t in range(len(ctx.endos))]
        out = [_scaled_int(x - o, p, k, "log coordinate") for x, o in zip(pts[0].log_d, log_off)]
        out += [_scaled_int(pt.height - o, p, k, "height coordinate") for pt, o in zip(pts, h_off)]
        return out

    samples = {v: phi_values(v) for v in grid}
    polys = [_fit_quadratic({v: s[i] for v, s in samples.items()}, r, p, k) for i in range(ctx.g + len(ctx.endos))]
    for v in _check_points(r, check_points):
        direct = phi_values(v)
        fitted = [f.evaluate(v) for f in polys]
        if direct != fitted:
            raise FitMismatch(f"kappa is not quadratic at {v}")
    lin = tuple(polys[: ctx.g])
    quad = tuple(polys[ctx.g :])
    result = PolyMapKappa(lin, quad)
    if not result.shape_ok():
        raise FitMismatch("first coordinates of phi o kappa are not homogeneous linear")
    return result


def phi(points: BiextPoint | Sequence[BiextPoint], ctx: KappaContext, k: int) -> tuple[int, ...]:
    """The coordinates ``((log - offset)/p, (height - offset)/p)`` modulo p^k.

    ``points`` holds one biextension point per endomorphism, all sharing the
    first leg; a single point is accepted when rho = 2.
    """
    pts = [points] if isinstance(points, BiextPoint) else list(points)
    if len(pts) != len(ctx.endos):
        raise DimensionMismatch("one point per endomorphism is required")
    log_off, h_off = ctx.offsets()
    out = [_scaled_int(x - o, ctx.p, k, "log coordinate") for x, o in zip(pts[0].log_d, log_off)]
    out += [_scaled_int(pt.height - o, ctx.p, k, "height coordinate") for pt, o in zip(pts, h_off)]
    return tuple(out)


def phi_values(log_d: Sequence[PadicNumber], heights: Sequence[PadicNumber], ctx: KappaContext, k: int) -> tuple[int, ...]:
    """phi for a point given by its first-leg log and height coordinates only."""
    log_off, h_off = ctx.offsets()
    if len(log_d) != ctx.g or len(heights) != len(ctx.endos):
        raise DimensionMismatch("wrong number of coordinates")
    out = [_scaled_int(x - o, ctx.p, k, "log coordinate") for x, o in zip(log_d, log_off)]
    out += [_scaled_int(h - o, ctx.p, k, "height coordinate") for h, o in zip(heights, h_off)]
    return tuple(out)
