"""One residue disk at a time: embed the curve, eliminate, compose with kappa, solve.

A disk is parametrized by ``nu`` through ``x = x0 + p*nu`` (or through y on
a ramified disk).  Sampled values of phi o lambda come from a
:class:`DiskSampler`, the curve's image is cut out by equations in the
coordinates x_1..x_{g+rho-1}, and those equations are pulled back along
phi o kappa to polynomials in n_1..n_r whose roots mod p are found by
enumeration and then Hensel lifted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .biextension import KappaContext, PolyMapKappa, kappa_poly
from .errors import (
    DegreeBoundExceeded,
    EnumerationTooLarge,
    InsufficientSamples,
    InvariantViolation,
    MissingFixture,
    NotInDisk,
    NoUnitPivot,
    PrecisionExhausted,
    RamifiedDisk,
    SingularJacobian,
)
from .heights import (
    LocalHeightOracle,
    RestrictedDivisor,
    psi_of_section,
    tiny_integrals,
)
from .jacobian import (
    CurvePoint,
    HyperellipticModel,
    OddModelChange,
    disk_point,
    disk_point_y,
)
from .padic_core import (
    MultiPoly,
    PadicNumber,
    PadicPoly,
    ProfileKind,
    ValuationProfile,
    enumerate_residues,
    hensel_lift_multivariate,
    interpolate_poly_mod_pk,
    solve_linear_mod,
)

ENUMERATION_GUARD = 10**6


# ---------------------------------------------------------------------------
# sampling phi o lambda


class DiskSampler(Protocol):
    """Source of the raw values needed to evaluate phi o lambda at one point."""

    def log_difference(self, nu: int, point: CurvePoint) -> tuple[PadicNumber, ...]:
        """``log(P_nu - b)`` minus the first-leg offset."""

    def psi(self, nu: int, point: CurvePoint) -> tuple[PadicNumber, ...]:
        """``psi(j_b(P_nu))`` for every trace-zero endomorphism."""


@dataclass(eq=False)
class SectionSampler:
    """Samples from restricted sections, a local height oracle and tiny integrals.

    ``sections[nu]`` describes A|_{P_nu x X} for each endomorphism.  Log
    differences are tiny integrals from ``log_reference`` (a point whose log
    equals the configured offset) on the odd model of ``change``, unless a
    value is given in ``log_values``.  Direct ``psi_values`` override the
    oracle computation for the listed nu.
    """

    model: HyperellipticModel
    base: CurvePoint
    oracle: LocalHeightOracle
    sections: Mapping[int, tuple[RestrictedDivisor, ...]] = field(default_factory=dict)
    away: tuple[PadicNumber, ...] | None = None
    change: OddModelChange | None = None
    log_reference: CurvePoint | None = None
    log_values: Mapping[int, tuple[PadicNumber, ...]] = field(default_factory=dict)
    psi_values: Mapping[int, tuple[PadicNumber, ...]] = field(default_factory=dict)
    n_max: int = 6
    work_precision: int = 12
    provenance: list[dict] = field(default_factory=list)

    def log_difference(self, nu: int, point: CurvePoint) -> tuple[PadicNumber, ...]:
        if nu in self.log_values:
            self.provenance.append({"quantity": "log", "nu": nu, "source": "fixture"})
            return tuple(self.log_values[nu])
        if self.log_reference is None:
            raise MissingFixture(f"no log value for nu = {nu} and no reference point")
        model, start, end = self.model, self.log_reference, point
        if self.change is not None:
            model, start, end = self.change.target, self.change.forward(start), self.change.forward(point)
        ints = tiny_integrals(model, start, end, self.work_precision)
        self.provenance.append({"quantity": "log", "nu": nu, "source": "computed: tiny integral"})
        return tuple(ints)

    def psi(self, nu: int, point: CurvePoint) -> tuple[PadicNumber, ...]:
        if nu in self.psi_values:
            self.provenance.append({"quantity": "psi", "nu": nu, "source": "fixture"})
            return tuple(self.psi_values[nu])
        if nu not in self.sections:
            raise MissingFixture(f"no restricted section recorded for nu = {nu}")
        out = []
        for t, restricted in enumerate(self.sections[nu]):
            away = self.away[t] if self.away is not None else None
            before = len(getattr(self.oracle, "queries", []))
            value = psi_of_section(
                point, restricted, self.oracle, away, self.base, self.change, self.n_max, self.work_precision
            )
            used = [q.source for q in getattr(self.oracle, "queries", [])[before:]]
            self.provenance.append({"quantity": "psi", "nu": nu, "endo": t, "source": "computed", "oracle": used})
            out.append(value)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class DiskContext:
    """A residue disk together with where its sample values come from."""

    model: HyperellipticModel
    center: CurvePoint
    kappa: KappaContext
    sampler: DiskSampler
    parameter: str = "x"  # "y" on ramified disks
    v: int = 0

    @property
    def p(self) -> int:
        return self.kappa.p

    def point(self, nu: PadicNumber | int, k: int) -> CurvePoint:
        if self.parameter == "y":
            return disk_point_y(self.model, self.center, nu, k)
        return disk_point(self.model, self.center, nu, k)

    def phi_lambda(self, nu: int, k: int, work: int = 12) -> tuple[PadicNumber, ...]:
        """``phi(j_b(P_nu))`` before reduction, at precision about k."""
        p = self.p
        pt = self.point(PadicNumber.from_rational(p, nu, work), work)
        logs = self.sampler.log_difference(nu, pt)
        psis = self.sampler.psi(nu, pt)
        log_off, h_off = self.kappa.offsets()
        del log_off  # the sampler already subtracts the first-leg offset
        if len(logs) != self.kappa.g or len(psis) != len(self.kappa.endos):
            raise InvariantViolation("sampler returned the wrong number of coordinates")
        raw = [x / p for x in logs] + [(h - o) / p for h, o in zip(psis, h_off)]
        for x in raw:
            if x.precision < k:
                raise PrecisionExhausted(f"phi o lambda at nu = {nu} known only mod p^{x.precision}")
        return tuple(raw)


@dataclass(frozen=True, eq=False)
class EmbeddingMap:
    """phi o lambda as one polynomial in nu per coordinate, mod p^k."""

    coords: tuple[PadicPoly, ...]
    k: int
    samples: tuple[int, ...] = ()

    @property
    def prime(self) -> int:
        return self.coords[0].prime

    def evaluate(self, nu: int) -> tuple[int, ...]:
        m = self.prime**self.k
        return tuple(c(nu).to_int() % m if c.coeffs else 0 for c in self.coords)

    def linear_coefficients(self) -> tuple[int, ...]:
        return tuple(c.coeff(1).to_int() % self.prime if c.degree >= 1 else 0 for c in self.coords)

    def format(self, var: str = "nu") -> list[str]:
        out = []
        for c in self.coords:
            mono = MultiPoly(self.prime, self.k, 1, {(i,): a.to_int() for i, a in enumerate(c.coeffs)})
            out.append(mono.format([var]))
        return out


def profiles_for(ctx: KappaContext, v: int = 0) -> tuple[ValuationProfile, ...]:
    first = ValuationProfile(ProfileKind.EMBEDDING_FIRST_G)
    height = ValuationProfile(ProfileKind.EMBEDDING_HEIGHT, v)
    return (first,) * ctx.g + (height,) * len(ctx.endos)


def embed_disk(ctx: DiskContext, k: int, extra_samples: int = 0) -> EmbeddingMap:
    """Interpolate phi o lambda mod p^k from samples at nu = 0, 1, 2, ..."""
    p = ctx.p
    profiles = profiles_for(ctx.kappa, ctx.v)
    needed = max(pr.degree_bound(k, p) for pr in profiles) + 1 + extra_samples
    if needed > p:
        raise PrecisionExhausted(f"{needed} samples needed but only {p} distinct residues exist")
    samples = []
    for nu in range(needed):
        samples.append((nu, ctx.phi_lambda(nu, k)))
    coords = []
    for idx, prof in enumerate(profiles):
        pts = [(nu, vals[idx]) for nu, vals in samples]
        coords.append(interpolate_poly_mod_pk(pts, prof, k, prime=p))
    return EmbeddingMap(tuple(coords), k, tuple(nu for nu, _ in samples))


# ---------------------------------------------------------------------------
# elimination


@dataclass(frozen=True, eq=False)
class Elimination:
    """Equations g_i in x_1..x_N for the image of the disk, plus nu as a function of x_pivot."""

    equations: tuple[MultiPoly, ...]
    pivot: int
    nu_series: PadicPoly  # nu in terms of t = x_pivot - constant
    pivot_constant: int
    embedding: EmbeddingMap

    def __iter__(self):
        return iter(self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def __getitem__(self, i: int) -> MultiPoly:
        return self.equations[i]

    def nu_of(self, x_pivot: int) -> int:
        m = self.embedding.prime**self.embedding.k
        t = (x_pivot - self.pivot_constant) % m
        return self.nu_series(t).to_int() % m if self.nu_series.coeffs else 0


def _poly_mod(coeffs: Sequence[int], m: int, top: int) -> list[int]:
    out = [c % m for c in coeffs[: top + 1]]
    while out and out[-1] == 0:
        out.pop()
    return out


def _mul_mod(a: Sequence[int], b: Sequence[int], m: int, top: int) -> list[int]:
    out = [0] * min(len(a) + len(b) - 1, top + 1) if a and b else []
    for i, x in enumerate(a):
        if not x or i > top:
            continue
        for j, y in enumerate(b):
            if i + j > top:
                break
            out[i + j] = (out[i + j] + x * y) % m
    return _poly_mod(out, m, top)


def _compose_mod(outer: Sequence[int], inner: Sequence[int], m: int, top: int) -> list[int]:
    acc: list[int] = []
    for c in reversed(outer):
        acc = _mul_mod(acc, inner, m, top)
        acc = _poly_mod([c] if not acc else [acc[0] + c] + acc[1:], m, top)
    return acc


def _invert_series(coeffs: Sequence[int], p: int, k: int) -> list[int]:
    """Compositional inverse of ``a1 t + a2 t^2 + ...`` mod p^k, a1 a unit.

    The result is truncated at the first degree beyond which every
    coefficient vanishes; PrecisionExhausted is raised if that does not
    happen within a generous window.
    """
    m = p**k
    a = list(coeffs)
    a1 = a[1] % m if len(a) > 1 else 0
    if a1 % p == 0:
        raise NoUnitPivot("pivot coefficient is not a unit")
    inv = pow(a1, -1, m)
    top = max(8, 4 * max(len(a), 2) * k)
    nu: list[int] = [0, inv]
    for _ in range(top + 2):
        higher = [0, 0] + a[2:]
        corr = _compose_mod(higher, nu, m, top)
        new = _poly_mod([0, inv] + [0] * top, m, top)
        for i, c in enumerate(corr):
            if i < len(new):
                new[i] = (new[i] - inv * c) % m
            else:
                new.append(-inv * c % m)
        new = _poly_mod(new, m, top)
        if new == nu:
            break
        nu = new
    else:
        raise PrecisionExhausted("series inversion did not stabilize")
    if len(nu) > top // 2:
        raise PrecisionExhausted("inverse series does not terminate mod p^k")
    return nu


def eliminate_embedding(embedding: EmbeddingMap, k: int | None = None) -> Elimination:
    """Cut out the image of phi o lambda by solving nu from one coordinate.

    The pivot is the last coordinate whose linear coefficient is a unit;
    nu is expressed through it and substituted into the others, giving
    ``g_i = x_i - E_i(nu(x_pivot))``.  Equations that do not involve the
    pivot modulo p are listed first.
    """
    k = embedding.k if k is None else k
    if k > embedding.k:
        raise PrecisionExhausted(f"embedding known mod p^{embedding.k}, asked for p^{k}")
    p = embedding.prime
    m = p**k
    coords = [[c.to_int() % m for c in poly.coeffs] for poly in embedding.coords]
    n = len(coords)
    lin = [(c[1] if len(c) > 1 else 0) % p for c in coords]
    pivots = [i for i in range(n) if lin[i]]
    if not pivots:
        raise NoUnitPivot("no coordinate of the embedding has a unit linear coefficient")
    piv = pivots[-1]
    a0 = coords[piv][0] if coords[piv] else 0
    nu_t = _invert_series([0] + coords[piv][1:], p, k)
    # nu as a polynomial in x_piv: substitute t = x_piv - a0
    x = MultiPoly.variable(p, k, n, piv)
    t_poly = x - a0
    nu_x = MultiPoly.constant(p, k, n, 0)
    power = MultiPoly.constant(p, k, n, 1)
    for c in nu_t:
        if c:
            nu_x = nu_x + power * c
        power = power * t_poly
    eqs = []
    for i in range(n):
        if i == piv:
            continue
        e = MultiPoly.constant(p, k, n, 0)
        power = MultiPoly.constant(p, k, n, 1)
        for c in coords[i]:
            if c:
                e = e + power * c
            power = power * nu_x
        eqs.append(MultiPoly.variable(p, k, n, i) - e)
    # decided mod p so that the order does not depend on k
    order = sorted(range(len(eqs)), key=lambda j: (_involves(eqs[j].reduce(1), piv), j))
    ordered = tuple(eqs[j] for j in order)
    reduced = EmbeddingMap(tuple(c.reduce(k) for c in embedding.coords), k, embedding.samples)
    return Elimination(ordered, piv, PadicPoly(p, nu_t, k) if nu_t else PadicPoly(p, [], k), a0, reduced)


def _involves(f: MultiPoly, i: int) -> bool:
    return any(mono[i] for mono in f.terms)


# ---------------------------------------------------------------------------
# small polynomial algebra over F_p for the finiteness test


def _ftrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fsub(a, b, p):
    n = max(len(a), len(b))
    return _ftrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _fmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _ftrim(out)


def _fdivmod(a, b, p):
    a = list(a)
    q = [0] * max(len(a) - len(b) + 1, 1)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = c
        a = _fsub(a, [0] * shift + [c * x % p for x in b], p)
    return _ftrim(q), a


def _fgcd(a, b, p):
    a, b = _ftrim(list(a)), _ftrim(list(b))
    while b:
        a, b = b, _fdivmod(a, b, p)[1]
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _as_bivariate(f: MultiPoly, p: int) -> list[list[int]]:
    """Coefficients in n_2 (outer) of polynomials in n_1 (inner), reduced mod p."""
    deg2 = max((m[1] for m in f.terms), default=0)
    out = [[] for _ in range(deg2 + 1)]
    for (e1, e2), c in f.terms.items():
        row = out[e2]
        row.extend([0] * (e1 + 1 - len(row)))
        row[e1] = (row[e1] + c) % p
    out = [_ftrim(r) for r in out]
    while out and not out[-1]:
        out.pop()
    return out


def _content(F, p):
    g: list[int] = []
    for c in F:
        g = _fgcd(g, c, p) if g else _fgcd(c, [], p)
    return g


def _primitive(F, p):
    c = _content(F, p)
    return [_fdivmod(x, c, p)[0] if x else [] for x in F], c


def _bi_prem(F, G, p):
    """Pseudo-remainder of F by G in (F_p[n1])[n2]."""
    R = [list(c) for c in F]
    lc = G[-1]
    while len(R) >= len(G) and R:
        shift = len(R) - len(G)
        top = R[-1]
        R = [_fmul(c, lc, p) for c in R]
        for i, g in enumerate(G):
            R[i + shift] = _fsub(R[i + shift], _fmul(top, g, p), p)
        while R and not R[-1]:
            R.pop()
    return R


def _bivariate_gcd(F, G, p):
    """gcd(F, G) in F_p[n1, n2] up to a unit: content gcd times the primitive PRS gcd."""
    if not F:
        return G
    if not G:
        return F
    F, cf = _primitive(F, p)
    G, cg = _primitive(G, p)
    cont = _fgcd(cf, cg, p)
    if len(F) < len(G):
        F, G = G, F
    while len(G) > 1:
        R = _bi_prem(F, G, p)
        F, G = G, (_primitive(R, p)[0] if R else [])
        if not G:
            break
    body = F if not G else [[1]]
    return [_fmul(c, cont, p) for c in body]


def _total_degree(F) -> int:
    return max((i + len(c) - 1 for i, c in enumerate(F) if c), default=0)


def algebra_is_finite(system: Sequence[MultiPoly], p: int) -> bool | None:
    """Whether F_p[n]/(system mod p) is finite-dimensional (None when undecided)."""
    if not system:
        return False
    r = system[0].nvars
    reduced = [f.reduce(1) for f in system]
    live = [f for f in reduced if not f.is_zero()]
    if not live:
        return False
    if r == 1:
        return True
    if r == 2:
        acc = _as_bivariate(live[0], p)
        for f in live[1:]:
            acc = _bivariate_gcd(acc, _as_bivariate(f, p), p)
        return _total_degree(acc) == 0 and len(live) > 1
    return None


# ---------------------------------------------------------------------------
# solving


@dataclass(frozen=True, eq=False)
class Candidate:
    """A common zero (n, nu) with the curve point it predicts."""

    n: tuple[int, ...]
    nu: int
    precision: int
    point: CurvePoint | None
    lifted: bool
    torsor: tuple[int, ...] = ()

    def to_json(self) -> dict:
        out = {"n": list(self.n), "nu": self.nu, "precision": self.precision, "lifted": self.lifted}
        if self.point is not None:
            out["point"] = self.point.to_json()
        if self.torsor:
            out["torsor"] = list(self.torsor)
        return out


@dataclass(eq=False)
class DiskReport:
    """Everything computed for one disk."""

    center: CurvePoint
    k: int
    embedding: EmbeddingMap | None
    g_equations: tuple[MultiPoly, ...]
    composed: tuple[MultiPoly, ...]
    finite: bool | None
    bound: int | None
    mod_p_solutions: tuple[tuple[int, ...], ...]
    candidates: list[Candidate]
    unlifted: list[Candidate] = field(default_factory=list)
    provenance: list[dict] = field(default_factory=list)

    def to_json(self, names: Sequence[str] | None = None) -> dict:
        r = self.composed[0].nvars if self.composed else 0
        nnames = [f"n{i + 1}" for i in range(r)]
        xn = len(self.embedding.coords) if self.embedding else 0
        xnames = [f"x{i + 1}" for i in range(xn)]
        return {
            "center": self.center.to_json(),
            "precision": self.k,
            "embedding": self.embedding.format() if self.embedding else None,
            "g_equations": [g.format(xnames) for g in self.g_equations],
            "composed": [f.format(nnames) for f in self.composed],
            "finite": self.finite,
            "bound": self.bound,
            "mod_p_solutions": [list(s) for s in self.mod_p_solutions],
            "candidates": [c.to_json() for c in self.candidates],
            "unlifted": [c.to_json() for c in self.unlifted],
            "provenance": self.provenance,
        }


def compose_system(g_equations: Iterable[MultiPoly], kappa: PolyMapKappa, k: int) -> tuple[MultiPoly, ...]:
    """``g_i o (phi o kappa)`` reduced mod p^k."""
    subs = [f.reduce(k) for f in kappa.entries]
    return tuple(g.reduce(k).compose(subs) for g in g_equations)


def mod_p_zeros(system: Sequence[MultiPoly], p: int, guard: int = ENUMERATION_GUARD) -> list[tuple[int, ...]]:
    """All common zeros in F_p^r by exhaustive search."""
    if not system:
        return []
    r = system[0].nvars
    if p**r > guard:
        raise EnumerationTooLarge(f"p^r = {p}^{r} exceeds the guard {guard}")
    reduced = [f.reduce(1) for f in system]
    return [pt for pt in enumerate_residues(p, r) if all(f.evaluate(pt) % p == 0 for f in reduced)]


def _square_subsystem(system: Sequence[MultiPoly], point: Sequence[int]) -> list[MultiPoly] | None:
    r = system[0].nvars
    p = system[0].prime
    for combo in itertools.combinations(range(len(system)), r):
        sub = [system[i] for i in combo]
        jac = [[f.partial(j).evaluate(point) % p for j in range(r)] for f in sub]
        try:
            solve_linear_mod(jac, [0] * r, p, 1)
        except SingularJacobian:
            continue
        return sub
    return None


def solve_disk(
    g_equations: Elimination | Sequence[MultiPoly],
    kappa: PolyMapKappa,
    k: int,
    *,
    model: HyperellipticModel | None = None,
    center: CurvePoint | None = None,
    parameter: str = "x",
    guard: int = ENUMERATION_GUARD,
) -> DiskReport:
    """Pull the equations back along phi o kappa and solve mod p^k."""
    eqs = tuple(g_equations)
    if not eqs:
        raise InvariantViolation("no equations to solve")
    p = eqs[0].prime
    composed = compose_system(eqs, kappa, k)
    sols = mod_p_zeros(composed, p, guard)
    finite = algebra_is_finite(composed, p)
    bound = None
    if finite and len(composed) == composed[0].nvars:
        bound = 1
        for f in composed:
            bound *= max(f.reduce(1).total_degree(), 0)
    elim = g_equations if isinstance(g_equations, Elimination) else None
    candidates, unlifted = [], []
    m = p**k
    for s in sols:
        sub = _square_subsystem(composed, s)
        lifted = sub is not None
        if lifted:
            n = tuple(x.to_int() % m for x in hensel_lift_multivariate(sub, s, k))
            prec = k
        else:
            n, prec = tuple(s), 1
        nu, point = None, None
        if elim is not None:
            values = kappa.evaluate(n)
            mod = p**prec
            nu = elim.nu_of(values[elim.pivot]) % mod
            _verify(elim, kappa, n, nu, prec)
            if model is not None and center is not None:
                point = _point(model, center, parameter, nu, prec + 1)
        cand = Candidate(n, nu if nu is not None else -1, prec, point, lifted)
        (candidates if lifted else unlifted).append(cand)
    return DiskReport(
        center if center is not None else CurvePoint(PadicNumber.zero(p, 1), PadicNumber.zero(p, 1)),
        k,
        elim.embedding if elim is not None else None,
        eqs,
        composed,
        finite,
        bound,
        tuple(sols),
        candidates,
        unlifted,
    )


def _point(model, center, parameter, nu, k):
    p = center.x.prime
    nu_p = PadicNumber.from_rational(p, nu, k)
    if parameter == "y":
        return disk_point_y(model, center, nu_p, k)
    return disk_point(model, center, nu_p, k)


def _verify(elim: Elimination, kappa: PolyMapKappa, n, nu, k) -> None:
    p = elim.embedding.prime
    m = p**k
    kap = [x % m for x in kappa.reduce(k).evaluate(n)]
    lam = [x % m for x in EmbeddingMap(tuple(c.reduce(k) for c in elim.embedding.coords), k).evaluate(nu)]
    if kap != lam:
        raise InvariantViolation(f"candidate n = {n}, nu = {nu} does not satisfy kappa(n) = lambda(nu) mod p^{k}")
    for g in elim.equations:
        if g.reduce(k).evaluate(kap) % m:
            raise InvariantViolation("candidate does not satisfy the curve equations")


# ---------------------------------------------------------------------------
# higher residue disks


def refine_higher_disk(
    ctx: DiskContext,
    candidate: Candidate,
    kappa_fine: PolyMapKappa,
    j: int = 1,
    guard: int = ENUMERATION_GUARD,
) -> list[Candidate]:
    """Solve in the residue disks of a candidate mod p^j, returning candidates mod p^(j+1).

    Points are reparametrized as ``nu0 + p^j mu`` and lattice points as
    ``n0 + p^j n'``; both sides become affine linear mod p, so the solve is
    an enumeration over (n', mu).  ``kappa_fine`` must be known mod p^(j+1).
    """
    p = ctx.p
    if kappa_fine.entries[0].exponent < j + 1:
        raise PrecisionExhausted(f"kappa needed mod p^{j + 1}")
    mj = p**j
    nu0 = candidate.nu % mj
    n0 = tuple(x % mj for x in candidate.n)
    r = len(n0)
    if p ** (r + 1) > guard:
        raise EnumerationTooLarge("higher-disk enumeration exceeds the guard")
    # embedding along nu0 + p^j mu: first-order in mu, sampled at mu = 0, 1
    lam0 = [x.to_int() for x in ctx.phi_lambda(nu0, j + 1)]
    lam1 = [x.to_int() for x in ctx.phi_lambda(nu0 + mj, j + 1)]
    base = [x % mj for x in lam0]
    kap = kappa_fine.reduce(j + 1)
    if [x % mj for x in kap.evaluate(n0)] != base:
        raise InvariantViolation("the candidate is not a solution mod p^j")
    mfine = p ** (j + 1)

    def scaled(vals):
        return tuple(((v - b) % mfine) // mj for v, b in zip(vals, base))

    l0, l1 = scaled(lam0), scaled(lam1)
    slope = tuple((b - a) % p for a, b in zip(l0, l1))
    out = []
    for nprime in enumerate_residues(p, r):
        n = tuple(a + mj * b for a, b in zip(n0, nprime))
        kv = scaled(kap.evaluate(n))
        for mu in range(p):
            lv = tuple((a + mu * s) % p for a, s in zip(l0, slope))
            if kv == lv:
                nu = nu0 + mj * mu
                pt = _point(ctx.model, ctx.center, ctx.parameter, nu, j + 2)
                out.append(Candidate(n, nu, j + 1, pt, True, kv))
    return out


# ---------------------------------------------------------------------------
# the union over disks


@dataclass(eq=False)
class GeoSet:
    """Candidates over all processed disks and the disks left out, with reasons."""

    candidates: list[CurvePoint] = field(default_factory=list)
    reports: dict[tuple[int, int], DiskReport] = field(default_factory=dict)
    unprocessed: dict[tuple[int, int], str] = field(default_factory=dict)
    skipped: dict[tuple[int, int], str] = field(default_factory=dict)
    partners: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        key = lambda c: f"{c[0]},{c[1]}"  # noqa: E731
        return {
            "candidates": [c.to_json() for c in self.candidates],
            "reports": {key(c): r.to_json() for c, r in self.reports.items()},
            "unprocessed": {key(c): v for c, v in self.unprocessed.items()},
            "skipped": {key(c): v for c, v in self.skipped.items()},
            "partners": {key(c): key(v) for c, v in self.partners.items()},
        }


def _residue(pt: CurvePoint, p: int) -> tuple[int, int]:
    return (pt.x.to_int() % p, pt.y.to_int() % p)


def _partner(model: HyperellipticModel, p: int, c: tuple[int, int]) -> tuple[int, int]:
    ptc = CurvePoint(PadicNumber.from_rational(p, c[0], 1), PadicNumber.from_rational(p, c[1], 1))
    return _residue(model.involution(ptc), p)


def _fold(result: GeoSet, model: HyperellipticModel, c, partner, report: DiskReport) -> None:
    result.partners[c] = partner
    result.candidates.extend(model.involution(cd.point) for cd in report.candidates if cd.point is not None)


def geo_set(
    model: HyperellipticModel,
    p: int,
    centers: Sequence[tuple[int, int]],
    build: Callable[[tuple[int, int]], DiskContext],
    k: int = 1,
    skip: Mapping[tuple[int, int], str] | None = None,
) -> GeoSet:
    """Run every disk, folding disks that are involution images of processed ones.

    ``build`` returns the context for a center and may raise MissingFixture,
    in which case the disk is recorded as unprocessed.
    """
    skip = dict(skip or {})
    result = GeoSet()
    done: dict[tuple[int, int], DiskReport] = {}
    for c in centers:
        c = (c[0] % p, c[1] % p)
        if c in skip:
            result.skipped[c] = skip[c]
            continue
        partner = _partner(model, p, c)
        if partner in done and partner != c:
            _fold(result, model, c, partner, done[partner])
            continue
        try:
            ctx = build(c)
            emb = embed_disk(ctx, k)
            elim = eliminate_embedding(emb, k)
            kap = kappa_poly(ctx.kappa, k)
            report = solve_disk(elim, kap, k, model=model, center=ctx.center, parameter=ctx.parameter)
        except (MissingFixture, RamifiedDisk, NoUnitPivot, DegreeBoundExceeded, PrecisionExhausted, InsufficientSamples, NotInDisk) as exc:
            result.unprocessed[c] = f"{type(exc).__name__}: {exc}"
            continue
        sampler = ctx.sampler
        report.provenance = list(getattr(sampler, "provenance", []))
        done[c] = report
        result.reports[c] = report
        result.candidates.extend(cd.point for cd in report.candidates if cd.point is not None)
    # a disk that failed before its involution partner was processed
    for c in list(result.unprocessed):
        partner = _partner(model, p, c)
        if partner in done and partner != c:
            del result.unprocessed[c]
            _fold(result, model, c, partner, done[partner])
    return result
