"""Derive the exact inputs of the X0(67)+ fixture bundle from the curve equations.

Reads ``x0_67_plus_equations.txt`` and prints JSON with

* ``g_functions``: g_P0 and g_P1 written as (a(x) + b(x) y) / d(x), rational
  coefficient lists from low to high degree;
* ``d_p1``: the Mumford pair (u, v) of D_f restricted to P1 = (7, y1) over
  Q(sqrt(190401)), each coefficient a pair (rational part, sqrt part).

This needs sympy (``pip install sympy``) and takes a few minutes, mostly in
the factorization over the quadratic field.  The package itself does not
depend on sympy; the bundle stores the output.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import sympy as sp

x, y, u, v = sp.symbols("x y u v")
DISC = 190401
H = u**3 + u + 1
F = u**5 - u


def read_blocks(path: Path) -> dict[str, sp.Expr]:
    blocks = {}
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    for chunk in "\n".join(lines).split("\n---\n"):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, expr = chunk.split(":", 1)
        blocks[name.strip()] = sp.sympify(expr.strip())
    return blocks


def as_a_b_d(g: sp.Expr) -> dict[str, list[str]]:
    num, den = sp.fraction(sp.together(g))
    num = sp.Poly(sp.expand(num), v)
    b, a = num.coeff_monomial(v), num.coeff_monomial(1)

    def coeffs(e):
        return [str(sp.Rational(c)) for c in sp.Poly(sp.expand(e), u).all_coeffs()[::-1]]

    return {"a": coeffs(a), "b": coeffs(b), "d": coeffs(den)}


def split_sqrt(e: sp.Expr) -> list[str]:
    s = sp.sqrt(DISC)
    e = sp.radsimp(sp.expand(e))
    c0 = sp.nsimplify(e.subs(s, 0))
    c1 = sp.nsimplify(sp.expand((e - c0) / s))
    return [str(sp.Rational(c0)), str(sp.Rational(c1))]


def restricted_divisor(gens: list[sp.Expr]) -> dict:
    s = sp.sqrt(DISC)
    y1 = (-351 + s) / 2
    third = sp.expand(gens[2].subs(x, 7))
    _, factors = sp.factor_list(third, u, extension=s)
    for q, _ in factors:
        q = sp.Poly(q, u)
        if q.degree() < 1:
            continue
        rows = []
        for k in (3, 4):
            lin = sp.Poly(sp.expand(gens[k].subs({x: 7, y: y1})), v)
            rows.append((sp.Poly(lin.coeff_monomial(1), u), sp.Poly(lin.coeff_monomial(v), u)))
        (a4, b4), (a5, b5) = rows
        consistency = sp.rem(sp.expand(a4.as_expr() * b5.as_expr() - a5.as_expr() * b4.as_expr()), q.as_expr(), u)
        if sp.simplify(consistency) != 0:
            continue
        monic = sp.Poly(q.as_expr() / q.LC(), u)
        inv, _, g = sp.gcdex(b4.as_expr(), monic.as_expr(), u, extension=s)
        vpoly = sp.rem(sp.expand(-a4.as_expr() * inv / g), monic.as_expr(), u)
        vpoly = sp.Poly(sp.radsimp(sp.expand(vpoly)), u)
        check = sp.rem(sp.expand(vpoly.as_expr() ** 2 + H * vpoly.as_expr() - F), monic.as_expr(), u)
        if sp.simplify(check) != 0:
            raise RuntimeError("restricted divisor fails u | v^2 + h v - f")
        return {
            "field_disc": DISC,
            "root_residue": 6,
            "u": [split_sqrt(c) for c in monic.all_coeffs()[::-1]],
            "v": [split_sqrt(c) for c in vpoly.all_coeffs()[::-1]],
        }
    raise RuntimeError("no consistent factor found")


def main(argv=None) -> None:
    here = Path(__file__).resolve().parent
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--equations", type=Path, default=here / "x0_67_plus_equations.txt")
    ap.add_argument("--skip-divisor", action="store_true", help="only derive the g functions")
    args = ap.parse_args(argv)
    blocks = read_blocks(args.equations)
    out = {"g_functions": {name: as_a_b_d(blocks[name].subs(v, v)) for name in ("g_P0", "g_P1")}}
    if not args.skip_divisor:
        gens = [blocks[f"D_f[{i}]"] for i in range(5)]
        out["d_p1"] = restricted_divisor(gens)
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
