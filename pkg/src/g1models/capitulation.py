"""Search for small discriminants D(u) over integer hyperplanes and compare with H_E^(2n-2)."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Sequence

from flint import fmpz

from .discform import DegenerateSlice, disc_eval, slice_table
from .omega import invariants, omega_element
from .points_algebra import AlgebraTable, OrderTable, shifted_order
from .resolution import ResolutionModel, from_g1m, to_g1m

__all__ = ["naive_height", "minimal_invariants", "primitive_vectors", "SearchReport", "Certificate",
           "search_min_disc", "capitulation_certificate", "bound_report", "BoundReport", "EmptySearch"]


class EmptySearch(ArithmeticError):
    """Every enumerated hyperplane was degenerate."""


def naive_height(c4, c6) -> float:
    """H_E = max(|c4|^(1/4), |c6|^(1/6))."""
    return max(abs(float(c4)) ** 0.25, abs(float(c6)) ** (1 / 6))


def _v(p: int, x: int) -> int:
    if x == 0:
        return 10 ** 9
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def _kraus(c4: int, c6: int, p: int) -> bool:
    """Local Kraus condition at p for (c4, c6) to come from an integral Weierstrass model."""
    if p == 3:
        return _v(3, c6) != 2
    if p == 2:
        return c6 % 4 == 3 or (_v(2, c4) >= 4 and c6 % 32 in (0, 8))
    return True


def minimal_invariants(c4, c6) -> tuple[int, int, int]:
    """(c4', c6', u) with (c4, c6) = (u^4 c4', u^6 c6') and (c4', c6') minimal.

    Uses the Kraus conditions at 2 and 3; rational input is first scaled to
    the smallest integral pair.
    """
    c4, c6 = Fraction(str(c4)), Fraction(str(c6))
    if c4 ** 3 == c6 ** 2:
        raise ValueError("singular curve (c4^3 = c6^2)")
    scale = Fraction(1)
    while (c4 * scale ** 4).denominator != 1 or (c6 * scale ** 6).denominator != 1:
        d = (c4 * scale ** 4).denominator * (c6 * scale ** 6).denominator
        scale *= min(p for p in range(2, d + 1) if d % p == 0)
    a4, a6 = int(c4 * scale ** 4), int(c6 * scale ** 6)
    primes = set()
    for x in (a4, a6):
        if x:
            primes |= {int(p) for p, _ in fmpz(abs(x)).factor()}
    u = 1
    for p in sorted(primes):
        emax = min(_v(p, a4) // 4, _v(p, a6) // 6)
        for e in range(emax, -1, -1):
            b4, b6 = a4 // p ** (4 * e), a6 // p ** (6 * e)
            if _kraus(b4, b6, p) and (b4 ** 3 - b6 ** 2) % 1728 == 0:
                break
        else:
            e = 0
        a4, a6 = a4 // p ** (4 * e), a6 // p ** (6 * e)
        u *= p ** e
    if (a4 ** 3 - a6 ** 2) % 1728 or not all(_kraus(a4, a6, p) for p in (2, 3)):
        raise ValueError("(c4, c6) are not the invariants of a rational elliptic curve")
    return a4, a6, Fraction(u) / scale


def primitive_vectors(n: int, radius: int) -> list[tuple[int, ...]]:
    """Primitive u with max|u_i| <= radius, one per sign pair, ordered by (height, lex)."""
    out = []
    for u in product(range(-radius, radius + 1), repeat=n):
        if not any(u) or gcd(*u) != 1:
            continue
        if next(x for x in u if x) < 0:
            continue
        out.append(u)
    out.sort(key=lambda u: (max(map(abs, u)), u))
    return out


@dataclass
class SearchReport:
    best_u: tuple
    best_value: int
    algebra: AlgebraTable
    order: OrderTable
    c4: Fraction
    c6: Fraction
    H_E: float
    ratio: float
    radius: int
    evaluated: int
    degenerate: int
    minimal: bool
    values: dict = field(default_factory=dict, repr=False)

    def as_dict(self) -> dict:
        return {
            "best_u": list(self.best_u),
            "best_value": self.best_value,
            "H_E": self.H_E,
            "ratio": self.ratio,
            "radius": self.radius,
            "evaluated": self.evaluated,
            "degenerate": self.degenerate,
            "c4": str(self.c4),
            "c6": str(self.c6),
            "minimal": "MINIMAL" if self.minimal else "NON-MINIMAL",
            "order": self.order.lines(),
        }

    def lines(self) -> list[str]:
        d = self.as_dict()
        out = [f"{k}: {v}" for k, v in d.items() if k != "order"]
        return out + ["order: " + line for line in d["order"]]


def _eval_batch(args):
    text, us = args
    model = from_g1m(text)
    out = []
    for u in us:
        try:
            out.append((u, int(disc_eval(model, u))))
        except DegenerateSlice:
            out.append((u, 0))
    return out


def _evaluate_all(model, vecs, threads):
    if threads > 1 and len(vecs) > 1:
        text = to_g1m(model)
        chunks = [vecs[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(threads) as ex:
            res = [r for part in ex.map(_eval_batch, [(text, c) for c in chunks]) for r in part]
        return dict(res)
    vals = {}
    for u in vecs:
        try:
            v = disc_eval(model, u)
        except DegenerateSlice:
            v = 0
        if v.q != 1:
            raise ArithmeticError(f"non-integral D{u} = {v}; is the model integral?")
        vals[u] = int(v)
    return vals


def _model_height(model):
    c4, c6 = invariants(omega_element(model))
    c4, c6 = Fraction(int(c4.p), int(c4.q)), Fraction(int(c6.p), int(c6.q))
    m4, m6, _ = minimal_invariants(c4, c6)
    return c4, c6, naive_height(m4, m6), (m4, m6) == (c4, c6)


def _best(vals):
    nz = [(abs(v), u) for u, v in vals.items() if v != 0]
    if not nz:
        raise EmptySearch("all hyperplanes in the box are degenerate; the model is inconsistent")
    return min(nz)[1]


def search_min_disc(model: ResolutionModel, radius: int = 2, threads: int = 1) -> SearchReport:
    """Minimal nonzero |D(u)| over primitive u with max|u_i| <= radius."""
    if model.coefficient_domain != "integers":
        raise ValueError("search_min_disc needs an integral model")
    if radius < 1:
        raise ValueError("radius must be positive")
    vecs = primitive_vectors(model.n, radius)
    vals = _evaluate_all(model, vecs, threads)
    u = _best(vals)
    c4, c6, H, minimal = _model_height(model)
    tab = slice_table(model, u)
    order = shifted_order(tab)
    if order.disc() != vals[u]:
        raise ArithmeticError("certificate discriminant disagrees with disc_eval")
    n = model.n
    return SearchReport(u, vals[u], tab, order, c4, c6, H, abs(vals[u]) / H ** (2 * n - 2), radius,
                        len(vecs), sum(1 for v in vals.values() if v == 0), minimal, vals)


@dataclass
class Certificate:
    u: tuple
    disc: int
    table: AlgebraTable
    order: OrderTable
    transcript: list[str]


def capitulation_certificate(model: ResolutionModel, u: Sequence[int]) -> Certificate:
    """Order of discriminant D(u) in the algebra of the section u . x = 0, with its checks."""
    u = tuple(int(x) for x in u)
    D = disc_eval(model, u)
    if D == 0:
        raise DegenerateSlice(f"D{u} = 0: the hyperplane is tangent, no etale certificate")
    tab = slice_table(model, u)
    order = shifted_order(tab)
    checks = [
        ("commutative", tab.is_commutative() and order.is_commutative()),
        ("associative", tab.is_associative() and order.is_associative()),
        ("trace zero basis", tab.traces_zero()),
        ("integral structure constants", order.is_integral()),
        ("trace determinant equals D(u)", order.disc() == D),
    ]
    transcript = [f"{name}: {'ok' if ok else 'FAILED'}" for name, ok in checks]
    if not all(ok for _, ok in checks):
        raise ArithmeticError("certificate checks failed: " + "; ".join(transcript))
    return Certificate(u, int(D), tab, order, transcript)


@dataclass
class BoundReport:
    report: SearchReport
    table: list            # (radius, best_u, best_value, ratio)

    def lines(self) -> list[str]:
        out = ["radius  best_value  ratio  best_u"]
        for R, u, v, r in self.table:
            out.append(f"{R}  {v}  {r:.6g}  {list(u)}")
        return out + self.report.lines()


def bound_report(model: ResolutionModel, radii: Sequence[int] = (1, 2, 3), threads: int = 1) -> BoundReport:
    """Ratio |min D| / H_E^(2n-2) at increasing box radii (one enumeration at the largest)."""
    radii = sorted(radii)
    rep = search_min_disc(model, radii[-1], threads)
    n = model.n
    rows = []
    for R in radii:
        sub = {u: v for u, v in rep.values.items() if max(map(abs, u)) <= R}
        try:
            u = _best(sub)
        except EmptySearch:
            rows.append((R, (), 0, float("inf")))
            continue
        rows.append((R, u, sub[u], abs(sub[u]) / rep.H_E ** (2 * n - 2)))
    return BoundReport(rep, rows)
