"""Small integer-lattice utilities: primitive vectors, SL_n completions, HNF bases."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from flint import fmpq_mat, fmpz_mat

from .exactmath import to_fmpq, to_fraction

__all__ = ["primitive_vector", "complete_row", "annihilator_basis", "ext_gcd"]


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def primitive_vector(v: Sequence) -> list[int]:
    """Scale a nonzero rational vector to a primitive integer vector."""
    fr = [to_fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise ValueError("zero vector")
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints]


def _det_one(M: list[list[Fraction]]) -> list[list[Fraction]]:
    d = to_fraction(as_q(M).det())
    if d != 1 and len(M) > 1:
        M[1] = [Fraction(x) / d for x in M[1]]
    return M


def as_q(M) -> fmpq_mat:
    return fmpq_mat(len(M), len(M[0]), [to_fmpq(x) for r in M for x in r])


def complete_row(u: Sequence, mode: str = "integer") -> fmpq_mat:
    """Matrix of determinant 1 whose first row is u.

    ``integer`` mode needs a primitive integer u and returns an SL_n(Z)
    matrix built from extended gcds; ``rational`` mode accepts any nonzero u.
    """
    n = len(u)
    if mode == "rational":
        fr = [to_fraction(x) for x in u]
        p = next((i for i, x in enumerate(fr) if x != 0), None)
        if p is None:
            raise ValueError("zero vector has no completion")
        rows = [fr] + [[Fraction(int(i == j)) for i in range(n)] for j in range(n) if j != p]
        if n == 1:
            if fr[0] != 1:
                raise ValueError("1x1 completion needs u = (1)")
            return as_q(rows)
        return as_q(_det_one(rows))
    if mode != "integer":
        raise ValueError("mode must be 'integer' or 'rational'")
    ints = [to_fraction(x) for x in u]
    if any(x.denominator != 1 for x in ints):
        raise ValueError("integer completion needs an integer vector")
    w = [int(x) for x in ints]
    g = 0
    for x in w:
        g = gcd(g, x)
    if g != 1:
        raise ValueError("vector is not primitive")
    # column operations V with w V = e_1; the completion is V^{-1}
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    for j in range(n - 1, 0, -1):
        a, b = w[j - 1], w[j]
        if b == 0:
            continue
        gg, s, t = ext_gcd(a, b)
        for row in V:
            cj1, cj = row[j - 1], row[j]
            row[j - 1], row[j] = s * cj1 + t * cj, -(b // gg) * cj1 + (a // gg) * cj
        w[j - 1], w[j] = gg, 0
    if w[0] == -1:
        for row in V:
            row[0] = -row[0]
    G = as_q(V).inv()
    if G.det() != 1:
        for j in range(n):
            G[n - 1, j] = -G[n - 1, j]
    return G


def annihilator_basis(p: Sequence[int]) -> list[list[int]]:
    """HNF basis of the integer row vectors c with c . p = 0 (p primitive)."""
    n = len(p)
    G = complete_row(p, "integer").transpose()          # first column p
    Gi = G.inv()                                         # Gi p = e_1
    rows = [[int(Gi[i, j].p) for j in range(n)] for i in range(1, n)]
    if n == 1:
        return []
    H = fmpz_mat(rows).hnf()
    return [[int(H[i, j]) for j in range(n)] for i in range(H.nrows())]
