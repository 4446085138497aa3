"""Brackets, the Omega element, the star action and the invariants c4, c6."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb
from typing import Sequence

import numpy as np
from flint import fmpq, fmpq_mat

from .exactmath import Form, FormMatrix, as_matrix, to_fmpq
from .resolution import ResolutionModel

__all__ = [
    "OmegaElement", "bracket", "double_bracket", "omega_element", "star_action",
    "covariant_action", "invariants", "invariants_numeric", "jacobian_equation",
    "WeierstrassData", "omega_const", "perm_sign",
]


def perm_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class OmegaElement:
    """Omega quadrics.  ``entries`` is an alternating n x n matrix of Forms
    for curves (m = n) and a list of n - 1 Forms for points (m = n - 1)."""

    n: int
    m: int
    entries: tuple
    scale_note: str = "eta_0 = +1 on F_0"

    @property
    def is_curve(self) -> bool:
        return self.m == self.n

    def matrix(self) -> list[list[Form]]:
        if not self.is_curve:
            raise ValueError("points-case Omega is a vector")
        return [list(r) for r in self.entries]

    def vector(self) -> list[Form]:
        if self.is_curve:
            raise ValueError("curve-case Omega is a matrix")
        return list(self.entries)

    def hessians(self) -> np.ndarray:
        """Array W with W[i,j,a,b] (curve) or W[k,a,b] (points) = second partials."""
        m = self.m
        flat = [f for row in self.entries for f in row] if self.is_curve else list(self.entries)
        out = np.empty((len(flat), m, m), dtype=object)
        for k, f in enumerate(flat):
            for a in range(m):
                for b in range(m):
                    e = [0] * m
                    e[a] += 1
                    e[b] += 1
                    c = f.coeff(tuple(e))
                    out[k, a, b] = c * 2 if a == b else c
        shape = (self.n, self.n, m, m) if self.is_curve else (self.n - 1, m, m)
        return out.reshape(shape)

    def scale(self, c) -> "OmegaElement":
        c = to_fmpq(c)
        if self.is_curve:
            ent = tuple(tuple(f * c for f in row) for row in self.entries)
        else:
            ent = tuple(f * c for f in self.entries)
        return OmegaElement(self.n, self.m, ent, self.scale_note)

    def substitute(self, g) -> "OmegaElement":
        if self.is_curve:
            fm = FormMatrix.from_forms(self.matrix(), self.m).substitute(g)
            ent = tuple(tuple(r) for r in fm.to_forms())
        else:
            fm = FormMatrix.from_forms([self.vector()], self.m).substitute(g)
            ent = tuple(fm.to_forms()[0])
        return OmegaElement(self.n, self.m, ent, self.scale_note)

    def is_zero(self) -> bool:
        flat = [f for row in self.entries for f in row] if self.is_curve else self.entries
        return all(f.is_zero() for f in flat)

    def __str__(self):
        if self.is_curve:
            return "\n".join(f"Omega_{i + 1}{j + 1} = {self.entries[i][j]}"
                             for i in range(self.n) for j in range(i + 1, self.n))
        return "\n".join(f"Omega_{k + 1} = {f}" for k, f in enumerate(self.entries))


def _derivs(model: ResolutionModel):
    return [[p.diff(a) for a in range(model.m)] for p in model.phi]


def bracket(model: ResolutionModel, a: Sequence[int], _d=None) -> Form:
    """[a_1, ..., a_{n-2}] with 0-based variable indices."""
    L = model.n - 2
    if len(a) != L:
        raise ValueError(f"bracket needs {L} indices")
    if any(not 0 <= x < model.m for x in a):
        raise IndexError("bracket index out of range")
    d = _d or _derivs(model)
    prod = d[0][a[0]]
    for i in range(1, L):
        prod = prod @ d[i][a[i]]
    return prod.entry(0, 0)


def double_bracket(model: ResolutionModel, a: Sequence[int], _d=None, rotations: str = "literal") -> Form:
    """Sum of [a] over the rotations sigma^{2k}, k = 1..n-2, sigma the (n-2)-cycle.

    ``rotations="distinct"`` counts each rotation once; it differs from the
    literal sum by a factor 2 when n is even.
    """
    L = len(a)
    ks = [(2 * k) % L for k in range(1, L + 1)]
    shifts = sorted(set(ks)) if rotations == "distinct" else ks
    d = _d or _derivs(model)
    total = Form(model.m)
    for s in shifts:
        total = total + bracket(model, tuple(a[s:]) + tuple(a[:s]), d)
    return total


def omega_element(model: ResolutionModel, rotations: str = "literal") -> OmegaElement:
    if rotations not in ("literal", "distinct"):
        raise ValueError("rotations must be 'literal' or 'distinct'")
    n, m = model.n, model.m
    d = _derivs(model)
    full = range(m)
    if m == n:
        ent = [[Form(m) for _ in full] for _ in full]
        for i, j in combinations(full, 2):
            rest = [x for x in full if x not in (i, j)]
            v = double_bracket(model, rest, d, rotations) * perm_sign([i, j] + rest)
            ent[i][j], ent[j][i] = v, -v
        return OmegaElement(n, m, tuple(tuple(r) for r in ent))
    if m == n - 1:
        vec = []
        for k in full:
            rest = [x for x in full if x != k]
            vec.append(double_bracket(model, rest, d, rotations) * perm_sign([k] + rest))
        return OmegaElement(n, m, tuple(vec))
    raise ValueError("Omega is defined for curve (m = n) and points (m = n - 1) models")


def star_action(g, omega: OmegaElement) -> OmegaElement:
    """g * Omega = g^{-T} Omega(x') g^{-1} with x'_j = sum_i g_ij x_i."""
    G = g if isinstance(g, fmpq_mat) else as_matrix(g)
    if G.det() == 0:
        raise ValueError("singular matrix")
    if not omega.is_curve:
        raise ValueError("star action is defined on curve-case Omega")
    sub = omega.substitute(G)
    Gi = FormMatrix.scalar(G.inv(), omega.m)
    fm = Gi.T @ FormMatrix.from_forms(sub.matrix(), omega.m) @ Gi
    return OmegaElement(omega.n, omega.m, tuple(tuple(r) for r in fm.to_forms()), omega.scale_note)


def covariant_action(g, omega: OmegaElement) -> OmegaElement:
    """The action matching act(): Omega(act(M, g)) = covariant_action(g, Omega(M)).

    Curves: det(g) * (g star Omega).  Points: det(g) g^{-T} Omega(x').
    """
    G = g if isinstance(g, fmpq_mat) else as_matrix(g)
    if omega.is_curve:
        return star_action(G, omega).scale(G.det())
    sub = omega.substitute(G)
    col = FormMatrix.from_forms([[f] for f in sub.vector()], omega.m)
    out = FormMatrix.scalar(G.inv().transpose(), omega.m) @ col
    return OmegaElement(omega.n, omega.m, tuple(f * G.det() for f in (r[0] for r in out.to_forms())),
                        omega.scale_note)


def omega_const(n: int) -> OmegaElement:
    """(Omega^const)_ij = (n - 2(j - i)) X_i X_j for i < j (0-based), alternating."""
    ent = [[Form(n) for _ in range(n)] for _ in range(n)]
    for i, j in combinations(range(n), 2):
        e = [0] * n
        e[i] += 1
        e[j] += 1
        f = Form(n, {tuple(e): n - 2 * (j - i)})
        ent[i][j], ent[j][i] = f, -f
    return OmegaElement(n, n, tuple(tuple(r) for r in ent), "constant term")


# invariants

def _contractions(W: np.ndarray):
    """Raw sums S4 = sum HM*HM and S6 = sum D3*D3 from W[i,j,a,b].

    Works for any element type with + and * (ints, mpmath numbers).
    D3 is computed as twice the true third derivative, so S6 is 4x the sum.
    """
    # HM[i,j,b,c] = sum_{r,s} W[i,r,s,b] W[j,s,r,c] + (b <-> c)
    X = np.tensordot(W, W.transpose(2, 1, 0, 3), axes=([1, 2], [0, 1]))   # [i,b,j,c]
    X = X.transpose(0, 2, 1, 3)                                              # [i,j,b,c]
    HM = X + X.transpose(0, 1, 3, 2)
    S4 = np.sum(HM * HM.transpose(2, 3, 0, 1))
    # T2[i,j,k,c,a,b] = sum_r HM[i,j,r,c] W[r,k,a,b]
    T2 = np.tensordot(HM, W, axes=([2], [0]))                               # [i,j,c,k,a,b]
    T2 = T2.transpose(0, 1, 3, 2, 4, 5)
    D3 = sum(T2.transpose((0, 1, 2) + tuple(3 + p for p in perm)) for perm in permutations(range(3)))
    n = W.shape[0]
    Q = D3.reshape(n ** 3, n ** 3)
    S6 = np.sum(Q * Q.T)
    return S4, S6


def _norms(n: int):
    # the c6 prefactor is 2^6, which is what makes c6(Omega_const) = -1
    k4 = fmpq(3, 16 * n * (n - 2) ** 2 * comb(n + 3, 5))
    k6 = fmpq(-1, 64 * n * (n - 2) ** 3 * comb(n + 5, 7))
    return k4, k6


def invariants(omega: OmegaElement) -> tuple[fmpq, fmpq]:
    """Exact (c4, c6) of a curve-case Omega."""
    if not omega.is_curve:
        raise ValueError("invariants need a curve-case Omega")
    W = omega.hessians()
    den = 1
    for x in W.flat:
        den = den * x.q // np.gcd(den, int(x.q)) if x.q != 1 else den
    den = int(den)
    Wi = np.vectorize(lambda x: int(x.p) * (den // int(x.q)), otypes=[object])(W)
    S4, S6 = _contractions(Wi)
    k4, k6 = _norms(omega.n)
    c4 = k4 * fmpq(int(S4), den ** 4)
    c6 = k6 * fmpq(int(S6), 4 * den ** 6)
    return c4, c6


def invariants_numeric(W: np.ndarray, n: int):
    """(c4, c6) from a numeric Hessian array W[i,j,a,b] (mpmath or complex entries)."""
    S4, S6 = _contractions(W)
    k4, k6 = _norms(n)
    return S4 * int(k4.p) / int(k4.q), S6 * int(k6.p) / (4 * int(k6.q))


@dataclass(frozen=True)
class WeierstrassData:
    c4: fmpq
    c6: fmpq
    delta: fmpq
    degenerate: bool
    warning: str | None = None

    @property
    def short_model(self) -> tuple[fmpq, fmpq]:
        """(A, B) in y^2 = x^3 + A x + B."""
        return -27 * self.c4, -54 * self.c6

    def equation(self) -> str:
        from .exactmath import fmt_rational
        A, B = self.short_model
        return f"y^2 = x^3 + ({fmt_rational(A)})*x + ({fmt_rational(B)})"


def jacobian_equation(source: ResolutionModel | OmegaElement) -> WeierstrassData:
    omega = omega_element(source) if isinstance(source, ResolutionModel) else source
    c4, c6 = invariants(omega)
    delta = (c4 ** 3 - c6 ** 2) / 1728
    note = None
    if omega.n % 2 == 0:
        note = "n is even: the Jacobian formula is only established for odd n"
        warnings.warn(note, stacklevel=2)
    return WeierstrassData(c4, c6, delta, delta == 0, note)
