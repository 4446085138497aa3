"""Rank-n algebras from Omega quadrics of n points in P^{n-2}."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from flint import fmpq, fmpq_mat

from .exactmath import Form, to_fmpq
from .omega import OmegaElement, omega_element
from .resolution import ResolutionModel

__all__ = ["DegenerateModel", "AlgebraTable", "multiplication_table", "table_from_quadrics",
           "standard_config_quadrics", "trace_disc", "trace_matrix", "hessian_matrices",
           "OrderTable", "shifted_order", "format_combination"]


class DegenerateModel(ArithmeticError):
    """The quadrics do not define an associative rank-n algebra."""


def hessian_matrices(quadrics: Sequence[Form]) -> list[fmpq_mat]:
    """H_k[i, j] = d^2 Omega_k / dx_i dx_j."""
    out = []
    for f in quadrics:
        m = f.nvars
        H = fmpq_mat(m, m)
        for e, c in f.terms.items():
            if sum(e) != 2:
                raise ValueError("Omega entries must be quadratic")
            idx = [i for i, k in enumerate(e) for _ in range(k)]
            i, j = idx
            if i == j:
                H[i, i] = 2 * c
            else:
                H[i, j] = c
                H[j, i] = c
        out.append(H)
    return out


@dataclass(frozen=True)
class AlgebraTable:
    """alpha_i alpha_j = c0[i, j] + sum_k H[k][i, j] alpha_k  (0-based, alpha_0 = 1 is implicit)."""

    n: int
    c0: fmpq_mat
    H: tuple[fmpq_mat, ...]

    @property
    def rank(self) -> int:
        return self.n

    def product_basis(self, i: int, j: int) -> list[fmpq]:
        """Coordinates of alpha_i alpha_j in the basis (1, alpha_1, .., alpha_{n-1})."""
        return [self.c0[i, j]] + [self.H[k][i, j] for k in range(self.n - 1)]

    def mul(self, a: Sequence, b: Sequence) -> list[fmpq]:
        a = [to_fmpq(x) for x in a]
        b = [to_fmpq(x) for x in b]
        r = self.n - 1
        out = [a[0] * b[0]] + [a[0] * b[k + 1] + b[0] * a[k + 1] for k in range(r)]
        for i in range(r):
            if a[i + 1] == 0:
                continue
            for j in range(r):
                if b[j + 1] == 0:
                    continue
                s = a[i + 1] * b[j + 1]
                pb = self.product_basis(i, j)
                for t in range(self.n):
                    out[t] += s * pb[t]
        return out

    def mult_matrix(self, a: Sequence) -> fmpq_mat:
        """Matrix of multiplication by a on the basis (1, alpha_1, ...)."""
        M = fmpq_mat(self.n, self.n)
        for j in range(self.n):
            e = [0] * self.n
            e[j] = 1
            col = self.mul(a, e)
            for i in range(self.n):
                M[i, j] = col[i]
        return M

    def trace(self, a: Sequence) -> fmpq:
        M = self.mult_matrix(a)
        return sum((M[i, i] for i in range(self.n)), fmpq(0))

    def is_associative(self) -> bool:
        n = self.n
        basis = [[int(t == s) for t in range(n)] for s in range(n)]
        for i, j, k in product(range(1, n), repeat=3):
            if self.mul(self.mul(basis[i], basis[j]), basis[k]) != self.mul(basis[i], self.mul(basis[j], basis[k])):
                return False
        return True

    def is_integral(self) -> bool:
        mats = (self.c0,) + self.H
        return all(M[i, j].q == 1 for M in mats for i in range(M.nrows()) for j in range(M.ncols()))

    def is_commutative(self) -> bool:
        return self.c0 == self.c0.transpose() and all(h == h.transpose() for h in self.H)

    def traces_zero(self) -> bool:
        return all(self.trace([int(t == s) for t in range(self.n)]) == 0 for s in range(1, self.n))


def _c0(H: Sequence[fmpq_mat], i: int, j: int, k: int) -> fmpq:
    r_ = len(H)
    s = fmpq(0)
    for r in range(r_):
        s += H[r][j, k] * H[k][r, i] - H[r][i, j] * H[k][r, k]
    return s


def table_from_quadrics(quadrics: Sequence[Form], check: bool = True) -> AlgebraTable:
    """Multiplication table from Omega_1..Omega_{n-1} in n-1 variables."""
    r = len(quadrics)
    n = r + 1
    if any(f.nvars != r for f in quadrics):
        raise ValueError("need n-1 quadrics in n-1 variables")
    H = hessian_matrices(quadrics)
    if check and all(h == fmpq_mat(r, r) for h in H):
        raise DegenerateModel("Omega vanishes")
    c0 = fmpq_mat(r, r)
    for i in range(r):
        for j in range(r):
            ks = [k for k in range(r) if k != i]
            if not ks:
                raise DegenerateModel("rank 2 algebras have no admissible k")
            c0[i, j] = _c0(H, i, j, ks[0])
            if check and any(_c0(H, i, j, k) != c0[i, j] for k in ks[1:]):
                raise DegenerateModel(f"c0[{i + 1},{j + 1}] depends on the choice of k")
    tab = AlgebraTable(n, c0, tuple(H))
    if check:
        if c0 != c0.transpose():
            raise DegenerateModel("table is not commutative")
        if not tab.is_associative():
            raise DegenerateModel("table is not associative")
    return tab


def multiplication_table(source: ResolutionModel | OmegaElement, check: bool = True) -> AlgebraTable:
    omega = omega_element(source) if isinstance(source, ResolutionModel) else source
    if omega.is_curve:
        raise ValueError("need a points model (m = n - 1)")
    return table_from_quadrics(omega.vector(), check)


def standard_config_quadrics(n: int, a: Sequence) -> list[Form]:
    """Omega_k = sum_{i != k} a_k / (a_i a_{n+k-i}) x_i x_{n+k-i}, subscripts mod n in 1..n-1."""
    if len(a) != n - 1:
        raise ValueError("need a_1 .. a_{n-1}")
    a = [to_fmpq(x) for x in a]
    if any(x == 0 for x in a):
        raise ValueError("a_i must be nonzero")
    m = n - 1
    out = []
    for k in range(1, n):
        terms: dict[tuple[int, ...], fmpq] = {}
        for i in range(1, n):
            if i == k:
                continue
            j = (n + k - i) % n
            e = [0] * m
            e[i - 1] += 1
            e[j - 1] += 1
            e = tuple(e)
            terms[e] = terms.get(e, fmpq(0)) + a[k - 1] / (a[i - 1] * a[j - 1])
        out.append(Form(m, terms))
    return out


def trace_matrix(tab: AlgebraTable) -> fmpq_mat:
    n = tab.n
    T = fmpq_mat(n, n)
    T[0, 0] = n
    for i in range(1, n):
        e = [0] * n
        e[i] = 1
        T[0, i] = T[i, 0] = tab.trace(e)
        for j in range(1, n):
            f = [0] * n
            f[j] = 1
            T[i, j] = tab.trace(tab.mul(e, f))
    return T


def trace_disc(tab: AlgebraTable) -> fmpq:
    """det of the trace form in the basis (1, alpha_1, .., alpha_{n-1})."""
    return trace_matrix(tab).det()


@dataclass(frozen=True)
class OrderTable:
    """Full structure constants: const[i][j] = coordinates of b_i b_j in (b_0 = 1, b_1, ..)."""

    n: int
    const: tuple
    shifts: tuple = ()

    def mul(self, a: Sequence, b: Sequence) -> list[fmpq]:
        out = [fmpq(0)] * self.n
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y == 0:
                    continue
                for t, c in enumerate(self.const[i][j]):
                    out[t] += to_fmpq(x) * to_fmpq(y) * c
        return out

    def trace(self, a: Sequence) -> fmpq:
        tr = fmpq(0)
        for j in range(self.n):
            tr += self.mul(a, [int(t == j) for t in range(self.n)])[j]
        return tr

    def trace_matrix(self) -> fmpq_mat:
        e = [[int(t == s) for t in range(self.n)] for s in range(self.n)]
        T = fmpq_mat(self.n, self.n)
        for i in range(self.n):
            for j in range(self.n):
                T[i, j] = self.trace(self.mul(e[i], e[j]))
        return T

    def disc(self) -> fmpq:
        return self.trace_matrix().det()

    def is_integral(self) -> bool:
        return all(c.q == 1 for row in self.const for v in row for c in v)

    def is_commutative(self) -> bool:
        return all(self.const[i][j] == self.const[j][i] for i in range(self.n) for j in range(self.n))

    def is_associative(self) -> bool:
        e = [[int(t == s) for t in range(self.n)] for s in range(self.n)]
        return all(self.mul(self.mul(e[i], e[j]), e[k]) == self.mul(e[i], self.mul(e[j], e[k]))
                   for i, j, k in product(range(self.n), repeat=3))

    def lines(self) -> list[str]:
        return [f"b{i}*b{j} = " + format_combination(self.const[i][j], "b")
                for i in range(1, self.n) for j in range(i, self.n)]


def format_combination(coords: Sequence, name: str) -> str:
    """c_0 + c_1*name1 + ... with unit coefficients and zero terms dropped."""
    from .exactmath import fmt_rational
    terms = []
    for t, c in enumerate(coords):
        if c == 0:
            continue
        if t == 0:
            terms.append(fmt_rational(c))
        elif c == 1:
            terms.append(f"{name}{t}")
        elif c == -1:
            terms.append(f"-{name}{t}")
        else:
            terms.append(f"{fmt_rational(c)}*{name}{t}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def shifted_order(tab: AlgebraTable) -> OrderTable:
    """The order with basis 1, b_i = (alpha_i + a_i)/(2n), a_i = -H_k[i, k] for any k != i.

    Shifting by the integers a_i does not change the trace determinant, so
    disc = trace_disc(tab) / (2n)^(2(n-1)).  For slices of integral curve
    models the constants come out integral.
    """
    n, r, s = tab.n, tab.n - 1, 2 * tab.n
    H = tab.H
    if r < 2:
        raise ValueError("need n >= 3")
    a = [-H[(i + 1) % r][i, (i + 1) % r] for i in range(r)]
    const = [[None] * n for _ in range(n)]
    for i in range(n):
        const[0][i] = const[i][0] = [fmpq(int(t == i)) for t in range(n)]
    for i in range(r):
        for j in range(r):
            co = [H[k][i, j] + (a[i] if j == k else 0) + (a[j] if i == k else 0) for k in range(r)]
            c = tab.c0[i, j] + a[i] * a[j] - sum((co[k] * a[k] for k in range(r)), fmpq(0))
            const[i + 1][j + 1] = [c / s ** 2] + [x / s for x in co]
    return OrderTable(n, tuple(tuple(tuple(v) for v in row) for row in const), tuple(a))
