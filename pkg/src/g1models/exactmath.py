"""Exact homogeneous polynomials and polynomial matrices over Q.

Scalars are ``flint.fmpq``.  A :class:`Form` is a sparse dict from exponent
tuples to coefficients.  A :class:`FormMatrix` stores one scalar matrix per
monomial, which keeps products and linear solves inside FLINT.

Variables are 0-based in the Python API and printed as ``x1 .. xm``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from flint import fmpq, fmpq_mat, fmpz, fmpz_mat

Exp = tuple[int, ...]

__all__ = [
    "Form", "FormMatrix", "NoSolution", "ParseError", "form_parse",
    "form_substitute", "form_diff", "graded_lift", "graded_kernel",
    "monomials", "to_fmpq", "to_fraction", "fmt_rational", "as_matrix",
]


class ParseError(ValueError):
    """Raised for malformed or inhomogeneous polynomial text."""


def to_fmpq(c) -> fmpq:
    if isinstance(c, fmpq):
        return c
    if isinstance(c, (int, fmpz)):
        return fmpq(c)
    if isinstance(c, Fraction):
        return fmpq(c.numerator, c.denominator)
    if isinstance(c, str):
        f = Fraction(c.strip())
        return fmpq(f.numerator, f.denominator)
    if hasattr(c, "numerator") and hasattr(c, "denominator"):
        return fmpq(int(c.numerator), int(c.denominator))
    raise TypeError(f"not an exact rational: {c!r}")


def to_fraction(c) -> Fraction:
    c = to_fmpq(c)
    return Fraction(int(c.p), int(c.q))


def fmt_rational(c) -> str:
    c = to_fmpq(c)
    return str(int(c.p)) if c.q == 1 else f"{int(c.p)}/{int(c.q)}"


def _grevlex_key(e: Exp):
    # sort with reverse=True for descending grevlex
    return (sum(e), tuple(-k for k in reversed(e)))


def monomials(nvars: int, degree: int) -> list[Exp]:
    """All exponent tuples of the given degree, grevlex descending."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=_grevlex_key, reverse=True)
    return out


def _add_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


class Form:
    """Sparse polynomial with exact rational coefficients.

    Homogeneity is not forced by arithmetic; :meth:`degree` raises on a
    mixed-degree value and parsing rejects it.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exp, object] | None = None):
        self.nvars = nvars
        self.terms: dict[Exp, fmpq] = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError("exponent length does not match nvars")
            c = to_fmpq(c)
            if c != 0:
                self.terms[e] = self.terms.get(e, fmpq(0)) + c
                if self.terms[e] == 0:
                    del self.terms[e]

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "Form":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "Form":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int) -> "Form":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Form":
        m = len(coeffs)
        return cls(m, {tuple(int(j == i) for j in range(m)): c for i, c in enumerate(coeffs)})

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int | None:
        degs = {sum(e) for e in self.terms}
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs.pop() if degs else None

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coeff(self, e: Sequence[int]) -> fmpq:
        return self.terms.get(tuple(e), fmpq(0))

    def is_integral(self) -> bool:
        return all(c.q == 1 for c in self.terms.values())

    def _check(self, other: "Form"):
        if self.nvars != other.nvars:
            raise ValueError("forms live in different rings")

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, Form):
            if other == 0:
                return self
            return NotImplemented
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, fmpq(0)) + c
            if v == 0:
                t.pop(e, None)
            else:
                t[e] = v
        out = Form(self.nvars)
        out.terms = t
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Form(self.nvars)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Form):
            self._check(other)
            t: dict[Exp, fmpq] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = _add_exp(e1, e2)
                    t[e] = t.get(e, fmpq(0)) + c1 * c2
            return Form(self.nvars, t)
        c = to_fmpq(other)
        out = Form(self.nvars)
        if c != 0:
            out.terms = {e: v * c for e, v in self.terms.items()}
        return out

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        return reduce(lambda a, b: a * b, [self] * k, Form.const(self.nvars, 1))

    def __eq__(self, other):
        if isinstance(other, Form):
            return self.nvars == other.nvars and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def diff(self, i: int) -> "Form":
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return Form(self.nvars, t)

    def substitute(self, g) -> "Form":
        return form_substitute(self, g)

    def evaluate(self, point: Sequence):
        """Value at a point; exact for rationals, otherwise uses the point's own arithmetic."""
        exact = all(isinstance(p, (int, fmpq, fmpz, Fraction)) for p in point)
        pt = [to_fmpq(p) for p in point] if exact else list(point)
        acc = fmpq(0) if exact else 0
        for e, c in self.terms.items():
            v = c if exact else _num(c)
            for p, k in zip(pt, e):
                if k:
                    v = v * p ** k
            acc = acc + v
        return acc

    def restrict(self, i: int) -> "Form":
        """Set x_i = 0 and drop the variable."""
        out = Form(self.nvars - 1)
        out.terms = {e[:i] + e[i + 1:]: c for e, c in self.terms.items() if e[i] == 0}
        return out

    def embed(self, nvars: int, positions: Sequence[int] | None = None) -> "Form":
        """View in a larger ring; old variable j becomes ``positions[j]``."""
        positions = list(range(self.nvars)) if positions is None else list(positions)
        out = Form(nvars)
        for e, c in self.terms.items():
            f = [0] * nvars
            for j, k in enumerate(e):
                f[positions[j]] += k
            out.terms[tuple(f)] = c
        return out

    def sorted_terms(self) -> list[tuple[Exp, fmpq]]:
        return sorted(self.terms.items(), key=lambda t: _grevlex_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mon = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            a = abs(c)
            if not mon:
                body = fmt_rational(a)
            elif a == 1:
                body = mon
            else:
                body = f"{fmt_rational(a)}*{mon}"
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Form({self.nvars}, '{self}')"


def _num(c: fmpq):
    return Fraction(int(c.p), int(c.q)) if c.q != 1 else int(c.p)


_TERM = re.compile(r"\s*((?:[+-]\s*)*)([^+-]+)")
_FACTOR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def form_parse(text: str, nvars: int | None = None) -> Form:
    """Parse ``c*x1^2*x3 - 1/2*x2^3`` style text into a homogeneous Form.

    ``nvars`` defaults to the largest variable index seen.
    """
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    pos = 0
    raw: list[tuple[Fraction, dict[int, int]]] = []
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse near {s[pos:]!r}")
        signs, body = m.group(1).replace(" ", ""), m.group(2).strip()
        if not signs and not first:
            raise ParseError(f"missing operator before {body!r}")
        first = False
        pos = m.end()
        coeff = Fraction(-1 if signs.count("-") % 2 else 1)      # "+ -3*x1" is accepted
        powers: dict[int, int] = {}
        for tok in (t.strip() for t in body.split("*")):
            if not tok:
                raise ParseError(f"empty factor in {body!r}")
            fm = _FACTOR.match(tok)
            if fm:
                idx = int(fm.group(1))
                if idx < 1:
                    raise ParseError("variables are numbered from x1")
                powers[idx] = powers.get(idx, 0) + int(fm.group(2) or 1)
            else:
                try:
                    coeff *= Fraction(tok)
                except (ValueError, ZeroDivisionError):
                    raise ParseError(f"bad factor {tok!r}") from None
        raw.append((coeff, powers))
    top = max((max(p, default=0) for _, p in raw), default=0)
    m_ = top if nvars is None else nvars
    if top > m_:
        raise ParseError(f"x{top} exceeds the ring of {m_} variables")
    if m_ == 0:
        m_ = 1
    terms: dict[Exp, Fraction] = {}
    for c, p in raw:
        e = tuple(p.get(i + 1, 0) for i in range(m_))
        terms[e] = terms.get(e, Fraction(0)) + c
    f = Form(m_, terms)
    if not f.is_homogeneous():
        raise ParseError("polynomial is not homogeneous")
    return f


def _as_rows(g) -> list[list[fmpq]]:
    if isinstance(g, fmpq_mat):
        return [[g[i, j] for j in range(g.ncols())] for i in range(g.nrows())]
    return [[to_fmpq(x) for x in row] for row in g]


def form_substitute(F: Form, g) -> Form:
    """F(x') with x'_j = sum_i g[i][j] x_i."""
    return FormMatrix.from_forms([[F]]).substitute(g).entry(0, 0)


def form_diff(F: Form, i: int) -> Form:
    return F.diff(i)


def as_matrix(rows) -> fmpq_mat:
    rows = _as_rows(rows)
    r = len(rows)
    c = len(rows[0]) if r else 0
    return fmpq_mat(r, c, [x for row in rows for x in row])


class FormMatrix:
    """Matrix of polynomials stored as ``{monomial: fmpq_mat}``."""

    __slots__ = ("rows", "cols", "nvars", "data")

    def __init__(self, rows: int, cols: int, nvars: int, data: Mapping[Exp, fmpq_mat] | None = None):
        self.rows, self.cols, self.nvars = rows, cols, nvars
        self.data: dict[Exp, fmpq_mat] = {}
        for e, M in (data or {}).items():
            if not _mat_zero(M):
                self.data[tuple(e)] = M

    # constructors
    @classmethod
    def zeros(cls, rows: int, cols: int, nvars: int) -> "FormMatrix":
        return cls(rows, cols, nvars)

    @classmethod
    def identity(cls, k: int, nvars: int, scale=1) -> "FormMatrix":
        M = fmpq_mat(k, k)
        for i in range(k):
            M[i, i] = to_fmpq(scale)
        return cls(k, k, nvars, {(0,) * nvars: M})

    @classmethod
    def scalar(cls, M, nvars: int) -> "FormMatrix":
        M = M if isinstance(M, fmpq_mat) else as_matrix(M)
        return cls(M.nrows(), M.ncols(), nvars, {(0,) * nvars: M})

    @classmethod
    def from_forms(cls, entries: Sequence[Sequence[Form]], nvars: int | None = None) -> "FormMatrix":
        r = len(entries)
        c = len(entries[0]) if r else 0
        if nvars is None:
            nvars = next((f.nvars for row in entries for f in row if isinstance(f, Form)), 0)
        data: dict[Exp, fmpq_mat] = {}
        for i, row in enumerate(entries):
            if len(row) != c:
                raise ValueError("ragged matrix")
            for j, f in enumerate(row):
                if not isinstance(f, Form):
                    f = Form.const(nvars, f)
                if f.nvars != nvars:
                    raise ValueError("entries live in different rings")
                for e, v in f.terms.items():
                    M = data.get(e)
                    if M is None:
                        M = data[e] = fmpq_mat(r, c)
                    M[i, j] = v
        return cls(r, c, nvars, data)

    @classmethod
    def parse(cls, rows: Sequence[Sequence[str]], nvars: int) -> "FormMatrix":
        return cls.from_forms([[form_parse(t, nvars) for t in row] for row in rows], nvars)

    # access
    def entry(self, i: int, j: int) -> Form:
        f = Form(self.nvars)
        for e, M in self.data.items():
            v = M[i, j]
            if v != 0:
                f.terms[e] = v
        return f

    def __getitem__(self, ij) -> Form:
        return self.entry(*ij)

    def to_forms(self) -> list[list[Form]]:
        out = [[Form(self.nvars) for _ in range(self.cols)] for _ in range(self.rows)]
        for e, M in self.data.items():
            for i in range(self.rows):
                for j in range(self.cols):
                    v = M[i, j]
                    if v != 0:
                        out[i][j].terms[e] = v
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_zero(self) -> bool:
        return not self.data

    def is_integral(self) -> bool:
        return all(M[i, j].q == 1 for M in self.data.values()
                   for i in range(M.nrows()) for j in range(M.ncols()))

    def degree_table(self) -> list[list[int | None]]:
        return [[f.degree() for f in row] for row in self.to_forms()]

    def uniform_degree(self) -> int | None:
        degs = {sum(e) for e in self.data}
        if len(degs) > 1:
            raise ValueError("entries have mixed degrees")
        return degs.pop() if degs else None

    def coefficients(self) -> Iterable[fmpq]:
        for M in self.data.values():
            for i in range(M.nrows()):
                for j in range(M.ncols()):
                    v = M[i, j]
                    if v != 0:
                        yield v

    # arithmetic
    def _same(self, other: "FormMatrix"):
        if (self.rows, self.cols, self.nvars) != (other.rows, other.cols, other.nvars):
            raise ValueError(f"shape mismatch {self.shape}/{self.nvars} vs {other.shape}/{other.nvars}")

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        self._same(other)
        d = dict(self.data)
        for e, M in other.data.items():
            d[e] = d[e] + M if e in d else M
        return FormMatrix(self.rows, self.cols, self.nvars, d)

    def __neg__(self) -> "FormMatrix":
        return FormMatrix(self.rows, self.cols, self.nvars, {e: -M for e, M in self.data.items()})

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return self + (-other)

    def scale(self, c) -> "FormMatrix":
        c = to_fmpq(c)
        return FormMatrix(self.rows, self.cols, self.nvars, {e: M * c for e, M in self.data.items()})

    def __matmul__(self, other: "FormMatrix") -> "FormMatrix":
        if self.cols != other.rows or self.nvars != other.nvars:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        d: dict[Exp, fmpq_mat] = {}
        for e1, A in self.data.items():
            for e2, B in other.data.items():
                e = _add_exp(e1, e2)
                P = A * B
                d[e] = d[e] + P if e in d else P
        return FormMatrix(self.rows, other.cols, self.nvars, d)

    def mul_form(self, f: Form) -> "FormMatrix":
        d: dict[Exp, fmpq_mat] = {}
        for e1, A in self.data.items():
            for e2, c in f.terms.items():
                e = _add_exp(e1, e2)
                P = A * c
                d[e] = d[e] + P if e in d else P
        return FormMatrix(self.rows, self.cols, self.nvars, d)

    @property
    def T(self) -> "FormMatrix":
        return FormMatrix(self.cols, self.rows, self.nvars, {e: M.transpose() for e, M in self.data.items()})

    def __eq__(self, other):
        if not isinstance(other, FormMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.nvars == other.nvars
                and self.data.keys() == other.data.keys()
                and all(self.data[e] == other.data[e] for e in self.data))

    __hash__ = None

    def diff(self, i: int) -> "FormMatrix":
        d = {}
        for e, M in self.data.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                d[tuple(f)] = M * e[i]
        return FormMatrix(self.rows, self.cols, self.nvars, d)

    def restrict(self, i: int) -> "FormMatrix":
        """Set x_i = 0 and drop the variable."""
        return FormMatrix(self.rows, self.cols, self.nvars - 1,
                          {e[:i] + e[i + 1:]: M for e, M in self.data.items() if e[i] == 0})

    def embed(self, nvars: int, positions: Sequence[int] | None = None) -> "FormMatrix":
        positions = list(range(self.nvars)) if positions is None else list(positions)
        d: dict[Exp, fmpq_mat] = {}
        for e, M in self.data.items():
            f = [0] * nvars
            for j, k in enumerate(e):
                f[positions[j]] += k
            f = tuple(f)
            d[f] = d[f] + M if f in d else M
        return FormMatrix(self.rows, self.cols, nvars, d)

    def substitute(self, g) -> "FormMatrix":
        """Entrywise F(x') with x'_j = sum_i g[i][j] x_i."""
        rows = _as_rows(g)
        m = self.nvars
        if len(rows) != m or any(len(r) != m for r in rows):
            raise ValueError("substitution matrix must be m x m")
        images = [Form(m, {tuple(int(k == i) for k in range(m)): rows[i][j] for i in range(m)}) for j in range(m)]
        cache: dict[Exp, Form] = {(0,) * m: Form.const(m, 1)}

        def image(e: Exp) -> Form:
            if e not in cache:
                j = next(k for k in range(m) if e[k])
                f = list(e)
                f[j] -= 1
                cache[e] = image(tuple(f)) * images[j]
            return cache[e]

        d: dict[Exp, fmpq_mat] = {}
        for e, M in self.data.items():
            for e2, c in image(e).terms.items():
                P = M * c
                d[e2] = d[e2] + P if e2 in d else P
        return FormMatrix(self.rows, self.cols, m, d)

    def evaluate(self, point: Sequence) -> fmpq_mat:
        pt = [to_fmpq(p) for p in point]
        out = fmpq_mat(self.rows, self.cols)
        for e, M in self.data.items():
            v = fmpq(1)
            for p, k in zip(pt, e):
                if k:
                    v *= p ** k
            if v != 0:
                out += M * v
        return out

    def evaluate_numeric(self, point: Sequence):
        """Evaluate with mpmath/complex arithmetic; returns nested lists."""
        out = [[0] * self.cols for _ in range(self.rows)]
        for e, M in self.data.items():
            v = 1
            for p, k in zip(point, e):
                if k:
                    v = v * p ** k
            for i in range(self.rows):
                for j in range(self.cols):
                    c = M[i, j]
                    if c != 0:
                        out[i][j] += v * int(c.p) / int(c.q)
        return out

    # block assembly
    def block(self, r0: int, r1: int, c0: int, c1: int) -> "FormMatrix":
        d = {}
        for e, M in self.data.items():
            S = fmpq_mat(r1 - r0, c1 - c0)
            for i in range(r0, r1):
                for j in range(c0, c1):
                    S[i - r0, j - c0] = M[i, j]
            d[e] = S
        return FormMatrix(r1 - r0, c1 - c0, self.nvars, d)

    @staticmethod
    def assemble(blocks: Sequence[Sequence["FormMatrix | None"]], row_sizes: Sequence[int],
                 col_sizes: Sequence[int], nvars: int) -> "FormMatrix":
        """Block matrix; ``None`` marks a zero block."""
        R, C = sum(row_sizes), sum(col_sizes)
        d: dict[Exp, fmpq_mat] = {}
        r0 = 0
        for bi, row in enumerate(blocks):
            c0 = 0
            for bj, B in enumerate(row):
                if B is not None:
                    if B.shape != (row_sizes[bi], col_sizes[bj]):
                        raise ValueError(f"block ({bi},{bj}) has shape {B.shape}")
                    for e, M in B.data.items():
                        T = d.get(e)
                        if T is None:
                            T = d[e] = fmpq_mat(R, C)
                        for i in range(M.nrows()):
                            for j in range(M.ncols()):
                                v = M[i, j]
                                if v != 0:
                                    T[r0 + i, c0 + j] = v
                c0 += col_sizes[bj]
            r0 += row_sizes[bi]
        return FormMatrix(R, C, nvars, d)

    def __str__(self):
        return "\n".join("[" + ", ".join(str(f) for f in row) + "]" for row in self.to_forms())

    def __repr__(self):
        return f"FormMatrix({self.rows}x{self.cols}, nvars={self.nvars})"


def _mat_zero(M: fmpq_mat) -> bool:
    return M == fmpq_mat(M.nrows(), M.ncols())


@dataclass(frozen=True)
class NoSolution:
    """Returned (not raised) when a graded lift does not exist."""

    column: int
    reason: str = "inconsistent linear system"

    def __bool__(self):
        return False


def _lift_system(A: FormMatrix, d: int):
    """Coefficient matrix of X -> A X for one column X of degree d."""
    unknowns = [(s, e) for s in reversed(range(A.cols)) for e in monomials(A.nvars, d)]
    eq_index: dict[tuple[int, Exp], int] = {}
    cols: list[dict[int, fmpq]] = []
    for s, e in unknowns:
        col: dict[int, fmpq] = {}
        for ea, M in A.data.items():
            target = _add_exp(ea, e)
            for r in range(A.rows):
                v = M[r, s]
                if v != 0:
                    k = eq_index.setdefault((r, target), len(eq_index))
                    col[k] = col.get(k, fmpq(0)) + v
        cols.append(col)
    return unknowns, eq_index, cols


def _rref_pivots(M: fmpq_mat) -> tuple[fmpq_mat, list[int]]:
    R, rank = M.rref()
    piv = []
    for i in range(rank):
        j = next(j for j in range(R.ncols()) if R[i, j] != 0)
        piv.append(j)
    return R, piv


def graded_lift(A: FormMatrix, B: FormMatrix, d: int, domain: str = "rational") -> "FormMatrix | NoSolution":
    """Solve A X = B with every entry of X homogeneous of degree d.

    Free parameters are set to zero; the unknown ordering (last row of X
    first) fixes which particular solution is returned.  With
    ``domain="integer"`` (A, B integral) an integral X is sought through a
    Hermite normal form; NoSolution then means no integral lift exists.
    """
    if A.rows != B.rows or A.nvars != B.nvars:
        raise ValueError("A and B have incompatible shapes")
    if d < 0:
        return NoSolution(0, "negative degree") if not B.is_zero() else FormMatrix(A.cols, B.cols, A.nvars)
    unknowns, eq_index, cols = _lift_system(A, d)
    # right-hand sides
    rhs: list[dict[int, fmpq]] = [dict() for _ in range(B.cols)]
    for eb, M in B.data.items():
        for r in range(B.rows):
            for c in range(B.cols):
                v = M[r, c]
                if v != 0:
                    key = (r, eb)
                    if key not in eq_index:
                        return NoSolution(c, "right-hand side outside the image degree")
                    rhs[c][eq_index[key]] = v
    nu, ne, nb = len(unknowns), len(eq_index), B.cols
    if ne == 0:
        return FormMatrix(A.cols, B.cols, A.nvars)
    if domain == "integer":
        return _integer_lift(A, B, unknowns, ne, cols, rhs)
    aug = fmpq_mat(ne, nu + nb)
    for j, col in enumerate(cols):
        for k, v in col.items():
            aug[k, j] = v
    for c, col in enumerate(rhs):
        for k, v in col.items():
            aug[k, nu + c] = v
    # pivots among the unknown columns only
    R, rank = aug.rref()
    sol_rows = []
    for i in range(rank):
        j = next(j for j in range(R.ncols()) if R[i, j] != 0)
        if j >= nu:
            # first nonzero in an RHS column: those columns may be inconsistent
            for c in range(nb):
                if R[i, nu + c] != 0:
                    return NoSolution(c)
        sol_rows.append((i, j))
    d_out: dict[Exp, fmpq_mat] = {}
    for i, j in sol_rows:
        s, e = unknowns[j]
        for c in range(nb):
            v = R[i, nu + c]
            if v != 0:
                M = d_out.get(e)
                if M is None:
                    M = d_out[e] = fmpq_mat(A.cols, B.cols)
                M[s, c] = v
    return FormMatrix(A.cols, B.cols, A.nvars, d_out)


def _integer_lift(A, B, unknowns, ne, cols, rhs):
    # HNF of [L^T | I] = [H | V] gives V L^T = H, so L V^T = H^T (column echelon)
    nu = len(unknowns)
    for col in cols:
        if any(v.q != 1 for v in col.values()):
            raise ValueError("integer lifting needs an integral A")
    for col in rhs:
        if any(v.q != 1 for v in col.values()):
            return NoSolution(0, "right-hand side is not integral")
    rows = []
    for j, col in enumerate(cols):
        row = [0] * (ne + nu)
        for k, v in col.items():
            row[k] = int(v.p)
        row[ne + j] = 1
        rows.append(row)
    HV = fmpz_mat(rows).hnf()
    piv = []
    for i in range(nu):
        p = next((k for k in range(ne) if HV[i, k] != 0), None)
        if p is None:
            break
        piv.append(p)
    d_out: dict[Exp, fmpq_mat] = {}
    for c, r in enumerate(rhs):
        y = []
        for i, p in enumerate(piv):
            acc = int(r.get(p, 0)) - sum(int(HV[k, p]) * y[k] for k in range(i))
            h = int(HV[i, p])
            if acc % h:
                return NoSolution(c, "no integral solution")
            y.append(acc // h)
        # every equation must hold, not only the pivot ones
        res = [0] * ne
        for i, yi in enumerate(y):
            if yi:
                for k in range(ne):
                    hk = HV[i, k]
                    if hk != 0:
                        res[k] += int(hk) * yi
        if any(res[k] != int(r.get(k, 0)) for k in range(ne)):
            return NoSolution(c)
        for j in range(nu):
            v = sum(int(HV[i, ne + j]) * y[i] for i in range(len(y)) if y[i])
            if v:
                s, e = unknowns[j]
                M = d_out.get(e)
                if M is None:
                    M = d_out[e] = fmpq_mat(A.cols, B.cols)
                M[s, c] = v
    return FormMatrix(A.cols, B.cols, A.nvars, d_out)


def graded_kernel(A: FormMatrix, d: int) -> FormMatrix:
    """Basis (as columns) of {X : A X = 0} with X of degree d."""
    unknowns, eq_index, cols = _lift_system(A, d)
    nu, ne = len(unknowns), len(eq_index)
    if ne == 0:
        basis = [{j: fmpq(1)} for j in range(nu)]
    else:
        L = fmpq_mat(ne, nu)
        for j, col in enumerate(cols):
            for k, v in col.items():
                L[k, j] = v
        R, piv = _rref_pivots(L)
        free = [j for j in range(nu) if j not in set(piv)]
        basis = []
        for f in free:
            vec = {f: fmpq(1)}
            for i, p in enumerate(piv):
                if R[i, f] != 0:
                    vec[p] = -R[i, f]
            basis.append(vec)
    d_out: dict[Exp, fmpq_mat] = {}
    for c, vec in enumerate(basis):
        for j, v in vec.items():
            s, e = unknowns[j]
            M = d_out.get(e)
            if M is None:
                M = d_out[e] = fmpq_mat(A.cols, len(basis))
            M[s, c] = v
    return FormMatrix(A.cols, len(basis), A.nvars, d_out)
