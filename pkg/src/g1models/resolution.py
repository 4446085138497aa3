"""Resolution models of genus one curves and of n points.

A degree-n model is a complex

    0 -> F_{n-2} -> ... -> F_1 -> F_0 = R,    phi_i : F_i -> F_{i-1},

stored as ``phi[0] .. phi[n-3]`` (``phi[i-1]`` is phi_i, a b_{i-1} x b_i
matrix acting on column vectors).  Curves live in m = n variables and
points models in m = n - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

from flint import fmpq, fmpq_mat

from .exactmath import Form, FormMatrix, as_matrix, form_parse, graded_lift

__all__ = [
    "ResolutionModel", "DualityWitness", "DualityFailure", "ValidationReport",
    "KoszulComplex", "ModelError", "expected_betti", "model_from_cubic",
    "model_from_quadric_pair", "model_from_pfaffian", "koszul", "validate",
    "act", "hyperplane_slice", "self_duality", "duality_equation_residues",
    "to_g1m", "from_g1m",
]


class ModelError(ValueError):
    """Bad constructor input (wrong degree, arity or shape)."""


def expected_betti(n: int) -> list[int]:
    """Ranks of F_0 .. F_{n-2} in the shape (*)."""
    if n < 3:
        raise ModelError("degree must be at least 3")
    if n == 3:
        return [1, 1]
    return [1] + [n * comb(n - 2, i) - comb(n, i + 1) for i in range(1, n - 2)] + [1]


def expected_twists(n: int) -> list[int]:
    """F_i = R(-t_i)^{b_i}."""
    if n == 3:
        return [0, 3]
    return [0] + [i + 1 for i in range(1, n - 2)] + [n]


@dataclass(frozen=True)
class ResolutionModel:
    n: int
    m: int
    phi: tuple[FormMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(self.phi))
        if len(self.phi) != self.n - 2:
            raise ModelError(f"degree {self.n} needs {self.n - 2} differentials, got {len(self.phi)}")
        for i, p in enumerate(self.phi):
            if p.nvars != self.m:
                raise ModelError(f"phi_{i + 1} is in {p.nvars} variables, expected {self.m}")
            if i and self.phi[i - 1].cols != p.rows:
                raise ModelError(f"phi_{i} and phi_{i + 1} are not composable")

    @property
    def ranks(self) -> list[int]:
        return [self.phi[0].rows] + [p.cols for p in self.phi]

    @property
    def grading(self) -> list[int]:
        return expected_twists(self.n)

    @property
    def kind(self) -> str:
        return "curve" if self.m == self.n else "points" if self.m == self.n - 1 else "other"

    @property
    def coefficient_domain(self) -> str:
        return "integers" if all(p.is_integral() for p in self.phi) else "rationals"

    def __eq__(self, other):
        if not isinstance(other, ResolutionModel):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and all(a == b for a, b in zip(self.phi, other.phi))

    __hash__ = None


@dataclass(frozen=True)
class DualityWitness:
    """Pairing matrices P_i : F_i x F_{L-i} -> R(-n) with P_0 = 1."""

    P: tuple[fmpq_mat, ...]

    def __bool__(self):
        return True


@dataclass(frozen=True)
class DualityFailure:
    reason: str

    def __bool__(self):
        return False


@dataclass
class ValidationReport:
    chain: list[tuple[int, int, bool]] = field(default_factory=list)
    grading_ok: bool = True
    grading_errors: list[str] = field(default_factory=list)
    betti_ok: bool = True
    betti: list[int] = field(default_factory=list)
    expected_betti: list[int] = field(default_factory=list)
    duality: DualityWitness | DualityFailure | None = None
    symmetric: bool = False

    @property
    def chain_ok(self) -> bool:
        return all(ok for _, _, ok in self.chain)

    @property
    def ok(self) -> bool:
        return self.chain_ok and self.grading_ok and self.betti_ok and bool(self.duality) and self.symmetric

    def lines(self) -> list[str]:
        out = [f"chain_{i}_{j}: {'pass' if ok else 'FAIL'}" for i, j, ok in self.chain]
        out.append(f"grading: {'pass' if self.grading_ok else 'FAIL ' + '; '.join(self.grading_errors)}")
        out.append(f"betti: {','.join(map(str, self.betti))} "
                   f"({'pass' if self.betti_ok else 'FAIL expected ' + ','.join(map(str, self.expected_betti))})")
        out.append(f"self_duality: {'pass' if self.duality else 'FAIL ' + getattr(self.duality, 'reason', '')}")
        out.append(f"symmetry: {'pass' if self.symmetric else 'FAIL'}")
        out.append(f"valid: {'yes' if self.ok else 'no'}")
        return out


# constructors

def _need(f: Form, nvars: int, deg: int, what: str):
    if not isinstance(f, Form):
        raise ModelError(f"{what} must be a Form")
    if f.nvars != nvars:
        raise ModelError(f"{what} must be in {nvars} variables")
    if f.is_zero():
        raise ModelError(f"{what} is zero")
    if not f.is_homogeneous() or f.degree() != deg:
        raise ModelError(f"{what} must be homogeneous of degree {deg}")


def model_from_cubic(F: Form | str) -> ResolutionModel:
    F = form_parse(F, 3) if isinstance(F, str) else F
    _need(F, 3, 3, "cubic")
    return ResolutionModel(3, 3, (FormMatrix.from_forms([[F]]),))


def model_from_quadric_pair(F1: Form | str, F2: Form | str) -> ResolutionModel:
    F1 = form_parse(F1, 4) if isinstance(F1, str) else F1
    F2 = form_parse(F2, 4) if isinstance(F2, str) else F2
    for f, w in ((F1, "F1"), (F2, "F2")):
        if f.nvars != 4 or (not f.is_zero() and f.degree() != 2):
            raise ModelError(f"{w} must be a quadric in 4 variables")
    return ResolutionModel(4, 4, (FormMatrix.from_forms([[F1, F2]]), FormMatrix.from_forms([[F2], [-F1]])))


def _pf4(a: list[list[Form]], idx: Sequence[int]) -> Form:
    i, j, k, l = idx
    return a[i][j] * a[k][l] - a[i][k] * a[j][l] + a[i][l] * a[j][k]


def pfaffian_vector(M: FormMatrix) -> list[Form]:
    """Signed 4x4 Pfaffians p_i = (-1)^i Pf(M without row/col i), so p M = 0."""
    a = M.to_forms()
    return [_pf4(a, [j for j in range(5) if j != i]) * (-1) ** i for i in range(5)]


def model_from_pfaffian(M: FormMatrix) -> ResolutionModel:
    if M.shape != (5, 5) or M.nvars != 5:
        raise ModelError("need a 5x5 matrix of forms in 5 variables")
    if not (M + M.T).is_zero():
        raise ModelError("matrix is not alternating")
    if M.uniform_degree() not in (1, None):
        raise ModelError("entries must be linear")
    p = pfaffian_vector(M)
    row = FormMatrix.from_forms([p], 5)
    return ResolutionModel(5, 5, (row, M, row.T))


class KoszulComplex:
    """Koszul complex on independent linear forms l_1..l_r.

    ``basis[k]`` lists the sorted k-subsets; ``psi[k-1]`` is the map on
    Lambda^k; ``theta[k]`` is the wedge pairing Lambda^k x Lambda^{r-k}.
    """

    def __init__(self, forms: Sequence[Form]):
        forms = list(forms)
        if not forms:
            raise ModelError("need at least one linear form")
        m = forms[0].nvars
        for f in forms:
            _need(f, m, 1, "linear form")
        A = as_matrix([[f.coeff(tuple(int(j == i) for j in range(m))) for i in range(m)] for f in forms])
        if A.rank() < len(forms):
            raise ModelError("linear forms are dependent")
        self.forms, self.m, self.r = forms, m, len(forms)
        self.basis = [list(combinations(range(self.r), k)) for k in range(self.r + 1)]
        self.psi: list[FormMatrix] = []
        for k in range(1, self.r + 1):
            src, dst = self.basis[k], {S: i for i, S in enumerate(self.basis[k - 1])}
            ent = [[Form(m) for _ in src] for _ in dst]
            for c, S in enumerate(src):
                for t, s in enumerate(S):
                    rest = S[:t] + S[t + 1:]
                    ent[dst[rest]][c] = ent[dst[rest]][c] + forms[s] * (-1) ** t
            self.psi.append(FormMatrix.from_forms(ent, m))
        self.theta = [self._wedge(k) for k in range(self.r + 1)]

    def _wedge(self, k: int) -> fmpq_mat:
        rows, cols = self.basis[k], self.basis[self.r - k]
        T = fmpq_mat(len(rows), len(cols))
        for i, S in enumerate(rows):
            for j, U in enumerate(cols):
                if set(S) | set(U) == set(range(self.r)) and not set(S) & set(U):
                    seq = list(S) + list(U)
                    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
                    T[i, j] = (-1) ** inv
        return T

    @property
    def ranks(self) -> list[int]:
        return [len(b) for b in self.basis]

    def witness(self) -> DualityWitness:
        return DualityWitness(tuple(self.theta))


def koszul(forms: Sequence[Form]) -> KoszulComplex:
    return KoszulComplex(forms)


# validation

def _solve_duality(phi: Sequence[FormMatrix]) -> DualityWitness | DualityFailure:
    L = len(phi)
    P = [fmpq_mat(1, 1, [1])]
    for i in range(1, L + 1):
        left = phi[L - i]                       # phi_{L+1-i}
        rhs = (phi[i - 1].T @ FormMatrix.scalar(P[i - 1], left.nvars)).scale((-1) ** (i + 1))
        X = graded_lift(left.T, rhs.T, 0)
        if not X:
            return DualityFailure(f"no degree-0 pairing on F_{i}")
        Pi = X.T.evaluate([0] * left.nvars)
        if Pi.nrows() != Pi.ncols() or Pi.rank() < Pi.nrows():
            return DualityFailure(f"pairing on F_{i} is singular")
        P.append(Pi)
    return DualityWitness(tuple(P))


def duality_equation_residues(phi: Sequence[FormMatrix], P: Sequence[fmpq_mat]) -> list[bool]:
    """Check P_i phi_{L+1-i} = (-1)^{i+1} phi_i^T P_{i-1} for every i."""
    L = len(phi)
    out = []
    for i in range(1, L + 1):
        m = phi[0].nvars
        lhs = FormMatrix.scalar(P[i], m) @ phi[L - i]
        rhs = (phi[i - 1].T @ FormMatrix.scalar(P[i - 1], m)).scale((-1) ** (i + 1))
        out.append(lhs == rhs)
    return out


def _is_symmetric(P: Sequence[fmpq_mat]) -> bool:
    L = len(P) - 1
    return all(P[i] == P[L - i].transpose() * (-1) ** (i * (L - i)) for i in range(L + 1))


def self_duality(model: ResolutionModel) -> DualityWitness | DualityFailure:
    w = _solve_duality(model.phi)
    if not w:
        return w
    if not all(duality_equation_residues(model.phi, w.P)):
        return DualityFailure("pairing is not a chain map")
    if not _is_symmetric(w.P):
        return DualityFailure("pairing is not symmetric")
    return w


def validate(model: ResolutionModel) -> ValidationReport:
    rep = ValidationReport()
    phi = model.phi
    for i in range(len(phi) - 1):
        rep.chain.append((i + 1, i + 2, (phi[i] @ phi[i + 1]).is_zero()))
    n = model.n
    rep.betti = model.ranks
    rep.expected_betti = expected_betti(n)
    rep.betti_ok = rep.betti == rep.expected_betti
    want = [3] if n == 3 else [2] + [1] * (n - 4) + [2]
    for i, (p, d) in enumerate(zip(phi, want)):
        for r, row in enumerate(p.degree_table()):
            for c, deg in enumerate(row):
                if deg is not None and deg != d:
                    rep.grading_ok = False
                    rep.grading_errors.append(f"phi_{i + 1}[{r},{c}] has degree {deg}, expected {d}")
    if rep.betti_ok and rep.chain_ok:
        w = _solve_duality(phi)
        rep.duality = w
        rep.symmetric = bool(w) and _is_symmetric(w.P) and all(duality_equation_residues(phi, w.P))
    else:
        rep.duality = DualityFailure("shape or chain condition failed")
    return rep


# group actions and slicing

def act(model: ResolutionModel, g, basis_changes: Sequence | None = None) -> ResolutionModel:
    """Substitute x'_j = sum_i g_ij x_i and change bases of the modules.

    ``basis_changes[i]`` (or None) is an invertible matrix on F_i;
    phi_i becomes B_{i-1} phi_i B_i^{-1}.
    """
    G = g if isinstance(g, fmpq_mat) else as_matrix(g)
    if G.nrows() != model.m or G.ncols() != model.m:
        raise ModelError("substitution matrix has the wrong size")
    if G.det() == 0:
        raise ModelError("substitution matrix is singular")
    phi = [p.substitute(G) for p in model.phi]
    if basis_changes:
        B = list(basis_changes) + [None] * (model.n - 1 - len(basis_changes))
        B = [None if b is None else (b if isinstance(b, fmpq_mat) else as_matrix(b)) for b in B]
        for b in B:
            if b is not None and b.det() == 0:
                raise ModelError("basis change is singular")
        m = model.m
        for i in range(len(phi)):
            left, right = B[i], B[i + 1]
            if left is not None:
                phi[i] = FormMatrix.scalar(left, m) @ phi[i]
            if right is not None:
                phi[i] = phi[i] @ FormMatrix.scalar(right.inv(), m)
    return ResolutionModel(model.n, model.m, tuple(phi))


def hyperplane_slice(model: ResolutionModel, which: int = 0) -> ResolutionModel:
    """Set x_which = 0; the remaining variables keep their order."""
    if not 0 <= which < model.m:
        raise ModelError("variable index out of range")
    return ResolutionModel(model.n, model.m - 1, tuple(p.restrict(which) for p in model.phi))


# file format

def to_g1m(model: ResolutionModel) -> str:
    out = [f"g1m n={model.n} m={model.m}"]
    for i, p in enumerate(model.phi):
        out.append(f"phi {i + 1} {p.rows} {p.cols}")
        out.extend(str(f) for row in p.to_forms() for f in row)
    return "\n".join(out) + "\n"


def from_g1m(text: str) -> ResolutionModel:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines or not lines[0].startswith("g1m"):
        raise ModelError("missing 'g1m n=<n> m=<m>' header")
    try:
        kv = dict(tok.split("=") for tok in lines[0].split()[1:])
        n, m = int(kv["n"]), int(kv["m"])
    except (KeyError, ValueError):
        raise ModelError("bad g1m header") from None
    pos, phis = 1, []
    while pos < len(lines):
        head = lines[pos].split()
        if len(head) != 4 or head[0] != "phi" or int(head[1]) != len(phis) + 1:
            raise ModelError(f"expected 'phi {len(phis) + 1} <rows> <cols>', got {lines[pos]!r}")
        r, c = int(head[2]), int(head[3])
        body = lines[pos + 1: pos + 1 + r * c]
        if len(body) != r * c:
            raise ModelError(f"phi {len(phis) + 1} is truncated")
        forms = [form_parse(t, m) for t in body]
        phis.append(FormMatrix.from_forms([forms[k * c:(k + 1) * c] for k in range(r)], m))
        pos += 1 + r * c
    return ResolutionModel(n, m, tuple(phis))
