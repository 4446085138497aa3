"""Kustin-Miller unprojection: from a degree-n model and a point to degree n+1.

Conventions (G is the Koszul complex on l_1..l_{n-1}, of length n-1):

* beta_i : F_i -> G_i with beta_0 = 1 and psi_i beta_i = beta_{i-1} phi_i;
* alpha_i : G_i -> F_{i-1} for i = 1..n-1 with phi_{i-1} alpha_i = alpha_{i-1} psi_i;
* gamma_i : F_{i-1} -> F_{i-1} with gamma_1 = 0 and
  alpha_i beta_i = phi_i gamma_{i+1} + gamma_i phi_i;
* delta_i = gamma_i + (-1)^i x_new.

The cone H_i = F_i + G_i(-1) + F_{i-1}(-1) has differential
[[phi_i, alpha_i, -delta_i], [0, -psi_i, beta_{i-1}], [0, 0, phi_{i-1}]].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from flint import fmpq_mat

from .exactmath import Form, FormMatrix, graded_lift, to_fraction
from .lattice import annihilator_basis, primitive_vector
from .resolution import (KoszulComplex, ModelError, ResolutionModel, _solve_duality,
                         expected_twists, koszul, model_from_cubic)

__all__ = [
    "PointNotOnCurve", "LiftFailure", "SingularCurve", "UnprojectionData",
    "comparison_map", "dual_map", "null_homotopy", "unprojection_data",
    "unprojection_cone", "cone_complex", "minimize_complex", "unproject_curve",
    "weierstrass_cubic", "weierstrass_discriminant", "elliptic_normal_curve",
    "point_forms",
]


class PointNotOnCurve(ValueError):
    pass


class LiftFailure(ArithmeticError):
    pass


class SingularCurve(ValueError):
    pass


@dataclass(frozen=True)
class UnprojectionData:
    F: ResolutionModel
    G: KoszulComplex
    beta: tuple[FormMatrix, ...]     # beta_0 .. beta_{n-2}
    alpha: tuple[FormMatrix, ...]    # alpha_1 .. alpha_{n-1}  (index i-1)
    gamma: tuple[FormMatrix, ...]    # gamma_1 .. gamma_{n-1}  (index i-1)

    @property
    def n(self) -> int:
        return self.F.n


def _scalar(M: fmpq_mat, m: int) -> FormMatrix:
    return FormMatrix.scalar(M, m)


def _twists(F: ResolutionModel) -> list[int]:
    return expected_twists(F.n)


def _lift(A: FormMatrix, B: FormMatrix, d: int, integral: bool):
    """Integral lift when asked and possible, otherwise a rational one."""
    if integral and A.is_integral() and B.is_integral():
        X = graded_lift(A, B, d, domain="integer")
        if X:
            return X
    return graded_lift(A, B, d)


def comparison_map(F: ResolutionModel, G: KoszulComplex, integral: bool = True) -> tuple[FormMatrix, ...]:
    """beta_0 = 1 and beta_i lifted through psi_i; raises LiftFailure if I is not in J."""
    m = F.m
    t = _twists(F)
    beta = [FormMatrix.identity(1, m)]
    for i in range(1, F.n - 1):
        rhs = beta[i - 1] @ F.phi[i - 1]
        X = _lift(G.psi[i - 1], rhs, t[i] - i, integral)
        if not X:
            raise LiftFailure(f"cannot lift beta_{i}: the ideal of the model is not inside J")
        beta.append(X)
    return tuple(beta)


def dual_map(F: ResolutionModel, G: KoszulComplex, beta: Sequence[FormMatrix], P=None) -> tuple[FormMatrix, ...]:
    """alpha_i = (-1)^{i+1} P_{i-1}^{-T} beta_{n-1-i}^T theta_i^T, for i = 1..n-1."""
    n, m = F.n, F.m
    if P is None:
        w = _solve_duality(F.phi)
        if not w:
            raise LiftFailure(f"model has no duality pairing: {w.reason}")
        P = w.P
    alpha = []
    for i in range(1, n):
        Pinv_T = P[i - 1].inv().transpose()
        a = _scalar(Pinv_T, m) @ beta[n - 1 - i].T @ _scalar(G.theta[i].transpose(), m)
        alpha.append(a.scale((-1) ** (i + 1)))
    return tuple(alpha)


def _alpha_is_chain(F: ResolutionModel, G: KoszulComplex, alpha) -> bool:
    for i in range(2, F.n):
        if not (F.phi[i - 2] @ alpha[i - 1] == alpha[i - 2] @ G.psi[i - 1]):
            return False
    return True


def null_homotopy(F: ResolutionModel, alpha, beta, integral: bool = True) -> tuple[FormMatrix, ...]:
    """gamma_1 = 0 and gamma_{i+1} solving phi_i gamma_{i+1} = alpha_i beta_i - gamma_i phi_i."""
    n, m = F.n, F.m
    gamma = [FormMatrix.zeros(1, 1, m)]
    for i in range(1, n - 1):
        rhs = alpha[i - 1] @ beta[i] - gamma[i - 1] @ F.phi[i - 1]
        X = _lift(F.phi[i - 1], rhs, 1, integral)
        if not X:
            raise LiftFailure(f"alpha*beta is not null homotopic at step {i}")
        gamma.append(X)
    return tuple(gamma)


def unprojection_data(F: ResolutionModel, forms: Sequence[Form], integral: bool = True) -> UnprojectionData:
    """Comparison map, dual map and null homotopy.  ``integral`` prefers integral lifts."""
    G = koszul(forms)
    if G.r != F.n - 1:
        raise ModelError(f"need {F.n - 1} linear forms, got {G.r}")
    beta = comparison_map(F, G, integral)
    alpha = dual_map(F, G, beta)
    if not _alpha_is_chain(F, G, alpha):
        raise LiftFailure("dual map is not a chain map")
    gamma = null_homotopy(F, alpha, beta, integral)
    return UnprojectionData(F, G, beta, alpha, gamma)


def cone_complex(data: UnprojectionData) -> tuple[list[FormMatrix], list[list[int]]]:
    """Differentials d_1..d_{n-1} of H in m+1 variables, plus summand sizes per H_i."""
    F, G, n, m = data.F, data.G, data.n, data.F.m
    M = m + 1
    b = F.ranks                                      # b_0 .. b_{n-2}
    g = G.ranks                                      # g_0 .. g_{n-1}
    rk = lambda L, i: L[i] if 0 <= i < len(L) else 0
    emb = lambda X: X.embed(M)
    xnew = Form.var(m, M)

    sizes = [[rk(b, i), rk(g, i), rk(b, i - 1)] for i in range(n)]
    ds = []
    for i in range(1, n):
        rs, cs = sizes[i - 1], sizes[i]
        phi_i = emb(F.phi[i - 1]) if i <= n - 2 else None
        phi_im1 = emb(F.phi[i - 2]) if 2 <= i else None
        alpha_i = emb(data.alpha[i - 1])
        psi_i = emb(G.psi[i - 1]).scale(-1)
        beta_im1 = emb(data.beta[i - 1])
        delta = emb(data.gamma[i - 1]) + FormMatrix.identity(rk(b, i - 1), M).mul_form(xnew * (-1) ** i)
        blocks = [[phi_i, alpha_i, delta.scale(-1)],
                  [None, psi_i, beta_im1],
                  [None, None, phi_im1]]
        ds.append(FormMatrix.assemble(
            [[blk if (rs[r] and cs[c]) else None for c, blk in enumerate(row)] for r, row in enumerate(blocks)],
            rs, cs, M))
    return ds, sizes


def _select(X: FormMatrix, rows: Sequence[int] | None, cols: Sequence[int] | None) -> FormMatrix:
    rows = list(range(X.rows)) if rows is None else list(rows)
    cols = list(range(X.cols)) if cols is None else list(cols)
    d = {}
    for e, A in X.data.items():
        S = fmpq_mat(len(rows), len(cols))
        for a, i in enumerate(rows):
            for c, j in enumerate(cols):
                S[a, c] = A[i, j]
        d[e] = S
    return FormMatrix(len(rows), len(cols), X.nvars, d)


def minimize_complex(ds: list[FormMatrix], k: int, urows: Sequence[int], ucols: Sequence[int]) -> list[FormMatrix]:
    """Cancel an invertible scalar block of d_k (1-based k) on the given rows/cols.

    d_k' = e - c u^{-1} b; d_{k+1} keeps the surviving rows; d_{k-1} keeps the surviving columns.
    """
    d = ds[k - 1]
    keep_r = [i for i in range(d.rows) if i not in set(urows)]
    keep_c = [j for j in range(d.cols) if j not in set(ucols)]
    u = _select(d, urows, ucols)
    if any(sum(e) for e in u.data):
        raise ValueError("block to cancel is not scalar")
    U = u.evaluate([0] * d.nvars)
    if U.nrows() != U.ncols() or U.det() == 0:
        raise ValueError("block to cancel is not invertible")
    e = _select(d, keep_r, keep_c)
    c = _select(d, keep_r, ucols)
    bb = _select(d, urows, keep_c)
    new = list(ds)
    new[k - 1] = e - c @ FormMatrix.scalar(U.inv(), d.nvars) @ bb
    if k < len(ds):
        new[k] = _select(ds[k], keep_c, None)
    if k > 1:
        new[k - 2] = _select(ds[k - 2], None, keep_r)
    return new


def unprojection_cone(data: UnprojectionData) -> ResolutionModel:
    """H_min: the cone with the units beta_0 and alpha_{n-1} cancelled."""
    n = data.n
    ds, sizes = cone_complex(data)
    # beta_0: F_0(-1) in H_1 -> G_0(-1) in H_0
    s0, s1 = sizes[0], sizes[1]
    ds = minimize_complex(ds, 1, [s0[0]], [s1[0] + s1[1]])
    # alpha_{n-1}: G_{n-1}(-1) in H_{n-1} -> F_{n-2} in H_{n-2}
    top, below = sizes[n - 1], sizes[n - 2]
    ds = minimize_complex(ds, n - 1, [0], [top[0]])
    return ResolutionModel(n + 1, data.F.m + 1, tuple(ds))


def point_forms(point: Sequence) -> tuple[list[int], list[Form]]:
    """Primitive integer point and an HNF basis of integral linear forms vanishing on it."""
    p = primitive_vector(point)
    rows = annihilator_basis(p)
    return p, [Form.linear(r) for r in rows]


def unproject_curve(model: ResolutionModel, point: Sequence, integral: bool = True) -> ResolutionModel:
    """Degree n+1 model of the same curve, embedded by |D + P|; P goes to (0:...:0:1)."""
    if model.m != model.n:
        raise ModelError("unprojection needs a curve model (m = n)")
    p, forms = point_forms(point)
    if len(p) != model.m:
        raise ModelError("point has the wrong number of coordinates")
    vals = model.phi[0].evaluate(p)
    if any(vals[0, j] != 0 for j in range(vals.ncols())):
        raise PointNotOnCurve(f"point {p} is not on the curve")
    return unprojection_cone(unprojection_data(model, forms, integral))


def weierstrass_cubic(a1, a2, a3, a4, a6) -> Form:
    """y^2 z + a1 x y z + a3 y z^2 - x^3 - a2 x^2 z - a4 x z^2 - a6 z^3 in (x, y, z) = (x1, x2, x3)."""
    c = [to_fraction(v) for v in (a1, a2, a3, a4, a6)]
    a1, a2, a3, a4, a6 = c
    return Form(3, {(0, 2, 1): 1, (1, 1, 1): a1, (0, 1, 2): a3, (3, 0, 0): -1,
                    (2, 0, 1): -a2, (1, 0, 2): -a4, (0, 0, 3): -a6})


def weierstrass_discriminant(a1, a2, a3, a4, a6):
    a1, a2, a3, a4, a6 = (to_fraction(v) for v in (a1, a2, a3, a4, a6))
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def elliptic_normal_curve(a1, a2, a3, a4, a6, n: int, points: Sequence[Sequence] | None = None) -> ResolutionModel:
    """Model of E embedded by |n O|.

    Starts from the Weierstrass cubic and unprojects n - 3 times: first at
    O = (0:1:0), then at the distinguished point (0:...:0:1).  ``points``
    overrides the point used at each step.
    """
    if n < 3:
        raise ModelError("degree must be at least 3")
    if weierstrass_discriminant(a1, a2, a3, a4, a6) == 0:
        raise SingularCurve("Weierstrass equation is singular")
    model = model_from_cubic(weierstrass_cubic(a1, a2, a3, a4, a6))
    for step in range(n - 3):
        if points is not None:
            P = points[step]
        elif step == 0:
            P = [0, 1, 0]
        else:
            P = [0] * (model.m - 1) + [1]
        model = unproject_curve(model, P)
    return model
