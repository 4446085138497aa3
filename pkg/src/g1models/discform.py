"""The discriminant form D(u): trace-form discriminants of hyperplane sections."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Sequence

from flint import fmpq, fmpq_mat

from .exactmath import Form, monomials, to_fmpq, to_fraction
from .lattice import complete_row, primitive_vector
from .omega import omega_element
from .points_algebra import AlgebraTable, DegenerateModel, table_from_quadrics, trace_matrix
from .resolution import ResolutionModel, act, from_g1m, hyperplane_slice, to_g1m

__all__ = ["DegenerateSlice", "InterpolationError", "DiscriminantForm", "completion_matrix",
           "disc_eval", "slice_model", "slice_table", "disc_poly", "disc_normalizer"]


class DegenerateSlice(ArithmeticError):
    """The sliced model could not be turned into an algebra in a consistent way."""


class InterpolationError(ArithmeticError):
    """disc_poly failed its unisolvence or reproduction checks."""


def completion_matrix(u: Sequence, mode: str = "integer") -> fmpq_mat:
    """gamma in SL_n with first row u.

    ``integer`` divides u by its content and completes over Z; ``field`` (or
    ``rational``) accepts any nonzero rational u.
    """
    if all(to_fraction(x) == 0 for x in u):
        raise ValueError("zero vector")
    if mode == "integer":
        return complete_row(primitive_vector(u), "integer")
    if mode in ("field", "rational"):
        return complete_row(u, "rational")
    raise ValueError("mode must be 'integer' or 'field'")


def disc_normalizer(n: int) -> int:
    """det of the raw trace matrix is (2n)^(2(n-1)) times the order discriminant."""
    return (2 * n) ** (2 * (n - 1))


def slice_model(model: ResolutionModel, u: Sequence, gamma: fmpq_mat | None = None) -> ResolutionModel:
    """Points model of the section u . x = 0, in coordinates x_2..x_n of gamma^{-1}."""
    if model.m != model.n:
        raise ValueError("need a curve model (m = n)")
    if gamma is None:
        gamma = _default_gamma(u)
    else:
        _check_gamma(gamma, u)
    # act substitutes x -> g^T x, so g = gamma^{-T} sends u . x = 0 to x_1 = 0
    return hyperplane_slice(act(model, gamma.inv().transpose()), 0)


def slice_table(model: ResolutionModel, u: Sequence, gamma: fmpq_mat | None = None,
                check: bool = True) -> AlgebraTable:
    sliced = slice_model(model, u, gamma)
    return table_from_quadrics(omega_element(sliced).vector(), check)


def _default_gamma(u):
    fr = [to_fraction(x) for x in u]
    if all(x.denominator == 1 for x in fr) and gcd(*(int(x) for x in fr)) == 1:
        return completion_matrix(u, "integer")
    return completion_matrix(u, "field")


def _check_gamma(gamma, u):
    n = len(u)
    if gamma.nrows() != n or gamma.ncols() != n:
        raise ValueError("completion has the wrong size")
    if any(gamma[0, i] != to_fmpq(u[i]) for i in range(n)) or gamma.det() != 1:
        raise ValueError("completion must have first row u and determinant 1")


def disc_eval(model: ResolutionModel, u: Sequence, gamma: fmpq_mat | None = None) -> fmpq:
    """D(u) for a curve model; 0 exactly when the hyperplane u . x = 0 is tangent."""
    if len(u) != model.n:
        raise ValueError(f"u must have {model.n} entries")
    if all(to_fraction(x) == 0 for x in u):
        raise ValueError("zero vector")
    quad = omega_element(slice_model(model, u, gamma)).vector()
    try:
        tab = table_from_quadrics(quad, check=True)
    except DegenerateModel as err:
        tab = table_from_quadrics(quad, check=False)
        try:
            singular = trace_matrix(tab).det() == 0
        except Exception:                       # noqa: BLE001 - re-raised as DegenerateSlice
            singular = False
        if singular:
            return fmpq(0)
        raise DegenerateSlice(str(err)) from err
    return trace_matrix(tab).det() / disc_normalizer(model.n)


@dataclass
class DiscriminantForm:
    """D as an evaluator (``poly`` is None) or as an explicit degree-2n Form in u."""

    n: int
    evaluator: Callable[[Sequence], fmpq] | None = None
    poly: Form | None = None
    nodes_used: int = field(default=0, compare=False)

    def __call__(self, u: Sequence) -> fmpq:
        if self.poly is not None:
            return self.poly.evaluate([to_fmpq(x) for x in u])
        return self.evaluator(u)

    def coeff(self, exps: Sequence[int]) -> fmpq:
        if self.poly is None:
            raise ValueError("form is not materialized; call disc_poly")
        return self.poly.coeff(tuple(exps))

    def precompose(self, g) -> "DiscriminantForm":
        """u -> D(g u) (the Form substitution convention is u'_j = sum_i g_ij u_i)."""
        G = g if isinstance(g, fmpq_mat) else fmpq_mat([[to_fmpq(x) for x in r] for r in g])
        return DiscriminantForm(self.n, poly=self.poly.substitute(G.transpose()), nodes_used=self.nodes_used)

    def __str__(self):
        return str(self.poly) if self.poly is not None else f"DiscriminantForm(n={self.n}, evaluator)"


def evaluator(model: ResolutionModel) -> DiscriminantForm:
    return DiscriminantForm(model.n, evaluator=lambda u: disc_eval(model, u))


def _eval_node(args):
    text, u = args
    v = disc_eval(from_g1m(text), primitive_vector(u))
    return int(v.p), int(v.q)


def _node_value(model, u):
    """D at an integer node, via its primitive part and homogeneity."""
    return disc_eval(model, primitive_vector(u)) * fmpq(_content(u)) ** (2 * model.n)


def _content(u):
    return gcd(*(int(x) for x in u))


def disc_poly(model: ResolutionModel, max_n: int = 5, checks: int = 20, seed: int = 0,
              threads: int = 1) -> DiscriminantForm:
    """Interpolate D on the simplex grid {e : |e| = 2n} and verify it."""
    n = model.n
    if n > max_n:
        raise ValueError(f"interpolation budget exceeded (n = {n} > {max_n})")
    d = 2 * n
    mons = monomials(n, d)
    nodes = [list(e) for e in mons]
    if threads > 1:
        text = to_g1m(model)
        with ProcessPoolExecutor(threads) as ex:
            prim = list(ex.map(_eval_node, [(text, u) for u in nodes]))
        vals = [fmpq(a, b) * fmpq(_content(u)) ** d for u, (a, b) in zip(nodes, prim)]
    else:
        vals = [_node_value(model, u) for u in nodes]
    if all(v == 0 for v in vals):
        raise DegenerateSlice("every node is degenerate; the model has no discriminant form")
    N = len(mons)
    A = fmpq_mat(N, N)
    for r, u in enumerate(nodes):
        for c, e in enumerate(mons):
            t = fmpq(1)
            for ui, ei in zip(u, e):
                if ei:
                    t *= fmpq(ui) ** ei
            A[r, c] = t
    if A.rank() != N:
        raise InterpolationError("node set is not unisolvent")
    coef = A.solve(fmpq_mat(N, 1, vals))
    poly = Form(n, {e: coef[i, 0] for i, e in enumerate(mons) if coef[i, 0] != 0})
    rng = random.Random(seed)
    for _ in range(checks):
        u = [rng.randint(-7, 7) for _ in range(n)]
        if not any(u):
            u[0] = 1
        if poly.evaluate([fmpq(x) for x in u]) != disc_eval(model, u):
            raise InterpolationError(f"interpolated form disagrees with disc_eval at {u}")
    return DiscriminantForm(n, poly=poly, nodes_used=N)
