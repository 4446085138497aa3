import random

import pytest
import sympy as sp
from flint import fmpq, fmpq_mat
from hypothesis import given, strategies as st

from g1models.exactmath import (Form, FormMatrix, NoSolution, ParseError, form_parse, graded_kernel,
                                graded_lift, monomials)

X = sp.symbols("x1:5")


def to_sympy(f: Form):
    return sum((sp.Rational(str(c)) * sp.prod([X[i] ** e for i, e in enumerate(m)]) for m, c in f.terms.items()),
               sp.Integer(0))


def forms(nvars=3, degree=2):
    mons = monomials(nvars, degree)
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.lists(coeff, min_size=len(mons), max_size=len(mons)).map(
        lambda cs: Form(nvars, {m: fmpq(c.numerator, c.denominator) for m, c in zip(mons, cs)}))


def test_parse_and_print_round_trip():
    f = form_parse("3*x1^3 + 4*x2^3 - 1/2*x1*x2*x3")
    assert f.nvars == 3 and f.degree() == 3
    assert f.coeff((1, 1, 1)) == fmpq(-1, 2)
    assert form_parse(str(f), 3) == f


@pytest.mark.parametrize("bad", ["x1^2 + x2", "3*x1^", "x1 x2", "y1^2", ""])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        form_parse(bad, 3)


def test_zero_coefficients_are_dropped():
    f = form_parse("x1^2 - x1^2 + x2^2", 2)
    assert f.terms == {(0, 2): fmpq(1)}


@given(forms(), forms())
def test_ring_operations_against_sympy(f, g):
    assert sp.expand(to_sympy(f + g) - (to_sympy(f) + to_sympy(g))) == 0
    assert sp.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0
    assert sp.expand(to_sympy(f - g) - (to_sympy(f) - to_sympy(g))) == 0


@given(forms(3, 3), st.integers(0, 2))
def test_diff_against_sympy(f, i):
    assert sp.expand(to_sympy(f.diff(i)) - sp.diff(to_sympy(f), X[i])) == 0


@given(forms(3, 2), st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_substitute_against_sympy(f, entries):
    g = fmpq_mat(3, 3, entries)
    sub = {X[j]: sum(entries[3 * i + j] * X[i] for i in range(3)) for j in range(3)}
    assert sp.expand(to_sympy(f.substitute(g)) - to_sympy(f).subs(sub, simultaneous=True)) == 0


def test_substitution_is_an_action():
    rng = random.Random(0)
    f = form_parse("x1^3 + 2*x2^2*x3 - x1*x2*x3 + 5*x3^3")
    for _ in range(10):
        g = fmpq_mat([[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)])
        h = fmpq_mat([[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)])
        assert f.substitute(h).substitute(g) == f.substitute(g * h)


def test_restrict_and_embed():
    f = form_parse("x1*x2 + x2*x3 + x3^2")
    r = f.restrict(0)
    assert r.nvars == 2 and r == form_parse("x1*x2 + x2^2", 2)


def test_evaluate_exact():
    f = form_parse("x1^2 - 1/3*x2*x3")
    assert f.evaluate([1, 3, 2]) == fmpq(-1)


def test_formmatrix_product_and_transpose():
    A = FormMatrix.parse([["x1", "x2"]], 2)
    B = FormMatrix.parse([["x2"], ["-x1"]], 2)
    assert (A @ B).is_zero()
    assert A.T.shape == (2, 1)


def test_graded_lift_pivot_policy():
    A = FormMatrix.parse([["x1", "x2"]], 2)
    B = FormMatrix.parse([["x1*x2"]], 2)
    X_ = graded_lift(A, B, 1)
    assert X_ == FormMatrix.parse([["0"], ["x1"]], 2)


def test_graded_lift_no_solution():
    A = FormMatrix.parse([["x1"]], 2)
    B = FormMatrix.parse([["x2^2"]], 2)
    res = graded_lift(A, B, 1)
    assert isinstance(res, NoSolution) and not res


@given(st.lists(st.integers(-4, 4), min_size=6, max_size=6))
def test_graded_lift_solves_when_solvable(cs):
    # B = A Y for a random degree-1 Y, so a solution exists; the lift must satisfy A X = B
    A = FormMatrix.parse([["x1^2", "x1*x2", "x3^2"]], 3)
    Y = FormMatrix.from_forms([[Form.linear(cs[0:3])], [Form.linear(cs[3:6])], [Form.linear([1, 0, -1])]], 3)
    B = A @ Y
    for dom in ("rational", "integer"):
        Xs = graded_lift(A, B, 1, domain=dom)
        assert Xs and A @ Xs == B
        if dom == "integer":
            assert Xs.is_integral()


def test_graded_kernel():
    K = graded_kernel(FormMatrix.parse([["x1", "x2"]], 2), 1)
    assert (FormMatrix.parse([["x1", "x2"]], 2) @ K).is_zero()
    assert K == FormMatrix.parse([["x2"], ["-x1"]], 2) or K == FormMatrix.parse([["-x2"], ["x1"]], 2)


def test_parse_sign_runs():
    assert form_parse("x1 + -2*x2") == form_parse("x1 - 2*x2")
    assert form_parse("-x1 - -x2") == form_parse("x2 - x1")
