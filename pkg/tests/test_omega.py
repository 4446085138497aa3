import random

import pytest
import sympy as sp
from flint import fmpq, fmpq_mat
from hypothesis import given, settings, strategies as st

from conftest import SELMER, random_unimodular
from g1models.exactmath import Form, form_parse
from g1models.omega import (bracket, covariant_action, double_bracket, invariants, jacobian_equation,
                            omega_const, omega_element, perm_sign)
from g1models.resolution import act, model_from_cubic, model_from_quadric_pair
from g1models.unprojection import elliptic_normal_curve
from oracles import c4_c6_printed, q


def weierstrass_c4_c6(a1, a2, a3, a4, a6):
    b2, b4, b6 = a1 * a1 + 4 * a2, 2 * a4 + a1 * a3, a3 * a3 + 4 * a6
    return b2 * b2 - 24 * b4, -b2 ** 3 + 36 * b2 * b4 - 216 * b6


def sympy_omega(omega):
    n = omega.n
    x = sp.symbols(f"x0:{n}")
    def conv(f):
        return sum(q(c) * sp.prod([x[i] ** k for i, k in enumerate(e)]) for e, c in f.terms.items())
    return [[conv(f) for f in row] for row in omega.matrix()]


@pytest.mark.parametrize("n", range(3, 8))
def test_omega_const_invariants(n):
    assert invariants(omega_const(n)) == (1, -1)


@pytest.mark.parametrize("model", [
    model_from_cubic(SELMER),
    model_from_cubic("x1^3 + 2*x2^3 - x3^3 + x1*x2*x3 - 3*x1^2*x3"),
    model_from_quadric_pair("x1*x2 - x3*x4", "x1^2 + x2^2 - x3^2 + x4^2 + x1*x3"),
], ids=["selmer", "cubic", "quadric-pair"])
def test_invariants_match_sympy_oracle(model):
    om = omega_element(model)
    c4, c6 = c4_c6_printed(sympy_omega(om), om.n)
    got = invariants(om)
    assert (q(got[0]), q(got[1])) == (c4, c6)


def test_omega_const_oracle():
    assert c4_c6_printed(sympy_omega(omega_const(5)), 5) == (1, -1)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
@pytest.mark.parametrize("a", [(0, 0, 0, -1, 1), (1, -1, 1, -2, 3), (0, 1, 1, 0, -2)])
def test_weierstrass_invariants(n, a):
    c4, c6 = invariants(omega_element(elliptic_normal_curve(*a, n)))
    assert (c4, c6) == weierstrass_c4_c6(*a)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 4, 5]))
def test_equivariance(seed, n):
    rng = random.Random(seed)
    M = elliptic_normal_curve(0, 0, 0, -1, 1, n)
    g = fmpq_mat([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
    if g.det() == 0:
        g = random_unimodular(rng, n, 2)
    assert omega_element(act(M, g)) == covariant_action(g, omega_element(M))


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 4, 5]))
def test_invariance_under_sl(seed, n):
    rng = random.Random(seed)
    g = random_unimodular(rng, n, 2)
    if g.det() != 1:                      # flip one column to land in SL_n
        g = g * fmpq_mat([[(-1 if i == j == 0 else int(i == j)) for j in range(n)] for i in range(n)])
    om = omega_element(elliptic_normal_curve(1, -1, 1, -2, 3, n))
    assert invariants(covariant_action(g, om)) == invariants(om)


def test_invariants_weights():
    om = omega_element(model_from_cubic(SELMER))
    c4, c6 = invariants(om)
    lam = fmpq(3, 2)
    assert invariants(om.scale(lam)) == (lam ** 4 * c4, lam ** 6 * c6)


def test_omega_alternating_and_quadratic(enc5):
    om = omega_element(enc5)
    M = om.matrix()
    for i in range(5):
        assert M[i][i].is_zero()
        for j in range(5):
            assert M[i][j] == -M[j][i]
            assert M[i][j].is_zero() or M[i][j].degree() == 2


def test_points_omega_is_vector(enc5):
    from g1models.resolution import hyperplane_slice
    om = omega_element(hyperplane_slice(enc5, 0))
    assert not om.is_curve and len(om.vector()) == 4
    with pytest.raises(ValueError):
        om.matrix()


def test_bracket_errors(selmer):
    with pytest.raises(ValueError):
        bracket(selmer, (0, 1))
    with pytest.raises(IndexError):
        bracket(selmer, (7,))


def test_double_bracket_rotation_modes():
    M = model_from_quadric_pair("x1*x2 - x3*x4", "x1^2 + x2^2 - x3^2 + x4^2 + x1*x3")
    a = (0, 1)
    lit = double_bracket(M, a)
    dist = double_bracket(M, a, rotations="distinct")
    assert lit == dist * 2
    with pytest.raises(ValueError):
        omega_element(M, rotations="bogus")


def test_cubic_bracket_is_first_derivative(selmer):
    # for n = 3 a bracket has one index and is the partial derivative of the cubic
    assert bracket(selmer, (0,)) == form_parse("9*x1^2", 3)


def test_perm_sign():
    assert perm_sign([0, 1, 2]) == 1 and perm_sign([1, 0, 2]) == -1 and perm_sign([2, 0, 1]) == 1


def test_jacobian_equation():
    w = jacobian_equation(elliptic_normal_curve(0, 0, 0, -1, 1, 5))
    assert w.short_model == (-27 * 48, -54 * -864)
    assert w.delta == (fmpq(48) ** 3 - fmpq(864) ** 2) / 1728
    assert not w.degenerate and w.warning is None
    with pytest.warns(UserWarning):
        w4 = jacobian_equation(elliptic_normal_curve(0, 0, 0, -1, 1, 4))
    assert w4.warning


def test_singular_flagged():
    w = jacobian_equation(model_from_cubic("x1^3 + x2^2*x3"))   # cuspidal cubic
    assert w.degenerate
