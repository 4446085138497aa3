import random

import pytest
from flint import fmpq, fmpq_mat
from hypothesis import given, settings, strategies as st

from conftest import SELMER, random_unimodular
from g1models.discform import (DegenerateSlice, completion_matrix, disc_eval, disc_normalizer, disc_poly,
                               evaluator, slice_model, slice_table)
from g1models.resolution import ModelError, ResolutionModel, act, model_from_cubic
from g1models.unprojection import elliptic_normal_curve
from hesse import hesse_disc, hesse_model
from oracles import binary_cubic_disc, q


@pytest.mark.parametrize("u", [[2, 3], [3, 5, 7], [0, 0, 1], [6, 10, 15], [4, -6, 9, 1]])
def test_completion_integer(u):
    g = completion_matrix(u)
    from math import gcd
    c = gcd(*u)
    assert g.det() == 1
    assert [g[0, j] for j in range(len(u))] == [x // c for x in u]
    assert all(g[i, j].q == 1 for i in range(len(u)) for j in range(len(u)))


def test_completion_field():
    u = [fmpq(1, 2), fmpq(-2, 3), 0]
    g = completion_matrix(u, "field")
    assert g.det() == 1 and [g[0, j] for j in range(3)] == u
    with pytest.raises(ValueError):
        completion_matrix([0, 0, 0])
    with pytest.raises(ValueError):
        completion_matrix([1, 2], "bogus")


@pytest.mark.parametrize("ab", [(1, 0), (1, 1), (2, 3)])
def test_hesse_disc_poly(ab):
    D = disc_poly(hesse_model(*ab))
    expect = hesse_disc(*ab)
    assert {e: q(c) for e, c in D.poly.terms.items()} == expect


def test_selmer_values(selmer):
    assert disc_eval(selmer, [0, 0, 1]) == -3888
    # slice z = 0 of a x^3 + b y^3 + c z^3 is a binary cubic with disc -27 a^2 b^2
    for (a, b, c) in [(3, 4, 5), (1, 2, 7)]:
        M = model_from_cubic(f"{a}*x1^3 + {b}*x2^3 + {c}*x3^3")
        assert disc_eval(M, [0, 0, 1]) == -27 * a * a * b * b


@settings(max_examples=20)
@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_cubic_slice_is_binary_cubic_disc(coefs):
    a, b, c, d = coefs
    # x3 = 0 slice of a x1^3 + b x1^2 x2 + c x1 x2^2 + d x2^3 + x3^3
    M = model_from_cubic(f"{a}*x1^3 + {b}*x1^2*x2 + {c}*x1*x2^2 + {d}*x2^3 + x3^3")
    try:
        v = disc_eval(M, [0, 0, 1])
    except DegenerateSlice:
        assert binary_cubic_disc(a, b, c, d) == 0
        return
    assert v == binary_cubic_disc(a, b, c, d)


def test_homogeneity(selmer):
    for u in ([1, 2, 3], [0, 1, -1], [2, 0, 5]):
        for lam in (2, -3, fmpq(1, 2)):
            assert disc_eval(selmer, [lam * x for x in u]) == fmpq(lam) ** 6 * disc_eval(selmer, u)


def test_independent_of_completion(enc5):
    u = [1, 2, -1, 3, 1]
    g0 = completion_matrix(u)
    rng = random.Random(5)
    base = disc_eval(enc5, u)
    for _ in range(4):
        h = random_unimodular(rng, 4, 2)
        if h.det() != 1:
            h = h * fmpq_mat([[(-1 if i == j == 0 else int(i == j)) for j in range(4)] for i in range(4)])
        E = fmpq_mat(5, 5)
        E[0, 0] = 1
        for i in range(4):
            E[i + 1, 0] = rng.randint(-3, 3)
            for j in range(4):
                E[i + 1, j + 1] = h[i, j]
        g = E * g0                               # first row still u, determinant 1
        assert disc_eval(enc5, u, g) == base
    with pytest.raises(ValueError):
        disc_eval(enc5, u, fmpq_mat(5, 5, [int(i == j) for i in range(5) for j in range(5)]))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_integral_and_mod4(n):
    M = elliptic_normal_curve(1, -1, 1, -2, 3, n)
    rng = random.Random(n)
    for _ in range(6):
        u = [rng.randint(-3, 3) for _ in range(n)]
        if not any(u):
            continue
        try:
            v = disc_eval(M, u)
        except DegenerateSlice:
            continue
        assert v.q == 1 and int(v) % 4 in (0, 1)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_covariance(seed):
    rng = random.Random(seed)
    M = model_from_cubic(SELMER)
    g = random_unimodular(rng, 3, 2)
    Mg = act(M, g.inv().transpose())
    for _ in range(3):
        u = [rng.randint(-4, 4) for _ in range(3)]
        if not any(u):
            continue
        gu = [sum(g[j, i] * u[j] for j in range(3)) for i in range(3)]   # g^T u
        assert disc_eval(Mg, u) == disc_eval(M, gu)


def test_poly_precompose_matches_covariance(selmer):
    D = disc_poly(selmer)
    rng = random.Random(2)
    g = random_unimodular(rng, 3, 2)
    Dg = D.precompose(g)
    for u in ([1, 0, 0], [1, 2, 3], [-2, 1, 4]):
        gu = [sum(g[i, j] * u[j] for j in range(3)) for i in range(3)]
        assert Dg(u) == D(gu)


def test_poly_matches_evaluator_at_n4():
    M = elliptic_normal_curve(0, 0, 0, -1, 1, 4)
    D = disc_poly(M, checks=5)
    ev = evaluator(M)
    assert D.nodes_used == 165 and D.poly.degree() == 8
    for u in ([1, 1, 1, 1], [2, -1, 0, 3]):
        assert D(u) == ev(u)
    with pytest.raises(ValueError):
        ev.coeff((8, 0, 0, 0))


def test_budget():
    with pytest.raises(ValueError):
        disc_poly(elliptic_normal_curve(0, 0, 0, -1, 1, 6))


def test_zero_model_aborts():
    from g1models.exactmath import FormMatrix
    zero = ResolutionModel(3, 3, (FormMatrix(1, 1, 3, {}),))
    with pytest.raises(ArithmeticError):
        disc_poly(zero)


def test_tangent_hyperplane_is_zero(selmer):
    # the tangent line at a flex point of the Fermat cubic meets the curve in a triple point
    F = model_from_cubic("x1^3 + x2^3 + x3^3")
    assert disc_eval(F, [1, 1, 0]) == 0


def test_normalizer():
    assert disc_normalizer(3) == 6 ** 4
    tab = slice_table(model_from_cubic(SELMER), [0, 0, 1])
    from g1models.points_algebra import trace_disc
    assert trace_disc(tab) / disc_normalizer(3) == -3888


def test_slice_model_needs_curve(selmer):
    from g1models.resolution import hyperplane_slice
    with pytest.raises(ValueError):
        slice_model(hyperplane_slice(selmer, 0), [1, 0])
    with pytest.raises(ValueError):
        disc_eval(selmer, [0, 0, 0])
