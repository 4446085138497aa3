import random
from math import comb

import pytest
from flint import fmpq, fmpq_mat
from hypothesis import given, settings, strategies as st

from conftest import SELMER, random_unimodular
from g1models.exactmath import Form, FormMatrix, form_parse
from g1models.resolution import (ModelError, ResolutionModel, act, expected_betti, expected_twists, from_g1m,
                                 hyperplane_slice, koszul, model_from_cubic, model_from_pfaffian,
                                 model_from_quadric_pair, self_duality, to_g1m, validate)
from g1models.unprojection import elliptic_normal_curve


def random_pfaffian(rng, m=5):
    ent = [[Form(m) for _ in range(5)] for _ in range(5)]
    for i in range(5):
        for j in range(i + 1, 5):
            f = Form.linear([rng.randint(-2, 2) for _ in range(m)])
            ent[i][j], ent[j][i] = f, -f
    return model_from_pfaffian(FormMatrix.from_forms(ent, m))


@pytest.mark.parametrize("n", range(3, 9))
def test_betti_formula(n):
    b = expected_betti(n)
    assert b[0] == 1 and b[-1] == 1 and len(b) == n - 1
    assert b == [n * comb(n - 2, i) - comb(n, i + 1) if 0 < i < n - 2 else 1 for i in range(n - 1)]
    # codimension n - 2: the Hilbert numerator sum (-1)^i b_i t^(d_i) vanishes to order n - 2 at t = 1
    tw = expected_twists(n)
    for k in range(n - 2):
        assert sum((-1) ** i * bi * ti ** k for i, (bi, ti) in enumerate(zip(b, tw))) == 0


def test_cubic_model(selmer):
    assert selmer.ranks == [1, 1] and selmer.kind == "curve"
    assert validate(selmer).ok


def test_cubic_rejects_wrong_degree():
    with pytest.raises((ModelError, ValueError)):
        model_from_cubic("x1^2*x2 + x3^2")


def test_quadric_pair_model():
    M = model_from_quadric_pair("x1*x2 - x3*x4", "x1^2 + x2^2 - x3^2 + x4^2 + x1*x3")
    rep = validate(M)
    assert rep.ok and rep.betti == [1, 2, 1]
    assert rep.duality.P[1] == fmpq_mat([[0, -1], [1, 0]]) or rep.duality.P[1] == fmpq_mat([[0, 1], [-1, 0]])


def test_pfaffian_models_validate():
    rng = random.Random(1)
    done = 0
    while done < 3:
        M = random_pfaffian(rng)
        if any(f.is_zero() for f in M.phi[0].to_forms()[0]):
            continue
        rep = validate(M)
        assert rep.chain_ok and rep.betti == [1, 5, 5, 1]
        assert rep.ok
        done += 1


def test_perturbed_complex_fails():
    M = model_from_quadric_pair("x1*x2 - x3*x4", "x1^2 + x2^2 - x3^2 + x4^2")
    bad = ResolutionModel(4, 4, (M.phi[0], M.phi[1] + FormMatrix.parse([["x1^2"], ["0"]], 4)))
    rep = validate(bad)
    assert not rep.chain_ok and not rep.ok
    assert not self_duality(bad)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_koszul_complex(r):
    rng = random.Random(r)
    while True:
        forms = [Form.linear([rng.randint(-2, 2) for _ in range(4)]) for _ in range(r)]
        try:
            K = koszul(forms)
            break
        except ModelError:
            continue
    assert K.ranks == [comb(r, k) for k in range(r + 1)]
    for a, b in zip(K.psi, K.psi[1:]):
        assert (a @ b).is_zero()


def test_slices():
    M = model_from_cubic(SELMER)
    assert hyperplane_slice(M, 2).phi[0].entry(0, 0) == form_parse("3*x1^3 + 4*x2^3", 2)
    F = model_from_cubic("x1^3 + x2^3 + x3^3")
    assert hyperplane_slice(F, 0).phi[0].entry(0, 0) == form_parse("x1^3 + x2^3", 2)


def test_slice_of_degree5_model_is_valid_points_model(enc5):
    S = hyperplane_slice(enc5, 0)
    rep = validate(S)
    assert S.m == 4 and rep.chain_ok and rep.betti == [1, 5, 5, 1]


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6), st.sampled_from([3, 4, 5]))
def test_act_is_an_action(seed, n):
    rng = random.Random(seed)
    M = elliptic_normal_curve(0, 0, 0, -1, 1, n) if n > 3 else model_from_cubic(SELMER)
    g, h = random_unimodular(rng, n, 2), random_unimodular(rng, n, 2)
    assert act(act(M, h), g) == act(M, g * h)
    assert validate(act(M, g)).ok


def test_slice_commutes_with_act_fixing_hyperplane():
    rng = random.Random(7)
    M = elliptic_normal_curve(0, 0, 0, -1, 1, 4)
    for _ in range(5):
        h = random_unimodular(rng, 3, 2)
        g = fmpq_mat(4, 4)
        g[0, 0] = 1
        for i in range(3):
            for j in range(3):
                g[i + 1, j + 1] = h[i, j]
        for j in range(1, 4):
            g[0, j] = rng.randint(-2, 2)     # x_1 may feed the others; x_1 = 0 is preserved
        assert hyperplane_slice(act(M, g), 0) == act(hyperplane_slice(M, 0), h)


def test_g1m_round_trip(enc5):
    text = to_g1m(enc5)
    assert text.startswith("g1m n=5 m=5\nphi 1 1 5\n")
    assert from_g1m(text) == enc5


@pytest.mark.parametrize("bad", ["", "g1m n=3\n", "g1m n=3 m=3\nphi 2 1 1\nx1^3\n", "g1m n=3 m=3\nphi 1 1 1\n"])
def test_g1m_errors(bad):
    with pytest.raises((ModelError, ValueError)):
        from_g1m(bad)


def test_duality_witness_unique_up_to_scalar(enc5):
    # any witness for a basis-changed model transports back to a scalar multiple
    w = self_duality(enc5)
    assert w
    M2 = act(enc5, fmpq_mat(5, 5, [int(i == j) for i in range(5) for j in range(5)]),
             [fmpq_mat([[2]]), None, None, fmpq_mat([[3]])])
    w2 = self_duality(M2)
    assert w2
    ratio = w2.P[-1][0, 0] / w.P[-1][0, 0]
    assert ratio != 0
    # P_0 is pinned to 1; the end pairing absorbs the product of the two rescalings
    assert w2.P[0] == fmpq_mat([[1]])
