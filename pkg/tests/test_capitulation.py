from fractions import Fraction
from math import gcd

import pytest

from conftest import SELMER
from g1models.capitulation import (EmptySearch, bound_report, capitulation_certificate, minimal_invariants,
                                   naive_height, primitive_vectors, search_min_disc)
from g1models.discform import DegenerateSlice, disc_eval
from g1models.resolution import model_from_cubic
from g1models.unprojection import elliptic_normal_curve


def test_naive_height():
    assert naive_height(48, -864) == pytest.approx(864 ** (1 / 6))
    assert naive_height(0, 1) == 1
    assert naive_height(10 ** 4, 0) == pytest.approx(10)


@pytest.mark.parametrize("c4,c6,expect", [
    (2064, -143424, (129, -2241, 2)),                 # y^2 = x^3 - 43 x + 166 is not minimal at 2
    (48, -864, (48, -864, 1)),
    (48 * 3 ** 4, -864 * 3 ** 6, (48, -864, 3)),
    (Fraction(3), Fraction(-27, 2), (48, -864, Fraction(1, 2))),
])
def test_minimal_invariants(c4, c6, expect):
    m4, m6, u = minimal_invariants(c4, c6)
    assert (m4, m6, u) == expect
    assert (m4 ** 3 - m6 ** 2) % 1728 == 0
    assert Fraction(c4) == u ** 4 * m4 and Fraction(c6) == u ** 6 * m6


def test_minimal_invariants_rejects():
    with pytest.raises(ValueError):
        minimal_invariants(3, 0)                      # 27 is not divisible by 1728
    with pytest.raises(ValueError):
        minimal_invariants(1, 1)                      # singular


@pytest.mark.parametrize("n,R", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_primitive_vectors(n, R):
    vs = primitive_vectors(n, R)
    # brute force count: primitive vectors in the box, halved for the sign
    from itertools import product
    total = sum(1 for u in product(range(-R, R + 1), repeat=n) if any(u) and gcd(*u) == 1)
    assert len(vs) == total // 2 == len(set(vs))
    heights = [max(map(abs, u)) for u in vs]
    assert heights == sorted(heights)
    assert all(next(x for x in u if x) > 0 for u in vs)


@pytest.fixture(scope="module")
def selmer_report():
    return search_min_disc(model_from_cubic(SELMER), radius=2)


def test_selmer_search(selmer_report):
    r = selmer_report
    assert abs(r.best_value) <= 3888
    assert r.best_value == disc_eval(model_from_cubic(SELMER), r.best_u)
    assert all(v % 4 in (0, 1) for v in r.values.values())
    assert r.c4 == 0 and r.minimal
    assert r.ratio == pytest.approx(abs(r.best_value) / r.H_E ** 4)
    assert r.order.is_integral() and r.order.disc() == r.best_value
    d = r.as_dict()
    assert d["minimal"] == "MINIMAL" and d["best_u"] == list(r.best_u)
    assert any(line.startswith("order: b1*b1") for line in r.lines())


def test_certificate(selmer):
    cert = capitulation_certificate(selmer, (0, 0, 1))
    assert cert.disc == -3888
    assert all(line.endswith("ok") for line in cert.transcript)
    with pytest.raises(DegenerateSlice):
        capitulation_certificate(model_from_cubic("x1^3 + x2^3 + x3^3"), (1, 1, 0))


def test_bound_report_monotone():
    b = bound_report(elliptic_normal_curve(0, 0, 0, -1, 1, 3), radii=(1, 2, 3))
    vals = [abs(v) for _, _, v, _ in b.table]
    ratios = [r for *_, r in b.table]
    assert vals == sorted(vals, reverse=True)
    assert ratios == sorted(ratios, reverse=True)
    assert b.table[-1][2] == b.report.best_value
    assert b.lines()[0].startswith("radius")


def test_search_requires_integral_model():
    with pytest.raises(ValueError):
        search_min_disc(model_from_cubic("1/2*x1^3 + x2^3 + x3^3"))
    with pytest.raises(ValueError):
        search_min_disc(model_from_cubic(SELMER), radius=0)


def test_threads_agree():
    M = elliptic_normal_curve(0, 0, 0, -1, 1, 4)
    a = search_min_disc(M, radius=1)
    b = search_min_disc(M, radius=1, threads=2)
    assert a.values == b.values and a.best_u == b.best_u


def test_non_minimal_flag():
    # y^2 = x^3 - 43 x + 166 scaled so its invariants are a 2^4, 2^6 multiple of the minimal pair
    r = search_min_disc(elliptic_normal_curve(0, 0, 0, -43, 166, 3), radius=1)
    assert not r.minimal and r.as_dict()["minimal"] == "NON-MINIMAL"


def test_empty_search_type():
    assert issubclass(EmptySearch, ArithmeticError)
