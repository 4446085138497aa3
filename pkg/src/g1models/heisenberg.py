"""Analytic layer: q-series of the Heisenberg-invariant embedding and its Omega matrix.

Fractional powers of q are q^a = exp(2 pi i tau a).  The exact series layer
keeps exponents as integer multiples of 1/(8n) and rational coefficients;
series that carry a factor 2 pi i are stored divided by it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .omega import invariants_numeric

__all__ = [
    "QSeries", "alpha", "x_function", "x_log_derivative", "dx0_at_zero", "u_series",
    "heisenberg_omega", "HeisenbergDiagram", "eisenstein", "verify_analytic", "AnalyticReport",
    "real_period_lattice", "PeriodLattice", "PrecisionNotMet", "truncation_for",
]


class PrecisionNotMet(ArithmeticError):
    """The requested tolerance was not reached."""


def _qpow(tau, a):
    a = Fraction(a)
    return mp.exp(2j * mp.pi * tau * mp.mpf(a.numerator) / a.denominator)


def _check_tau(tau):
    tau = mp.mpc(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane (|q| < 1)")
    return tau


def truncation_for(tau, bits: int) -> int:
    """An N with |q|^N < 2^-(bits + 8): the bound plus two terms of margin, and never below 8."""
    y = float(mp.mpc(tau).imag)
    return max(8, int((bits + 8) * 0.6931471805599453 / (2 * 3.141592653589793 * y)) + 2)


# exact series

@dataclass(frozen=True)
class QSeries:
    """sum c_k q^{k/den} + O(q^order); keys are the integers k."""

    den: int
    coeffs: dict = field(default_factory=dict)
    order: Fraction = Fraction(10)

    def __post_init__(self):
        lim = self.order * self.den
        clean = {k: Fraction(c) for k, c in self.coeffs.items() if c != 0 and k < lim}
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "order", Fraction(self.order))

    @classmethod
    def one(cls, den, order):
        return cls(den, {0: 1}, order)

    @classmethod
    def monomial(cls, den, k, c, order):
        return cls(den, {k: c}, order)

    def valuation(self):
        return Fraction(min(self.coeffs), self.den) if self.coeffs else self.order

    def coeff(self, exponent) -> Fraction:
        k = Fraction(exponent) * self.den
        if k.denominator != 1:
            return Fraction(0)
        return self.coeffs.get(int(k), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coeffs.get(0, Fraction(0))

    def _same(self, other):
        if self.den != other.den:
            raise ValueError("series have different exponent bases")

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries(self.den, {0: other}, self.order)
        self._same(other)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return QSeries(self.den, c, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.den, {k: -v for k, v in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return QSeries(self.den, {k: v * Fraction(other) for k, v in self.coeffs.items()}, self.order)
        self._same(other)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        lim = order * self.den
        c: dict = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                if a + b < lim:
                    c[a + b] = c.get(a + b, 0) + x * y
        return QSeries(self.den, c, order)

    __rmul__ = __mul__

    def inverse(self):
        """1/self for a series whose leading coefficient is at exponent 0."""
        if not self.coeffs or min(self.coeffs) != 0:
            raise ZeroDivisionError("series is not a unit")
        lim = int(self.order * self.den)
        c0 = self.coeffs[0]
        out = {0: 1 / c0}
        for k in range(1, lim):
            s = sum((self.coeffs.get(j, 0) * out.get(k - j, 0) for j in range(1, k + 1)), Fraction(0))
            if s:
                out[k] = -s / c0
        return QSeries(self.den, out, self.order)

    def shift(self, k: int):
        """Multiply by q^{k/den}."""
        return QSeries(self.den, {a + k: v for a, v in self.coeffs.items()}, self.order + Fraction(k, self.den))

    def evaluate(self, tau):
        tau = _check_tau(tau)
        return mp.fsum(mp.mpf(v.numerator) / v.denominator * _qpow(tau, Fraction(k, self.den))
                       for k, v in self.coeffs.items())

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        order = min(self.order, other.order)
        lim = order * self.den
        a = {k: v for k, v in self.coeffs.items() if k < lim}
        b = {k: v for k, v in other.coeffs.items() if k < lim}
        return self.den == other.den and a == b

    def __hash__(self):
        return hash((self.den, tuple(sorted(self.coeffs.items()))))

    def __str__(self):
        if not self.coeffs:
            return f"O(q^{self.order})"
        parts = []
        for k in sorted(self.coeffs):
            e = Fraction(k, self.den)
            parts.append(f"({self.coeffs[k]})*q^({e})" if e else f"({self.coeffs[k]})")
        return " + ".join(parts) + f" + O(q^{self.order})"


def _one_minus_q(den, k, order):
    """1 - q^{k/den} as a series (k > 0)."""
    return QSeries(den, {0: 1, k: -1}, order)


def _geometric(den, k, order):
    """q^{k/den} / (1 - q^{k/den}) = sum_{j >= 1} q^{jk/den} (k > 0)."""
    lim = int(order * den)
    return QSeries(den, {j * k: 1 for j in range(1, lim // k + 1)}, order)


def _alpha_series(n, r, N):
    den = 8 * n
    order = Fraction(N)
    if r % n == 0:
        return QSeries(den, {}, order)
    r %= n
    s = QSeries(den, {(2 * r - n) ** 2: (-1) ** r}, order + Fraction((2 * r - n) ** 2, den))
    for m in range(1, N + 1):
        for e in (n * m - r, n * m + r, n * m):
            s = s * _one_minus_q(den, e * den, order + 1)
    s = s * _one_minus_q(den, r * den, order + 1)     # the m = 0 factor of prod (1 - q^{nm + r})
    return QSeries(den, s.coeffs, order)


def _alpha_numeric(n, r, tau, N):
    if r % n == 0:
        return mp.mpc(0)
    r %= n
    q = _qpow(tau, 1)
    p = mp.mpc(1)
    for m in range(1, N + 1):
        p *= (1 - q ** (n * m - r)) * (1 - q ** (n * m + r)) * (1 - q ** (n * m))
    p *= 1 - q ** r
    return (-1) ** r * _qpow(tau, Fraction((2 * r - n) ** 2, 8 * n)) * p


def alpha(n: int, r: int, mode: str = "series", N: int = 20, tau=None):
    """alpha_r = x_r(0, tau) as an exact QSeries (mode='series') or a number (mode='numeric')."""
    if not 0 <= r <= n - 1:
        raise ValueError("need 0 <= r <= n - 1")
    if mode == "series":
        return _alpha_series(n, r, N)
    if mode == "numeric":
        tau = _check_tau(tau)
        return _alpha_numeric(n, r, tau, N)
    raise ValueError("mode must be 'series' or 'numeric'")


def x_function(n: int, r: int, z, tau, N: int = 40):
    """Normalized x_r(z, tau), with u = exp(2 pi i z)."""
    tau = _check_tau(tau)
    u = mp.exp(2j * mp.pi * mp.mpc(z))
    q = _qpow(tau, 1)
    r %= n
    p = mp.mpc(1)
    for m in range(1, N + 1):
        p *= (1 - q ** (n * m - r) * u ** n) * (1 - q ** (n * m + r) * u ** (-n)) * (1 - q ** (n * m))
    p *= 1 - q ** r * u ** (-n)
    return (-1) ** r * _qpow(tau, Fraction((2 * r - n) ** 2, 8 * n)) * u ** (-r) * p


def x_log_derivative(n: int, r: int, z, tau, N: int = 40):
    """(d x_r / dz) / x_r."""
    tau = _check_tau(tau)
    u = mp.exp(2j * mp.pi * mp.mpc(z))
    q = _qpow(tau, 1)
    r %= n
    s = mp.mpc(-r)
    for m in range(0, N + 1):
        t = q ** (n * m + r) * u ** (-n)
        s += n * t / (1 - t)
    for m in range(1, N + 1):
        t = q ** (n * m - r) * u ** n
        s -= n * t / (1 - t)
    return 2j * mp.pi * s


def dx0_at_zero(n: int, mode: str = "series", N: int = 20, tau=None):
    """d x_0 / dz at z = 0, which is 2 pi i n q^{n/8} prod (1 - q^{nm})^3.

    Series mode returns the QSeries of the value divided by 2 pi i.
    """
    if mode == "series":
        den = 8 * n
        order = Fraction(N)
        s = QSeries(den, {n * n: n}, order + Fraction(n, 8))
        for m in range(1, N + 1):
            f = _one_minus_q(den, n * m * den, order + 1)
            s = s * f * f * f
        return QSeries(den, s.coeffs, order)
    tau = _check_tau(tau)
    q = _qpow(tau, 1)
    p = mp.mpc(1)
    for m in range(1, N + 1):
        p *= (1 - q ** (n * m)) ** 3
    return 2j * mp.pi * n * _qpow(tau, Fraction(n, 8)) * p


def _ell_series(n, r, N):
    """l_r = -r + n sum_{m>=0} q^{nm+r}/(1-q^{nm+r}) - n sum_{m>=1} q^{nm-r}/(1-q^{nm-r}), 0 < r < n."""
    den = 8 * n
    order = Fraction(N)
    s = QSeries(den, {0: -r}, order)
    for m in range(0, N + 1):
        s = s + _geometric(den, (n * m + r) * den, order) * n
    for m in range(1, N + 1):
        s = s - _geometric(den, (n * m - r) * den, order) * n
    return s


def u_series(n: int, k: int, N: int = 20) -> QSeries:
    """u_k / (2 pi i) as an exact series in q^{1/n}; its constant term is -(n - 2k).

    Obtained from the defining differential identity by expanding both sides
    at z = 0: u_k/(2 pi i) = n(n-2) + sum_{i != k} (l_i + l_{k-i}), indices mod n.
    """
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n - 1")
    s = QSeries(8 * n, {0: n * (n - 2)}, Fraction(N))
    for i in range(1, n):
        if i == k:
            continue
        s = s + _ell_series(n, i, N) + _ell_series(n, (k - i) % n, N)
    return s


def _ell_numeric(n, r, tau, N):
    q = _qpow(tau, 1)
    s = mp.mpc(-r)
    for m in range(0, N + 1):
        t = q ** (n * m + r)
        s += n * t / (1 - t)
    for m in range(1, N + 1):
        t = q ** (n * m - r)
        s -= n * t / (1 - t)
    return s


def _u_numeric(n, k, tau, N):
    s = mp.mpc(n * (n - 2))
    for i in range(1, n):
        if i != k:
            s += _ell_numeric(n, i, tau, N) + _ell_numeric(n, (k - i) % n, tau, N)
    return 2j * mp.pi * s


# the analytic Omega matrix

@dataclass
class HeisenbergDiagram:
    """Numeric Omega_tau: coefficient tensor C[k, l, a, b] of X_a X_b in (Omega_tau)_{k,l}."""

    n: int
    tau: object
    C: np.ndarray
    lam: object
    u: list
    alphas: list

    def hessians(self) -> np.ndarray:
        W = np.empty_like(self.C)
        n = self.n
        for idx in np.ndindex(*W.shape):
            k, l, a, b = idx
            W[idx] = self.C[k, l, a, b] + self.C[k, l, b, a]
        return W

    def entry(self, k, l, X: Sequence):
        n = self.n
        return mp.fsum(self.C[k, l, a, b] * X[a] * X[b] for a in range(n) for b in range(n))

    def invariants(self):
        return invariants_numeric(self.hessians(), self.n)


def heisenberg_omega(n: int, tau, N: int | None = None, prec: int = 128) -> HeisenbergDiagram:
    """(Omega_tau)_{k,l} = u_{l-k} X_k X_l + lam sum_{i != 0, l-k} a_{l-k}/(a_i a_{l-k-i}) X_{k+i} X_{l-i}.

    Indices mod n; lam = -(d x_0/dz)(0) so that the associated differential pulls back to dz.
    """
    if n % 2 == 0:
        raise ValueError("the Heisenberg Omega matrix is implemented for odd n")
    if n < 3:
        raise ValueError("need n >= 3")
    with mp.workprec(prec):
        tau = _check_tau(tau)
        N = N or truncation_for(tau, prec)
        al = [_alpha_numeric(n, r, tau, N) for r in range(n)]
        lam = -dx0_at_zero(n, "numeric", N, tau)
        u = [mp.mpc(0)] + [_u_numeric(n, k, tau, N) for k in range(1, n)]
        C = np.empty((n, n, n, n), dtype=object)
        C.fill(mp.mpc(0))
        for k in range(n):
            for l in range(n):
                d = (l - k) % n
                if d == 0:
                    continue
                C[k, l, k, l] += u[d]
                for i in range(1, n):
                    if i == d:
                        continue
                    C[k, l, (k + i) % n, (l - i) % n] += lam * al[d] / (al[i] * al[(d - i) % n])
        return HeisenbergDiagram(n, tau, C, lam, u, al)


# Eisenstein series

def _sigma(m, p):
    return sum(d ** p for d in range(1, m + 1) if m % d == 0)


def eisenstein(k: int, mode: str = "series", N: int | None = None, tau=None, prec: int = 128):
    """Normalized E_k (k = 4, 6), constant term 1.

    N defaults to 20 terms in series mode and to the precision-driven truncation numerically.
    """
    if k not in (4, 6):
        raise ValueError("only weights 4 and 6 are supported")
    c = 240 if k == 4 else -504
    if mode == "series":
        N = N or 20
        return QSeries(1, {0: 1, **{m: c * _sigma(m, k - 1) for m in range(1, N)}}, Fraction(N))
    with mp.workprec(prec):
        tau = _check_tau(tau)
        N = N or truncation_for(tau, prec)
        q = _qpow(tau, 1)
        s = mp.fsum(mp.mpf(m) ** (k - 1) * q ** m / (1 - q ** m) for m in range(1, N + 1))
        return 1 + c * s


@dataclass
class AnalyticReport:
    n: int
    tau: object
    c4: object
    c6: object
    e4: object
    e6: object
    rel_err4: float
    rel_err6: float
    t_equation_err: float
    s_equation_err: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return max(self.rel_err4, self.rel_err6, self.t_equation_err, self.s_equation_err) < self.tolerance

    def lines(self) -> list[str]:
        return [
            f"n = {self.n}, tau = {mp.nstr(self.tau, 12)}",
            f"c4(Omega_tau) / ((2 pi)^4 E4) - 1 : {self.rel_err4:.3e}",
            f"c6(Omega_tau) / ((2 pi)^6 E6) - 1 : {self.rel_err6:.3e}",
            f"alpha T-equation error         : {self.t_equation_err:.3e}",
            f"alpha S-equation error         : {self.s_equation_err:.3e}",
            f"status: {'OK' if self.ok else 'PRECISION NOT MET'} (tolerance {self.tolerance:.0e})",
        ]


def _alpha_equation_errors(n, tau, N):
    """Max relative errors of the T and S functional equations of alpha_r."""
    zeta = mp.exp(2j * mp.pi / n)
    t_err = mp.mpf(0)
    s_err = mp.mpf(0)
    a = [_alpha_numeric(n, r, tau, N) for r in range(n)]
    a1 = [_alpha_numeric(n, r, tau + 1, N) for r in range(n)]
    ts = -1 / tau
    bs = [_alpha_numeric(n, r, ts, max(N, truncation_for(ts, mp.mp.prec))) for r in range(n)]
    sgn = (-1) ** ((n - 1) // 2)
    for r in range(1, n):
        phase = mp.exp(2j * mp.pi * mp.mpf((2 * r - n) ** 2) / (8 * n))
        t_err = max(t_err, abs(a1[r] / (phase * a[r]) - 1))
        rhs = sgn * 1j * mp.sqrt(tau / (1j * n)) * mp.fsum(zeta ** (r * s) * a[s] for s in range(n))
        s_err = max(s_err, abs(bs[r] / rhs - 1))
    return float(t_err), float(s_err)


def verify_analytic(n: int, tau, prec: int = 128, N: int | None = None, tol: float = 1e-9,
                    strict: bool = False) -> AnalyticReport:
    """Compare c_k(Omega_tau) with (2 pi)^k E_k(tau) and check the alpha functional equations."""
    with mp.workprec(prec):
        tau = _check_tau(tau)
        N = N or truncation_for(tau, prec)
        D = heisenberg_omega(n, tau, N, prec)
        c4, c6 = D.invariants()
        e4 = eisenstein(4, "numeric", N, tau, prec)
        e6 = eisenstein(6, "numeric", N, tau, prec)
        r4 = abs(c4 / ((2 * mp.pi) ** 4 * e4) - 1)
        r6 = abs(c6 / ((2 * mp.pi) ** 6 * e6) - 1)
        te, se = _alpha_equation_errors(n, tau, N)
        rep = AnalyticReport(n, tau, c4, c6, e4, e6, float(r4), float(r6), te, se, tol)
    if strict and not rep.ok:
        raise PrecisionNotMet("; ".join(rep.lines()[1:5]))
    return rep


# real uniformization

@dataclass(frozen=True)
class PeriodLattice:
    """Lattice Z omega1 + Z omega1 tau with c_k = (2 pi / omega1)^k E_k(tau)."""

    omega1: object
    tau: object
    disc_sign: int

    @property
    def omega2(self):
        return self.omega1 * self.tau


def real_period_lattice(a1, a2, a3, a4, a6, n: int | None = None, prec: int = 128) -> PeriodLattice:
    """Periods of a real Weierstrass equation by the arithmetic-geometric mean.

    Re(tau) is 0 when the discriminant is positive and 1/2 otherwise; passing an
    odd n shifts tau by the integer (n - 1)/2 so that Re(tau) = n/2.
    """
    with mp.workprec(prec):
        a1, a2, a3, a4, a6 = (mp.mpf(Fraction(x).numerator) / Fraction(x).denominator
                              for x in (a1, a2, a3, a4, a6))
        b2 = a1 ** 2 + 4 * a2
        b4 = a1 * a3 + 2 * a4
        b6 = a3 ** 2 + 4 * a6
        b8 = a1 ** 2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 ** 2 - a4 ** 2
        delta = -b2 ** 2 * b8 - 8 * b4 ** 3 - 27 * b6 ** 2 + 9 * b2 * b4 * b6
        if delta == 0:
            raise ValueError("singular Weierstrass equation")
        roots = mp.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=prec)
        if delta > 0:
            e1, e2, e3 = sorted((mp.re(r) for r in roots), reverse=True)
            w1 = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
            w2 = 1j * mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e2 - e3))
            tau = w2 / w1
            sign = 1
        else:
            e1 = mp.re(min(roots, key=lambda r: abs(mp.im(r))))
            a = 3 * e1 + b2 / 4
            b = mp.sqrt(3 * e1 ** 2 + b2 * e1 / 2 + b4 / 2)
            w1 = 2 * mp.pi / mp.agm(2 * mp.sqrt(b), mp.sqrt(2 * b + a))
            w2 = -w1 / 2 + 1j * mp.pi / mp.agm(2 * mp.sqrt(b), mp.sqrt(2 * b - a))
            tau = w2 / w1 + 1          # Re(tau) = 1/2
            sign = -1
        if n is not None and sign < 0:
            if n % 2 == 0:
                raise ValueError("the n/2 shift needs odd n")
            tau += (n - 1) // 2
        return PeriodLattice(w1, tau, sign)
