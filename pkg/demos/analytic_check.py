"""Compare c4, c6 of the Heisenberg-invariant Omega matrix with Eisenstein series.

For odd n and a point tau of the upper half plane, c_k(Omega_tau) should equal
(2 pi)^k E_k(tau).  The alpha functional equations under tau -> tau + 1 and
tau -> -1/tau are checked alongside.
"""

import mpmath as mp

from g1models.heisenberg import verify_analytic


def main():
    for n in (3, 5, 7):
        for tau in (mp.mpc(0, 2), mp.mpc(0.5, 1.2)):
            rep = verify_analytic(n, tau, prec=160)
            print("\n".join(rep.lines()))
            print()


if __name__ == "__main__":
    main()
