"""Small discriminants of hyperplane sections of the Selmer cubic 3x^3 + 4y^3 + 5z^3.

Searches primitive u in growing boxes, prints the best D(u) per radius and
the integral order realising the best value.
"""

from g1models.capitulation import bound_report, capitulation_certificate
from g1models.resolution import model_from_cubic


def main():
    M = model_from_cubic("3*x1^3 + 4*x2^3 + 5*x3^3")
    b = bound_report(M, radii=(1, 2, 3, 4))
    print("\n".join(b.lines()))
    cert = capitulation_certificate(M, b.report.best_u)
    print(f"\ncertificate for u = {cert.u}, D = {cert.disc}")
    print("\n".join("  " + line for line in cert.order.lines()))
    print("\n".join("  " + line for line in cert.transcript))


if __name__ == "__main__":
    main()
