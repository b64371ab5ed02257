"""High-precision reference values for the special-function and closed-form tests.

Run with mpmath (50 digits); output is pasted into tests/reference_values.hpp.
"""
import mpmath as mp

mp.mp.dps = 50

HYP2F1 = [
    (0.5, 0.5, 1.5, 0.25),
    (1.0, 0.5, 2.0, 0.5),
    (2.0, 0.5, 3.0, -0.5),
    (1.5, 0.3, 2.5, -0.9),
    (0.7, 0.4, 1.9, -3.0),
    (2.5, 0.8, 3.1, -20.0),
    (0.3, 0.9, 1.4, -250.0),
    (1.2, 0.5, 2.4, 0.75),
    (1.0, 0.5, 1.5, 0.95),
    (0.5, 0.5, 1.0, 0.9),   # c - a - b = 0
    (1.0, 1.0, 3.0, 0.8),   # c - a - b = 1
    (2.0, 0.5, 2.5, 0.7),   # c - a - b = 0
    (0.25, 0.75, 2.2, 0.6),
    (3.0, 0.2, 3.5, -0.7),
    (1.7, 0.6, 2.9, -1e3),
    (0.9, 0.1, 1.05, 0.3),
    (2.2, 0.9, 3.0, 0.99),
    (1.0, 0.5, 2.0, -1.0),
    (0.6, 0.6, 2.0, 0.5),
    (2.8, 0.35, 4.6, -7.5),
]

BESSELK = [
    (0.5, 1.0), (0.5, 0.1), (0.25, 0.5), (0.75, 2.0), (0.1, 3.0),
    (0.9, 0.01), (0.3, 10.0), (1.0, 1.0), (1.5, 2.5), (0.0, 0.7),
    (2.3, 0.4), (0.6, 25.0), (0.45, 1.99), (0.45, 2.01), (3.0, 5.0),
    (0.2, 1e-4), (0.8, 40.0), (1.25, 0.3), (0.05, 8.0), (2.0, 2.0),
]

BETA = [(1.0, 1.0), (0.5, 1.5), (2.5, 0.7), (0.1, 0.1), (30.0, 40.0)]


def main():
    print("// hyp2f1: a, b, c, z, value")
    for a, b, c, z in HYP2F1:
        print(f"  {{{a!r}, {b!r}, {c!r}, {z!r}, {mp.nstr(mp.hyp2f1(a, b, c, z), 20)}}},")
    print("// besselk: nu, x, value")
    for nu, x in BESSELK:
        print(f"  {{{nu!r}, {x!r}, {mp.nstr(mp.besselk(nu, x), 20)}}},")
    print("// beta: a, b, value")
    for a, b in BETA:
        print(f"  {{{a!r}, {b!r}, {mp.nstr(mp.beta(a, b), 20)}}},")

    # Clayton space-time kernel (0.5, 1, 2, sigma2=1) at |h| = |u| = 1.
    l1, l2, l3 = mp.mpf(0.5), mp.mpf(1), mp.mpf(2)
    def clayton(h, u):
        return ((1 + h) ** (l1 / l2) + (1 + u) ** (l1 / l3) - 1) ** (-1 / l1)
    defect = clayton(1, 1) - clayton(1, 0) * clayton(0, 1) / clayton(0, 0)
    print("// clayton(0.5,1,2,1) separability defect at (1,1):", mp.nstr(defect, 20))

    # Nonstationary Cauchy-type integral, lambda=0.5, nu1=nu2=1, alpha1=1, alpha2=0.5,
    # Sigma = I in p = 1, s1 = 0, s2 = 1: k = Q^(lambda-1) with Q = 1.
    lam, n1, n2, a1, a2 = mp.mpf(0.5), mp.mpf(1), mp.mpf(1), mp.mpf(1), mp.mpf(0.5)
    integral = mp.quad(lambda t: t ** (lam - 1) * (1 + a1 * t) ** (-n1) * (1 + a2 * t) ** (-n2), [0, 1, mp.inf])
    print("// cauchy 2F1 instance integral (k = 1):", mp.nstr(integral, 20))
    closed = a1 ** (-lam) * mp.beta(lam, n1 + n2 - lam) * mp.hyp2f1(n2, lam, n1 + n2, 1 - a2 / a1)
    print("// closed form check:", mp.nstr(closed, 20))


if __name__ == "__main__":
    main()
