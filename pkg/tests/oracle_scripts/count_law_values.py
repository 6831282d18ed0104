"""Independent oracle for count-distribution values frozen into tests.

Run directly; paste the printed values into tests. Uses exact rational
arithmetic (fractions) and mpmath, never the package under test.
"""

from fractions import Fraction
from math import comb

import mpmath as mp

mp.mp.dps = 40


def hgeo_pmf(n, m, k, i):
    return Fraction(comb(m, i) * comb(n - m, k - i), comb(n, k))


def binom_pmf(n, p: Fraction, i):
    return comb(n, i) * p**i * (1 - p) ** (n - i)


def stop_loss_binom(n, p: Fraction, a: Fraction):
    return sum((i - a) * binom_pmf(n, p, i) for i in range(n + 1) if i > a)


def main():
    print("hypergeometric(4,2,2) pmf(1) =", hgeo_pmf(4, 2, 2, 1))
    print("hypergeometric(6,4,3) mean  =", Fraction(3 * 4, 6))
    print("binomial(2,1/2) stop_loss(1) =", stop_loss_binom(2, Fraction(1, 2), Fraction(1)))

    # Stop-loss of Poisson(1) at a = 0 equals the mean.
    print("poisson(1) stop_loss(0) =", 1)

    # A strict violation witness for the reversed chain direction:
    # stop_loss of Poisson(1) at a=1 vs Binomial(4, 1/4) at a=1.
    sl_pois = mp.nsum(lambda i: (i - 1) * mp.e**-1 / mp.factorial(i), [2, mp.inf])
    sl_binom = stop_loss_binom(4, Fraction(1, 4), Fraction(1))
    print("poisson(1) stop_loss(1)  =", mp.nstr(sl_pois, 20))
    print("binomial(4,1/4) stop_loss(1) =", sl_binom, "=", float(sl_binom))
    assert float(sl_pois) > float(sl_binom)  # Poisson is strictly larger in cx


if __name__ == "__main__":
    main()
