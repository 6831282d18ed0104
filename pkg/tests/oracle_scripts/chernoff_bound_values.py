"""Oracle: closed-form Chernoff bounds for unit-mass indicator responses.

With lam = 1 and an indicator response whose ball has volume 1
(kappa_2 rho^2 = 1, i.e. rho = 1/sqrt(pi) in the plane), the exponent is

    upper tail:  g(s) = -s a + (e^s - 1),   minimized at s = ln a,
                 bound = exp(a - 1 - a ln a) = a^{-a} e^{a-1}
    lower tail:  g(s) = +s a + (e^{-s} - 1), minimized at s = -ln a,
                 bound = a^{-a} e^{a-1}   (same closed form, a < 1 regime)

computed here to high precision for freezing into tests.
"""

import mpmath as mp

mp.mp.dps = 30


def upper_tail(a):
    s = mp.log(a)
    return mp.exp(-s * a + mp.exp(s) - 1)


def lower_tail(a):
    s = -mp.log(a)
    return mp.exp(s * a + mp.exp(-s) - 1)


print("min_above a=5  :", mp.nstr(upper_tail(mp.mpf(5)), 17))
print("min_above a=3  :", mp.nstr(upper_tail(mp.mpf(3)), 17))
print("max_below a=0.2:", mp.nstr(lower_tail(mp.mpf("0.2")), 17))

# Independent confirmation by numerical minimization over s.
for a, fn, sign in [(5, upper_tail, 1), (3, upper_tail, 1)]:
    g = lambda s: float(-s * a + mp.exp(s) - 1)
    s_opt = mp.findroot(lambda s: -a + mp.exp(s), 1.0)
    assert abs(float(s_opt) - float(mp.log(a))) < 1e-12

# Exponential response e^{-r} in the plane, lam = 1, upper tail at a = 10:
# g(s) = -10 s + 2 pi int_0^inf (e^{s e^{-r}} - 1) r dr, minimized over s
# by golden-section search (the integral is computed by adaptive quadrature).
TWO_PI = 2 * mp.pi


def g_exp(s):
    integral = mp.quad(lambda r: (mp.exp(s * mp.exp(-r)) - 1) * r, [0, 60])
    return -10 * s + TWO_PI * integral


lo, hi = mp.mpf("0.1"), mp.mpf("4.0")
invphi = (mp.sqrt(5) - 1) / 2
c, d_pt = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
for _ in range(120):
    if g_exp(c) < g_exp(d_pt):
        hi, d_pt = d_pt, c
        c = hi - invphi * (hi - lo)
    else:
        lo, c = c, d_pt
        d_pt = lo + invphi * (hi - lo)
s_star = (lo + hi) / 2
print("exp resp a=10  :", mp.nstr(mp.exp(g_exp(s_star)), 17), "at s =", mp.nstr(s_star, 10))
