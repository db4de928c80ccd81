#!/usr/bin/env python3
"""Independent high-precision reference values frozen into the Rust tests.

Evaluated with mpmath at 50 significant digits; integrals use mpmath.quad on
the pointwise integrands rather than any closed form.
"""
from mpmath import mp, mpf, exp, log, sinh, cosh, tanh, quad, log10, findroot, diff

mp.dps = 50

LN10 = log(10)
C = mpf(299792458)
H = mpf("6.62607015e-34")


def lin(db):
    return mpf(db) * LN10 / 10


def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 17)}")


show("db_per_km(0.21)", lin("0.21"))
show("db_per_km(0.2)", lin("0.2"))
for b in (100, 200):
    show(f"bw_nm({b} GHz, 1550 nm)", mpf(1550) ** 2 * mpf(b) * mpf(10) ** 9 / (C * mpf(10) ** 9))

p0, ac, h, z = mpf(1), mpf("0.050657"), mpf("1e-3"), mpf(50)
show("classical_power_at", p0 * exp(-h * z) * cosh(h * z) * exp(-ac * z))
show("icxt_power_at", p0 * exp(-h * z) * sinh(h * z) * exp(-ac * z))
show("tanh(0.05)", tanh(mpf("0.05")))

ac, aq, h, L = lin("0.22"), lin("0.21"), mpf("1e-3"), mpf(50)
eta = mpf("6e-9")


def g(L, ac=ac, aq=aq, h=h):
    f = lambda z: (exp(-h * z) * sinh(h * z) + exp(-h * z) * cosh(h * z) * tanh(h * z)) * exp(-ac * z) * exp(-aq * (L - z))
    return quad(f, [0, L])


def f(L, ac=ac, aq=aq, h=h):
    f = lambda z: 2 * exp(-h * z) * sinh(h * z) * exp(-ac * z) * exp(-aq * z)
    return quad(f, [0, L])


show("g_factor(fig4, 50)", g(L))
show("f_factor(fig4, 50)", f(L))
show("forward_icsrs(fig4, 50)", eta * g(L))
show("backward_icsrs(fig4, 50)", eta * f(L))
show("fwd_srs(fig4, 50)", eta * quad(lambda z: exp(-ac * z) * exp(-aq * (L - z)), [0, L]))
show("bwd_srs(fig4, 50)", eta * quad(lambda z: exp(-ac * z) * exp(-aq * z), [0, L]))

# forward-ICSRS peak: dG/dL = 0
lmax = findroot(lambda x: diff(g, x), 40)
show("L_max(fig4)", lmax)
show("L'_max(0.22, 0.21)", log(aq / ac) / (aq - ac))
for hm in ("1e-11", "1e-9", "1e-7", "1e-6"):
    hk = mpf(hm) * 1000
    show(f"L_max(h={hm}/m)", findroot(lambda x: diff(lambda y: g(y, h=hk), x), 40))


def h2(x):
    return -x * log(x, 2) - (1 - x) * log(1 - x, 2)


show("H2(0.11)", h2(mpf("0.11")))

lam = mpf(1550) * mpf(10) ** -9
bw_nm = lam ** 2 * mpf(100) * mpf(10) ** 9 / C * mpf(10) ** 9
click = mpf("1.2e-9") * mpf(10) ** -3 * bw_nm * mpf("0.1") * mpf(10) ** -9 / (H * C / lam)
show("click(1.2e-9 mW/nm)", click)

# key rate, no noise, L = 50 km, 0.21 dB/km, det 0.1, dark 1e-6
mu, ed, fec, q = mpf("0.5"), mpf("0.015"), mpf("1.15"), mpf("0.5")
t = mpf(10) ** (-mpf("0.21") * 50 / 10) * mpf("0.1")
y0 = mpf("1e-6")
y1 = y0 + t
q1 = y1 * mu * exp(-mu)
e1 = (y0 / 2 + ed * t) / y1
qm = y0 + 1 - exp(-t * mu)
em = (y0 / 2 + ed * (1 - exp(-t * mu))) / qm
show("t_l(50)", t)
show("E_mu(50)", em)
show("R(50)", q * (-qm * fec * h2(em) + q1 * (1 - h2(e1))))
