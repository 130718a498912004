"""Independent high-precision reference values for the unit tests.

Run with `python3 oracles.py`; the printed numbers are frozen into the C++
tests. Requires mpmath.
"""
from mpmath import mp, mpf, mpc, rgamma, quad, exp, log, acos, cos, pi, sinh, findroot, asin, nsum, gamma, inf

mp.dps = 40


def mittag_leffler(a, z):
    """Power series with working precision raised to absorb cancellation."""
    a, z = mpf(a), mpc(z)
    old = mp.dps
    mp.dps = 40 + int(abs(z) ** (1 / a) / 2.3)
    s, n = mpc(0), 0
    while True:
        term = z ** n * rgamma(a * n + 1)
        s += term
        if n > 50 and abs(term) < mpf(10) ** (-60) * (1 + abs(s)):
            break
        n += 1
    mp.dps = old
    return s


def erdos(p, q, c, z):
    poly = lambda co, t: sum(mpc(k) * t ** i for i, k in enumerate(co))
    z = mpc(z)
    return c + z * quad(lambda s: poly(p, s * z) * exp(poly(q, s * z)), [0, 1])


def schroeder(beta):
    beta = mpf(beta)
    # Repelling root: bracket between e and a point where exp(beta x) > x again.
    hi = mpf(10)
    while exp(beta * hi) <= hi:
        hi *= 2
    xi = findroot(lambda x: exp(beta * x) - x, (mp.e, hi), solver="anderson")
    return xi, beta * xi


def koenigs(beta, x, steps=100):
    beta = mpf(beta)
    xi, mu = schroeder(beta)
    y = mpf(x)
    for _ in range(steps):
        y = log(y) / beta
    return (y - xi) * mu ** steps


def ml_log_derivative(a, z):
    """E_a'(z) / E_a(z) from E_a'(z) = E_{a,a}(z) / a."""
    a, z = mpf(a), mpc(z)
    e = nsum(lambda k: z**k / gamma(a * k + 1), [0, inf])
    d = nsum(lambda k: z**k / gamma(a * k + a), [0, inf]) / a
    return d / e


def show(label, v):
    if isinstance(v, mpc):
        print(f"{label}: {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")
    else:
        print(f"{label}: {mp.nstr(v, 17)}")


if __name__ == "__main__":
    for a, z in [(1, -10), (0.9, -50), (1, -5 - 5j), (0.5, -30 + 5j), (1.5, -200 + 10j), (1.5, -302),
                 (0.9, -9.9 + 3j), (0.3, -5 + 3j), (0.3, 3 + 3j), (2, 4), (2, 9), (0.5, 8), (0.8, 12 + 7j),
                 (1.8, 25 - 10j)]:
        show(f"E_{a}({z})", mittag_leffler(a, z))
    show("dlogE_0.5(0.0350634-2.8273j)", ml_log_derivative(0.5, 0.0350634 - 2.8273j))
    show("dlogE_1.5(-6+2j)", ml_log_derivative(1.5, -6 + 2j))
    show("erdos P=1 Q=-t^2 z=2", erdos([1], [0, 0, -1], 0, 2))
    show("erdos P=1,1 Q=0,1j z=1+1j c=0.5", erdos([1, 1], [0, 1j], 0.5, 1 + 1j))
    for b in (0.1, 0.2, 0.3):
        xi, mu = schroeder(b)
        show(f"xi({b})", xi)
        show(f"mu({b})", mu)
    mp.dps = 120
    show("Phi_0.2(1e6)", koenigs(0.2, 1e6))
    show("Phi_0.2(20)", koenigs(0.2, 20))
    show("Phi_0.1(100)", koenigs(0.1, 100))
    mp.dps = 40
    # exp, R = e: theta(t) = 2 arccos(1/t); Tsuji integral pi int dt / (t theta).
    show("tsuji exp r0=10 kr=5000", pi * quad(lambda t: 1 / (t * 2 * acos(1 / t)), [10, 100, 5000]))
    # m(r) for exp, beta = 1/4: (1/2pi) int_{r cos t >= r^beta} (r cos t - r^beta)^2 dt.
    for r in (100, 1000):
        r = mpf(r)
        t0 = acos(r ** (mpf(1) / 4 - 1))
        m = quad(lambda t: (r * cos(t) - r ** (mpf(1) / 4)) ** 2, [-t0, 0, t0]) / (2 * pi)
        show(f"m_exp({int(r)})", m)
    show("loglogM sin r=20", log(log(sinh(20))))
    # psi for sin per tract: |Im z| >= r^beta + log 2 approximately; exact level set on the circle.

