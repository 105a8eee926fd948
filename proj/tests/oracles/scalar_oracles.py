"""Independent oracles for values pinned in the C++ tests.

Integrals use scipy adaptive quadrature (not the library's rules); ψ(1) and
I(1) are also checked by plain Monte Carlo. Run: python3 -u scalar_oracles.py
"""
import numpy as np
from scipy import integrate, optimize

SQ2PI = np.sqrt(2 * np.pi)


def expect(f, g):
    s = np.sqrt(g)
    val, _ = integrate.quad(lambda z: f(g + s * z) * np.exp(-z * z / 2) / SQ2PI, -40, 40,
                            points=[-s], limit=400, epsabs=1e-15, epsrel=1e-14)
    return val


def psi(g):
    return expect(np.tanh, g)


def psi_prime(g):
    return expect(lambda v: np.cosh(v) ** -4 if abs(v) < 300 else 0.0, g)


def logcosh(v):
    a = np.abs(v)
    return a + np.log1p(np.exp(-2 * a)) - np.log(2)


def phi(q):
    return optimize.brentq(lambda g: psi(g) - q, 0.0, 800.0, xtol=1e-15, rtol=1e-15)


def main():
    rng = np.random.default_rng(20261018)
    n = 10_000_000
    v = 1.0 + rng.standard_normal(n)
    t = np.tanh(v)
    print("psi(1) MC      ", t.mean(), "+-", t.std() / np.sqrt(n))
    lc = logcosh(v)
    print("I(1) MC        ", 1.0 - lc.mean(), "+-", lc.std() / np.sqrt(n))
    print("psi(1) quad    ", repr(psi(1.0)), "I(1) quad", repr(1.0 - expect(logcosh, 1.0)))
    print("psi'(1) quad   ", repr(psi_prime(1.0)))
    print("h(0.5)         ", repr(-0.75 * np.log(0.75) - 0.25 * np.log(0.25)))

    def se(beta, t, tol=1e-15):
        q, seq = 0.0, [0.0]
        for _ in range(100000):
            qn = psi(beta * beta * q + t)
            seq.append(qn)
            if abs(qn - q) <= tol:
                return qn, seq
            q = qn
        raise RuntimeError
    qs, seq = se(0.5, 1.0)
    print("SK b=.5 t=1 q* ", repr(qs), "q4", repr(seq[4]), "seq", [repr(x) for x in seq[:6]])
    print("schedule b=.5  ", [repr(se(0.5, 0.5 * l)[0]) for l in range(5)])

    # beta1: inf over q of phi'(q) / xi''(q); parameterize q = psi(g).
    def inv_beta1_sq(lg, xi2):
        g = np.exp(lg)
        return 1.0 / (psi_prime(g) * xi2(psi(g)))
    for name, xi2 in (("SK", lambda q: 1.0), ("p=3", lambda q: 6.0 * q)):
        grid = np.linspace(np.log(1e-6), np.log(300), 400)
        vals = [inv_beta1_sq(x, xi2) for x in grid]
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        r = optimize.minimize_scalar(lambda x: inv_beta1_sq(x, xi2), bounds=(lo, hi), method="bounded",
                                     options={"xatol": 1e-12})
        print("beta1 %-8s" % name, repr(np.sqrt(min(r.fun, min(vals)))), "edge" if i in (0, len(grid) - 1) else "")

    # beta2 pure p=4: largest beta with beta^2 xi(q) < log2 - h(q) for all q.
    def ratio(q):
        d = 0.5 * ((1 + q) * np.log1p(q) + (1 - q) * np.log1p(-q))
        return d / q ** 4
    qg = np.linspace(1e-4, 1 - 1e-12, 200001)
    vals = ratio(qg)
    i = int(np.argmin(vals))
    r = optimize.minimize_scalar(ratio, bounds=(qg[max(i - 1, 0)], qg[min(i + 1, len(qg) - 1)]), method="bounded",
                                 options={"xatol": 1e-14})
    print("beta2 p=4      ", repr(np.sqrt(min(r.fun, vals.min()))), "at q", r.x)

    # beta_dyn = min over q in (0,1) of sqrt(phi(q) / xi'(q)), q = psi(g).
    for p in (3, 50, 100, 200):
        f = lambda lg: np.exp(lg) / (p * psi(np.exp(lg)) ** (p - 1))
        grid = np.linspace(np.log(1e-3), np.log(700), 600)
        vals = [f(x) for x in grid]
        i = int(np.argmin(vals))
        r = optimize.minimize_scalar(f, bounds=(grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]), method="bounded",
                                     options={"xatol": 1e-12})
        bd = np.sqrt(min(r.fun, min(vals)))
        print("beta_dyn p=%-4d" % p, repr(bd), "q", psi(np.exp(r.x)), "ratio", bd / np.sqrt(2 * np.log(p) / p))


if __name__ == "__main__":
    main()
