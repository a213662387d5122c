"""High-precision reference values frozen in the Rust unit tests.

Run with `python3 tools/golden_values.py`. Needs mpmath.

* 1F1 by brute-force summation of its power series at 50 digits.
* The coherent block (rho22, rho33, rho23) of the master equation,
  integrated with mpmath's Taylor-series ODE solver at 30 digits.
  Gamma = 1 throughout.
"""

import mpmath as mp


def hyp1f1_series(a, b, z):
    term, total, n = mp.mpc(1), mp.mpc(1), 0
    while abs(term) > mp.mpf(10) ** (-mp.mp.dps - 5) * max(abs(total), 1):
        term *= (a + n) / ((b + n) * (n + 1)) * z
        total += term
        n += 1
    return total


def coherent_block(rho22, rho33, re23, im23, coupling, gamma, t):
    J, g = mp.mpf(coupling), mp.mpf(gamma)

    def rhs(s, y):
        p22, p33, re, im = y
        G = (1 - mp.exp(-g * s)) / 2
        return [
            -4 * J * im,
            4 * J * im,
            -2 * G * re,
            2 * J * (p22 - p33) - 2 * G * im,
        ]

    y0 = [mp.mpf(rho22), mp.mpf(rho33), mp.mpf(re23), mp.mpf(im23)]
    return mp.odefun(rhs, 0, y0)(mp.mpf(t))


def main():
    mp.mp.dps = 50
    v = hyp1f1_series(mp.mpc("0.5", "1.9365"), mp.mpc("1.0", "3.873"), mp.mpc(-10))
    print("1F1(0.5+1.9365i; 1+3.873i; -10) =", mp.nstr(v, 20))

    mp.mp.dps = 30
    for coupling, gamma, t in [("0.4", "0.1", "2.3"), ("0.1", "10", "3.1")]:
        p22, p33, re, im = coherent_block("0.3", "0.5", "0.1", "0.05", coupling, gamma, t)
        print(f"J={coupling} gamma={gamma} t={t}:")
        print("  rho22 =", mp.nstr(p22, 20), " rho33 =", mp.nstr(p33, 20))
        print("  rho23 =", mp.nstr(re, 20), mp.nstr(im, 20))


if __name__ == "__main__":
    main()
