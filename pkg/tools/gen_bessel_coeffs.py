"""Regenerate src/cpwl/_bessel_coeffs.py.

Fits the modulus-phase factors P0, Q0, P1, Q1 of J0 and J1 for x >= 8 with
Chebyshev series in w = 2*(8/x)**2 - 1.  Reference values come from mpmath at
40 digits.  Run from the repository root:

    python tools/gen_bessel_coeffs.py > src/cpwl/_bessel_coeffs.py
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 40
X_SWITCH = 8
DEGREE = 18
NODES = 200


def factors(x, order):
    x = mp.mpf(x)
    j = mp.besselj(order, x)
    y = mp.bessely(order, x)
    chi = x - (2 * order + 1) * mp.pi / 4
    amp = mp.sqrt(mp.pi * x / 2)
    p = amp * (j * mp.cos(chi) + y * mp.sin(chi))
    q = amp * (y * mp.cos(chi) - j * mp.sin(chi))
    return p, q


def fit(order):
    k = np.arange(NODES)
    w_nodes = [mp.cos(mp.pi * (kk + mp.mpf(1) / 2) / NODES) for kk in k]
    ps, qs = [], []
    for w in w_nodes:
        z = mp.sqrt((w + 1) / 2)  # z = 8/x
        if z == 0:
            raise ValueError("node at infinity")
        p, q = factors(X_SWITCH / z, order)
        ps.append(p)
        qs.append(q / z)  # Q is odd in 1/x; fit Q/z as a function of z^2
    cp, cq = [], []
    for n in range(DEGREE + 1):
        sp = mp.fsum(ps[kk] * mp.cos(n * mp.pi * (kk + mp.mpf(1) / 2) / NODES) for kk in k)
        sq = mp.fsum(qs[kk] * mp.cos(n * mp.pi * (kk + mp.mpf(1) / 2) / NODES) for kk in k)
        scale = mp.mpf(1) / NODES if n == 0 else mp.mpf(2) / NODES
        cp.append(float(sp * scale))
        cq.append(float(sq * scale))
    return cp, cq


def main():
    print('"""Chebyshev coefficients for the large-argument Bessel factors.')
    print()
    print("Generated by tools/gen_bessel_coeffs.py; do not edit by hand.")
    print('"""')
    print()
    print(f"X_SWITCH = {X_SWITCH}.0")
    for order in (0, 1):
        cp, cq = fit(order)
        for name, cs in ((f"P{order}", cp), (f"Q{order}_OVER_Z", cq)):
            print()
            print(f"{name} = (")
            for c in cs:
                print(f"    {c!r},")
            print(")")


if __name__ == "__main__":
    main()
