"""Brute-force joint amplitude by a dense midpoint rule over the four
transverse wavevector components. Independent of the Gauss-Hermite path.
Run: python3 tests/oracles/jsa_oracle.py
"""
import numpy as np

C = 299792458.0
O = (2.7405, 0.0184, 0.0179, 0.0155)
E = (2.3730, 0.0128, 0.0156, 0.0044)


def n(coef, lam):
    l2 = (lam * 1e6) ** 2
    a, b, c, d = coef
    return np.sqrt(a + b / (l2 - c) - d * l2)


def ne_theta(lam, th):
    no, ne = n(O, lam), n(E, lam)
    return 1 / np.sqrt(np.cos(th) ** 2 / no**2 + np.sin(th) ** 2 / ne**2)


L = 1e-3
TH = np.radians(29.7)
WP, WA, WB = 77.5e-6, 80e-6, 80e-6
ANG_A, ANG_B = np.radians(1.28), np.radians(1.05)
TAU = 100e-15
WP0 = 2 * np.pi * C / 390e-9


def amplitude(la, lb, m=120, span=7.0):
    wa, wb = 2 * np.pi * C / la, 2 * np.pi * C / lb
    wp = wa + wb
    kp = ne_theta(2 * np.pi * C / wp, TH) * wp / C
    ka = n(O, la) * wa / C
    kb = n(O, lb) * wb / C
    ca = wa / C * np.sin(ANG_A)
    cb = -wb / C * np.sin(ANG_B)
    s = 2 / min(WP, WA, WB) * span
    g = (np.arange(m) + 0.5) / m * 2 * s - s
    h = g[1] - g[0]
    ax, bx = np.meshgrid(g + ca * 0.55, g + cb * 0.55, indexing="ij")
    ay, by = np.meshgrid(g, g, indexing="ij")

    def gauss(a, b, ca_, cb_):
        return np.exp(-((a + b) ** 2) * WP**2 / 4 - (a - ca_) ** 2 * WA**2 / 4
                      - (b - cb_) ** 2 * WB**2 / 4)

    def tr(a, b):
        return -(a + b) ** 2 / (2 * kp) + a**2 / (2 * ka) + b**2 / (2 * kb)

    gx = gauss(ax, bx, ca, cb).ravel()
    gy = gauss(ay, by, 0, 0).ravel()
    px = ((kp - ka - kb) + tr(ax, bx)).ravel()
    py = tr(ay, by).ravel()
    total = 0j
    for i in range(len(gx)):
        if gx[i] < 1e-18:
            continue
        phi = (px[i] + py) * L / 2
        total += gx[i] * np.sum(gy * np.sinc(phi / np.pi) * np.exp(1j * phi))
    alpha = np.exp(-((wp - WP0) ** 2) * TAU**2 / (8 * np.log(2)))
    return alpha * total * h**4


if __name__ == "__main__":
    for la, lb in [(867.5e-9, 708.2e-9), (820e-9, 740e-9), (900e-9, 690e-9)]:
        a = amplitude(la, lb)
        print(f"{la*1e9:.1f} {lb*1e9:.1f} {a.real:.12e} {a.imag:.12e}")
