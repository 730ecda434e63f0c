#!/usr/bin/env python3
"""Independent end-to-end reimplementation of the kink-effect interval.

Re-derives the random streams (MT19937-64, Box-Muller, one bit per
Rademacher sign), the split Legendre sieve, the sieve fit, the projected
bootstrap and both linear programs (scipy HiGHS) from scratch. The printed
numbers are frozen into tests/unit/test_rkd.cpp.

usage: rkd_oracle.py [--write-csv PATH]
"""

import argparse
import math

import numpy as np
from scipy.optimize import linprog

MASK64 = (1 << 64) - 1


class MT19937_64:
    nn, mm = 312, 156
    matrix_a = 0xB5026F5AA96619E9
    upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF

    def __init__(self, seed):
        self.mt = [0] * self.nn
        self.mt[0] = seed & MASK64
        for i in range(1, self.nn):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK64
        self.idx = self.nn

    def _twist(self):
        mt = self.mt
        for i in range(self.nn):
            x = (mt[i] & self.upper) | (mt[(i + 1) % self.nn] & self.lower)
            xa = x >> 1
            if x & 1:
                xa ^= self.matrix_a
            mt[i] = mt[(i + self.mm) % self.nn] ^ xa
        self.idx = 0

    def next(self):
        if self.idx >= self.nn:
            self._twist()
        x = self.mt[self.idx]
        self.idx += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & MASK64


def uniform_open01(eng):
    return ((eng.next() >> 11) + 0.5) * 2.0 ** -53


def normal_pair(eng):
    u1 = uniform_open01(eng)
    u2 = uniform_open01(eng)
    r = math.sqrt(-2.0 * math.log(u1))
    a = 2.0 * math.pi * u2
    return r * math.cos(a), r * math.sin(a)


def dgp_sample(n, seed):
    eng = MT19937_64(seed)
    sd = math.sqrt(0.1 - 0.1 * 0.1)
    xs, ys = [], []
    for _ in range(n):
        z1, z2 = normal_pair(eng)
        x = z1
        u = 0.1 * z1 + sd * z2
        t = 0.5 * x if x < 0.0 else 0.0
        xs.append(x)
        ys.append(0.5 * t - 0.1 * x + u)
    return np.array(xs), np.array(ys)


def legendre(j, t):
    return np.polynomial.legendre.legval(t, [0] * j + [1])


def legendre_deriv(j, t):
    return np.polynomial.legendre.legval(t, np.polynomial.legendre.legder([0] * j + [1]))


def basis_row(x, kink, h, k, deriv=False):
    row = np.zeros(k)
    left = x < kink
    a = kink - h if left else kink
    t = 2.0 * (x - a) / h - 1.0
    for j in range(k // 2):
        norm = math.sqrt((2 * j + 1) / h)
        val = norm * (2.0 / h) * legendre_deriv(j, t) if deriv else norm * legendre(j, t)
        row[2 * j + (0 if left else 1)] = val
    return row


def interval(x, y, k, m_draws, alpha, seed, delta0, delta1, n_grid, h=1.0, kink=0.0, denom=-0.5):
    keep = (x >= kink - h) & (x <= kink + h)
    x, y = x[keep], y[keep]
    n = len(x)
    P = np.array([basis_row(xi, kink, h, k) for xi in x])
    Q = P.T @ P / n
    beta = np.linalg.solve(Q, P.T @ y / n)
    resid = y - P @ beta
    W = P * resid[:, None]
    Omega = W.T @ W / n

    a0 = np.zeros(k)
    for j in range(k // 2):
        norm = math.sqrt((2 * j + 1) / h) * (2.0 / h)
        a0[2 * j] = -norm * legendre_deriv(j, 1.0)
        a0[2 * j + 1] = norm * legendre_deriv(j, -1.0)
    a0 = a0 / denom

    load = np.linalg.solve(Q, a0)
    V = load @ Omega @ load
    proj = W @ load
    draws = []
    for m in range(m_draws):
        eng = MT19937_64(seed ^ m)
        eta = np.empty(n)
        word = 0
        for i in range(n):
            if i % 64 == 0:
                word = eng.next()
            eta[i] = 1.0 if (word >> (i % 64)) & 1 else -1.0
        draws.append(abs(eta @ proj / n) / math.sqrt(V))
    draws.sort()
    rank = max(1, min(m_draws, math.ceil((1 - alpha) * m_draws - 1e-9)))
    cv = draws[rank - 1]

    b1 = a0 / math.sqrt(V)
    b0 = b1 @ beta
    G = np.vstack([b1, -b1])
    hv = np.array([b0 + cv, cv - b0])

    shape_rows = []
    vr = np.zeros(k)
    vl = np.zeros(k)
    for j in range(k // 2):
        norm = math.sqrt((2 * j + 1) / h)
        vl[2 * j] = norm * legendre(j, 1.0)
        vr[2 * j + 1] = norm * legendre(j, -1.0)
    shape_rows.append(vr - vl)
    shape_rows.append(vl - vr)
    for i in range(1, n_grid + 1):
        shape_rows.append(basis_row(kink + h * i / (n_grid + 1), kink, h, k, deriv=True))
    Gs = np.vstack([G, np.array(shape_rows)])
    hs = np.concatenate([hv, np.full(len(shape_rows), delta1)])

    out = {"n_used": n, "cv": cv, "plug_in": float(a0 @ beta)}
    for name, (g, hh) in {"none": (G, hv), "rkd": (Gs, hs)}.items():
        lo = linprog(a0, A_ub=g, b_ub=hh, bounds=[(None, None)] * k, method="highs")
        hi = linprog(-a0, A_ub=g, b_ub=hh, bounds=[(None, None)] * k, method="highs")
        out[name] = (lo.fun - delta0, -hi.fun + delta0)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write-csv")
    args = ap.parse_args()

    x, y = dgp_sample(1000, 7)
    print("dgp seed 7 first rows:")
    for i in range(3):
        print(f"  x={float(x[i])!r} y={float(y[i])!r}")
    if args.write_csv:
        with open(args.write_csv, "w") as f:
            f.write("x,y\n")
            for xi, yi in zip(x, y):
                f.write(f"{float(xi)!r},{float(yi)!r}\n")

    for k in (4, 8):
        res = interval(x, y, k=k, m_draws=200, alpha=0.05, seed=11, delta0=0.01, delta1=0.01, n_grid=99)
        print(f"k={k} n_used={res['n_used']} cv={float(res['cv'])!r} plug_in={res['plug_in']!r}")
        for mode in ("none", "rkd"):
            lo, hi = res[mode]
            print(f"  {mode}: lower={float(lo)!r} upper={float(hi)!r}")


if __name__ == "__main__":
    main()
