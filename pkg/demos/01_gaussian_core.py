"""Gaussian core: density, third derivatives, their integrals, norm quantiles.

Walks through the closed forms the rest of the library is built on:
the Hermite product form of third partial derivatives, the exact values of
the absolute-derivative integrals with the budgets they must respect, and
the 7/8 norm quantile a_k with its sqrt(k) growth.
"""

import math

import numpy as np

import steinclt as sc


def main():
    print("=" * 70)
    print("1. density and Hermite-form third derivatives")
    print("=" * 70)
    x = np.array([1.0, 1.0, 1.0])
    print(f"phi(0) in k=3           : {sc.phi(np.zeros(3)):.7f}  (= (2 pi)^-3/2)")
    print(f"D_(0,1,2) phi at (1,1,1): {sc.d3_phi(x, (0, 1, 2)):.7f}  (= -x1 x2 x3 phi)")
    print(f"D_(0,0,0) phi at origin : {sc.d3_phi(np.zeros(1), (0, 0, 0)):.7f}  (odd symmetry)")

    print()
    print("=" * 70)
    print("2. absolute third-derivative integrals and their budgets")
    print("=" * 70)
    budgets = {"distinct": 1.0, "pair": 1.0, "triple": math.sqrt(6.0)}
    for pattern, cap in budgets.items():
        val = sc.abs_d3_integral(pattern, 3)
        print(f"  {pattern:9s}: integral = {val:.6f}   budget = {cap:.4f}   "
              f"slack = {cap - val:.4f}")
    print("  (distinct = E|Z|^3, pair = E|Z^2-1| E|Z|, triple = 2phi(0)+8phi(sqrt 3))")

    print()
    print("=" * 70)
    print("3. norm quantiles a_k with P(|Z| < a_k) = 7/8")
    print("=" * 70)
    print(f"{'k':>4s} {'a_k':>10s} {'a_k/sqrt(k)':>12s}")
    worst_ratio = 0.0
    for k in (1, 2, 3, 4, 8, 16, 32, 64):
        res = sc.quantile_a(k)
        ratio = res.a_k / math.sqrt(k)
        worst_ratio = max(worst_ratio, ratio)
        print(f"{k:4d} {res.a_k:10.6f} {ratio:12.6f}")
    print(f"observed c4 = max a_k/sqrt(k) over the table: {worst_ratio:.6f}")

    print()
    print("=" * 70)
    print("4. reproducible sampling")
    print("=" * 70)
    draws = sc.sample_std_normal(200_000, 2, sc.RngStream(42))
    print(f"sample mean : {draws.mean(axis=0)}")
    print(f"sample cov  :\n{np.cov(draws.T)}")


if __name__ == "__main__":
    main()
