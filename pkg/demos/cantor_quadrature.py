"""Certified quadrature against the maximal-entropy Cantor measure.

Shows the kernel integral I(n), its certified error bound, the closed
form in the interval case, the self-similarity identity the fixed point
rests on, and an independent Monte Carlo cross-check.
"""

import math

from runshift import (
    CantorMeasure,
    DigitSystem,
    monte_carlo_integral,
    quadrature,
    self_similarity_check,
)


def main():
    print("== interval case (k = l = 3): I(2) = log 2 ==")
    leb = CantorMeasure(DigitSystem(3, (0, 1, 2)))
    value, bound = quadrature(leb, 2, depth=12)
    print(f"I(2) = {value:.12f}  certified bound {bound:.2e}")
    print(f"log2 = {math.log(2.0):.12f}  actual gap {abs(value - math.log(2)):.2e}")

    print("\n== middle-thirds digits {0,2} ==")
    cm = CantorMeasure(DigitSystem(3, (0, 2)))
    print(f"alpha = log 2 / log 3 = {cm.alpha:.6f}")
    for depth in (8, 11, 14):
        value, bound = quadrature(cm, 2, depth=depth)
        print(f"depth {depth:>2}: I(2) = {value:.12f}  bound {bound:.2e}")

    print("\nself-similarity identity I(n) = sum_j I(3n - c_j):")
    for n in (2, 5, 11):
        dev = self_similarity_check(cm, n, depth=14)
        _, bound = quadrature(cm, n, depth=14)
        print(f"  n = {n:>2}: deviation {dev:.3e}  allowance {(cm.ds.l + 1) * bound:.3e}")

    print("\nMonte Carlo cross-check (one million digit strings):")
    value, _ = quadrature(cm, 2, depth=16)
    est, se = monte_carlo_integral(cm, 2, 1_000_000, seed=7)
    print(f"quadrature {value:.8f}   MC {est:.8f} +- {se:.1e}   "
          f"gap/sigma = {abs(est - value) / se:.2f}")

    print("\n== large-n behavior: n^alpha I(n) -> 1 ==")
    for n in (10, 100, 1000):
        value, _ = quadrature(cm, n, depth=14)
        print(f"  n = {n:>4}: n^alpha I(n) = {n**cm.alpha * value:.6f}")


if __name__ == "__main__":
    main()
