"""Fixed points of both renormalization operators.

The block operator sums k consecutive coefficients; its fixed points are
explicit log-ratio sequences.  The digit operator sums over digit offsets
of base k; its fixed point is the negative kernel integral against the
maximal-entropy measure of a digit-restricted Cantor set.
"""

import functools
import math

import numpy as np

from runshift import (
    DigitSystem,
    estimate_gamma,
    eta_from_coeffs,
    renorm1_apply,
    renorm1_fixed_point,
    renorm2_apply,
    renorm2_digit_indices,
    renorm2_fixed_point,
    residual,
)


def main():
    print("== block operator, k = 2, a_2 = -log 2 ==")
    coeffs = renorm1_fixed_point(2, -math.log(2.0), 2000)
    rep = residual(coeffs, functools.partial(renorm1_apply, k=2))
    print(f"a_n = -log(n/(n-1)) recovered; sup residual {rep.sup_abs:.2e} "
          f"over {rep.n_checked} indices")
    eta = eta_from_coeffs(coeffs)
    fit = estimate_gamma(eta, 10, 1500)
    print(f"weights eta_n = 1/n: fitted decay exponent {fit.gamma:.4f} "
          f"(power-law flag: {fit.power_law})")

    print("\n== block operator, k = 3, a_2 = -log 3 ==")
    coeffs = renorm1_fixed_point(3, -math.log(3.0), 3002)
    rep = residual(coeffs, functools.partial(renorm1_apply, k=3))
    print(f"sup residual {rep.sup_abs:.2e} over {rep.n_checked} indices")

    print("\n== digit operator, k = 3, digits {0,1,2}: the interval case ==")
    fp = renorm2_fixed_point(DigitSystem(3, (0, 1, 2)), 50, depth=12)
    n = np.arange(2.0, 51.0)
    gap = np.max(np.abs(fp.coeffs.a + np.log(n / (n - 1.0))))
    print(f"quadrature vs closed form -log(n/(n-1)): max gap {gap:.2e}")

    print("\n== digit operator, k = 3, digits {0,2}: middle-thirds set ==")
    ds = DigitSystem(3, (0, 2))
    print(f"dimension exponent alpha = {ds.hausdorff_alpha:.6f}")
    fp = renorm2_fixed_point(ds, 60, depth=14)
    image = renorm2_apply(fp.coeffs, ds)
    for n in (2, 5, 20):
        lhs, rhs = fp.coeffs.a_at(n), image.a_at(n)
        print(f"  a_{n} = {lhs:+.9f}   (Ra)_{n} = {rhs:+.9f}   "
              f"diff {abs(lhs - rhs):.2e} <= {(ds.l + 1) * fp.bounds[n - 2]:.2e}")
    print(f"offset lemma, two applications = offsets {renorm2_digit_indices(ds, 2).tolist()}")

    print("\n== digit operator, k = 5, digits {0,3}: faster-than-polynomial ==")
    ds5 = DigitSystem(5, (0, 3))
    fp5 = renorm2_fixed_point(ds5, 2000, depth=12)
    eta5 = eta_from_coeffs(fp5.coeffs)
    n = np.arange(200, 2001)
    slope = np.polyfit(np.log(n), np.log(-np.log(eta5.values[n - 1])), 1)[0]
    print(f"alpha = {ds5.hausdorff_alpha:.6f}; weights of order exp(-n^(1-alpha)):")
    print(f"fitted exponent {slope:.4f} vs 1 - alpha = {1 - ds5.hausdorff_alpha:.4f}")


if __name__ == "__main__":
    main()
