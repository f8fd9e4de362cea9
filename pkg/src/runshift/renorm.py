"""Renormalization operators on Walters-class coefficient sequences.

Two operators act on the run-coefficient sequence a_2, a_3, ... of a
potential that is constant on the run cylinders:

* the block operator with stretch k, (Ra)_n = sum of the k consecutive
  coefficients a_i for i in [k(n-2)+3, k(n-1)+2], whose fixed points are
  a_n = -log((n + alpha(n)) / (n + alpha(n) - 1)) for an index profile
  alpha built by the recursion alpha_m = k alpha(n) + (k - 2) over blocks;
* the digit operator for a digit system (k; c_1..c_l),
  (Ra)_n = sum_i a_{k n - c_i}, whose fixed point is the negative of the
  Cantor-measure kernel integral from runshift.cantor.

Both are implemented through their induced index maps only; no sequence
space transformation is materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cantor import CantorMeasure, DigitSystem, quadrature_values, required_depth
from .sequences import DominatedTail, EtaSequence, _bound_model

__all__ = [
    "WaltersCoefficients",
    "coeffs_from_eta",
    "eta_from_coeffs",
    "renorm1_apply",
    "renorm1_fixed_point",
    "renorm2_apply",
    "renorm2_digit_indices",
    "renorm2_fixed_point",
    "QuadratureFixedPoint",
    "residual",
    "ResidualReport",
    "estimate_gamma",
    "GammaFit",
]


@dataclass(frozen=True, eq=False)
class WaltersCoefficients:
    """Defining data of a Walters-class potential: a_2, a_3, ... plus b, d.

    ``a[i]`` stores a_{i+2}; b and d are the constant values on the switch
    cylinders and ride along unchanged under renormalization.
    """

    a: np.ndarray
    b: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=float)
        object.__setattr__(self, "a", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("need at least a_2")

    @property
    def n_max(self) -> int:
        """Largest defined index: a_2..a_{n_max}."""
        return self.a.size + 1

    def a_at(self, n: int) -> float:
        if not 2 <= n <= self.n_max:
            raise ValueError(f"a_{n} is not defined (have a_2..a_{self.n_max})")
        return float(self.a[n - 2])


def coeffs_from_eta(eta: EtaSequence, rescale: bool = False) -> WaltersCoefficients:
    """Coefficients with e^{a_q} = eta_q / eta_{q-1}; requires eta_1 = 1.

    With the convention eta_q = e^{a_2 + ... + a_q} the Jacobian rows sum
    to one; pass ``rescale=True`` to divide out eta_1 first.  b = d are set
    to -log W, the potential's value on the length-one run cylinders.
    """
    values = eta.values
    if values[0] != 1.0:
        if not rescale:
            raise ValueError("eta_1 != 1; pass rescale=True to normalize first")
        values = values / values[0]
    a = np.log(values[1:] / values[:-1])
    w = eta.W() / eta.values[0]
    return WaltersCoefficients(a, b=-math.log(w), d=-math.log(w))


def eta_from_coeffs(coeffs: WaltersCoefficients, bound=None) -> EtaSequence:
    """eta_q = e^{a_2 + ... + a_q} with eta_1 = 1.

    The result has no analytic tail model unless a dominating ``bound``
    descriptor ("geometric", C, r) or ("power", C, gamma) is supplied, so
    certified tails refuse tolerances below the truncation floor.
    """
    # extended-precision accumulation keeps the round trip at the ulp scale
    partial = np.cumsum(coeffs.a.astype(np.longdouble))
    values = np.concatenate([[1.0], np.exp(partial).astype(float)])
    model = DominatedTail(_bound_model(bound)) if bound else None
    params = {"bound": list(bound)} if bound else {}
    return EtaSequence(values, model, "custom", params)


# -- first type: block sums over k consecutive indices ---------------------


def renorm1_apply(
    coeffs: WaltersCoefficients, k: int, n_out: int | None = None
) -> WaltersCoefficients:
    """(Ra)_n = a_{k(n-2)+3} + ... + a_{k(n-1)+2} for n >= 2.

    Computes every index the input supports unless ``n_out`` asks further,
    in which case the missing input index is named.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    n_avail = (coeffs.n_max - 2) // k + 1
    if n_out is not None and n_out > n_avail:
        raise ValueError(
            f"(Ra)_{n_out} needs a_{k * (n_out - 1) + 2}; input stops at a_{coeffs.n_max}"
        )
    n_top = n_out or n_avail
    if n_top < 2:
        raise ValueError(f"input too short: a_{k + 2} required for (Ra)_2")
    # index window for n is [k(n-2)+3, k(n-1)+2]: consecutive disjoint blocks
    blocks = coeffs.a[1 : 1 + k * (n_top - 1)].reshape(n_top - 1, k)
    return WaltersCoefficients(blocks.sum(axis=1), coeffs.b, coeffs.d)


def renorm1_fixed_point(
    k: int, a2: float, n_max: int, b: float = 0.0
) -> WaltersCoefficients:
    """Fixed point of the block operator with free parameters a_2 (and b).

    alpha(2) solves a_2 = -log((2 + alpha)/(1 + alpha)); each block
    [k(n-2)+3, k(n-1)+2] then carries alpha = k alpha(n) + (k - 2), and
    a_n = -log((n + alpha(n))/(n + alpha(n) - 1)).  The k-term block sums
    telescope exactly back to a_n.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if a2 >= 0.0:
        raise ValueError("a_2 must be negative")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    big = math.exp(-a2)
    alpha = np.empty(n_max + 1)
    alpha[2] = (2.0 - big) / (big - 1.0)
    n = 2
    while True:
        lo, hi = k * (n - 2) + 3, k * (n - 1) + 2
        if lo > n_max:
            break
        alpha[lo : min(hi, n_max) + 1] = k * alpha[n] + (k - 2)
        n += 1
    shifted = np.arange(2.0, n_max + 1.0) + alpha[2:] - 1.0
    if np.any(shifted <= 0.0):
        bad = int(np.argmax(shifted <= 0.0)) + 2
        raise ValueError(f"recursion leaves n + alpha(n) - 1 <= 0 at n = {bad}")
    return WaltersCoefficients(-np.log1p(1.0 / shifted), b=b, d=b)


# -- second type: digit sums ------------------------------------------------


def renorm2_apply(
    coeffs: WaltersCoefficients, ds: DigitSystem, n_out: int | None = None
) -> WaltersCoefficients:
    """(Ra)_n = sum_i a_{k n - c_i} for n >= 2."""
    n_avail = (coeffs.n_max + ds.digits[0]) // ds.k
    if n_out is not None and n_out > n_avail:
        raise ValueError(
            f"(Ra)_{n_out} needs a_{ds.k * n_out - ds.digits[0]}; "
            f"input stops at a_{coeffs.n_max}"
        )
    n_top = n_out or n_avail
    if n_top < 2:
        raise ValueError(f"input too short: a_{2 * ds.k - ds.digits[0]} required for (Ra)_2")
    ns = np.arange(2, n_top + 1)
    out = np.zeros(ns.size)
    for c in ds.digits:
        out += coeffs.a[ds.k * ns - c - 2]
    return WaltersCoefficients(out, coeffs.b, coeffs.d)


def renorm2_digit_indices(ds: DigitSystem, n_fold: int, limit: int = 1 << 20) -> np.ndarray:
    """Offsets j = b_0 k^0 + ... + b_{N-1} k^{N-1} over digit choices b_i.

    The N-fold digit operator acts in one pass as
    (R^N a)_n = sum_j a_{k^N n - j} over these l^N offsets (sorted, with
    multiplicity).
    """
    if n_fold < 1:
        raise ValueError("need at least one application")
    if ds.l**n_fold > limit:
        raise ValueError(f"l^N = {ds.l}^{n_fold} exceeds the enumeration limit {limit}")
    js = np.zeros(1, dtype=np.int64)
    digits = np.asarray(ds.digits, dtype=np.int64)
    for i in range(n_fold):
        js = (js[:, None] + digits[None, :] * ds.k**i).ravel()
    return np.sort(js)


@dataclass(frozen=True, eq=False)
class QuadratureFixedPoint:
    """Digit-operator fixed point a_n = -I(n) with per-index certified bounds."""

    coeffs: WaltersCoefficients
    bounds: np.ndarray
    measure: CantorMeasure
    depth: int


def renorm2_fixed_point(
    ds: DigitSystem, n_max: int, depth: int | None = None, b: float = 0.0
) -> QuadratureFixedPoint:
    """Fixed point of the digit operator via Cantor-measure quadrature.

    a_n = -I(n) for 2 <= n <= n_max, where I is the kernel integral over
    K(l, k) at exponent alpha = log l / log k.  The residual under
    renorm2_apply is bounded by (l + 1) times the per-index quadrature
    bound.  In the degenerate case l = k with contiguous digits the
    integral is -log(n/(n-1)) exactly.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    cm = CantorMeasure(ds)
    if depth is None:
        depth = required_depth(cm, 2, 1e-8)
    ns = np.arange(2, n_max + 1)
    vals, bounds = quadrature_values(cm, ns, depth)
    return QuadratureFixedPoint(
        WaltersCoefficients(-vals, b=b, d=b), bounds, cm, depth
    )


# -- verification -----------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    """sup |a_n - (Ra)_n| over verifiable indices, absolute and relative."""

    sup_abs: float
    sup_rel: float
    n_checked: int


def residual(coeffs: WaltersCoefficients, operator) -> ResidualReport:
    """Fixed-point residual of ``coeffs`` under ``operator`` (a callable
    WaltersCoefficients -> WaltersCoefficients, e.g. a partial of
    renorm1_apply or renorm2_apply)."""
    image = operator(coeffs)
    n_top = min(coeffs.n_max, image.n_max)
    diff = np.abs(coeffs.a[: n_top - 1] - image.a[: n_top - 1])
    scale = np.abs(coeffs.a[: n_top - 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0.0, diff / scale, diff)
    return ResidualReport(float(diff.max()), float(rel.max()), n_top - 1)


@dataclass(frozen=True)
class GammaFit:
    """Least-squares fit of log eta_n against -gamma log n with diagnostics."""

    gamma: float
    stderr: float
    r_squared: float
    curvature: float
    power_law: bool
    n_lo: int
    n_hi: int

    def describe(self) -> dict:
        return {
            "gamma": self.gamma,
            "stderr": self.stderr,
            "r_squared": self.r_squared,
            "curvature": self.curvature,
            "power_law": self.power_law,
            "range": [self.n_lo, self.n_hi],
        }


def estimate_gamma(eta, n_lo: int, n_hi: int) -> GammaFit:
    """Fit log eta_n ~ -gamma log n over [n_lo, n_hi].

    ``power_law`` is cleared when a quadratic term in log n is needed
    (|curvature| > 0.02) or the linear fit is poor, as happens for
    stretched-exponential decay.
    """
    values = eta.values if isinstance(eta, EtaSequence) else np.asarray(eta, float)
    if not 1 <= n_lo < n_hi <= values.size or n_hi - n_lo < 8:
        raise ValueError(f"degenerate fit range [{n_lo}, {n_hi}]")
    n = np.arange(n_lo, n_hi + 1)
    x, y = np.log(n), np.log(values[n_lo - 1 : n_hi])
    coef, cov = np.polyfit(x, y, 1, cov=True)
    fit = np.polyval(coef, x)
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    curv = float(np.polyfit(x, y, 2)[0])
    return GammaFit(
        gamma=float(-coef[0]),
        stderr=float(math.sqrt(max(cov[0, 0], 0.0))),
        r_squared=r2,
        curvature=curv,
        power_law=abs(curv) <= 0.02 and r2 >= 0.999,
        n_lo=n_lo,
        n_hi=n_hi,
    )
