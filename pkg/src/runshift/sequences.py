"""Run-weight sequences with certified tail control.

Everything downstream (potentials, equilibrium measures, renewal decay
rates, the run-length oracle) is a functional of a positive nonincreasing
summable sequence eta_1, eta_2, ...  This module provides:

* analytic families (power n^-gamma, stretched exp(-n^theta), geometric
  ratio^(n-1)) evaluated to a finite cutoff, together with tail models that
  certify the truncated remainders by integral brackets or closed forms;
* custom finite sequences, optionally dominated by an explicit bound;
* tail sums T(m) = sum_{n>=m} eta_n, double tails
  D(q) = sum_{m>q} (m-q) eta_m, powered sums W(beta) = sum_n eta_n^beta,
  and first moments, each with a certified error;
* the inverse construction that produces eta from a target decay profile
  d_q via second differences, with exact tails inherited from the target.

Series are accumulated smallest-terms-first (one cumulative sum from the
far end), so T(m) = eta_m + T(m+1) holds exactly in floating point and the
certified error of a reported value is the analytic bracket width, not
accumulated rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special

__all__ = [
    "EtaSequence",
    "NotSummableError",
    "ToleranceError",
    "make_eta",
    "inverse_design",
    "verify_design_shift",
    "decay_profile",
    "sequence_table",
    "PowerTail",
    "StretchedTail",
    "GeometricTail",
    "DominatedTail",
    "TargetTail",
]


class NotSummableError(ValueError):
    """The requested family or exponent gives a divergent series."""


class ToleranceError(RuntimeError):
    """A certified value cannot be produced at the requested tolerance."""


def _upper_gamma(a: float, x: float) -> float:
    """Unnormalized upper incomplete gamma integral from x to infinity."""
    return float(special.gammaincc(a, x) * special.gamma(a))


class TailModel:
    """Analytic control of eta_n beyond the stored cutoff.

    ``sum_tail(m)`` and ``weighted_tail(m)`` return ``(lo, hi)`` brackets for
    sum_{n>=m} eta_n and sum_{n>=m} (n-m) eta_n.  For monotone families the
    brackets come from integral comparison; for geometric and target-profile
    models they are exact (lo == hi).  ``powered(beta)`` returns the model
    for eta_n^beta where that is available.
    """

    def sum_tail(self, m: int) -> tuple[float, float]:
        raise NotImplementedError

    def weighted_tail(self, m: int) -> tuple[float, float]:
        raise NotImplementedError

    def value(self, n: int) -> float:
        raise ToleranceError("tail model has no pointwise values beyond the cutoff")

    def powered(self, beta: float) -> "TailModel":
        if beta == 1.0:
            return self
        raise ToleranceError("tail model does not certify powered sums")

    def scaled(self, c: float) -> "TailModel":
        raise NotImplementedError


@dataclass(frozen=True)
class PowerTail(TailModel):
    """eta_n = scale * n^-gamma, gamma > 1."""

    gamma: float
    scale: float = 1.0

    def value(self, n):
        return self.scale * float(n) ** -self.gamma

    def _integral(self, x):
        # int_x^inf scale * t^-gamma dt
        return self.scale * float(x) ** (1.0 - self.gamma) / (self.gamma - 1.0)

    def sum_tail(self, m):
        lo = self._integral(m)
        return lo, lo + self.value(m)

    def weighted_tail(self, m):
        if self.gamma <= 2.0:
            raise NotSummableError(
                f"first moment of power(gamma={self.gamma}) tail is infinite"
            )
        g, s = self.gamma, self.scale
        a = float(m + 1)
        lo = s * a ** (2.0 - g) / ((g - 1.0) * (g - 2.0))
        hi = lo + 2.0 * self._integral(a) + self.value(a)
        return lo, hi

    def powered(self, beta):
        if self.gamma * beta <= 1.0:
            raise NotSummableError(
                f"power(gamma={self.gamma}) to the beta={beta} is not summable"
            )
        return PowerTail(self.gamma * beta, self.scale**beta)

    def scaled(self, c):
        return PowerTail(self.gamma, self.scale * c)


@dataclass(frozen=True)
class StretchedTail(TailModel):
    """eta_n = scale * exp(-rate * n^theta), 0 < theta < 1."""

    theta: float
    rate: float = 1.0
    scale: float = 1.0

    def value(self, n):
        return self.scale * math.exp(-self.rate * float(n) ** self.theta)

    def _integral(self, x):
        # int_x^inf scale * exp(-rate t^theta) dt, by substituting y = rate t^theta
        th, r = self.theta, self.rate
        return self.scale / th * r ** (-1.0 / th) * _upper_gamma(1.0 / th, r * float(x) ** th)

    def _double_integral(self, a):
        # int_a^inf (t - a) * scale * exp(-rate t^theta) dt
        th, r = self.theta, self.rate
        xa = r * float(a) ** th
        part = r ** (-2.0 / th) * _upper_gamma(2.0 / th, xa) - float(a) * r ** (
            -1.0 / th
        ) * _upper_gamma(1.0 / th, xa)
        return self.scale / th * part

    def sum_tail(self, m):
        lo = self._integral(m)
        return lo, lo + self.value(m)

    def weighted_tail(self, m):
        a = m + 1
        lo = self._double_integral(a)
        hi = lo + 2.0 * self._integral(a) + self.value(a)
        return lo, hi

    def powered(self, beta):
        return StretchedTail(self.theta, self.rate * beta, self.scale**beta)

    def scaled(self, c):
        return StretchedTail(self.theta, self.rate, self.scale * c)


@dataclass(frozen=True)
class GeometricTail(TailModel):
    """eta_n = scale * ratio^(n-1); all tails in closed form."""

    ratio: float
    scale: float = 1.0

    def value(self, n):
        return self.scale * self.ratio ** (n - 1)

    def sum_tail(self, m):
        v = self.scale * self.ratio ** (m - 1) / (1.0 - self.ratio)
        return v, v

    def weighted_tail(self, m):
        v = self.scale * self.ratio**m / (1.0 - self.ratio) ** 2
        return v, v

    def powered(self, beta):
        return GeometricTail(self.ratio**beta, self.scale**beta)

    def scaled(self, c):
        return GeometricTail(self.ratio, self.scale * c)


@dataclass(frozen=True)
class DominatedTail(TailModel):
    """Custom values bounded above by an explicit dominating model.

    Only one-sided information is available beyond the cutoff, so brackets
    are (0, bound); certified errors bottom out at half the dominating tail.
    """

    bound: TailModel

    def sum_tail(self, m):
        return 0.0, self.bound.sum_tail(m)[1]

    def weighted_tail(self, m):
        return 0.0, self.bound.weighted_tail(m)[1]

    def powered(self, beta):
        return DominatedTail(self.bound.powered(beta))

    def scaled(self, c):
        return DominatedTail(self.bound.scaled(c))


class TargetTail(TailModel):
    """Tails of an inverse-designed sequence, exact from the target profile.

    With eta_r = d_r - 2 d_{r+1} + d_{r+2} the partial tails telescope:
    sum_{n>=m} eta_n = d_m - d_{m+1} and sum_{n>=m} (n-m) eta_n = d_{m+1}.
    """

    def __init__(self, d, scale: float = 1.0, label: str | None = None):
        self._d = d
        self.scale = scale
        self.label = label

    def value(self, n):
        d = self._d
        return self.scale * (d(n) - 2.0 * d(n + 1) + d(n + 2))

    def sum_tail(self, m):
        v = self.scale * (self._d(m) - self._d(m + 1))
        return v, v

    def weighted_tail(self, m):
        v = self.scale * self._d(m + 1)
        return v, v

    def scaled(self, c):
        return TargetTail(self._d, self.scale * c, self.label)


def _bracket(lo: float, hi: float) -> tuple[float, float]:
    if not math.isfinite(hi):
        return 0.0, math.inf
    return 0.5 * (lo + hi), 0.5 * (hi - lo)


def _check_tol(err: float, tol: float | None, what: str):
    if tol is not None and not err <= tol:
        raise ToleranceError(
            f"{what} certified only to {err:.3g}; the requested {tol:.3g} needs "
            "a larger n_max or a sharper tail model"
        )


@dataclass(frozen=True, eq=False)
class EtaSequence:
    """A positive nonincreasing run-weight sequence with certified tails.

    ``values[i]`` stores eta_{i+1} for i < n_max; ``tail_model`` (optional)
    certifies everything beyond.  Instances are immutable and all queries
    are pure, so concurrent evaluation is safe.
    """

    values: np.ndarray
    tail_model: TailModel | None = None
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("eta needs at least two stored values")
        if not np.all(v > 0.0):
            bad = int(np.argmin(v > 0.0)) + 1
            raise ValueError(f"eta_{bad} is not positive")
        if np.any(v[1:] > v[:-1]):
            bad = int(np.argmax(v[1:] > v[:-1])) + 2
            raise ValueError(f"eta is not nonincreasing at index {bad}")

    @property
    def n_max(self) -> int:
        return self.values.size

    # -- tails ----------------------------------------------------------

    @cached_property
    def _far(self) -> tuple[float, float]:
        """(mid, half-width) of the tail sum beyond n_max."""
        if self.tail_model is None:
            return 0.0, math.inf
        return _bracket(*self.tail_model.sum_tail(self.n_max + 1))

    @cached_property
    def _t_grid(self) -> np.ndarray:
        """T(m) for m = 1..n_max+1, accumulated from the far end."""
        arr = np.concatenate([self.values, [self._far[0]]])
        return np.cumsum(arr[::-1])[::-1]

    def eta(self, n: int) -> float:
        """eta_n; beyond n_max only analytic families can answer."""
        if n < 1:
            raise ValueError("indices start at 1")
        if n <= self.n_max:
            return float(self.values[n - 1])
        if self.tail_model is None:
            raise ToleranceError(f"eta_{n} is beyond the stored cutoff {self.n_max}")
        return self.tail_model.value(n)

    def tail(self, m: int, tol: float | None = None) -> float:
        """T(m) = sum_{n>=m} eta_n with certified error <= tol when given."""
        if m < 1:
            raise ValueError("indices start at 1")
        if m <= self.n_max + 1:
            val, err = float(self._t_grid[m - 1]), self._far[1]
        elif self.tail_model is None:
            val, err = 0.0, math.inf
        else:
            val, err = _bracket(*self.tail_model.sum_tail(m))
        _check_tol(err, tol, f"T({m})")
        return val

    def W(self, beta: float = 1.0, tol: float | None = None) -> float:
        """W(beta) = sum_n eta_n^beta."""
        if beta == 1.0:
            return self.tail(1, tol)
        return self.powered_tail(1, beta, tol)

    @cached_property
    def _pow_cache(self) -> dict:
        return {}

    def powered_tail(self, m: int, beta: float, tol: float | None = None) -> float:
        """sum_{n>=m} eta_n^beta with certified error, for m <= n_max + 1."""
        if beta == 1.0:
            return self.tail(m, tol)
        key = float(beta)
        if key not in self._pow_cache:
            if self.tail_model is None:
                far = (0.0, math.inf)
            else:
                far = _bracket(*self.tail_model.powered(beta).sum_tail(self.n_max + 1))
            arr = np.concatenate([self.values**beta, [far[0]]])
            self._pow_cache[key] = (np.cumsum(arr[::-1])[::-1], far[1])
        grid, err = self._pow_cache[key]
        if not 1 <= m <= self.n_max + 1:
            raise ValueError(f"powered tails available for m <= {self.n_max + 1}")
        _check_tol(err, tol, f"sum eta^{beta} from {m}")
        return float(grid[m - 1])

    def double_tail(self, q: int, tol: float | None = None) -> float:
        """D(q) = sum_{m>q} (m-q) eta_m = sum_{s>=1} sum_{k>=0} eta_{k+q+s}."""
        if q < 0:
            raise ValueError("q must be nonnegative")
        cut = self.n_max + 1
        if q + 1 <= self.n_max:
            w = np.arange(1.0, self.n_max - q + 1.0)
            stored = float(np.sum((self.values[q:] * w)[::-1]))
            if self.tail_model is None:
                s0 = w1 = (0.0, math.inf)
            else:
                s0 = _bracket(*self.tail_model.sum_tail(cut))
                w1 = _bracket(*self.tail_model.weighted_tail(cut))
            val = stored + (cut - q) * s0[0] + w1[0]
            err = (cut - q) * s0[1] + w1[1]
        else:
            if self.tail_model is None:
                raise ToleranceError(f"D({q}) is beyond the stored cutoff {self.n_max}")
            s0 = _bracket(*self.tail_model.sum_tail(q + 1))
            w1 = _bracket(*self.tail_model.weighted_tail(q + 1))
            val, err = s0[0] + w1[0], s0[1] + w1[1]
        _check_tol(err, tol, f"D({q})")
        return val

    def first_moment(self, tol: float | None = None) -> float:
        """sum_n n eta_n, the normalization behind equilibrium cylinders."""
        cut = self.n_max + 1
        w = np.arange(1.0, self.n_max + 1.0)
        stored = float(np.sum((self.values * w)[::-1]))
        if self.tail_model is None:
            s0 = w1 = (0.0, math.inf)
        else:
            s0 = _bracket(*self.tail_model.sum_tail(cut))
            w1 = _bracket(*self.tail_model.weighted_tail(cut))
        val = stored + cut * s0[0] + w1[0]
        err = cut * s0[1] + w1[1]
        _check_tol(err, tol, "sum n*eta_n")
        return val

    # -- run-transition ratios -------------------------------------------

    def continue_ratio(self, m: int) -> float:
        """T(m+1)/T(m); closed form at any m for the geometric family."""
        if isinstance(self.tail_model, GeometricTail):
            return self.tail_model.ratio
        if m + 1 > self.n_max + 1:
            raise ToleranceError(
                f"ratio at m={m} needs n_max >= {m} (or a geometric family)"
            )
        t = self._t_grid
        return float(t[m] / t[m - 1])

    def switch_ratio(self, m: int) -> float:
        """eta_m/T(m); closed form at any m for the geometric family."""
        if isinstance(self.tail_model, GeometricTail):
            return 1.0 - self.tail_model.ratio
        if m > self.n_max:
            raise ToleranceError(
                f"ratio at m={m} needs n_max >= {m} (or a geometric family)"
            )
        return float(self.values[m - 1] / self._t_grid[m - 1])

    def ratio_arrays(self, m_max: int) -> tuple[np.ndarray, np.ndarray]:
        """(T(m+1)/T(m), eta_m/T(m)) for m = 1..m_max as arrays."""
        if isinstance(self.tail_model, GeometricTail):
            r = self.tail_model.ratio
            return np.full(m_max, r), np.full(m_max, 1.0 - r)
        if m_max > self.n_max:
            raise ToleranceError(
                f"ratios up to m={m_max} need n_max >= {m_max} (or a geometric family)"
            )
        t = self._t_grid
        return t[1 : m_max + 1] / t[:m_max], self.values[:m_max] / t[:m_max]

    # -- rescaling and serialization --------------------------------------

    def scaled(self, c: float) -> "EtaSequence":
        """The sequence c*eta; every ratio and normalized quantity is unchanged."""
        if c <= 0.0:
            raise ValueError("scale must be positive")
        model = self.tail_model.scaled(c) if self.tail_model is not None else None
        params = dict(self.params)
        params["scale"] = c * params.get("scale", 1.0)
        return EtaSequence(self.values * c, model, self.family, params)

    def to_json(self) -> str:
        params = {k: v for k, v in self.params.items()}
        return json.dumps(
            {
                "family": self.family,
                "params": params,
                "n_max": self.n_max,
                "values": self.values.tolist(),
            }
        )

    @staticmethod
    def from_json(text: str) -> "EtaSequence":
        doc = json.loads(text)
        family, params = doc["family"], doc["params"]
        values = np.asarray(doc["values"], dtype=float)
        scale = params.get("scale", 1.0)
        if family == "power":
            model: TailModel | None = PowerTail(params["gamma"], scale)
        elif family == "stretched":
            model = StretchedTail(params["theta"], 1.0, scale)
        elif family == "geometric":
            model = GeometricTail(params["ratio"], scale)
        elif family == "inverse" and params.get("target"):
            model = TargetTail(decay_profile(params["target"])[0], scale, params["target"])
        elif family == "custom" and params.get("bound"):
            model = DominatedTail(_bound_model(params["bound"]))
        else:
            model = None
        return EtaSequence(values, model, family, params)


def _bound_model(spec) -> TailModel:
    """Dominating-bound descriptor: ("geometric", C, r) or ("power", C, gamma)."""
    kind, c, p = spec[0], float(spec[1]), float(spec[2])
    if kind == "geometric":
        if not 0.0 < p < 1.0:
            raise NotSummableError(f"geometric bound ratio {p} not in (0,1)")
        # C * r^n written as a GeometricTail with scale C*r
        return GeometricTail(p, c * p)
    if kind == "power":
        if p <= 1.0:
            raise NotSummableError(f"power bound with gamma={p} is not summable")
        return PowerTail(p, c)
    raise ValueError(f"unknown bound kind {kind!r}")


def make_eta(family: str, params: dict, n_max: int) -> EtaSequence:
    """Build a run-weight sequence from a named family.

    Families and parameters:

    * ``power``:     eta_n = n^-gamma, requires gamma > 1
    * ``stretched``: eta_n = exp(-n^theta), requires 0 < theta < 1
    * ``geometric``: eta_n = ratio^(n-1), requires 0 < ratio < 1
    * ``custom``:    explicit ``values`` plus optional dominating ``bound``
                     ("geometric", C, r) or ("power", C, gamma)
    """
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    n = np.arange(1.0, n_max + 1.0)
    fam = family.lower()
    if fam == "power":
        gamma = float(params["gamma"])
        if gamma <= 1.0:
            raise NotSummableError(f"power(gamma={gamma}) is not summable")
        return EtaSequence(n**-gamma, PowerTail(gamma), "power", {"gamma": gamma})
    if fam == "stretched":
        theta = float(params["theta"])
        if not 0.0 < theta < 1.0:
            raise ValueError(f"stretched exponent theta={theta} must be in (0,1)")
        return EtaSequence(
            np.exp(-(n**theta)), StretchedTail(theta), "stretched", {"theta": theta}
        )
    if fam == "geometric":
        ratio = float(params["ratio"])
        if not 0.0 < ratio < 1.0:
            raise ValueError(f"geometric ratio={ratio} must be in (0,1)")
        values = ratio ** (n - 1.0)
        if values[-1] == 0.0:
            raise ValueError(
                f"geometric(ratio={ratio}) underflows double precision at n_max={n_max}; "
                "use a smaller n_max (closed-form ratios remain exact at any index)"
            )
        return EtaSequence(values, GeometricTail(ratio), "geometric", {"ratio": ratio})
    if fam == "custom":
        values = np.asarray(params["values"], dtype=float)[:n_max]
        bound = params.get("bound")
        model = DominatedTail(_bound_model(bound)) if bound else None
        out_params = {"bound": list(bound)} if bound else {}
        return EtaSequence(values, model, "custom", out_params)
    raise ValueError(f"unknown family {family!r}")


def decay_profile(spec: str):
    """Parse a target decay profile "family:param" into (callable, label).

    ``power:p`` -> q^-p, ``geometric:r`` -> r^q, ``stretched:t`` -> exp(-q^t).
    """
    name, _, arg = spec.partition(":")
    p = float(arg)
    name = name.lower()
    if name == "power":
        if p <= 0:
            raise ValueError("power profile needs a positive exponent")
        return (lambda q: float(q) ** -p), f"power:{p:g}"
    if name == "geometric":
        if not 0.0 < p < 1.0:
            raise ValueError("geometric profile ratio must be in (0,1)")
        return (lambda q: p**q), f"geometric:{p:g}"
    if name == "stretched":
        if not 0.0 < p < 1.0:
            raise ValueError("stretched profile exponent must be in (0,1)")
        return (lambda q: math.exp(-float(q) ** p)), f"stretched:{p:g}"
    raise ValueError(f"unknown decay profile {spec!r}")


def inverse_design(d, qmax: int, n_max: int | None = None, label: str | None = None) -> EtaSequence:
    """Construct eta whose double tail realizes a target decay profile.

    ``d`` maps q >= 1 to a strictly decreasing, convex-difference profile
    (a callable, or a finite sequence indexed from q=1).  The construction
    sets eta_r = d_r - 2 d_{r+1} + d_{r+2}; double telescoping then gives
    sum_{s>=1} sum_{k>=0} eta_{k+q+s} = d_{q+1} exactly (the shift is one;
    see verify_design_shift).  Rejects profiles whose differences fail to
    stay positive, naming the first bad index.
    """
    if qmax < 2:
        raise ValueError("qmax must be at least 2")
    if callable(d):
        fn = d
        n_max = n_max or max(2 * qmax + 16, 64)
    else:
        seq = np.asarray(d, dtype=float)
        if seq.size < 4:
            raise ValueError("target profile needs at least four entries")
        limit = seq.size - 2
        n_max = min(n_max or limit, limit)

        def fn(q, _seq=seq):
            return float(_seq[q - 1])

    dv = np.array([fn(q) for q in range(1, n_max + 3)])
    if np.any(dv <= 0.0):
        bad = int(np.argmax(dv <= 0.0)) + 1
        raise ValueError(f"target profile is not positive at q={bad}")
    c = dv[:-1] - dv[1:]
    if np.any(c <= 0.0):
        bad = int(np.argmax(c <= 0.0)) + 1
        raise ValueError(f"target profile is not strictly decreasing at q={bad}")
    eta = c[:-1] - c[1:]
    if np.any(eta <= 0.0):
        bad = int(np.argmax(eta <= 0.0)) + 1
        raise ValueError(f"second difference of the target is not positive at r={bad}")
    return EtaSequence(
        eta, TargetTail(fn, 1.0, label), "inverse", {"target": label} if label else {}
    )


def verify_design_shift(eta: EtaSequence, d, qs=range(1, 17)) -> tuple[int, float]:
    """Empirical index shift between double_tail(q) and the target profile.

    Returns (delta, max relative error) where delta in {0, 1} minimizes
    |D(q) - d(q + delta)| over the sampled q.
    """
    fn = d if callable(d) else (lambda q, _s=np.asarray(d, float): float(_s[q - 1]))
    errs = {0: 0.0, 1: 0.0}
    for q in qs:
        dq = eta.double_tail(q)
        for delta in (0, 1):
            target = fn(q + delta)
            errs[delta] = max(errs[delta], abs(dq - target) / abs(target))
    delta = 0 if errs[0] <= errs[1] else 1
    return delta, errs[delta]


def sequence_table(eta: EtaSequence, n_max: int | None = None) -> dict:
    """Columns (n, eta, T, a) for export; a_1 is undefined and reported nan."""
    n_max = min(n_max or eta.n_max, eta.n_max)
    n = np.arange(1, n_max + 1)
    values = eta.values[:n_max]
    t = eta._t_grid[:n_max]
    a = np.full(n_max, np.nan)
    a[1:] = np.log(values[1:] / values[:-1])
    return {"n": n, "eta": values, "T": t, "a": a}
