"""Renewal recursions for the decay of correlations of the 0-cylinder.

Write W for the total weight, T(m) for tails, p_m = eta_m / W, and let
A_q be the q-fold transfer iterate of the 0-cylinder indicator evaluated
at a unit leading run (equivalently: the probability that the run-length
chain started at a fresh run sits on symbol 0 after q steps).  Splitting
on the step at which the initial run ends, and noting that ending a run
flips the symbol, gives the renewal recursion

    A_q = sum_{m=1}^{q-1} p_m (1 - A_{q-m}) + T(q+1)/W,     A_1 = T(2)/W.

The deficits V_q = 1/2 - A_q then satisfy

    V_q = -sum_{m=1}^{q-1} p_m V_{q-m} + K_q,
    K_q = (1/2) T(q)/W - T(q+1)/W,                          V_1 = K_1,

and the iterates from a run of length s are

    B^s_q = sum_{j=1}^{q-1} (eta_{s+j-1}/T(s)) (1 - A_{q-j}) + T(s+q)/T(s).

The predicted size of the correlation at lag q is the double tail
D(q) = sum_{s>=1} sum_{k>=0} eta_{k+q+s}: polynomial q^(2-gamma) for
power weights with gamma > 2, and of order q e^(-sqrt q) for
exp(-sqrt n) weights.  The run-length chain in runshift.oracle provides
the independent ground truth for all of these quantities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequences import EtaSequence

__all__ = [
    "RenewalSeries",
    "renewal_series",
    "transfer_iterates",
    "renewal_deficits",
    "iterates_from_run",
    "correlation_asymptotic",
    "stretched_tail_report",
    "decay_table",
]


@dataclass(frozen=True, eq=False)
class RenewalSeries:
    """Renewal data for lags 1..qmax; index i of each array holds lag i+1.

    jump_probs[m-1] = eta_m / W, tail_terms[q-1] = T(q+1)/W,
    forcing[q-1] = K_q, iterates[q-1] = A_q, deficits[q-1] = V_q.
    """

    eta: EtaSequence
    qmax: int
    w: float
    jump_probs: np.ndarray
    tail_terms: np.ndarray
    forcing: np.ndarray
    iterates: np.ndarray
    deficits: np.ndarray


def renewal_series(eta: EtaSequence, qmax: int) -> RenewalSeries:
    """Solve the renewal recursions up to lag qmax.

    Tails are taken from the sequence's certified grid once and reused
    across the whole sweep.
    """
    if qmax < 1:
        raise ValueError("qmax must be at least 1")
    if qmax + 1 > eta.n_max:
        raise ValueError(f"qmax={qmax} needs n_max >= {qmax + 1}")
    w = eta.W()
    t = eta._t_grid  # t[m-1] = T(m)
    p = eta.values[:qmax] / w
    cum = np.cumsum(p)
    tail_terms = t[1 : qmax + 1] / w
    forcing = 0.5 * t[:qmax] / w - tail_terms

    iterates = np.empty(qmax)
    deficits = np.empty(qmax)
    iterates[0] = tail_terms[0]
    deficits[0] = forcing[0]
    for q in range(2, qmax + 1):
        conv_a = float(np.dot(p[: q - 1], iterates[q - 2 :: -1]))
        iterates[q - 1] = cum[q - 2] - conv_a + tail_terms[q - 1]
        conv_v = float(np.dot(p[: q - 1], deficits[q - 2 :: -1]))
        deficits[q - 1] = -conv_v + forcing[q - 1]
    return RenewalSeries(eta, qmax, w, p, tail_terms, forcing, iterates, deficits)


def transfer_iterates(eta: EtaSequence, qmax: int) -> np.ndarray:
    """A_q for q = 1..qmax: q-step transfer iterates of the 0-indicator
    at a unit leading run."""
    return renewal_series(eta, qmax).iterates


def renewal_deficits(eta: EtaSequence, qmax: int) -> np.ndarray:
    """V_q = 1/2 - A_q for q = 1..qmax, solved by its own recursion."""
    return renewal_series(eta, qmax).deficits


def iterates_from_run(
    eta: EtaSequence, s: int, qmax: int, series: RenewalSeries | None = None
) -> np.ndarray:
    """B^s_q for q = 1..qmax: transfer iterates at a leading run of length s.

    Reduces to the plain iterates at s = 1.
    """
    if s < 1:
        raise ValueError("run length s must be at least 1")
    if series is None or series.qmax < qmax - 1:
        series = renewal_series(eta, max(qmax - 1, 1))
    t = eta._t_grid
    if s + qmax > eta.n_max + 1:
        raise ValueError(f"s + qmax = {s + qmax} needs n_max >= {s + qmax - 1}")
    ts = t[s - 1]
    ratios = eta.values[s - 1 : s + qmax - 2] / ts  # eta_{s+j-1}/T(s), j = 1..qmax-1
    tails = t[s : s + qmax] / ts  # T(s+q)/T(s), q = 1..qmax
    comp = 1.0 - series.iterates
    out = np.empty(qmax)
    out[0] = tails[0]
    for q in range(2, qmax + 1):
        out[q - 1] = float(np.dot(ratios[: q - 1], comp[q - 2 :: -1])) + tails[q - 1]
    return out


def correlation_asymptotic(eta: EtaSequence, q, tol: float | None = None):
    """Predicted order D(q) of the correlation at lag q (or at each lag of
    an array).  The sign of the true correlation is a matter for the
    oracle; this is the magnitude scale only, and it is not sharp for
    geometric weights where the correlation vanishes exactly."""
    if np.isscalar(q):
        return eta.double_tail(int(q), tol)
    return np.array([eta.double_tail(int(v), tol) for v in np.asarray(q)])


def stretched_tail_report(eta: EtaSequence, ms) -> dict:
    """Tail sums of exp(-sqrt n) weights against their integral model.

    For eta_n = e^-sqrt(n) the tail sum_{k>=0} eta_{m+k} is of the order
    sqrt(m+1) e^-sqrt(m+1) with constant 2 (from the integral
    2 int y e^-y dy); the report carries the measured ratios, which
    approach 2 from above as m grows.
    """
    if eta.family != "stretched" or eta.params.get("theta") != 0.5:
        raise ValueError("tail report applies to the stretched(theta=1/2) family")
    ms = np.asarray(list(ms), dtype=int)
    sums = np.array([eta.tail(int(m)) for m in ms])
    root = np.sqrt(ms + 1.0)
    reference = root * np.exp(-root)
    return {
        "m": ms,
        "tail_sum": sums,
        "reference": reference,
        "ratio": sums / reference,
        "limit": 2.0,
    }


def decay_table(
    eta: EtaSequence,
    qmax: int,
    oracle_correlations: np.ndarray | None = None,
) -> dict:
    """Columns (q, A, V, K, D, C_oracle, C_over_D) for export."""
    series = renewal_series(eta, qmax)
    q = np.arange(1, qmax + 1)
    d = correlation_asymptotic(eta, q)
    if oracle_correlations is None:
        c = np.full(qmax, np.nan)
    else:
        c = np.asarray(oracle_correlations, dtype=float)[:qmax]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(c) / d
    return {
        "q": q,
        "A": series.iterates,
        "V": series.deficits,
        "K": series.forcing,
        "D": d,
        "C_oracle": c,
        "C_over_D": ratio,
    }
