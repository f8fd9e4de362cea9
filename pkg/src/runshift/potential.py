"""Walters-class potential on the binary shift and its equilibrium data.

The potential is constant on the run cylinders: beta * a_q on a leading
run of length q >= 2 (either symbol), -log W(beta) on length-one runs, and
zero at the two fixed points.  At beta = 1 its transfer operator has the
explicit eigenfunction r(q) = T(q)/eta_q on run cylinders, eigenmeasure
rho with cylinder masses eta_q, and equilibrium measure mu with raw
cylinder masses T(q); the normalized Jacobian

    J = continue with T(q)/T(q-1),  switch with eta_q/T(q)

is a stochastic kernel because T(q) = eta_q + T(q+1) exactly.  Points are
described symbolically by their leading run pattern, which is precisely
the information the potential, eigenfunction, and Jacobian depend on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .sequences import EtaSequence, ToleranceError

__all__ = [
    "Pattern",
    "SymbolicPoint",
    "lead_zeros",
    "lead_ones",
    "inner_ones",
    "inner_zeros",
    "ALL_ZEROS",
    "ALL_ONES",
    "ZERO_THEN_ONES",
    "ONE_THEN_ZEROS",
    "potential_value",
    "eigenfunction",
    "eigenmeasure_cylinder",
    "equilibrium_cylinder",
    "equilibrium_normalization",
    "zero_cylinder_mass",
    "jacobian",
    "check_normalization",
    "NormalizationReport",
    "EquilibriumData",
    "equilibrium_table",
]


class Pattern(Enum):
    LEAD_ZEROS = "0^q 1 ..."
    LEAD_ONES = "1^q 0 ..."
    INNER_ONES = "0 1^q 0 ..."
    INNER_ZEROS = "1 0^q 1 ..."
    ALL_ZEROS = "0^inf"
    ALL_ONES = "1^inf"
    ZERO_THEN_ONES = "0 1^inf"
    ONE_THEN_ZEROS = "1 0^inf"


_NEEDS_Q = {Pattern.LEAD_ZEROS, Pattern.LEAD_ONES, Pattern.INNER_ONES, Pattern.INNER_ZEROS}


@dataclass(frozen=True)
class SymbolicPoint:
    """A point of {0,1}^N described by its leading run pattern."""

    pattern: Pattern
    q: int | None = None

    def __post_init__(self):
        if self.pattern in _NEEDS_Q:
            if self.q is None or self.q < 1:
                raise ValueError(f"{self.pattern.name} needs a run length q >= 1")
        elif self.q is not None:
            raise ValueError(f"{self.pattern.name} takes no run length")


def lead_zeros(q: int) -> SymbolicPoint:
    """0^q 1 ...: a maximal leading run of q zeros."""
    return SymbolicPoint(Pattern.LEAD_ZEROS, q)


def lead_ones(q: int) -> SymbolicPoint:
    """1^q 0 ...: a maximal leading run of q ones."""
    return SymbolicPoint(Pattern.LEAD_ONES, q)


def inner_ones(q: int) -> SymbolicPoint:
    """0 1^q 0 ...: a completed run of q ones after a leading zero."""
    return SymbolicPoint(Pattern.INNER_ONES, q)


def inner_zeros(q: int) -> SymbolicPoint:
    """1 0^q 1 ...: a completed run of q zeros after a leading one."""
    return SymbolicPoint(Pattern.INNER_ZEROS, q)


ALL_ZEROS = SymbolicPoint(Pattern.ALL_ZEROS)
ALL_ONES = SymbolicPoint(Pattern.ALL_ONES)
ZERO_THEN_ONES = SymbolicPoint(Pattern.ZERO_THEN_ONES)
ONE_THEN_ZEROS = SymbolicPoint(Pattern.ONE_THEN_ZEROS)


def _lead_run(point: SymbolicPoint) -> int | None:
    """Length of the leading run, or None at the two constant points."""
    if point.pattern in (Pattern.LEAD_ZEROS, Pattern.LEAD_ONES):
        return point.q
    if point.pattern in (
        Pattern.INNER_ONES,
        Pattern.INNER_ZEROS,
        Pattern.ZERO_THEN_ONES,
        Pattern.ONE_THEN_ZEROS,
    ):
        return 1
    return None


def potential_value(point: SymbolicPoint, eta: EtaSequence, beta: float = 1.0) -> float:
    """The potential at a symbolic point: beta a_q, -log W(beta), or 0."""
    q = _lead_run(point)
    if q is None:
        return 0.0
    if q == 1:
        return -math.log(eta.W(beta))
    return beta * math.log(eta.eta(q) / eta.eta(q - 1))


def eigenfunction(
    point: SymbolicPoint,
    eta: EtaSequence,
    beta: float = 1.0,
    lam: float = 1.0,
    tol: float | None = None,
) -> float:
    """Transfer-operator eigenfunction at a supplied eigenvalue lam >= 1.

    On a leading run of length n (either symbol, by 0/1 symmetry) the value
    is 1 + eta_n^-beta sum_{j>=1} eta_{n+j}^beta lam^-j, normalized to 1 at
    the constant points.  At beta = lam = 1 this is T(n)/eta_n, and
    multiplying by eta_n gives the raw equilibrium cylinder mass T(n).
    A given ``tol`` certifies the relative error; divergent powered series
    (lam too small for the tail) are rejected.
    """
    if lam < 1.0:
        raise ValueError("eigenvalue lam must be >= 1")
    n = _lead_run(point)
    if n is None:
        return 1.0
    scale = eta.eta(n) ** beta
    if lam == 1.0:
        series = eta.powered_tail(n + 1, beta)
        err = eta._pow_cache[float(beta)][1] if beta != 1.0 else eta._far[1]
    else:
        series = 0.0
        damp = 1.0
        terms = eta.values[n:] ** beta
        err = math.inf
        floor = (tol if tol is not None else 1e-13) * scale
        for j in range(1, eta.n_max - n + 1):
            damp /= lam
            series += terms[j - 1] * damp
            # remainder <= lam^-j * sum_{i > n+j} eta_i^beta
            err = damp * eta.powered_tail(n + j + 1, beta)
            if err <= floor:
                break
    value = 1.0 + series / scale
    if tol is not None and not err / scale <= tol * value:
        raise ToleranceError(
            f"eigenfunction certified to relative {err / scale / value:.3g} only; "
            f"raise n_max for {tol:g}"
        )
    return value


def eigenmeasure_cylinder(q: int, eta: EtaSequence) -> float:
    """Mass eta_q that the dual eigenmeasure gives the run-q cylinder."""
    return eta.eta(q)


def equilibrium_normalization(eta: EtaSequence, tol: float | None = None) -> float:
    """Z = 2 sum_m m eta_m, the total raw mass of all run cylinders."""
    return 2.0 * eta.first_moment(tol)


def equilibrium_cylinder(
    q: int, eta: EtaSequence, normalized: bool = False, tol: float | None = None
) -> float:
    """Equilibrium mass of a run-q cylinder: T(q) raw, or T(q)/Z normalized.

    Normalization requires a finite first moment and makes the masses of
    the 0-cylinder and the 1-cylinder each exactly one half.
    """
    raw = eta.tail(q, tol)
    if not normalized:
        return raw
    return raw / equilibrium_normalization(eta, tol)


def zero_cylinder_mass(eta: EtaSequence) -> float:
    """Normalized equilibrium mass of the 0-cylinder, as a cylinder sum.

    Adds the stored masses T(q)/Z for q <= n_max and the certified
    remainder D(n_max)/Z; the result is 1/2 by 0/1 symmetry.
    """
    stored = float(np.sum(eta._t_grid[: eta.n_max][::-1]))
    total = stored + eta.double_tail(eta.n_max)
    return total / equilibrium_normalization(eta)


def jacobian(point: SymbolicPoint, eta: EtaSequence) -> float:
    """The equilibrium Jacobian at a symbolic point (beta = 1).

    Continuing a run of length q >= 2 carries T(q)/T(q-1); ending a run of
    length q carries eta_q/T(q); the constant points are fixed with J = 1;
    the two pre-fixed points carry J = 0.  A bare length-one leading run is
    ambiguous (J depends on the following run), so inner_ones/inner_zeros
    must be used there.
    """
    pat = point.pattern
    if pat in (Pattern.LEAD_ZEROS, Pattern.LEAD_ONES):
        if point.q == 1:
            raise ValueError(
                "Jacobian on a length-one leading run depends on the next run; "
                "use inner_ones(q) or inner_zeros(q)"
            )
        return eta.continue_ratio(point.q - 1)
    if pat in (Pattern.INNER_ONES, Pattern.INNER_ZEROS):
        return eta.switch_ratio(point.q)
    if pat in (Pattern.ALL_ZEROS, Pattern.ALL_ONES):
        return 1.0
    return 0.0  # 0 1^inf and 1 0^inf


@dataclass(frozen=True)
class NormalizationReport:
    """Row-sum check of the Jacobian over sampled run states."""

    n_checked: int
    max_deviation: float
    worst_state: int
    first_violation: int | None
    ok: bool


def check_normalization(eta: EtaSequence, states=range(1, 65), tol: float = 1e-14) -> NormalizationReport:
    """Verify sum over preimages of J = 1 at each sampled run state.

    At state m the two preimages carry T(m+1)/T(m) and eta_m/T(m), whose
    sum is 1 exactly by T(m) = eta_m + T(m+1).
    """
    states = np.asarray(list(states), dtype=int)
    cont, sw = eta.ratio_arrays(int(states.max()))
    dev = np.abs(cont[states - 1] + sw[states - 1] - 1.0)
    worst = int(np.argmax(dev))
    bad = np.nonzero(dev > tol)[0]
    return NormalizationReport(
        n_checked=states.size,
        max_deviation=float(dev[worst]),
        worst_state=int(states[worst]),
        first_violation=int(states[bad[0]]) if bad.size else None,
        ok=bad.size == 0,
    )


@dataclass(frozen=True, eq=False)
class EquilibriumData:
    """Equilibrium bookkeeping for a run-weight sequence at beta = 1."""

    eta: EtaSequence
    Z: float
    beta: float = 1.0
    lam: float = 1.0

    @classmethod
    def for_eta(cls, eta: EtaSequence) -> "EquilibriumData":
        return cls(eta=eta, Z=equilibrium_normalization(eta))

    def to_json(self) -> str:
        return json.dumps(
            {
                "eta": json.loads(self.eta.to_json()),
                "Z": self.Z,
                "beta": self.beta,
                "lambda": self.lam,
            }
        )


def equilibrium_table(eta: EtaSequence, qmax: int) -> dict:
    """Columns (q, rho, mu_raw, mu_norm, r, J_L) for export.

    J_L is the Jacobian on a leading run of length q, undefined (nan) at
    q = 1 where the value depends on the following run.
    """
    if qmax > eta.n_max:
        raise ValueError(f"qmax={qmax} exceeds n_max={eta.n_max}")
    q = np.arange(1, qmax + 1)
    rho = eta.values[:qmax]
    mu_raw = eta._t_grid[:qmax]
    z = equilibrium_normalization(eta)
    r = mu_raw / rho
    j_l = np.full(qmax, np.nan)
    j_l[1:] = mu_raw[1:] / mu_raw[:-1]
    return {
        "q": q,
        "rho": rho,
        "mu_raw": mu_raw,
        "mu_norm": mu_raw / z,
        "r": r,
        "J_L": j_l,
    }
