"""Run-structure thermodynamic formalism on the binary full shift.

The library computes, end to end and with certified numerics:

* summable run-weight sequences eta_n with analytic tail control
  (:mod:`runshift.sequences`);
* the Walters-class potential they define, its explicit transfer-operator
  eigenfunction, eigenmeasure, equilibrium cylinder masses, and stochastic
  Jacobian (:mod:`runshift.potential`);
* two renormalization operators on coefficient sequences and their
  closed-form fixed points, one via quadrature of a kernel integral against
  the maximal-entropy measure of a digit-restricted Cantor set
  (:mod:`runshift.renorm`, :mod:`runshift.cantor`);
* decay of correlations of the 0-cylinder indicator through renewal
  recursions and double tails (:mod:`runshift.decay`), cross-validated by
  an independent run-length Markov chain oracle (:mod:`runshift.oracle`).

A batch CLI (``runshift``) wires the pieces together reproducibly.
"""

__version__ = "0.1.0"

from .cantor import (
    CantorMeasure,
    DigitSystem,
    monte_carlo_integral,
    quadrature,
    quadrature_values,
    self_similarity_check,
)
from .decay import (
    RenewalSeries,
    correlation_asymptotic,
    decay_table,
    iterates_from_run,
    renewal_deficits,
    renewal_series,
    stretched_tail_report,
    transfer_iterates,
)
from .oracle import (
    RenewalChain,
    build_chain,
    correlation,
    cylinder_probability,
    occupation_probability,
    occupation_sweep,
    sample_paths,
    stationarity_defect,
)
from .potential import (
    ALL_ONES,
    ALL_ZEROS,
    ONE_THEN_ZEROS,
    ZERO_THEN_ONES,
    EquilibriumData,
    SymbolicPoint,
    check_normalization,
    eigenfunction,
    eigenmeasure_cylinder,
    equilibrium_cylinder,
    equilibrium_normalization,
    equilibrium_table,
    inner_ones,
    inner_zeros,
    jacobian,
    lead_ones,
    lead_zeros,
    potential_value,
    zero_cylinder_mass,
)
from .renorm import (
    GammaFit,
    QuadratureFixedPoint,
    WaltersCoefficients,
    coeffs_from_eta,
    estimate_gamma,
    eta_from_coeffs,
    renorm1_apply,
    renorm1_fixed_point,
    renorm2_apply,
    renorm2_digit_indices,
    renorm2_fixed_point,
    residual,
)
from .sequences import (
    EtaSequence,
    NotSummableError,
    ToleranceError,
    decay_profile,
    inverse_design,
    make_eta,
    sequence_table,
    verify_design_shift,
)
