"""Numerical laboratory for unitary evolution on a direct-integral space:
exact semigroup reduction, resonance poles and decay laws, scattering
stationarity, superselection, and decoherence diagnostics."""

from .direct_integral import (
    AuxSpace,
    GridMismatchError,
    LpVector,
    SpectralVector,
    SupportMarginWarning,
    TimeGrid,
    check_support_margin,
    from_spectral,
    inner_product,
    norm,
    support_margin,
    to_spectral,
    translate,
)
from .friedrichs import (
    BranchCutError,
    ConvergenceError,
    FlatCoupling,
    FriedrichsModel,
    HalfLineSqrtCoupling,
    ResonancePole,
    SelfEnergyEval,
    UnsupportedContinuationError,
    decay_probability,
    find_resonance_pole,
    self_energy,
    spectral_weight,
    survival_amplitude,
)

__version__ = "0.1.0"
