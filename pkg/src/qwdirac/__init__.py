"""Discrete-time quantum walks on the line and their Dirac continuum limits."""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ClassificationError,
    ConfigError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    FamilyError,
    QWError,
    ResolutionError,
)
from .lattice import AngleField, Lattice, SpinorField, build_coin, coin_entries, sample_angles  # noqa: E402
from .walk import (  # noqa: E402
    GaugePhase,
    S2Coefficients,
    build_s2_coefficients,
    evolve,
    gauge_transform,
    gauge_transform_angles,
    shift_fourier,
    step_s1,
    step_s1_fourier,
    step_s2,
)
from .continuum import (  # noqa: E402
    DiracParams,
    Family,
    JetSpec,
    LimitClass,
    classify_jet,
    consistency_residual,
    emit_params,
)
from .dirac import (  # noqa: E402
    DensityField,
    FlatDiracConfig,
    GeodesicPath,
    characteristic_speed,
    delta_n_rel,
    dirac_step_flat,
    evolve_flat,
    integrate_characteristic,
    positive_energy_packet,
)
from .schwarzschild import SchwarzschildConfig, make_schwarzschild_jet, radius, walk_theta  # noqa: E402
