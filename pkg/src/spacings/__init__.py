"""Order statistics of the spacings between uniform order statistics.

Exact survival functions, band probabilities, expectations and critical
values for the k-th smallest of the n+1 spacings of n uniform points, with an
independent box-volume oracle and seeded Monte Carlo for verification.
"""

from .exact import (
    BandQuery,
    GapSpec,
    TailQuery,
    TruncatedPowerTerm,
    band_probability,
    cdf,
    joint_exceedance,
    max_gap_survival,
    survival,
    tail_pvalue,
)
from .geometry import (
    Box,
    HalfSpace,
    box_halfspace_volume,
    oracle_band_probability,
    oracle_joint_exceedance,
    oracle_survival,
    tail_measure_power,
)
from .moments import (
    Breakpoints,
    ConvergenceError,
    HarmonicTable,
    expected_gap,
    harmonic,
    integrate_survival,
    mean_asymptotics,
    quantile,
)
from .scalar import (
    CountError,
    DimensionError,
    RankError,
    Scalar,
    SpacingsError,
    ThresholdError,
)
from .simulate import SimConfig, SimReport, sample_gaps, verify

__version__ = "0.1.0"
