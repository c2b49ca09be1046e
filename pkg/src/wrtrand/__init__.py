"""SO(3) WRT combinatorics and Monte Carlo checks of the |Z(M)| laws."""

__version__ = "0.1.0"

from .tqft import (  # noqa: F401
    Level,
    canonical_spine,
    count_admissible,
    det_exponent,
    dim_mu_ratio,
    enumerate_admissible,
    verlinde_dimension,
)
