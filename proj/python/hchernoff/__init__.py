"""Heat and Schrodinger evolution on the Heisenberg group by Chernoff iteration.

Points are flat sequences ``(x^1..x^d, y^1..y^d, s)``. Field samples are numpy
arrays shaped like the grid, axes ordered ``x.., y.., s``.
"""

from ._core import (
    CausticError,
    DimensionError,
    Field,
    Grid,
    NumericalAbort,
    Potential,
    RepresentationError,
    apply_sublaplacian,
    caustic_distance,
    dilate,
    evolve_heat,
    evolve_schrodinger,
    fk_estimate,
    fk_estimate_with_budget,
    group_inv,
    group_mul,
    heat_step,
    inverse_partial_ft,
    koranyi_dist,
    koranyi_gauge,
    levy_area_samples,
    make_packet,
    mehler_kernel,
    oracle_evolve,
    oracle_point,
    partial_ft,
    relative_l2_error,
    sample_bm_levy,
    schrodinger_step,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
