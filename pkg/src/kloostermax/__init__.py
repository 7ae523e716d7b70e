"""Maxima of incomplete Kloosterman and Birch sums at desk-scale primes."""

__version__ = "0.1.0"

from .errors import DomainError, NumericalIntegrityError
from .modular import INFINITY, MoebiusMap, is_odd_prime, mod_inverse, moebius_apply
from .families import (
    FamilySpec,
    SumTable,
    angle_table,
    batch_complete_sums,
    birch,
    complete_sum,
    fourier_map,
    kloosterman,
)
from .incomplete import PrefixProfile, max_scan, prefix_profile, pv_ratio, short_sum_extremum
from .fejer import (
    estimator_lower_bound,
    fejer_kernel,
    fourier_partial,
    odd_harmonic_bound,
)
from .selberg import (
    SelbergPair,
    cheb_u,
    choose_L,
    delta_constant,
    selberg_pair,
    st_integrate,
)
from .experiments import (
    MomentReport,
    SignPattern,
    SignSearchReport,
    block_moment,
    equidist_matrix,
    max_moments,
    sign_pattern_search,
    tail_distribution,
)
