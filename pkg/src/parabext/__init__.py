"""Numerical laboratory for Fourier extension estimates on finite-field paraboloids.

Exact arithmetic in GF(p^l), character sums with their closed forms, the
paraboloid and its isotropic subspaces, direct Fourier transforms and
normalized norms, additive-energy bound monitoring, and lower-bound
estimation of extension-operator constants, tied together by a CLI for
reproducible sweeps.
"""

__version__ = "0.1.0"

from .backend import backend_name
from .characters import (
    CharacterTable,
    gauss_sum_closed_form,
    quadratic_exponential_sum,
    square_sum,
)
from .energy import (
    EnergyBoundReport,
    additive_energy,
    additive_energy_bruteforce,
    energy_bound_report,
    l4_extension_norm_from_energy,
    representation_function,
    run_energy_sweep,
    second_moment_decomposition,
)
from .field import Field, FieldElement, field_from_string, make_field, parse_prime_power
from .fourier import (
    ExponentPair,
    GridFunction,
    SurfaceFunction,
    extend,
    extension_norm,
    hat,
    hat_dm,
    indicator,
    l2_identity_check,
    norm_grid,
    norm_surface,
    ones_on,
    restrict,
    sigma_inverse_closed_form,
    sigma_inverse_closed_form_grid,
)
from .geometry import (
    Paraboloid,
    Point,
    SurfaceSubset,
    build_isotropic_subspace,
    build_paraboloid,
    dilate_subset,
    necessary_condition_sides,
    sample_subset,
    translate_subset,
)
from .norms import (
    NormEstimate,
    bochner_riesz_kernel,
    convolve_dm,
    endpoint_exponents,
    endpoint_sweep,
    estimate_extension_constant,
    kernel_transform_identity_error,
    ratio,
    stein_tomas_checks,
    subspace_witness_ratio,
)

__all__ = [name for name in dir() if not name.startswith("_")]
