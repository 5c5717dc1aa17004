"""flatchains: polyhedral chains over normed coefficient groups.

Exact rational chain algebra, slicing by oriented affine planes, flat-norm
bracketing with certified witnesses, the 0-chain / group-valued-measure
correspondence on dyadic cubes, weighted size functionals, and experiment
drivers for the rectifiability criteria they support.
"""

from .groups import (
    BUILTIN_DESCRIPTORS,
    GroupDescriptor,
    GroupElement,
    GroupKind,
    PathSamples,
    classify_group,
    dyadic_length_profile,
    group_norm,
    group_op,
    integers,
    integers_mod,
    padic_integers,
    padic_rationals,
    path_length_lower_bound,
    reals,
    reals_alpha,
)
from .chains import AffineMap, Box, Chain, HalfSpace, RegionSet, Simplex, add_chains, zero_chain
from .zerochains import (
    CanonicalRep,
    DyadicApproximation,
    GMeasure,
    ZeroChain,
    canonical_representation,
    chain_to_measure,
    chi,
    cone_flat_bound,
    measure_to_chain_dyadic,
)
from .slicing import (
    CoordinateProjection,
    GridSpec,
    OrientedAffinePlane,
    deformation_sample,
    grid_cube_chain,
    is_transverse,
    slice_by_plane,
    slice_fiber,
    slice_mass_profile,
)
from .flatnorm import (
    FlatBracket,
    flat_bracket,
    flat_distance,
    flat_exact_zero_chain,
    flat_lower_bound,
    flat_upper_bound,
)
from .weights import (
    WeightFunction,
    classify_phi_rectifiability,
    flat_size,
    phi_mass,
    validate_weight,
)

__all__ = [name for name in dir() if not name.startswith("_")]
