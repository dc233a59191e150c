"""Equivariant contracting maps and fields, the fibrations they define,
properness searches and the one-point extension toolkit."""

from ..lengths import admissibility_test, dlambda, length_ratio_sup
from .extension import kirszbraun_extend_point, toponogov_check, toponogov_sides
from .fibration import (FibrationHandle, collinearity, elliptic_generator, fixed_point,
                        fixed_points, macro_member, micro_fiber, micro_member, project_macro,
                        project_micro, transition_fiber_check, zero_of_field, zeros_of_field)
from .fields import (EquivariantField, field_lipschitz_pair, first_variation, killing_field,
                     radial_field, sum_field)
from .maps import (EquivariantMap, compose_isometry, constant_map, contraction_toward,
                   identity_map, interpolate_maps, lipschitz_bound_sampled, strip_collapse_map,
                   stretch_locus_sample)
from .properness import properness_violation_search

__all__ = [
    "EquivariantField", "EquivariantMap", "FibrationHandle", "admissibility_test",
    "collinearity", "compose_isometry", "constant_map", "contraction_toward", "dlambda",
    "elliptic_generator", "field_lipschitz_pair", "first_variation", "fixed_point",
    "fixed_points", "identity_map", "interpolate_maps", "killing_field",
    "kirszbraun_extend_point", "length_ratio_sup", "lipschitz_bound_sampled", "macro_member",
    "micro_fiber", "micro_member", "project_macro", "project_micro",
    "properness_violation_search", "radial_field", "stretch_locus_sample",
    "strip_collapse_map", "sum_field", "toponogov_check", "toponogov_sides",
    "transition_fiber_check", "zero_of_field", "zeros_of_field",
]
