"""Finite-dimensional algebras and their modules."""
from .algebra import (
    AlgebraMismatch,
    Arrow,
    BasisElement,
    FDAlgebra,
    NonAdmissible,
    Quiver,
    Relation,
    build_path_algebra,
    from_structure_constants,
)
from .module import (
    Module,
    ModuleMap,
    NotIso,
    ProjectiveModule,
    Subobject,
    ValidationError,
    cokernel,
    direct_sum,
    dual,
    dual_map,
    dual_regular,
    find_isomorphism,
    free_module,
    hom_basis,
    hom_dimension,
    image_of_subobject,
    image_subobject,
    induced_on_quotients,
    injective_module,
    invert_iso,
    is_isomorphic,
    kernel_subobject,
    map_from_generators,
    random_map,
    random_module,
    random_projective_map,
    preimage,
    projective_cover,
    projective_module,
    quotient,
    radical,
    regular_module,
    restrict,
    simple_module,
    socle,
    socle_top_radical,
    sum_of_images,
    top,
    top_generators,
    trace_of,
    zero_module,
)
