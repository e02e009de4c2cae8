"""Tilting modules of projective dimension at most two: derived functors,
subcategory classification and the induced filtrations, computed exactly."""
from .exactlin import GF, QQ, Field, Mat, Subspace
from .quivalg import (
    FDAlgebra,
    Module,
    ModuleMap,
    Quiver,
    Relation,
    Subobject,
    build_path_algebra,
    from_structure_constants,
)
from .tiltcore import (
    TiltingContext,
    build_context,
    ext_dims,
    ext_module,
    fundamental_sequence,
    j_table,
    phi,
    psi,
    tor_module,
)
from .filtrate import (
    ClassFlags,
    FiltrationReport,
    canonical_filtration,
    classify,
    ext_closure_witness,
    functoriality_check,
    hom_vanishing_audit,
    maximal_injective_audit,
    refined_filtration,
    trace_crosscheck,
)
from .toolcli import AlgFile, emit_report, parse_algfile, run_command

__version__ = "0.1.0"
