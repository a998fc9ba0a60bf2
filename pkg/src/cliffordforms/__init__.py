"""Clifford-algebra automorphic forms on upper half-space."""

from .algebra import (
    HalfSpacePoint,
    Multivector,
    Paravector,
    conjugation,
    format_text,
    from_json,
    geometric_product,
    main_involution,
    parse_text,
    paravector_inverse,
    pq_join,
    pq_split,
    pseudo_norm,
    reversion,
    star,
    to_json,
)
from .vahlen import (
    MIN_ADMISSIBLE_LEVEL,
    PeriodLattice,
    VahlenMatrix,
    automorphy_factor,
    generators,
    in_congruence_subgroup,
    inversion_generator,
    is_sav,
    is_vahlen,
    mobius_apply,
    pseudo_determinant,
    translation,
)
from .cosets import (
    enumerate_cosets,
    enumerate_group_elements,
    enumerate_rows,
    quotient_representatives,
    rep_to_vahlen,
    translation_orbit_classes,
)
from .diffops import (
    FieldFn,
    dirac,
    hypermonogenic_defect,
    kernel_membership,
    kholo_defect,
    lb_defect,
    maass_eigenvalue,
    weinstein_defect,
)
from .series import (
    SeriesSpec,
    TruncatedForm,
    cusp_test,
    eisenstein,
    eisenstein_hecke,
    eisenstein_positive,
    kernel_field,
    kernel_gk,
    maass_lift,
    poincare,
    poincare_positive,
    poincare_slash,
    scale_map,
    slash_transform,
)

__all__ = [
    "HalfSpacePoint",
    "Multivector",
    "Paravector",
    "conjugation",
    "format_text",
    "from_json",
    "geometric_product",
    "main_involution",
    "parse_text",
    "paravector_inverse",
    "pq_join",
    "pq_split",
    "pseudo_norm",
    "reversion",
    "star",
    "to_json",
    "PeriodLattice",
    "VahlenMatrix",
    "automorphy_factor",
    "generators",
    "in_congruence_subgroup",
    "inversion_generator",
    "is_sav",
    "is_vahlen",
    "mobius_apply",
    "pseudo_determinant",
    "translation",
    "MIN_ADMISSIBLE_LEVEL",
    "enumerate_cosets",
    "enumerate_group_elements",
    "enumerate_rows",
    "quotient_representatives",
    "rep_to_vahlen",
    "translation_orbit_classes",
    "FieldFn",
    "dirac",
    "hypermonogenic_defect",
    "kernel_membership",
    "kholo_defect",
    "lb_defect",
    "maass_eigenvalue",
    "weinstein_defect",
    "SeriesSpec",
    "TruncatedForm",
    "cusp_test",
    "eisenstein",
    "eisenstein_hecke",
    "eisenstein_positive",
    "kernel_field",
    "kernel_gk",
    "maass_lift",
    "poincare",
    "poincare_positive",
    "poincare_slash",
    "scale_map",
    "slash_transform",
]

__version__ = "0.1.0"
