"""Operational cone spaces, correlations, and wire-network evaluation."""

from .spaces import (
    CLASSICAL,
    DEFAULT_TOL,
    QUANTUM_COMPLEX,
    QUANTUM_REAL,
    SPIN_FACTOR,
    CompositeUndefinedError,
    ConeKind,
    ConeSpace,
    Element,
    classical,
    composite_space,
    cone_margin,
    dual_pairing,
    from_matrix,
    in_cone,
    make_space,
    negative_witness,
    product_element,
    quantum_complex,
    quantum_real,
    spin_factor,
    to_matrix,
)

__all__ = [
    "CLASSICAL",
    "DEFAULT_TOL",
    "QUANTUM_COMPLEX",
    "QUANTUM_REAL",
    "SPIN_FACTOR",
    "CompositeUndefinedError",
    "ConeKind",
    "ConeSpace",
    "Element",
    "classical",
    "composite_space",
    "cone_margin",
    "dual_pairing",
    "from_matrix",
    "in_cone",
    "make_space",
    "negative_witness",
    "product_element",
    "quantum_complex",
    "quantum_real",
    "spin_factor",
    "to_matrix",
]
