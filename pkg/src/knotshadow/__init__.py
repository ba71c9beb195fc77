"""Knot projections as combinatorial maps, Reidemeister moves and box certificates."""
from .curve import (
    TRIVIAL,
    Face,
    KnotProjection,
    SignedGaussCode,
    canonical_form,
    census,
    faces,
    from_signed_gauss,
    from_structured,
    realize_unsigned,
    to_signed_gauss,
)
from .errors import (
    CertificateContradiction,
    DartNotInProjection,
    Disconnected,
    InvalidMap,
    KnotShadowError,
    MalformedCertificate,
    NotDoubleOccurrence,
    NotSpherical,
    ParameterOutOfDomain,
    ParseError,
    StaleMoveInstance,
    UnclassifiableCase,
)
from .moves import MoveInstance, MoveKind, apply_move, enumerate_moves, inverse_of

__version__ = "0.1.0"

__all__ = [
    "TRIVIAL", "Face", "KnotProjection", "SignedGaussCode", "canonical_form", "census", "faces",
    "from_signed_gauss", "from_structured", "realize_unsigned", "to_signed_gauss",
    "CertificateContradiction", "DartNotInProjection", "Disconnected", "InvalidMap", "KnotShadowError",
    "MalformedCertificate", "NotDoubleOccurrence", "NotSpherical", "ParameterOutOfDomain", "ParseError",
    "StaleMoveInstance", "UnclassifiableCase",
    "MoveInstance", "MoveKind", "apply_move", "enumerate_moves", "inverse_of",
]
