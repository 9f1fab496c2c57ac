"""LDPC code machinery: Tanner graph, peeling, stopping sets and puncturing."""

from .alist import AlistError, format_alist, parse_alist, read_alist, write_alist
from .construct import DegreeSpec, has_4cycle, random_ldpc
from .generator import dof_ml, dof_mp, systematic_generator
from .graph import (
    ERASED,
    PeelResult,
    TannerGraph,
    maximal_stopping_set,
    peel_decode,
    peel_schedule,
)
from .puncture import (
    Certificate,
    ErasurePattern,
    PeelableSet,
    PuncturePattern,
    Violation,
    certify_pattern,
    find_puncture_pattern,
)

__all__ = [
    "AlistError",
    "Certificate",
    "DegreeSpec",
    "ERASED",
    "ErasurePattern",
    "PeelResult",
    "PeelableSet",
    "PuncturePattern",
    "TannerGraph",
    "Violation",
    "certify_pattern",
    "dof_ml",
    "dof_mp",
    "find_puncture_pattern",
    "format_alist",
    "has_4cycle",
    "maximal_stopping_set",
    "parse_alist",
    "peel_decode",
    "peel_schedule",
    "random_ldpc",
    "read_alist",
    "systematic_generator",
    "write_alist",
]
