"""Exhaustive enumeration of Williamson sequences of orders divisible by 2 or 3.

Pipeline: rowsum decompositions of 4n into four squares, PSD-filtered
candidate generation, m-compression and sorted-join matching, CNF
uncompression, and an all-solutions CDCL solver with a programmatic PSD
callback; plus the doubling and 8-Williamson constructions, Hadamard
assembly, equivalence-class canonicalization, and a brute-force oracle.
"""

from .seqcore import (
    CompressedSequence,
    Quadruple,
    SymmetricSequence,
    compress,
    paf,
    psd,
    psd_filter,
    rowsum,
    verify_williamson,
)
from .diophantine import RowsumDecomposition, decompose_four_squares, sign_fix
from .equivalence import apply_equivalence, canonical_form, dedupe, expand_class
from .constructions import (
    HadamardMatrix,
    OctupleSequence,
    assemble_hadamard,
    double,
    extract_eight_williamson,
    interleave,
    shift_half,
)
from .oracle import brute_force_enumerate, brute_force_uncompress
from .cli import RunConfig, run_enumeration

__all__ = [
    "CompressedSequence",
    "Quadruple",
    "SymmetricSequence",
    "compress",
    "paf",
    "psd",
    "psd_filter",
    "rowsum",
    "verify_williamson",
    "RowsumDecomposition",
    "decompose_four_squares",
    "sign_fix",
    "apply_equivalence",
    "canonical_form",
    "dedupe",
    "expand_class",
    "HadamardMatrix",
    "OctupleSequence",
    "assemble_hadamard",
    "double",
    "extract_eight_williamson",
    "interleave",
    "shift_half",
    "brute_force_enumerate",
    "brute_force_uncompress",
    "RunConfig",
    "run_enumeration",
]
