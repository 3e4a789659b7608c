"""Invariant sequences of the unitary DFT and real-adder-channel transceivers."""

__version__ = "0.1.0"

from .sequence import (
    EIGENVALUES,
    Eigenvalue,
    basis,
    cyclic_convolve,
    dft,
    even_part,
    idft,
    odd_part,
    time_reverse,
)
from .eigen import (
    InvariantSequence,
    MappingMatrix,
    classify,
    generate_family,
    generate_prop1,
    generate_prop2,
    generating_function_gm,
    mapping_matrix,
    project,
    simplest_seed,
)
from .rac import EigenspaceSelection, channel_superpose, decode, decode2, decode3, decode4
from .txrx import (
    FrameConfig,
    SignaturePool,
    SymbolEstimate,
    ad_convert,
    add_noise,
    da_convert,
    dynamic_range,
    estimate_signature,
    receive_fast2,
    receive_full,
    transmit,
)

__all__ = [
    "EIGENVALUES", "Eigenvalue", "basis", "cyclic_convolve", "dft", "even_part", "idft",
    "odd_part", "time_reverse",
    "InvariantSequence", "MappingMatrix", "classify", "generate_family", "generate_prop1",
    "generate_prop2", "generating_function_gm", "mapping_matrix", "project", "simplest_seed",
    "EigenspaceSelection", "channel_superpose", "decode", "decode2", "decode3", "decode4",
    "FrameConfig", "SignaturePool", "SymbolEstimate", "ad_convert", "add_noise", "da_convert",
    "dynamic_range", "estimate_signature", "receive_fast2", "receive_full", "transmit",
]
