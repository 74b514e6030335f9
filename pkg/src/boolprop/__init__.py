"""Quantum and classical property testers for Boolean functions.

Identity, correlation and balancedness testing by exact statevector
simulation of amplitude amplification, with classical baselines and a
reproducible benchmark harness.
"""

from boolprop.boolfn import (
    BooleanFunction,
    WalshSpectrum,
    bias,
    builtin,
    correlation,
    dist,
    from_truth_table,
    gen_at_distance,
    gen_with_bias,
    hamming_distance,
    walsh_spectrum_fast,
    walsh_spectrum_naive,
    xor,
)
from boolprop.oracle import OracleHandle

__all__ = [
    "BooleanFunction",
    "OracleHandle",
    "WalshSpectrum",
    "bias",
    "builtin",
    "correlation",
    "dist",
    "from_truth_table",
    "gen_at_distance",
    "gen_with_bias",
    "hamming_distance",
    "walsh_spectrum_fast",
    "walsh_spectrum_naive",
    "xor",
]

__version__ = "0.1.0"
