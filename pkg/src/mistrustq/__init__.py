"""Mistrustful two-party quantum protocol simulations.

Three protocols with numerically verified security bounds:

- bit-wise string commitment (non-orthogonal qubit encodings),
- codebook string commitment (low-coherence vector packings),
- cut-and-choose coin tossing over Bell singlet batches.
"""

from . import bitwise, codebook, cointoss, harness, qmath
from .errors import SimulationError

__all__ = [
    "bitwise",
    "codebook",
    "cointoss",
    "harness",
    "qmath",
    "SimulationError",
]

__version__ = "0.1.0"
