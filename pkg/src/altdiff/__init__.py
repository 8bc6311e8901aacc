"""Differential experiments with alternative parallel operations.

Tools for building alternative group operations on binary vector
spaces, checking linearity of diffusion layers with respect to them,
and running exact and simulated differential searches on a 16-bit toy
SPN.
"""

from .errors import (AltDiffError, CapacityError, DegenerateOperationError,
                     DimensionError, FormatError, VerificationError)
from .gf2 import BinMatrix, block_matrix
from .ops import (AltOperation, Operation, ParallelOperation, XorOp, make_op,
                  op_from_text, op_to_text, parallel, parse_op)
from .hcirc import (HCircStructure, block_diagonal, block_permutation,
                    conjecture_bound, enumerate_gl, enumerate_hcirc,
                    hcirc_order, is_circ_linear, parallel_hcirc_witnesses,
                    structure_check)
from .cipher import (BUILTIN_CIPHERS, CipherSpec, DDTable, LongKey, SboxSpec,
                     cipher_from_text, cipher_to_text, ddt, decrypt, encrypt,
                     encrypt_all, keygen, load_cipher, paper16, round_states,
                     sub_layer)
from .analysis import (BestDifferential, DiffDistribution, RoundEngine,
                       SearchReport, TripleEstimate, curve_csv, markov_best,
                       markov_prob, montecarlo_best, montecarlo_triples,
                       search)

__version__ = "0.1.0"

__all__ = [
    "AltDiffError", "CapacityError", "DegenerateOperationError",
    "DimensionError", "FormatError", "VerificationError",
    "BinMatrix", "block_matrix",
    "AltOperation", "Operation", "ParallelOperation", "XorOp", "make_op",
    "op_from_text", "op_to_text", "parallel", "parse_op",
    "HCircStructure", "block_diagonal", "block_permutation",
    "conjecture_bound", "enumerate_gl", "enumerate_hcirc", "hcirc_order",
    "is_circ_linear", "parallel_hcirc_witnesses", "structure_check",
    "BUILTIN_CIPHERS", "CipherSpec", "DDTable", "LongKey", "SboxSpec",
    "cipher_from_text", "cipher_to_text", "ddt", "decrypt", "encrypt",
    "encrypt_all", "keygen", "load_cipher", "paper16", "round_states",
    "sub_layer",
    "BestDifferential", "DiffDistribution", "RoundEngine", "SearchReport",
    "TripleEstimate", "curve_csv", "markov_best", "markov_prob",
    "montecarlo_best", "montecarlo_triples", "search",
    "__version__",
]
