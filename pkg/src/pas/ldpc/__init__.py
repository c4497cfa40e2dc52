"""LDPC codes: model, alist I/O, systematic encoding and sum-product decoding."""

from .alist import format_alist, load_alist, parse_alist, save_alist
from .code import LdpcCode, SystematicForm, encode, gf2_rank, parity_matrix, systematize
from .construct import hamming74, peg_code
from .decoder import BeliefPropagationDecoder, DecodeResult, decode

__all__ = [
    "BeliefPropagationDecoder",
    "DecodeResult",
    "LdpcCode",
    "SystematicForm",
    "decode",
    "encode",
    "format_alist",
    "gf2_rank",
    "hamming74",
    "load_alist",
    "parity_matrix",
    "parse_alist",
    "peg_code",
    "save_alist",
    "systematize",
]
