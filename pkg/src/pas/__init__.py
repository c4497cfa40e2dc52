"""Probabilistic amplitude shaping for ASK/QAM over the AWGN channel."""

from .ccdm import Composition, MatcherSpec, choose_composition, dematch, match
from .constellation import AskConstellation, LabelingKind, build_constellation
from .infotheory import mutual_information, rbmd, rbmd_value
from .pipeline import BitMapper, PasMode, UniformMode, pas_decode, pas_encode, receive, transmit
from .shaping import ShapedInput, optimize_input, solve_nu, solve_rate
from .sim import OperatingPoint, StopRule, adapt, find_operating_point, run_fer

__version__ = "0.1.0"

__all__ = [
    "AskConstellation",
    "BitMapper",
    "Composition",
    "LabelingKind",
    "MatcherSpec",
    "OperatingPoint",
    "PasMode",
    "ShapedInput",
    "StopRule",
    "UniformMode",
    "adapt",
    "build_constellation",
    "choose_composition",
    "dematch",
    "find_operating_point",
    "match",
    "mutual_information",
    "optimize_input",
    "pas_decode",
    "pas_encode",
    "rbmd",
    "rbmd_value",
    "receive",
    "run_fer",
    "solve_nu",
    "solve_rate",
    "transmit",
]
