"""PAS transceiver: matcher output -> labels -> systematic encoder -> signs, and
the bit-metric receive chain back to amplitudes and sign data.

Codeword layout (systematic order, ``n = m * n_c``): ``m - 1`` blocks of
``n_c`` amplitude-label bits ordered by the bit-mapper's level order, then one
block of ``n_c`` sign bits. The sign block starts with the ``gamma * n_c``
data signs (still systematic) and ends with the parity bits. Within a block,
bit ``j`` belongs to symbol ``j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from . import ccdm
from .constellation import AskConstellation
from .errors import CompositionMismatchError, NotInCodebookError, UnsupportedRateError
from .ldpc import BeliefPropagationDecoder, LdpcCode, encode
from .shaping import ShapedInput


def gamma_of(code_rate, m: int) -> Fraction:
    """Fraction of sign labels that carry data for a rate ``code_rate`` code on ``2^m``-ASK."""
    c = Fraction(code_rate).limit_denominator(10**6) if isinstance(code_rate, float) else Fraction(code_rate)
    if not Fraction(m - 1, m) <= c < 1:
        raise UnsupportedRateError(f"code rate {c} is outside [{m - 1}/{m}, 1) for {2**m}-ASK")
    return 1 - (1 - c) * m


@dataclass(frozen=True)
class BitMapper:
    """Order in which amplitude levels 2..m occupy the codeword; the sign level 1 is last."""

    level_order: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(v) for v in self.level_order)
        if sorted(levels) != list(range(2, len(levels) + 2)):
            raise ValueError(f"level order {levels} is not a permutation of 2..{len(levels) + 1}")
        object.__setattr__(self, "level_order", levels)

    @classmethod
    def default(cls, m: int) -> "BitMapper":
        return cls(tuple(range(m, 1, -1)))

    @classmethod
    def parse(cls, text: str) -> "BitMapper":
        levels = [int(v) for v in text.replace("(", "").replace(")", "").split(",") if v.strip()]
        if levels and levels[-1] == 1:
            levels = levels[:-1]
        return cls(tuple(levels))

    @property
    def m(self) -> int:
        return len(self.level_order) + 1

    @property
    def notation(self) -> tuple[int, ...]:
        return self.level_order + (1,)

    def __str__(self):
        return "(" + ",".join(map(str, self.notation)) + ")"

    def block_levels(self) -> np.ndarray:
        """Label level (1-based) carried by each codeword block."""
        return np.asarray(self.notation, dtype=np.int64)

    def interleave(self, labels: np.ndarray) -> np.ndarray:
        """``(..., n_c, m)`` point labels (sign first) -> ``(..., m*n_c)`` codeword order."""
        blocks = labels[..., self.block_levels() - 1]
        return np.swapaxes(blocks, -1, -2).reshape(*labels.shape[:-2], -1)

    def deinterleave(self, word: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`interleave`."""
        m = self.m
        n_c = word.shape[-1] // m
        blocks = np.swapaxes(word.reshape(*word.shape[:-1], m, n_c), -1, -2)
        out = np.empty_like(blocks)
        out[..., self.block_levels() - 1] = blocks
        return out


@dataclass(frozen=True, eq=False)
class PasMode:
    """Constellation, systematic code, sign-data fraction, bit-mapper and matcher.

    ``design`` is the input distribution the demapper assumes as prior; its
    scaling is the operating ``delta``.
    """

    constellation: AskConstellation
    code: LdpcCode
    design: ShapedInput
    matcher: ccdm.MatcherSpec
    bitmapper: BitMapper
    name: str = "pas"
    decoder: BeliefPropagationDecoder = field(init=False, repr=False)

    def __post_init__(self):
        m = self.constellation.m
        code = self.code.systematic()
        object.__setattr__(self, "code", code)
        n, k = code.n, code.k
        if n % m:
            raise UnsupportedRateError(f"code length {n} is not a multiple of m={m}")
        n_c = n // m
        gamma = gamma_of(Fraction(k, n), m)
        if self.bitmapper.m != m:
            raise ValueError("bit-mapper does not match the constellation")
        if self.matcher.n != n_c:
            raise UnsupportedRateError(f"matcher length {self.matcher.n} differs from n_c={n_c}")
        if gamma * n_c != int(gamma * n_c):
            raise UnsupportedRateError("gamma * n_c is not an integer")
        if set(self.matcher.composition.amplitudes) - set(self.constellation.amplitudes.tolist()):
            raise ValueError("matcher composition uses amplitudes outside the alphabet")
        object.__setattr__(self, "decoder", BeliefPropagationDecoder(code))

    @property
    def m(self) -> int:
        return self.constellation.m

    @property
    def n_c(self) -> int:
        return self.code.n // self.m

    @property
    def gamma(self) -> Fraction:
        return gamma_of(Fraction(self.code.k, self.code.n), self.m)

    @property
    def num_sign_data(self) -> int:
        return int(self.gamma * self.n_c)

    @property
    def delta(self) -> float:
        return self.design.delta

    @property
    def k_c(self) -> int:
        return self.matcher.k + self.num_sign_data

    @property
    def spectral_efficiency(self) -> float:
        return self.k_c / self.n_c

    @property
    def design_rate(self) -> float:
        """``H(A) + gamma`` of the design distribution."""
        return self.design.amplitude_entropy() + float(self.gamma)

    def with_delta(self, delta: float) -> "PasMode":
        return replace(self, design=self.design.with_delta(delta))

    def with_snr_db(self, snr_db: float) -> "PasMode":
        return replace(self, design=self.design.with_power(10 ** (snr_db / 10)))

    def with_bitmapper(self, bitmapper: BitMapper) -> "PasMode":
        return replace(self, bitmapper=bitmapper)


def _as_batch(arr, width, what):
    arr = np.asarray(arr)
    single = arr.ndim == 1
    arr2 = np.atleast_2d(arr)
    if arr2.shape[-1] != width:
        raise ValueError(f"expected {width} {what} per frame, got {arr2.shape[-1]}")
    return arr2, single


def pas_encode(mode: PasMode, amplitudes, sign_data=None) -> np.ndarray:
    """Scaled channel symbols for ``n_c`` amplitudes and ``gamma*n_c`` sign-data bits.

    Accepts one frame (1-D) or a batch (rows).
    """
    const = mode.constellation
    amps, single = _as_batch(amplitudes, mode.n_c, "amplitudes")
    if sign_data is None:
        sign_data = np.zeros((amps.shape[0], 0), dtype=np.uint8)
    signs_in, _ = _as_batch(np.asarray(sign_data, dtype=np.uint8).reshape(amps.shape[0], -1), mode.num_sign_data, "sign bits")
    if np.any(signs_in > 1):
        raise ValueError("sign data must be bits")

    amp_labels = const.labeling.table[const.amplitude_index(amps)]  # (B, n_c, m-1)
    blocks = [amp_labels[:, :, lvl - 2] for lvl in mode.bitmapper.level_order]
    data = np.concatenate(blocks + [signs_in], axis=1).astype(np.uint8)
    word = encode(mode.code, data)
    sign_bits = word[:, (mode.m - 1) * mode.n_c :]
    symbols = mode.delta * amps * (2.0 * sign_bits - 1.0)
    return symbols[0] if single else symbols


def codeword_of(mode: PasMode, symbols) -> np.ndarray:
    """Codeword bits implied by noiseless scaled symbols (for checks and dumps)."""
    const = mode.constellation
    x = np.rint(np.asarray(symbols) / mode.delta).astype(np.int64)
    labels = const.point_bits[const.point_index(x)]
    return mode.bitmapper.interleave(labels)


def demap_points(y, points, probs, point_bits, delta, noise_var: float = 1.0) -> np.ndarray:
    """Per-level LLRs ``log P(B_i=0|y)/P(B_i=1|y)``; returns ``(..., m)``."""
    y = np.asarray(y, dtype=float)
    support = probs > 0
    x = delta * np.asarray(points, dtype=float)[support]
    metric = np.log(probs[support]) - (y[..., None] - x) ** 2 / (2.0 * noise_var)
    bits = point_bits[support]
    m = point_bits.shape[1]
    out = np.empty(y.shape + (m,))
    for level in range(m):
        zero = bits[:, level] == 0
        l0 = logsumexp(np.where(zero, metric, -np.inf), axis=-1)
        l1 = logsumexp(np.where(~zero, metric, -np.inf), axis=-1)
        out[..., level] = l0 - l1
    return out


def demap(mode: PasMode, y) -> np.ndarray:
    """Codeword-order LLR frame(s) for channel outputs ``y`` (unit noise variance)."""
    const = mode.constellation
    llr = demap_points(y, const.points, np.asarray(mode.design.probs), const.point_bits, mode.delta)
    return mode.bitmapper.interleave(llr)


@dataclass
class PasDecodeResult:
    amplitudes: np.ndarray
    sign_data: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    codeword: np.ndarray


def pas_decode(mode: PasMode, y, max_iter: int = 100) -> PasDecodeResult:
    const = mode.constellation
    y2, single = _as_batch(y, mode.n_c, "channel outputs")
    llr = demap(mode, y2)
    res = mode.decoder.decode(llr, max_iter)
    labels = mode.bitmapper.deinterleave(res.bits)  # (B, n_c, m)
    amp_bits = labels[:, :, 1:].astype(np.int64)
    weights = 1 << np.arange(mode.m - 2, -1, -1)
    row_of_code = np.empty(const.num_amplitudes, dtype=np.int64)
    row_of_code[const.labeling.table.astype(np.int64) @ weights] = np.arange(const.num_amplitudes)
    amps = const.amplitudes[row_of_code[amp_bits @ weights]]
    start = (mode.m - 1) * mode.n_c
    sign_data = res.bits[:, start : start + mode.num_sign_data]
    out = PasDecodeResult(amps, sign_data, res.converged, res.iterations, res.bits)
    if single:
        return PasDecodeResult(amps[0], sign_data[0], bool(res.converged[0]), int(res.iterations[0]), res.bits[0])
    return out


# --- whole frames: bits in, bits out -----------------------------------------


def transmit(mode: PasMode, data_bits) -> np.ndarray:
    """Map ``k_c`` data bits (matcher bits first, then sign data) to symbols."""
    data, single = _as_batch(np.asarray(data_bits, dtype=np.uint8), mode.k_c, "data bits")
    kc = mode.matcher.k
    amps = np.stack([ccdm.match(mode.matcher, row[:kc]) for row in data])
    symbols = pas_encode(mode, amps, data[:, kc:])
    return symbols[0] if single else symbols


def receive(mode: PasMode, y, max_iter: int = 100):
    """Estimate the data bits; ``None`` for frames the dematcher rejects."""
    y2, single = _as_batch(y, mode.n_c, "channel outputs")
    dec = pas_decode(mode, y2, max_iter)
    frames = []
    for amps, signs in zip(dec.amplitudes, dec.sign_data):
        try:
            bits = ccdm.dematch(mode.matcher, amps)
        except (CompositionMismatchError, NotInCodebookError):
            frames.append(None)
            continue
        frames.append(np.concatenate([bits, signs]).astype(np.uint8))
    return (frames[0], dec) if single else (frames, dec)


# --- uniform-input BICM reference --------------------------------------------


@dataclass(frozen=True, eq=False)
class UniformMode:
    """Uniform-input BICM with an arbitrary-rate code, same codeword layout as PAS."""

    constellation: AskConstellation
    code: LdpcCode
    bitmapper: BitMapper
    delta: float = 1.0
    name: str = "uniform"
    decoder: BeliefPropagationDecoder = field(init=False, repr=False)

    def __post_init__(self):
        code = self.code.systematic()
        object.__setattr__(self, "code", code)
        if code.n % self.constellation.m:
            raise UnsupportedRateError("code length is not a multiple of m")
        object.__setattr__(self, "decoder", BeliefPropagationDecoder(code))

    @property
    def m(self) -> int:
        return self.constellation.m

    @property
    def n_c(self) -> int:
        return self.code.n // self.m

    @property
    def k_c(self) -> int:
        return self.code.k

    @property
    def spectral_efficiency(self) -> float:
        return self.k_c / self.n_c

    @property
    def design(self) -> ShapedInput:
        return ShapedInput.uniform(self.constellation, self.delta)

    def with_snr_db(self, snr_db: float) -> "UniformMode":
        return replace(self, delta=self.design.with_power(10 ** (snr_db / 10)).delta)


def uniform_transmit(mode: UniformMode, data_bits) -> np.ndarray:
    data, single = _as_batch(np.asarray(data_bits, dtype=np.uint8), mode.k_c, "data bits")
    word = encode(mode.code, data)
    labels = mode.bitmapper.deinterleave(word)
    const = mode.constellation
    weights = 1 << np.arange(mode.m - 1, -1, -1)
    point_of_label = np.empty(const.size, dtype=np.int64)
    point_of_label[const.point_bits.astype(np.int64) @ weights] = np.arange(const.size)
    symbols = mode.delta * const.points[point_of_label[labels.astype(np.int64) @ weights]]
    return symbols[0] if single else symbols


def uniform_receive(mode: UniformMode, y, max_iter: int = 100):
    y2, single = _as_batch(y, mode.n_c, "channel outputs")
    const = mode.constellation
    probs = np.full(const.size, 1.0 / const.size)
    llr = mode.bitmapper.interleave(demap_points(y2, const.points, probs, const.point_bits, mode.delta))
    res = mode.decoder.decode(llr, max_iter)
    data = res.bits[:, : mode.k_c]
    return (data[0], res) if single else (list(data), res)


# --- bit-mapper search --------------------------------------------------------


@dataclass
class BitMapperReport:
    best: BitMapper
    candidates: list[tuple[BitMapper, float, float]]


def optimize_bitmapper(mode, snr_db, frames_per_candidate: int = 200, seed: int = 0, max_iter: int = 100) -> BitMapperReport:
    """Try every amplitude-level order and keep the lowest-FER one.

    ``snr_db`` may be a single value or a grid; errors are pooled over the grid.
    Ties go to the lexicographically smallest level order.
    """
    from .sim import StopRule, run_fer

    grid = [snr_db] if np.isscalar(snr_db) else list(snr_db)
    m = mode.m
    orders = sorted(itertools.permutations(range(2, m + 1)))
    if len(orders) == 1:
        bm = BitMapper(orders[0])
        return BitMapperReport(bm, [(bm, math.nan, math.nan)])
    rows = []
    for order in orders:
        bm = BitMapper(order)
        candidate = replace(mode, bitmapper=bm)
        errors = frames = 0
        for snr in grid:
            op = run_fer(candidate, snr, StopRule(min_errors=frames_per_candidate + 1, max_frames=frames_per_candidate), seed=seed, max_iter=max_iter)
            errors += op.errors
            frames += op.frames
        p = errors / frames
        rows.append((bm, p, 1.96 * math.sqrt(p * (1 - p) / frames)))
    best = min(rows, key=lambda r: (r[1], r[0].level_order))[0]
    return BitMapperReport(best, rows)
