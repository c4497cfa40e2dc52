"""Constant-composition distribution matcher with exact integer arithmetic.

The matcher is an arithmetic decoder whose branch probability for amplitude
``a`` is (remaining count of ``a``) / (remaining length). Under that model
every sequence of the composition gets the same probability ``1/M`` with ``M``
the multinomial coefficient, so interval bookkeeping reduces to lexicographic
ranks: input ``v`` (k bits) maps to the sequence of rank ``floor(v*M/2^k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CompositionMismatchError, InvalidMatcherError, NotInCodebookError


def multinomial(counts) -> int:
    total, out = 0, 1
    for c in counts:
        total += int(c)
        out *= math.comb(total, int(c))
    return out


@dataclass(frozen=True)
class Composition:
    """Occurrence count per amplitude; the amplitude order is the coder's symbol order."""

    amplitudes: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.amplitudes) != len(self.counts):
            raise ValueError("amplitudes and counts differ in length")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        if len(set(self.amplitudes)) != len(self.amplitudes):
            raise ValueError("amplitudes must be distinct")

    @property
    def n(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.amplitudes, self.counts))

    def empirical(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    def to_json(self) -> dict:
        return {"amplitudes": list(self.amplitudes), "counts": list(self.counts)}

    @classmethod
    def from_json(cls, data: dict) -> "Composition":
        return cls(tuple(int(a) for a in data["amplitudes"]), tuple(int(c) for c in data["counts"]))


def _type_divergence(counts: np.ndarray, n: int, probs: np.ndarray) -> float:
    used = counts > 0
    if np.any(probs[used] <= 0):
        return math.inf
    c = counts[used]
    return float((c * np.log2(c / (n * probs[used]))).sum())


def choose_composition(amp_probs, n: int, amplitudes=None) -> Composition:
    """The n-type closest to ``amp_probs`` in divergence.

    Starts from largest-remainder rounding and applies improving single-unit
    moves until none is left. Ties go to the lowest index pair.
    """
    probs = np.asarray(amp_probs, dtype=float)
    if n < 1:
        raise ValueError("length must be positive")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("amplitude distribution is not normalized")
    if amplitudes is None:
        amplitudes = range(len(probs))
    amplitudes = tuple(int(a) for a in amplitudes)

    scaled = probs * n
    counts = np.floor(scaled).astype(np.int64)
    short = n - int(counts.sum())
    order = np.argsort(-(scaled - counts), kind="stable")
    counts[order[:short]] += 1

    best = _type_divergence(counts, n, probs)
    improved = True
    while improved:
        improved = False
        for src in range(len(counts)):
            if counts[src] == 0:
                continue
            for dst in range(len(counts)):
                if dst == src or probs[dst] == 0:
                    continue
                counts[src] -= 1
                counts[dst] += 1
                d = _type_divergence(counts, n, probs)
                if d < best - 1e-12:
                    best = d
                    improved = True
                    break
                counts[src] += 1
                counts[dst] -= 1
            if improved:
                break
    return Composition(amplitudes, tuple(int(c) for c in counts))


def derive_k(composition: Composition) -> int:
    """Largest k with ``2^k`` no larger than the number of sequences."""
    return multinomial(composition.counts).bit_length() - 1


@dataclass(frozen=True)
class MatcherSpec:
    composition: Composition
    k: int
    size: int = field(init=False, repr=False)

    def __post_init__(self):
        size = multinomial(self.composition.counts)
        if self.k < 0 or (1 << self.k) > size:
            raise InvalidMatcherError(
                f"k={self.k} exceeds floor(log2 {size}) for composition {self.composition.counts}"
            )
        object.__setattr__(self, "size", size)

    @classmethod
    def for_composition(cls, composition: Composition, k: int | None = None) -> "MatcherSpec":
        return cls(composition, derive_k(composition) if k is None else k)

    @property
    def n(self) -> int:
        return self.composition.n

    @property
    def rate(self) -> float:
        return self.k / self.n

    def to_json(self) -> dict:
        return {"composition": self.composition.to_json(), "k": self.k}

    @classmethod
    def from_json(cls, data: dict) -> "MatcherSpec":
        return cls(Composition.from_json(data["composition"]), int(data["k"]))


def bits_to_int(bits) -> int:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return 0
    if np.any(bits > 1):
        raise ValueError("bit values must be 0 or 1")
    pad = (-bits.size) % 8
    return int.from_bytes(np.packbits(bits).tobytes(), "big") >> pad


def int_to_bits(value: int, width: int) -> np.ndarray:
    if width == 0:
        return np.zeros(0, dtype=np.uint8)
    nbytes = (width + 7) // 8
    raw = np.frombuffer((value << (nbytes * 8 - width)).to_bytes(nbytes, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[:width].copy()


def _unrank(rank: int, counts: list[int], total: int) -> list[int]:
    remaining = total
    out = []
    size = multinomial(counts)
    for _ in range(sum(counts)):
        for sym, c in enumerate(counts):
            if c == 0:
                continue
            sub = size * c // remaining
            if rank < sub:
                out.append(sym)
                counts[sym] -= 1
                size = sub
                break
            rank -= sub
        remaining -= 1
    return out


def _rank(symbols, counts: list[int]) -> int:
    remaining = sum(counts)
    size = multinomial(counts)
    rank = 0
    for sym in symbols:
        for prev in range(sym):
            if counts[prev]:
                rank += size * counts[prev] // remaining
        size = size * counts[sym] // remaining
        counts[sym] -= 1
        remaining -= 1
    return rank


def match(spec: MatcherSpec, bits) -> np.ndarray:
    """Map ``spec.k`` bits to ``spec.n`` amplitudes of the spec's composition."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size != spec.k:
        raise ValueError(f"matcher expects {spec.k} input bits, got {bits.size}")
    rank = (bits_to_int(bits) * spec.size) >> spec.k
    comp = spec.composition
    symbols = _unrank(rank, list(comp.counts), comp.n)
    return np.asarray(comp.amplitudes, dtype=np.int64)[symbols]


def dematch(spec: MatcherSpec, amplitudes) -> np.ndarray:
    """Inverse of :func:`match`."""
    comp = spec.composition
    amplitudes = np.asarray(amplitudes).ravel()
    lookup = {a: i for i, a in enumerate(comp.amplitudes)}
    try:
        symbols = [lookup[int(a)] for a in amplitudes]
    except KeyError as exc:
        raise CompositionMismatchError(f"amplitude {exc.args[0]} is not in the composition") from None
    observed = np.bincount(np.asarray(symbols, dtype=np.int64), minlength=len(comp.counts))
    if amplitudes.size != comp.n or tuple(observed.tolist()) != comp.counts:
        raise CompositionMismatchError(
            f"sequence composition {tuple(observed.tolist())} differs from {comp.counts}"
        )
    rank = _rank(symbols, list(comp.counts))
    # smallest v with floor(v*M/2^k) >= rank
    value = -((-rank << spec.k) // spec.size)
    if value >= (1 << spec.k) or (value * spec.size) >> spec.k != rank:
        raise NotInCodebookError("sequence is not produced by any matcher input")
    return int_to_bits(value, spec.k)
