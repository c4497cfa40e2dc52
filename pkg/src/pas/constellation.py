"""Bipolar ASK alphabets, amplitude/sign factorization and binary labelings."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

MIN_BITS = 2
MAX_BITS = 8


class LabelingKind(str, Enum):
    NATURAL = "natural"
    BRGC = "brgc"


def _int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Labeling:
    """Amplitude labels, one ``(m-1)``-bit row per amplitude (descending amplitude order)."""

    kind: LabelingKind
    table: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, kind: LabelingKind | str, width: int) -> "Labeling":
        kind = LabelingKind(kind)
        idx = np.arange(2**width)
        if kind is LabelingKind.BRGC:
            idx = idx ^ (idx >> 1)
        table = _int_to_bits(idx, width)
        table.setflags(write=False)
        return cls(kind, table)

    def rows(self) -> list[str]:
        return ["".join(map(str, r)) for r in self.table]


@dataclass(frozen=True, eq=False)
class AskConstellation:
    """The ``2^m``-ASK alphabet {±1, ±3, ..., ±(2^m-1)} with labels b(S)b(A).

    ``points`` are ascending; ``amplitudes`` are descending so that row ``j`` of
    the labeling table belongs to ``amplitudes[j]``. ``point_bits[p]`` is the
    full m-bit label of ``points[p]`` with the sign bit in column 0.
    """

    m: int
    labeling: Labeling
    points: np.ndarray = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)
    point_bits: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return 2**self.m

    @property
    def num_amplitudes(self) -> int:
        return 2 ** (self.m - 1)

    def amplitude_index(self, amps) -> np.ndarray:
        """Row index into ``amplitudes`` for each amplitude value."""
        amps = np.asarray(amps)
        idx = (2**self.m - 1 - amps) // 2
        bad = (amps % 2 != 1) | (idx < 0) | (idx >= self.num_amplitudes)
        if np.any(bad):
            raise ValueError(f"values outside the {2**self.m}-ASK amplitude alphabet")
        return idx.astype(np.int64)

    def point_index(self, x) -> np.ndarray:
        x = np.asarray(x)
        idx = (x + 2**self.m - 1) // 2
        if np.any((x % 2 != 1) | (idx < 0) | (idx >= self.size)):
            raise ValueError(f"values outside the {2**self.m}-ASK alphabet")
        return idx.astype(np.int64)

    def label(self, x: int) -> str:
        return "".join(map(str, self.point_bits[int(self.point_index(x))]))

    def amplitude_of_point(self) -> np.ndarray:
        """Amplitude-table row for each point, aligned with ``points``."""
        return self.amplitude_index(np.abs(self.points))

    def second_moment_uniform(self) -> float:
        return float(np.mean(self.points.astype(float) ** 2))


def build_constellation(m: int, labeling_kind: LabelingKind | str = LabelingKind.BRGC) -> AskConstellation:
    if not MIN_BITS <= m <= MAX_BITS:
        raise ValueError(f"bits per symbol must lie in [{MIN_BITS}, {MAX_BITS}], got {m}")
    labeling = Labeling.build(labeling_kind, m - 1)
    half = 2 ** (m - 1)
    amplitudes = np.arange(2 * half - 1, 0, -2, dtype=np.int64)
    points = np.arange(-(2 * half - 1), 2 * half, 2, dtype=np.int64)

    amp_row = (2 * half - 1 - np.abs(points)) // 2
    sign_bit = (points > 0).astype(np.uint8)
    point_bits = np.concatenate([sign_bit[:, None], labeling.table[amp_row]], axis=1)
    for arr in (amplitudes, points, point_bits):
        arr.setflags(write=False)
    return AskConstellation(m, labeling, points, amplitudes, point_bits)


def qam_pair(x1, x2, delta: float) -> complex:
    """Combine two real ASK symbols into one QAM symbol ``delta*(x1 + j*x2)``."""
    return complex(delta * x1, delta * x2)


def bit_level_prior(shaped, level: int) -> tuple[float, float]:
    """``(P(B_level=0), P(B_level=1))`` for a shaped input; level 1 is the sign bit."""
    const = shaped.constellation
    probs = np.asarray(shaped.probs, dtype=float)
    if not 1 <= level <= const.m:
        raise ValueError(f"level must lie in [1, {const.m}], got {level}")
    if probs.shape != (const.size,) or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("input distribution is not normalized")
    p1 = float(probs[const.point_bits[:, level - 1] == 1].sum())
    p0 = float(probs[const.point_bits[:, level - 1] == 0].sum())
    return p0, p1
