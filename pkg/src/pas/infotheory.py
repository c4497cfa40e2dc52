"""Rates of discrete-input AWGN channels with unit noise variance.

Every expectation over the noise is a Gauss-Hermite rule centered on the
transmitted point, so the integrand seen by the rule is the smooth log of a
Gaussian mixture. All logs are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp, roots_hermite

from .errors import InvalidMatcherError

DEFAULT_NODES = 128
LN2 = math.log(2.0)


@dataclass(frozen=True)
class Quadrature:
    """Nodes and weights for ``E[f(Z)]``, ``Z ~ N(0, 1)``."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.nodes)

    def expect(self, values: np.ndarray) -> np.ndarray:
        """Integrate along the last axis."""
        return values @ self.weights


@lru_cache(maxsize=16)
def gauss_hermite(count: int = DEFAULT_NODES) -> Quadrature:
    t, w = roots_hermite(count)
    nodes = math.sqrt(2.0) * t
    weights = w / math.sqrt(math.pi)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Quadrature(nodes, weights)


@dataclass(frozen=True)
class RateReport:
    snr_db: float
    mi: float
    rbmd: float
    per_level_cond_entropy: list[float]
    entropy: float
    tx_rate: float


def capacity(P: float) -> float:
    """``0.5*log2(1+P)`` bits per real channel use."""
    if P < 0:
        raise ValueError("power must be nonnegative")
    return 0.5 * math.log2(1.0 + P)


def snr_for_capacity(rate: float) -> float:
    """Linear SNR at which the AWGN capacity equals ``rate``."""
    return math.expm1(2.0 * rate * LN2)


def entropy(probs) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _log_metrics(points, probs, delta, quad):
    """Support-restricted points, their probabilities, and the tensor
    ``log P(x_k) + log p(y|x_k) - log p(y|x_i)`` for ``y = delta*x_i + z_j``,
    indexed ``[i, k, j]``."""
    support = probs > 0
    x = delta * np.asarray(points, dtype=float)[support]
    p = probs[support]
    d = x[:, None] - x[None, :]
    z = quad.nodes
    log_lik = -0.5 * d[:, :, None] ** 2 - d[:, :, None] * z[None, None, :]
    return support, p, np.log(p)[None, :, None] + log_lik


def _unpack(shaped):
    const = shaped.constellation
    return const, np.asarray(shaped.probs, dtype=float), float(shaped.delta)


def mutual_information(shaped, nodes: int = DEFAULT_NODES) -> float:
    """``I(X; delta*X + Z)`` in bits."""
    const, probs, delta = _unpack(shaped)
    quad = gauss_hermite(nodes)
    _, p, metric = _log_metrics(const.points, probs, delta, quad)
    # -log2 of p(y)/p(y|x_i)
    inner = -logsumexp(metric, axis=1) / LN2
    return float(p @ quad.expect(inner))


def conditional_level_entropies(shaped, nodes: int = DEFAULT_NODES) -> np.ndarray:
    """``H(B_i | Y)`` for every label level, sign level first."""
    const, probs, delta = _unpack(shaped)
    quad = gauss_hermite(nodes)
    support, p, metric = _log_metrics(const.points, probs, delta, quad)
    bits = const.point_bits[support]
    lse_all = logsumexp(metric, axis=1)
    out = np.empty(const.m)
    for level in range(const.m):
        same = bits[:, None, level] == bits[None, :, level]
        masked = np.where(same[:, :, None], metric, -np.inf)
        inner = (lse_all - logsumexp(masked, axis=1)) / LN2
        out[level] = p @ quad.expect(inner)
    return out


def rbmd_value(shaped, nodes: int = DEFAULT_NODES) -> float:
    _, probs, _ = _unpack(shaped)
    return entropy(probs) - float(conditional_level_entropies(shaped, nodes).sum())


def rbmd(shaped, gamma: float = 0.0, nodes: int = DEFAULT_NODES) -> RateReport:
    """Bit-metric decoding rate ``H(B) - sum_i H(B_i|Y)`` with the symbol-metric
    rate and the PAS transmission rate ``H(A) + gamma`` alongside."""
    _, probs, _ = _unpack(shaped)
    cond = conditional_level_entropies(shaped, nodes)
    h = entropy(probs)
    return RateReport(
        snr_db=float(shaped.snr_db),
        mi=mutual_information(shaped, nodes),
        rbmd=h - float(cond.sum()),
        per_level_cond_entropy=[float(c) for c in cond],
        entropy=h,
        tx_rate=entropy(shaped.amp_probs) + gamma,
    )


def log2_multinomial(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    return float((gammaln(counts.sum() + 1) - gammaln(counts + 1).sum()) / LN2)


def ccdm_divergence(counts, amp_probs, k: int) -> float:
    """Normalized divergence (bits/symbol) between a matcher that is uniform
    over ``2^k`` sequences of composition ``counts`` and the memoryless source
    ``amp_probs``."""
    counts = np.asarray(counts, dtype=np.int64)
    amp_probs = np.asarray(amp_probs, dtype=float)
    n = int(counts.sum())
    if n <= 0:
        raise ValueError("composition must be nonempty")
    if k < 0 or 2**k > _multinomial(counts):
        raise InvalidMatcherError(f"k={k} exceeds log2 of the number of sequences")
    used = counts > 0
    if np.any(amp_probs[used] <= 0):
        raise ValueError("target distribution must be positive on the composition support")
    cross = float((counts[used] * np.log2(amp_probs[used])).sum())
    return max(0.0, (-k - cross) / n)


def _multinomial(counts) -> int:
    total, out = 0, 1
    for c in counts:
        total += int(c)
        out *= math.comb(total, int(c))
    return out
