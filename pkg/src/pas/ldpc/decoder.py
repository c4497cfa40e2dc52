"""Flooding sum-product decoding, vectorized over a batch of frames.

LLRs follow the ``log P(bit=0)/P(bit=1)`` convention throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .code import LdpcCode

LLR_CLIP = 30.0
_T_CLIP = np.tanh(LLR_CLIP / 2)


@dataclass
class DecodeResult:
    bits: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


class BeliefPropagationDecoder:
    """Holds the Tanner-graph incidence for one code.

    Message buffers are allocated per call, so one instance may serve
    successive batches; use one instance per worker thread.
    """

    def __init__(self, code: LdpcCode):
        h = code.h.tocsr()
        self.code = code
        m, n = h.shape
        nnz = h.nnz
        self.edge_check = np.repeat(np.arange(m), np.diff(h.indptr))
        self.edge_var = h.indices.astype(np.int64)
        ones = np.ones(nnz)
        edges = np.arange(nnz)
        self.to_var = sp.csr_matrix((ones, (edges, self.edge_var)), shape=(nnz, n))
        self.to_check = sp.csr_matrix((ones, (edges, self.edge_check)), shape=(nnz, m))
        self.ht = h.T.tocsr().astype(np.int64)

    def _syndrome_ok(self, hard: np.ndarray) -> np.ndarray:
        syn = np.asarray(hard.astype(np.int64) @ self.ht) % 2
        return ~syn.any(axis=1)

    def decode(self, llrs, max_iter: int = 100) -> DecodeResult:
        llrs = np.asarray(llrs, dtype=float)
        single = llrs.ndim == 1
        llr = np.clip(np.atleast_2d(llrs), -LLR_CLIP, LLR_CLIP)
        batch, n = llr.shape
        if n != self.code.n:
            raise ValueError(f"expected {self.code.n} LLRs per frame, got {n}")

        c2v = np.zeros((batch, self.edge_var.size))
        total = llr.copy()
        bits = (total < 0).astype(np.uint8)
        converged = np.zeros(batch, dtype=bool)
        iterations = np.full(batch, max_iter, dtype=np.int64)
        active = np.arange(batch)

        for it in range(1, max_iter + 1):
            if active.size == 0:
                break
            msg = c2v[active]
            v2c = total[active][:, self.edge_var] - msg
            t = np.tanh(0.5 * v2c)
            neg = (t < 0).astype(float)
            logmag = np.log(np.maximum(np.abs(t), 1e-300))
            sum_log = np.asarray(logmag @ self.to_check)
            sum_neg = np.asarray(neg @ self.to_check)
            ext = np.exp(sum_log[:, self.edge_check] - logmag)
            ext_neg = (sum_neg[:, self.edge_check] - neg) % 2
            prod = np.clip(ext * (1 - 2 * ext_neg), -_T_CLIP, _T_CLIP)
            msg = 2.0 * np.arctanh(prod)
            c2v[active] = msg

            post = llr[active] + np.asarray(msg @ self.to_var)
            total[active] = post
            hard = (post < 0).astype(np.uint8)
            bits[active] = hard
            # an exactly-zero posterior is undecided and blocks early exit
            done = self._syndrome_ok(hard) & ~np.any(post == 0, axis=1)
            finished = active[done]
            converged[finished] = True
            iterations[finished] = it
            active = active[~done]

        if single:
            return DecodeResult(bits[0], converged[0], iterations[0])
        return DecodeResult(bits, converged, iterations)


def decode(code: LdpcCode, llrs, max_iter: int = 100):
    """Returns ``(hard_bits, converged, iterations_used)``; arrays for a batch."""
    res = BeliefPropagationDecoder(code).decode(llrs, max_iter)
    if res.bits.ndim == 2:
        return res.bits, res.converged, res.iterations
    return res.bits, bool(res.converged), int(res.iterations)
