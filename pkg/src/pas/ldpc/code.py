"""Sparse parity-check codes and systematic encoding over GF(2)."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ..errors import RankError

# above this many check-matrix entries the dense elimination is not attempted
DENSE_LIMIT = 64_000_000


def _pack_rows(h: sp.csr_matrix) -> np.ndarray:
    dense = h.toarray().astype(np.uint8)
    pad = (-dense.shape[1]) % 64
    if pad:
        dense = np.pad(dense, ((0, 0), (0, pad)))
    return np.packbits(dense, axis=1, bitorder="little").view(np.uint64)


def _unpack_rows(rows: np.ndarray, ncols: int) -> np.ndarray:
    bits = np.unpackbits(rows.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :ncols]


def gf2_eliminate(h: sp.csr_matrix, column_order=None):
    """Reduced row echelon form of ``h`` over GF(2), pivoting on columns in
    ``column_order`` (default right to left).

    Returns ``(reduced_dense, pivot_columns)``; ``reduced_dense`` keeps only
    the ``len(pivot_columns)`` independent rows, row ``i`` pivoting on
    ``pivot_columns[i]``.
    """
    rows = _pack_rows(h)
    nrows, ncols = h.shape
    if column_order is None:
        column_order = range(ncols - 1, -1, -1)
    pivots = []
    top = 0
    for col in column_order:
        if top == nrows:
            break
        word, bit = divmod(col, 64)
        has = ((rows[top:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        hits = np.flatnonzero(has)
        if hits.size == 0:
            continue
        piv = top + hits[0]
        if piv != top:
            rows[[top, piv]] = rows[[piv, top]]
        mask = ((rows[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        mask[top] = False
        rows[mask] ^= rows[top]
        pivots.append(col)
        top += 1
    return _unpack_rows(rows[:top], ncols), pivots


def gf2_rank(h: sp.csr_matrix) -> int:
    return len(gf2_eliminate(h)[1])


@dataclass(frozen=True)
class SystematicForm:
    """Where the information bits sit and how parity bits are computed.

    ``info_positions`` and ``parity_positions`` index codeword columns;
    ``perm = info_positions + parity_positions`` puts the codeword in
    ``[data | parity]`` order. ``parity_part`` is the dense ``k x (n-k)``
    matrix ``P`` of ``G = [I | P]`` (absent when the triangular solver is used).
    """

    perm: np.ndarray = field(repr=False)
    k: int
    parity_part: np.ndarray | None = field(default=None, repr=False)
    triangular: bool = False

    @property
    def info_positions(self) -> np.ndarray:
        return self.perm[: self.k]

    @property
    def parity_positions(self) -> np.ndarray:
        return self.perm[self.k :]

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.perm, np.arange(len(self.perm))))


class LdpcCode:
    """Binary linear code given by a sparse ``(n-k) x n`` parity-check matrix."""

    def __init__(self, h, name: str | None = None, column_order=None):
        h = sp.csr_matrix(h, dtype=np.uint8)
        h.data %= 2
        h.eliminate_zeros()
        h.sort_indices()
        self.h = h
        self.name = name
        # original column index for each position, when the code was reordered
        self.column_order = None if column_order is None else np.asarray(column_order)

    def __repr__(self):
        return f"LdpcCode(name={self.name!r}, n={self.n}, k={self.k})"

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def num_checks(self) -> int:
        return self.h.shape[0]

    @cached_property
    def rank(self) -> int:
        if self._back_block_triangular():
            return self.num_checks
        return gf2_rank(self.h)

    @property
    def k(self) -> int:
        return self.n - self.rank

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def variable_degrees(self) -> np.ndarray:
        return np.diff(self.h.tocsc().indptr)

    @cached_property
    def check_degrees(self) -> np.ndarray:
        return np.diff(self.h.indptr)

    @property
    def degree_profile(self) -> dict[str, dict[int, int]]:
        return {
            "variable": dict(sorted(Counter(self.variable_degrees.tolist()).items(), reverse=True)),
            "check": dict(sorted(Counter(self.check_degrees.tolist()).items(), reverse=True)),
        }

    def syndrome(self, words: np.ndarray) -> np.ndarray:
        """``H c^T mod 2`` for one word or a batch (rows)."""
        words = np.asarray(words, dtype=np.uint8)
        return (self.h @ words.T.astype(np.int64)).T % 2

    def _back_block_triangular(self) -> bool:
        """True if the last ``num_checks`` columns are lower triangular with unit diagonal."""
        m, n = self.h.shape
        if m > n:
            return False
        back = self.h[:, n - m :].tocsr()
        for i in range(m):
            cols = back.indices[back.indptr[i] : back.indptr[i + 1]]
            if cols.size == 0 or cols[-1] != i:
                return False
        return True

    @cached_property
    def systematic_form(self) -> SystematicForm:
        return systematize(self)

    def systematic(self) -> "LdpcCode":
        """Same code with columns reordered to ``[data | parity]``."""
        form = self.systematic_form
        if form.is_identity:
            return self
        base = self.column_order if self.column_order is not None else np.arange(self.n)
        return LdpcCode(self.h[:, form.perm], name=self.name, column_order=base[form.perm])


def systematize(code: LdpcCode) -> SystematicForm:
    """Pick parity positions (rightmost independent columns) and the parity part."""
    m, n = code.h.shape
    if code._back_block_triangular():
        return SystematicForm(np.arange(n), n - m, None, triangular=True)
    if m * n > DENSE_LIMIT:
        raise ValueError("check matrix too large for dense elimination and not in triangular form")
    reduced, pivots = gf2_eliminate(code.h)
    if len(pivots) < m:
        raise RankError(
            f"parity-check matrix has rank {len(pivots)} < {m} checks",
            deficiency=m - len(pivots),
        )
    pivot_set = set(pivots)
    info = np.array([c for c in range(n) if c not in pivot_set], dtype=np.int64)
    parity = np.sort(np.asarray(pivots, dtype=np.int64))
    # row for each parity column in ascending order
    row_of = {c: r for r, c in enumerate(pivots)}
    rows = np.array([row_of[c] for c in parity], dtype=np.int64)
    a = reduced[rows][:, info]
    parity_part = np.ascontiguousarray(a.T.astype(np.uint8))
    return SystematicForm(np.concatenate([info, parity]), n - m, parity_part)


def encode(code: LdpcCode, data) -> np.ndarray:
    """Codeword (in the code's column order) carrying ``data`` on the information positions."""
    form = code.systematic_form
    data = np.asarray(data, dtype=np.uint8)
    batch = data.ndim == 2
    data2 = np.atleast_2d(data)
    if data2.shape[1] != form.k:
        raise ValueError(f"expected {form.k} data bits, got {data2.shape[1]}")
    if form.triangular:
        parity = _triangular_parity(code, data2)
    else:
        parity = (data2.astype(np.int64) @ form.parity_part) % 2
    words = np.empty((data2.shape[0], code.n), dtype=np.uint8)
    words[:, form.info_positions] = data2
    words[:, form.parity_positions] = parity
    return words if batch else words[0]


def parity_matrix(code: LdpcCode) -> np.ndarray:
    """Dense ``P`` of ``G = [I | P]`` in the systematic column order."""
    form = code.systematic_form
    if form.parity_part is not None:
        return form.parity_part
    words = encode(code, np.eye(form.k, dtype=np.uint8))
    return words[:, form.parity_positions]


def _triangular_parity(code: LdpcCode, data: np.ndarray) -> np.ndarray:
    m, n = code.h.shape
    k = n - m
    partial = (code.h[:, :k] @ data.T.astype(np.int64)).T % 2
    back = code.h[:, k:].tocsr()
    off_diag = back.nnz - m
    if off_diag == m - 1 and np.all(back[1:, :].diagonal() == 1):
        # staircase back block: p_i = s_i + p_{i-1}
        return np.bitwise_xor.accumulate(partial.astype(np.uint8), axis=1)
    parity = np.zeros_like(partial, dtype=np.uint8)
    for i in range(m):
        cols = back.indices[back.indptr[i] : back.indptr[i + 1] - 1]
        acc = partial[:, i].astype(np.uint8)
        if cols.size:
            acc ^= np.bitwise_xor.reduce(parity[:, cols], axis=1)
        parity[:, i] = acc
    return parity
