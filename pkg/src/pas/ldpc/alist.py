"""Reading and writing parity-check matrices in alist format.

Layout (1-based indices, zero padding allowed in the index lists)::

    N M
    max_col_degree max_row_degree
    N column degrees
    M row degrees
    N lines: row indices of each column
    M lines: column indices of each row
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from ..errors import AlistFormatError
from .code import LdpcCode


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise AlistFormatError(f"line {lineno}: non-integer token") from None


def parse_alist(text: str, name: str | None = None) -> LdpcCode:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise AlistFormatError("alist header is incomplete")
    header = _ints(lines[0], 1)
    if len(header) != 2 or min(header) <= 0:
        raise AlistFormatError("first line must hold N and M")
    n, m = header
    maxima = _ints(lines[1], 2)
    if len(maxima) != 2:
        raise AlistFormatError("second line must hold the maximum degrees")
    col_deg = _ints(lines[2], 3)
    row_deg = _ints(lines[3], 4)
    if len(col_deg) != n or len(row_deg) != m:
        raise AlistFormatError("degree lists do not match N and M")
    if max(col_deg) > maxima[0] or max(row_deg) > maxima[1]:
        raise AlistFormatError("degree exceeds the declared maximum")
    if len(lines) < 4 + n + m:
        raise AlistFormatError(f"expected {n + m} index lines, found {len(lines) - 4}")

    rows, cols = [], []
    for j in range(n):
        idx = [v for v in _ints(lines[4 + j], 5 + j) if v != 0]
        if len(idx) != col_deg[j]:
            raise AlistFormatError(f"column {j + 1}: {len(idx)} entries, degree says {col_deg[j]}")
        if any(not 1 <= v <= m for v in idx):
            raise AlistFormatError(f"column {j + 1}: row index out of range")
        rows.extend(v - 1 for v in idx)
        cols.extend([j] * len(idx))

    row_sets = []
    for i in range(m):
        idx = [v for v in _ints(lines[4 + n + i], 5 + n + i) if v != 0]
        if len(idx) != row_deg[i]:
            raise AlistFormatError(f"row {i + 1}: {len(idx)} entries, degree says {row_deg[i]}")
        row_sets.append(set(v - 1 for v in idx))

    by_row = [set() for _ in range(m)]
    for r, c in zip(rows, cols):
        by_row[r].add(c)
    if by_row != row_sets:
        raise AlistFormatError("row and column index lists disagree")

    h = sp.csr_matrix((np.ones(len(rows), dtype=np.uint8), (rows, cols)), shape=(m, n))
    if h.max() > 1:
        raise AlistFormatError("duplicate entries in a column")
    return LdpcCode(h, name=name)


def load_alist(path) -> LdpcCode:
    with open(path) as fh:
        text = fh.read()
    return parse_alist(text, name=os.path.splitext(os.path.basename(str(path)))[0])


def format_alist(code: LdpcCode) -> str:
    h = code.h.tocsr()
    hc = h.tocsc()
    m, n = h.shape
    col_deg = np.diff(hc.indptr)
    row_deg = np.diff(h.indptr)
    out = [f"{n} {m}", f"{col_deg.max()} {row_deg.max()}"]
    out.append(" ".join(map(str, col_deg)))
    out.append(" ".join(map(str, row_deg)))
    width = col_deg.max()
    for j in range(n):
        idx = (hc.indices[hc.indptr[j] : hc.indptr[j + 1]] + 1).tolist()
        out.append(" ".join(map(str, idx + [0] * (width - len(idx)))))
    width = row_deg.max()
    for i in range(m):
        idx = (h.indices[h.indptr[i] : h.indptr[i + 1]] + 1).tolist()
        out.append(" ".join(map(str, idx + [0] * (width - len(idx)))))
    return "\n".join(out) + "\n"


def save_alist(code: LdpcCode, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_alist(code))
