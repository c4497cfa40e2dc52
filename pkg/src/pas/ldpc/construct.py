"""Small test codes: Hamming(7,4) and seeded progressive-edge-growth graphs."""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from .code import LdpcCode, gf2_rank


def hamming74() -> LdpcCode:
    """Hamming(7,4) in the form ``[A | I_3]`` so the data sit in the first four bits."""
    h = np.array(
        [
            [1, 1, 0, 1, 1, 0, 0],
            [1, 0, 1, 1, 0, 1, 0],
            [0, 1, 1, 1, 0, 0, 1],
        ],
        dtype=np.uint8,
    )
    return LdpcCode(h, name="hamming74")


def _pick(rng, candidates, degree):
    degs = degree[candidates]
    best = candidates[degs == degs.min()]
    return int(rng.choice(best))


def peg_graph(n: int, num_checks: int, var_degree: int, rng: np.random.Generator) -> list[list[int]]:
    """Column-wise check lists of a PEG Tanner graph with constant variable degree."""
    cap = math.ceil(n * var_degree / num_checks)
    check_deg = np.zeros(num_checks, dtype=np.int64)
    check_vars: list[list[int]] = [[] for _ in range(num_checks)]
    var_checks: list[list[int]] = [[] for _ in range(n)]
    all_checks = np.arange(num_checks)

    for v in range(n):
        for _ in range(var_degree):
            open_checks = all_checks[(check_deg < cap)]
            open_checks = open_checks[~np.isin(open_checks, var_checks[v])]
            if not var_checks[v]:
                c = _pick(rng, open_checks, check_deg)
            else:
                reached = np.zeros(num_checks, dtype=bool)
                frontier = list(var_checks[v])
                reached[frontier] = True
                seen_vars = {v}
                last_layer = frontier
                while True:
                    nxt = []
                    for c0 in frontier:
                        for u in check_vars[c0]:
                            if u in seen_vars:
                                continue
                            seen_vars.add(u)
                            for c1 in var_checks[u]:
                                if not reached[c1]:
                                    reached[c1] = True
                                    nxt.append(c1)
                    if not nxt or reached.all():
                        break
                    last_layer = nxt
                    frontier = nxt
                unreached = open_checks[~reached[open_checks]]
                if unreached.size:
                    candidates = unreached
                else:
                    layer = np.asarray(last_layer if not nxt else nxt, dtype=np.int64)
                    candidates = np.intersect1d(layer, open_checks)
                    if candidates.size == 0:
                        candidates = open_checks
                c = _pick(rng, candidates, check_deg)
            var_checks[v].append(c)
            check_vars[c].append(v)
            check_deg[c] += 1
    return var_checks


def peg_code(n: int, num_checks: int, var_degree: int = 3, seed: int = 0, max_tries: int = 20, name=None) -> LdpcCode:
    """Full-rank PEG code; reseeds (``seed``, ``seed+1``, ...) until ``H`` has full row rank."""
    for attempt in range(max_tries):
        rng = np.random.default_rng(seed + attempt)
        cols = peg_graph(n, num_checks, var_degree, rng)
        rows = [c for col in cols for c in col]
        colidx = [j for j, col in enumerate(cols) for _ in col]
        h = sp.csr_matrix((np.ones(len(rows), dtype=np.uint8), (rows, colidx)), shape=(num_checks, n))
        if gf2_rank(h) == num_checks:
            return LdpcCode(h, name=name or f"peg_{n}_{num_checks}_{var_degree}")
    raise RuntimeError(f"no full-rank PEG code found in {max_tries} seeds")
