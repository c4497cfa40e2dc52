"""SNR-for-rate solvers and the tabulated comparisons built on them."""

from __future__ import annotations

import math

from scipy.optimize import brentq

from . import infotheory, shaping
from .constellation import build_constellation
from .pipeline import gamma_of
from .sim import adapt, gap_db, reference_input

DEFAULT_RATES = {2: 1, 3: 2, 4: 3, 5: 4, 6: 5}


def _solve_db(f, lo_db, hi_db, xtol=1e-6):
    while f(hi_db) < 0:
        hi_db += 1.0
    while f(lo_db) > 0:
        lo_db -= 1.0
    return brentq(f, lo_db, hi_db, xtol=xtol)


def capacity_snr_db(rate: float) -> float:
    return 10 * math.log10(infotheory.snr_for_capacity(rate))


def shaped_snr_db(constellation, rate: float, metric: str = "mi") -> float:
    """SNR at which the MI-optimized Maxwell-Boltzmann input reaches ``rate``.

    ``metric='bmd'`` evaluates ``R_BMD`` of that same input instead of the MI.
    """
    rate_fn = infotheory.mutual_information if metric == "mi" else infotheory.rbmd_value
    cap = capacity_snr_db(rate)

    def f(db):
        return rate_fn(shaping.optimize_input(constellation, 10 ** (db / 10))) - rate

    return _solve_db(f, cap, cap + 0.5)


def uniform_snr_db(constellation, rate: float) -> float:
    cap = capacity_snr_db(rate)
    base = shaping.ShapedInput.uniform(constellation)

    def f(db):
        return infotheory.mutual_information(base.with_power(10 ** (db / 10))) - rate

    return _solve_db(f, cap, cap + 2.0)


def shaping_gain_rows(rates: dict[int, float] = DEFAULT_RATES, labeling: str = "brgc") -> list[dict]:
    rows = []
    for m, rate in rates.items():
        const = build_constellation(m, labeling)
        shaped = shaped_snr_db(const, rate)
        uniform = uniform_snr_db(const, rate)
        cap = capacity_snr_db(rate)
        rows.append({
            "constellation": f"{2**m}ASK",
            "rate": rate,
            "shaped_snr_db": shaped,
            "uniform_snr_db": uniform,
            "uniform_gap_db": shaped - uniform,
            "capacity_snr_db": cap,
            "capacity_gap_db": shaped - cap,
        })
    return rows


def bmd_gap_rows(rates: dict[int, float] = DEFAULT_RATES, labeling: str = "brgc") -> list[dict]:
    rows = []
    for m, rate in rates.items():
        const = build_constellation(m, labeling)
        smd = shaped_snr_db(const, rate, "mi")
        bmd = shaped_snr_db(const, rate, "bmd")
        rows.append({
            "constellation": f"{2**m}-ASK",
            "rate": rate,
            "smd_snr_db": smd,
            "bmd_snr_db": bmd,
            "gap_db": bmd - smd,
        })
    return rows


def adaptation_rows(m: int, code_rate, reference_rate: float, reference_snr_db: float, rates, labeling: str = "brgc") -> list[dict]:
    """Adapted SNR for each target rate, from one measured reference point."""
    const = build_constellation(m, labeling)
    gamma = float(gamma_of(code_rate, m))
    ref = reference_input(const, reference_snr_db)
    rows = []
    for rate in rates:
        point = adapt(ref, reference_rate, gamma, rate)
        rows.append({
            "rate": rate,
            "snr_db": point.snr_db,
            "gap_db": gap_db(rate, point.snr_db),
            "lambda": point.lam,
            "rbmd": point.rbmd,
        })
    return rows
