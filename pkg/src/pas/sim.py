"""Monte Carlo frame-error simulation, rate back-off and rate adaptation."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import infotheory, shaping
from .errors import InfeasibleTargetError, SearchFailure
from .pipeline import PasMode, UniformMode, receive, transmit, uniform_receive, uniform_transmit
from .shaping import ShapedInput

log = logging.getLogger(__name__)


def gap_db(rate: float, snr_db: float) -> float:
    """SNR distance to the AWGN capacity-power function at ``rate``."""
    if rate <= 0:
        return math.inf
    return snr_db - 10.0 * math.log10(infotheory.snr_for_capacity(rate))


def ci95(p: float, frames: int) -> float:
    if frames == 0:
        return math.inf
    return 1.96 * math.sqrt(p * (1.0 - p) / frames)


@dataclass
class OperatingPoint:
    mode: str
    rate: float
    snr_db: float
    gap_db: float
    fer: float
    ci95: float
    frames: int
    errors: int
    backoff: float
    fer_upper: float = field(default=math.nan)

    def __post_init__(self):
        if math.isnan(self.fer_upper):
            # rule of three when no error was seen
            self.fer_upper = 3.0 / self.frames if self.errors == 0 and self.frames else min(1.0, self.fer + self.ci95)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StopRule:
    min_errors: int = 50
    max_frames: int = 100_000


class ChannelRng:
    """Per-frame random streams derived from ``(seed, frame index)``.

    Frame ``i`` always sees the same data bits and noise regardless of how
    frames are batched or distributed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.counter = 0

    def frame(self, index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, int(index)]))

    def next(self) -> np.random.Generator:
        gen = self.frame(self.counter)
        self.counter += 1
        return gen


def awgn(symbols, rng: np.random.Generator, variance: float = 1.0) -> np.ndarray:
    """``y = x + z`` with ``z`` iid ``N(0, variance)``."""
    symbols = np.asarray(symbols, dtype=float)
    if variance == 0:
        return symbols.copy()
    return symbols + math.sqrt(variance) * rng.standard_normal(symbols.shape)


def backoff(mode: PasMode, snr_db: float | None = None) -> float:
    """``R_BMD - (H(A) + gamma)`` for the mode's design distribution."""
    design = mode.design if snr_db is None else mode.design.with_power(10 ** (snr_db / 10))
    return infotheory.rbmd_value(design) - (design.amplitude_entropy() + float(mode.gamma))


def _simulate_batch(mode, rng: ChannelRng, start: int, count: int, max_iter: int, noise_var: float = 1.0):
    k_c = mode.k_c
    gens = [rng.frame(start + i) for i in range(count)]
    data = np.stack([g.integers(0, 2, k_c, dtype=np.uint8) for g in gens])
    uniform = isinstance(mode, UniformMode)
    x = uniform_transmit(mode, data) if uniform else transmit(mode, data)
    y = np.stack([awgn(x[i], g, noise_var) for i, g in enumerate(gens)])
    est, _ = (uniform_receive if uniform else receive)(mode, y, max_iter)
    return np.array([e is None or not np.array_equal(e, d) for e, d in zip(est, data)])


def run_fer(mode, snr_db: float, stop: StopRule = StopRule(), seed: int = 0, max_iter: int = 100, batch: int = 64, noise_var: float = 1.0) -> OperatingPoint:
    """End-to-end frame error rate at ``snr_db`` (design-distribution power)."""
    mode = mode.with_snr_db(snr_db)
    rng = ChannelRng(seed)
    frames = errors = 0
    while frames < stop.max_frames and errors < stop.min_errors:
        count = min(batch, stop.max_frames - frames)
        errs = _simulate_batch(mode, rng, frames, count, max_iter, noise_var)
        cum = np.cumsum(errs)
        hit = np.flatnonzero(errors + cum >= stop.min_errors)
        if hit.size:
            count = int(hit[0]) + 1
        errors += int(cum[count - 1])
        frames += count
    p = errors / frames
    rate = mode.spectral_efficiency
    bo = backoff(mode) if isinstance(mode, PasMode) else (
        infotheory.rbmd_value(mode.design) - rate
    )
    op = OperatingPoint(
        mode=mode.name, rate=rate, snr_db=float(snr_db), gap_db=gap_db(rate, snr_db),
        fer=p, ci95=ci95(p, frames), frames=frames, errors=errors, backoff=bo,
    )
    log.info("%s @ %.3f dB: FER %.3g (%d/%d)", mode.name, snr_db, p, errors, frames)
    return op


# --- rate adaptation for universal codes ----------------------------------------


@dataclass(frozen=True)
class AdaptedPoint:
    rate: float
    lam: float
    amp_probs: np.ndarray
    delta: float
    snr_db: float
    rbmd: float

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "lambda": self.lam,
            "amp_probs": self.amp_probs.tolist(),
            "delta": self.delta,
            "snr_db": self.snr_db,
            "rbmd": self.rbmd,
        }


def reference_input(constellation, snr_db: float) -> ShapedInput:
    """The rate-maximizing input at ``snr_db``, used as a reference point."""
    return shaping.optimize_input(constellation, 10 ** (snr_db / 10))


def adapt(reference: ShapedInput, reference_rate: float, gamma: float, target_rate: float, tol: float = 1e-9) -> AdaptedPoint:
    """Move a reference operating point to ``target_rate`` keeping the rate back-off.

    The amplitude distribution is tilted to reach the target rate, then the
    scaling is chosen so ``R_BMD - R`` matches the reference's.
    """
    const = reference.constellation
    gamma = float(gamma)
    target_backoff = infotheory.rbmd_value(reference) - reference_rate
    # the reference realizes its own rate by definition
    if target_rate == reference_rate:
        lam = 0.0
    else:
        lam = shaping.solve_rate(reference.amp_probs, const.amplitudes, gamma, target_rate)
    amp = shaping.lambda_shift(reference.amp_probs, const.amplitudes, lam)
    nu = None if reference.nu is None else reference.nu - lam
    base = ShapedInput.from_amplitudes(const, amp, 1.0, nu)

    def residual(log_delta):
        return infotheory.rbmd_value(base.with_delta(math.exp(log_delta))) - target_rate - target_backoff

    if target_rate == reference_rate and lam == 0.0:
        delta = reference.delta
    else:
        lo, hi = math.log(reference.delta) - 1.0, math.log(reference.delta) + 1.0
        for _ in range(60):
            if residual(lo) < 0:
                break
            lo -= 1.0
        else:
            raise InfeasibleTargetError("back-off cannot be matched at any scaling")
        for _ in range(60):
            if residual(hi) > 0:
                break
            hi += 1.0
        else:
            raise InfeasibleTargetError("back-off cannot be matched at any scaling")
        delta = math.exp(brentq(residual, lo, hi, xtol=tol, rtol=1e-14, maxiter=500))
    point = base.with_delta(delta)
    return AdaptedPoint(
        rate=float(target_rate), lam=lam, amp_probs=amp, delta=delta,
        snr_db=point.snr_db, rbmd=infotheory.rbmd_value(point),
    )


# --- operating-point search ------------------------------------------------------


def qualifies(op: OperatingPoint, target_fer: float) -> bool:
    """FER at or below target, with enough frames that the target is observable."""
    return op.fer <= target_fer and op.frames * target_fer >= 3.0


def crossing_snr_db(constellation, gamma: float, lo_db: float = -5.0, hi_db: float = 60.0) -> float:
    """SNR where ``H(A) + gamma`` meets ``R_BMD`` on the maximized-rate curve."""

    def f(db):
        s = reference_input(constellation, db)
        return infotheory.rbmd_value(s) - s.amplitude_entropy() - gamma

    return brentq(f, lo_db, hi_db, xtol=1e-4)


def find_operating_point(mode_factory, target_fer: float, seed: int = 0, start_db: float | None = None, step_db: float = 0.25, max_steps: int = 40, stop: StopRule = StopRule(), max_iter: int = 100, refine_steps: int = 2) -> OperatingPoint:
    """Back off along the rate curve until the FER target is met.

    ``mode_factory(snr_db)`` must return the mode re-optimized for that SNR
    (design distribution and matcher rebuilt). Without ``start_db`` the scan
    starts at the crossing of the rate curve with ``R_BMD``, which needs
    ``mode_factory.constellation`` and ``mode_factory.gamma``. The first
    qualifying SNR is refined by ``refine_steps`` bisections against the last
    failing one.
    """
    if not 0 < target_fer < 0.5:
        raise ValueError("target FER must lie in (0, 0.5)")
    if start_db is None:
        start_db = crossing_snr_db(mode_factory.constellation, mode_factory.gamma)
    trace: list[OperatingPoint] = []
    snr = start_db
    fail_db = None
    found = None
    for _ in range(max_steps):
        op = run_fer(mode_factory(snr), snr, stop, seed, max_iter)
        trace.append(op)
        if qualifies(op, target_fer):
            found = op
            break
        fail_db = snr
        snr += step_db
    if found is None:
        raise SearchFailure(f"FER {target_fer} not reached within {max_steps} steps", trace)
    if fail_db is not None:
        lo, hi = fail_db, found.snr_db
        for _ in range(refine_steps):
            mid = 0.5 * (lo + hi)
            op = run_fer(mode_factory(mid), mid, stop, seed, max_iter)
            trace.append(op)
            if qualifies(op, target_fer):
                found, hi = op, mid
            else:
                lo = mid
    return found
