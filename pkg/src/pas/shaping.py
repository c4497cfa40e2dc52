"""Maxwell-Boltzmann inputs: power-constrained exponent, scaling search and the
rate-adaptation family ``P_A(a) * exp(lam * a^2)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from . import infotheory
from .constellation import AskConstellation
from .errors import InfeasibleTargetError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _mb_log_probs(energies: np.ndarray, nu: float) -> np.ndarray:
    logits = -nu * energies
    return logits - logsumexp(logits)


@dataclass(frozen=True, eq=False)
class ShapedInput:
    """A symmetric input distribution on a scaled ASK constellation.

    ``probs`` follows ``constellation.points``; ``amp_probs`` follows
    ``constellation.amplitudes`` (descending). ``nu`` is the Maxwell-Boltzmann
    exponent when the distribution belongs to that family, else ``None``.
    """

    constellation: AskConstellation
    probs: np.ndarray = field(repr=False)
    delta: float
    nu: float | None = None

    @classmethod
    def maxwell_boltzmann(cls, constellation: AskConstellation, nu: float, delta: float = 1.0) -> "ShapedInput":
        energies = constellation.points.astype(float) ** 2
        return cls(constellation, np.exp(_mb_log_probs(energies, nu)), float(delta), float(nu))

    @classmethod
    def uniform(cls, constellation: AskConstellation, delta: float = 1.0) -> "ShapedInput":
        return cls.maxwell_boltzmann(constellation, 0.0, delta)

    @classmethod
    def from_amplitudes(cls, constellation: AskConstellation, amp_probs, delta: float, nu: float | None = None) -> "ShapedInput":
        amp_probs = np.asarray(amp_probs, dtype=float)
        if amp_probs.shape != (constellation.num_amplitudes,):
            raise ValueError("amplitude distribution has the wrong size")
        probs = 0.5 * amp_probs[constellation.amplitude_of_point()]
        return cls(constellation, probs, float(delta), nu)

    @property
    def amp_probs(self) -> np.ndarray:
        const = self.constellation
        return 2.0 * self.probs[const.point_index(const.amplitudes)]

    @property
    def second_moment(self) -> float:
        """``E[X^2]`` of the unscaled input."""
        return float(self.probs @ self.constellation.points.astype(float) ** 2)

    @property
    def power(self) -> float:
        return self.delta**2 * self.second_moment

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.power)

    def amplitude_entropy(self) -> float:
        return infotheory.entropy(self.amp_probs)

    def with_delta(self, delta: float) -> "ShapedInput":
        return ShapedInput(self.constellation, self.probs, float(delta), self.nu)

    def with_power(self, P: float) -> "ShapedInput":
        return self.with_delta(math.sqrt(P / self.second_moment))


def mb_second_moment(constellation: AskConstellation, nu: float) -> float:
    energies = constellation.points.astype(float) ** 2
    return float(np.exp(_mb_log_probs(energies, nu)) @ energies)


def solve_nu(constellation: AskConstellation, target_second_moment: float, rtol: float = 1e-12) -> float:
    """Exponent ``nu >= 0`` with ``E[X_nu^2]`` equal to the target, by bisection."""
    e_uniform = constellation.second_moment_uniform()
    target = float(target_second_moment)
    if not 1.0 <= target <= e_uniform * (1 + 1e-12):
        raise InfeasibleTargetError(
            f"second moment {target} outside the feasible range [1, {e_uniform}]"
        )
    if target >= e_uniform:
        return 0.0

    def residual(nu):
        return mb_second_moment(constellation, nu) - target

    lo, hi = 0.0, 1.0
    while residual(hi) > rtol * target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = residual(mid)
        if abs(r) <= rtol * target:
            return mid
        if r > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def input_for_scaling(constellation: AskConstellation, P: float, delta: float) -> ShapedInput:
    """Maxwell-Boltzmann input meeting ``E[|delta*X|^2] = P`` with equality."""
    nu = solve_nu(constellation, min(P / delta**2, constellation.second_moment_uniform()))
    return ShapedInput.maxwell_boltzmann(constellation, nu, delta)


def golden_section_max(f, lo: float, hi: float, rtol: float = 1e-6):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol * 0.5 * (a + b):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def scaling_bracket(constellation: AskConstellation, P: float) -> tuple[float, float]:
    """Scalings whose power-matched exponents are uniform (low end) and
    degenerate on the smallest amplitude (high end)."""
    return math.sqrt(P / constellation.second_moment_uniform()), math.sqrt(P)


def optimize_input(constellation: AskConstellation, P: float, objective=None, nodes: int = infotheory.DEFAULT_NODES) -> ShapedInput:
    """Power-``P`` Maxwell-Boltzmann input whose scaling maximizes ``objective``
    (mutual information by default)."""
    if P <= 0:
        raise ValueError("power must be positive")
    if objective is None:
        def objective(s):
            return infotheory.mutual_information(s, nodes)

    lo, hi = scaling_bracket(constellation, P)
    delta, _ = golden_section_max(lambda d: objective(input_for_scaling(constellation, P, d)), lo, hi)
    return input_for_scaling(constellation, P, delta)


def optimize_input_bmd(constellation: AskConstellation, P: float, nodes: int = infotheory.DEFAULT_NODES) -> ShapedInput:
    return optimize_input(constellation, P, lambda s: infotheory.rbmd_value(s, nodes))


# --- rate adaptation family -------------------------------------------------


def lambda_shift(amp_probs, amplitudes, lam: float) -> np.ndarray:
    """Tilt an amplitude distribution by ``exp(lam * a^2)`` and renormalize."""
    amp_probs = np.asarray(amp_probs, dtype=float)
    if np.any(amp_probs <= 0):
        raise ValueError("reference amplitude distribution must be strictly positive")
    if lam == 0:
        return amp_probs.copy()
    logits = np.log(amp_probs) + lam * np.asarray(amplitudes, dtype=float) ** 2
    return np.exp(logits - logsumexp(logits))


def mb_exponent(amp_probs, amplitudes) -> float:
    """Least-squares ``nu`` for ``log P_A(a) = c - nu*a^2``; exact on the family."""
    a2 = np.asarray(amplitudes, dtype=float) ** 2
    logp = np.log(np.asarray(amp_probs, dtype=float))
    if len(a2) < 2:
        return 0.0
    slope = np.polyfit(a2, logp, 1)[0]
    return float(-slope)


def solve_rate(amp_probs, amplitudes, gamma: float, target_rate: float, tol: float = 1e-10) -> float:
    """``lam`` with ``H(A^lam) + gamma = target_rate``."""
    amp_probs = np.asarray(amp_probs, dtype=float)
    h_max = math.log2(len(amp_probs))
    if not gamma - 1e-12 <= target_rate <= h_max + gamma + 1e-12:
        raise InfeasibleTargetError(
            f"rate {target_rate} outside the feasible range [{gamma}, {h_max + gamma}]"
        )
    target_h = target_rate - gamma
    nu = mb_exponent(amp_probs, amplitudes)

    def excess(lam):
        return infotheory.entropy(lambda_shift(amp_probs, amplitudes, lam)) - target_h

    if abs(excess(0.0)) <= 1e-13:
        return 0.0
    if target_h >= h_max - 1e-13:
        return nu
    hi = nu
    lo = min(0.0, nu) - 1.0
    while excess(lo) > 0:
        lo = 2.0 * lo - 1.0
        if lo < -1e6:
            break
    return float(brentq(excess, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))
