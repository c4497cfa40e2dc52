"""Mode configuration files, shipped toy codes and mode construction.

A mode file is plain ``key = value`` text; ``#`` starts a comment::

    name = toy8
    m = 3
    labeling = brgc
    code = toy-3-9            # shipped code, or: alist = path/to/H.alist
    bitmapper = 3,2,1
    design_snr_db = 8.5       # input optimized at this SNR
    rate = 1.75               # optional target spectral efficiency k_c/n_c
    k = 588                   # optional matcher input length override
    uniform = false           # uniform-input BICM reference instead of PAS
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import ccdm, infotheory, shaping
from .constellation import build_constellation
from .errors import InfeasibleTargetError
from .ldpc import LdpcCode, load_alist, parse_alist
from .pipeline import BitMapper, PasMode, UniformMode, gamma_of
from .shaping import ShapedInput

SHIPPED_CODES = ("toy-3-6", "toy-3-9", "toy-3-12", "toy-7-12")


@lru_cache(maxsize=None)
def shipped_code(name: str) -> LdpcCode:
    if name not in SHIPPED_CODES:
        raise KeyError(f"unknown shipped code {name!r}; choose from {SHIPPED_CODES}")
    text = resources.files("pas.data").joinpath(f"{name}.alist").read_text()
    return parse_alist(text, name=name).systematic()


@dataclass(frozen=True)
class ModeConfig:
    name: str = "pas"
    m: int = 3
    labeling: str = "brgc"
    code: str | None = None
    alist: str | None = None
    bitmapper: str | None = None
    design_snr_db: float = 10.0
    rate: float | None = None
    k: int | None = None
    uniform: bool = False

    def load_code(self) -> LdpcCode:
        if self.alist:
            return load_alist(self.alist).systematic()
        if self.code:
            return shipped_code(self.code)
        raise ValueError("mode needs either 'code' or 'alist'")

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if value is None:
                continue
            if isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def parse_mode_config(text: str, base_dir: Path | None = None) -> ModeConfig:
    types = {f.name: f.type for f in fields(ModeConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in types:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in ("m", "k"):
            values[key] = int(value)
        elif key in ("design_snr_db", "rate"):
            values[key] = float(value)
        elif key == "uniform":
            values[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            values[key] = value
    if "alist" in values and base_dir is not None and not Path(values["alist"]).is_absolute():
        values["alist"] = str(base_dir / values["alist"])
    return ModeConfig(**values)


def load_mode_config(path) -> ModeConfig:
    path = Path(path)
    return parse_mode_config(path.read_text(), base_dir=path.parent)


def design_for_rate(reference: ShapedInput, gamma: float, rate: float, n_c: int):
    """Tilt ``reference`` until a length-``n_c`` matcher carries ``rate*n_c`` bits
    in total (``gamma*n_c`` of them on signs).

    Returns ``(lam, amp_probs, composition, k)``.
    """
    const = reference.constellation
    k_needed = round((rate - gamma) * n_c)
    margin = 0.0
    for _ in range(200):
        target_h = min(rate + margin, const.m - 1 + gamma)
        lam = shaping.solve_rate(reference.amp_probs, const.amplitudes, gamma, target_h)
        amp = shaping.lambda_shift(reference.amp_probs, const.amplitudes, lam)
        comp = ccdm.choose_composition(amp, n_c, const.amplitudes)
        if ccdm.derive_k(comp) >= k_needed:
            return lam, amp, comp, k_needed
        if target_h >= const.m - 1 + gamma:
            break
        margin += 0.002
    raise InfeasibleTargetError(f"rate {rate} not reachable with n_c={n_c}")


def build_mode(config: ModeConfig):
    const = build_constellation(config.m, config.labeling)
    code = config.load_code()
    bitmapper = BitMapper.parse(config.bitmapper) if config.bitmapper else BitMapper.default(config.m)
    if config.uniform:
        mode = UniformMode(const, code, bitmapper, name=config.name)
        return mode.with_snr_db(config.design_snr_db)

    n_c = code.n // config.m
    gamma = float(gamma_of(Fraction(code.k, code.n), config.m))
    power = 10 ** (config.design_snr_db / 10)
    reference = shaping.optimize_input(const, power)
    if config.rate is not None:
        lam, amp, comp, k = design_for_rate(reference, gamma, config.rate, n_c)
        design = ShapedInput.from_amplitudes(const, amp, 1.0, reference.nu - lam).with_power(power)
    else:
        design = reference
        comp = ccdm.choose_composition(design.amp_probs, n_c, const.amplitudes)
        k = None
    if config.k is not None:
        k = config.k
    matcher = ccdm.MatcherSpec.for_composition(comp, k)
    return PasMode(const, code, design, matcher, bitmapper, name=config.name)


class RateCurveBuilder:
    """Builds the mode re-optimized for each SNR (``H(A)+gamma`` follows the
    rate-maximizing input)."""

    def __init__(self, config: ModeConfig):
        if config.uniform or config.rate is not None:
            raise ValueError("rate-curve search needs a PAS mode without a fixed rate")
        self.config = config
        self.constellation = build_constellation(config.m, config.labeling)
        code = config.load_code()
        self.gamma = float(gamma_of(Fraction(code.k, code.n), config.m))

    def __call__(self, snr_db: float) -> PasMode:
        return build_mode(replace(self.config, design_snr_db=float(snr_db)))


BUILTIN_MODES = {
    "toy4": ModeConfig(name="toy4", m=2, code="toy-3-6", bitmapper="2,1", design_snr_db=2.0),
    "toy8": ModeConfig(name="toy8", m=3, code="toy-3-9", bitmapper="3,2,1", design_snr_db=8.5),
    "toy8x": ModeConfig(name="toy8x", m=3, code="toy-3-12", bitmapper="3,2,1", design_snr_db=11.5),
    "toy8-r175": ModeConfig(name="toy8-r175", m=3, code="toy-3-9", bitmapper="3,2,1", design_snr_db=8.5, rate=1.75),
    "toy8-uniform": ModeConfig(name="toy8-uniform", m=3, code="toy-7-12", bitmapper="3,2,1", design_snr_db=10.0, uniform=True),
}


def builtin_mode(name: str):
    return build_mode(BUILTIN_MODES[name])


def resolve_mode_config(spec: str) -> ModeConfig:
    """A builtin mode name or a path to a mode file."""
    if spec in BUILTIN_MODES:
        return BUILTIN_MODES[spec]
    return load_mode_config(spec)


def design_summary(mode) -> dict:
    design = mode.design
    out = {
        "name": mode.name,
        "m": mode.m,
        "n_c": mode.n_c,
        "k_c": mode.k_c,
        "spectral_efficiency": mode.spectral_efficiency,
    }
    if isinstance(mode, PasMode):
        out.update(
            gamma=float(mode.gamma),
            matcher=mode.matcher.to_json(),
            bitmapper=str(mode.bitmapper),
            amp_entropy=design.amplitude_entropy(),
            design_rate=mode.design_rate,
            nu=design.nu,
            rbmd_at_design=infotheory.rbmd_value(design),
            design_snr_db=design.snr_db,
        )
    if math.isfinite(out["spectral_efficiency"]):
        out["spectral_efficiency"] = round(out["spectral_efficiency"], 6)
    return out
