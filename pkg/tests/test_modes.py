import json

import pytest

from pas.modes import (
    BUILTIN_MODES,
    ModeConfig,
    RateCurveBuilder,
    build_mode,
    builtin_mode,
    design_summary,
    load_mode_config,
    parse_mode_config,
    resolve_mode_config,
    shipped_code,
)
from pas.pipeline import PasMode, UniformMode


def test_parse_with_comments():
    cfg = parse_mode_config(
        """
        # an 8-ASK mode
        name = demo
        m = 3
        code = toy-3-9        # shipped
        bitmapper = (3,2,1)
        design_snr_db = 9.0
        rate = 1.8
        uniform = no
        """
    )
    assert cfg == ModeConfig(name="demo", m=3, code="toy-3-9", bitmapper="(3,2,1)", design_snr_db=9.0, rate=1.8)


@pytest.mark.parametrize("text", ["m 3", "colour = red"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_mode_config(text)


def test_text_round_trip():
    cfg = BUILTIN_MODES["toy8-r175"]
    assert parse_mode_config(cfg.to_text()) == cfg


def test_relative_alist_path(tmp_path):
    from pas.ldpc import save_alist

    save_alist(shipped_code("toy-3-6"), tmp_path / "h.alist")
    (tmp_path / "mode.cfg").write_text("name = file\nm = 2\nalist = h.alist\ndesign_snr_db = 2\n")
    cfg = load_mode_config(tmp_path / "mode.cfg")
    assert cfg.alist == str(tmp_path / "h.alist")
    assert build_mode(cfg).code.n == 1000
    assert resolve_mode_config(str(tmp_path / "mode.cfg")) == cfg


def test_missing_code():
    with pytest.raises(ValueError):
        ModeConfig(m=3).load_code()


def test_unknown_shipped_code():
    with pytest.raises(KeyError):
        shipped_code("dvbs2")


@pytest.mark.parametrize("name", list(BUILTIN_MODES))
def test_builtin_modes_build(name):
    mode = builtin_mode(name)
    cfg = BUILTIN_MODES[name]
    assert isinstance(mode, UniformMode if cfg.uniform else PasMode)
    if cfg.rate is not None:
        assert mode.spectral_efficiency == pytest.approx(cfg.rate)
    summary = design_summary(mode)
    json.dumps(summary, default=str)
    assert summary["n_c"] * mode.m == mode.code.n


def test_equal_rate_pair():
    shaped = builtin_mode("toy8-r175")
    uniform = builtin_mode("toy8-uniform")
    assert shaped.spectral_efficiency == uniform.spectral_efficiency == 1.75
    assert shaped.n_c == uniform.n_c


def test_k_override():
    mode = build_mode(ModeConfig(name="k", m=3, code="toy-3-9", design_snr_db=8.5, k=400))
    assert mode.matcher.k == 400


def test_rate_curve_builder():
    builder = RateCurveBuilder(BUILTIN_MODES["toy8"])
    assert builder.gamma == 0.0
    a, b = builder(8.0), builder(9.0)
    assert a.design.snr_db == pytest.approx(8.0)
    assert b.design_rate > a.design_rate
    with pytest.raises(ValueError):
        RateCurveBuilder(BUILTIN_MODES["toy8-r175"])
