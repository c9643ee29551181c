import os

import numpy as np
import pytest

from polarsim.algorithms import (
    QUANT_PRESETS,
    get_algorithm,
    get_algorithm_requirements,
    preset_for_rate,
)
from polarsim.codebook import PolarCode, construct_code
from polarsim.errors import ConfigError, ParameterError
from polarsim.harness import (
    ChannelConfig,
    DecoderSpec,
    ErrorRatePoint,
    SimulationSettings,
    StopRule,
    compare_quantization,
    draw_batch,
    draw_frame,
    horizontal_gap,
    load_settings,
    run_point,
    sweep,
    transmit,
    write_comparison_csv,
    write_gnuplot,
    write_points_csv,
)
from polarsim.harness.config import ENV_KEYS
from polarsim.numerics import QuantScheme


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    for var in ENV_KEYS.values():
        monkeypatch.delenv(var, raising=False)
    monkeypatch.chdir(tmp_path)
    yield
    # reading a .env file sets variables outside monkeypatch
    for var in ENV_KEYS.values():
        os.environ.pop(var, None)


# -- channel -------------------------------------------------------------------


def test_noise_variance():
    assert ChannelConfig(0.0, 0.5).sigma2 == pytest.approx(1.0)
    assert ChannelConfig(10.0, 1.0).sigma2 == pytest.approx(0.05)
    with pytest.raises(ParameterError):
        ChannelConfig(1.0, 0.0)
    with pytest.raises(ParameterError):
        ChannelConfig(float("nan"), 0.5)
    with pytest.raises(ParameterError):
        ChannelConfig(1.0, 0.5, modulation="QPSK")


def test_high_snr_llrs_follow_codeword(code8):
    channel = ChannelConfig(20.0, 0.5)
    llr = transmit(code8, np.zeros(4, dtype=np.uint8), channel, 0)
    assert llr.shape == (8,)
    assert np.all(llr > 0)


def test_frames_are_reproducible(code8):
    channel = ChannelConfig(1.0, 0.5, seed=42)
    u1, llr1 = draw_frame(code8, channel, 7)
    u2, llr2 = draw_frame(code8, channel, 7)
    np.testing.assert_array_equal(u1, u2)
    np.testing.assert_array_equal(llr1, llr2)
    _, other = draw_frame(code8, channel, 8)
    assert not np.array_equal(llr1, other)

    u, llr = draw_batch(code8, channel, 6, 3)
    np.testing.assert_array_equal(u[1], u1)
    np.testing.assert_array_equal(llr[1], llr1)


# -- Monte Carlo ---------------------------------------------------------------


def test_rate_one_code_at_high_snr():
    code = PolarCode(n=4, K=16, frozen_mask=np.zeros(16, dtype=bool))
    point = run_point(code, DecoderSpec("msa"), ChannelConfig(15.0, 1.0), StopRule(1, 256))
    assert point.frames == 256
    assert point.frame_errors == 0
    assert point.fer == point.ber == point.ci95 == 0.0


def test_stop_rule_on_errors():
    code = construct_code(5, 16)
    point = run_point(
        code,
        DecoderSpec("msa-fixed", QuantScheme(6, 3, 2)),
        ChannelConfig(-2.0, 0.5),
        StopRule(10, 10_000),
        batch_size=8,
    )
    assert point.frame_errors >= 10
    assert point.frames % 8 == 0
    assert point.frames < 10_000
    assert point.fer >= point.ber


def test_worker_count_does_not_change_results():
    code = construct_code(5, 16)
    spec = DecoderSpec("msa-fixed", QuantScheme(6, 3, 2))
    channel = ChannelConfig(1.0, 0.5, seed=5)
    stop = StopRule(20, 2_000)
    serial = run_point(code, spec, channel, stop, batch_size=16, workers=1)
    parallel = run_point(code, spec, channel, stop, batch_size=16, workers=2)
    assert serial == parallel
    assert write_points_csv([serial]) == write_points_csv([parallel])


def test_architecture_decoder_matches_fixed_point(clean_env):
    settings = SimulationSettings(
        n=4, k=8, p=2, ebn0_list=(0.0, 4.0), max_frames=96, batch_size=32
    )
    fixed = sweep(settings)
    arch = sweep(settings.replace(algo="arch"))
    assert fixed == arch
    assert [p.frames for p in arch] == [96, 96]


def test_decoder_spec():
    assert DecoderSpec("msa").label == "float"
    assert DecoderSpec("msa-fixed", QuantScheme(6, 4, 1)).label == "(6,4,1)"
    with pytest.raises(ParameterError):
        DecoderSpec("msa-fixed")
    with pytest.raises(ParameterError):
        DecoderSpec("arch", QuantScheme(6, 3, 2))
    with pytest.raises(ParameterError):
        DecoderSpec("bp")
    with pytest.raises(ParameterError):
        StopRule(0, 10)


def test_compare_quantization_outputs(code8):
    curves = compare_quantization(
        code8, [None, QuantScheme(6, 3, 2)], [1.0, 3.0], StopRule(5, 64), batch_size=16
    )
    assert list(curves) == ["float", "(6,3,2)"]
    lines = write_comparison_csv(curves).splitlines()
    assert lines[0].startswith("scheme,ebn0_db,frames")
    assert len(lines) == 5
    assert lines[3].startswith('"(6,3,2)",1,')
    plot = write_gnuplot(curves)
    assert "# float\n" in plot and "\n\n\n# (6,3,2)\n" in plot


def _synthetic(points):
    return [ErrorRatePoint(ebn0, 10_000, errors, errors, 1) for ebn0, errors in points]


def test_horizontal_gap():
    a = _synthetic([(1.0, 1000), (2.0, 10)])
    b = _synthetic([(0.5, 1000), (1.5, 10)])
    assert horizontal_gap(a, b, 1e-2) == pytest.approx(0.5)
    assert horizontal_gap(b, a, 1e-2) == pytest.approx(-0.5)
    with pytest.raises(ParameterError):
        horizontal_gap(a, b, 1e-5)
    with pytest.raises(ParameterError):
        horizontal_gap(a, b, 1.5)


def test_error_rate_point():
    point = ErrorRatePoint(2.0, 1000, 100, 250, 8)
    assert point.fer == 0.1
    assert point.ber == pytest.approx(250 / 8000)
    assert point.ci95 == pytest.approx(1.96 * np.sqrt(0.1 * 0.9 / 1000))
    assert write_points_csv([point]).splitlines()[1] == (
        "2,1000,100,250,1.000000e-01,3.125000e-02,1.859419e-02"
    )


def test_empty_sweep_csv():
    assert write_points_csv([]) == "ebn0_db,frames,frame_errors,bit_errors,fer,ber,ci95\n"


@pytest.mark.slow
def test_error_rates_of_half_rate_code_n32768():
    code = construct_code(15, 2**14)
    stop = StopRule(100, 200_000)
    channel = ChannelConfig(1.5, code.rate, seed=3)
    fer = {
        label: run_point(code, spec, channel, stop, batch_size=64, workers=os.cpu_count() or 1).fer
        for label, spec in [
            ("spa", DecoderSpec("spa")),
            ("msa", DecoderSpec("msa")),
            ("fixed", DecoderSpec("msa-fixed", QuantScheme(6, 3, 2))),
        ]
    }
    assert 7.52e-2 / 2 <= fer["fixed"] <= 7.52e-2 * 2
    assert 4.86e-2 / 2 <= fer["msa"] <= 4.86e-2 * 2
    assert 1.985e-2 / 2 <= fer["spa"] <= 1.985e-2 * 2
    assert fer["spa"] < fer["msa"] < fer["fixed"]


@pytest.mark.slow
def test_fixed_point_close_to_float():
    code = construct_code(10, 512)
    curves = compare_quantization(
        code, [None, QuantScheme(6, 3, 2)], [2.0, 2.5, 3.0, 3.5], StopRule(300, 500_000), seed=1
    )
    assert curves["float"][0].fer > curves["float"][-1].fer
    assert abs(horizontal_gap(curves["(6,3,2)"], curves["float"], 1e-2)) <= 0.15


@pytest.mark.slow
def test_quantization_gap_of_half_rate_code_n32768():
    code = construct_code(15, 2**14)
    curves = compare_quantization(
        code,
        [None, QuantScheme(6, 3, 2)],
        [1.5, 1.75, 2.0, 2.25],
        StopRule(100, 100_000),
        seed=5,
        workers=os.cpu_count() or 1,
    )
    for points in curves.values():
        fers = [p.fer for p in points]
        assert fers[0] > 1e-2 > fers[-1]
    assert abs(horizontal_gap(curves["(6,3,2)"], curves["float"], 1e-2)) <= 0.15


# -- configuration -------------------------------------------------------------


def test_settings_defaults(clean_env):
    settings = load_settings()
    assert settings == SimulationSettings()
    assert settings.N == 1024
    assert settings.scheme == QuantScheme(6, 3, 2)
    assert settings.replace(k=768).scheme == QuantScheme(6, 4, 1)
    assert settings.replace(qi=7, qic=4, qf=0).scheme == QuantScheme(7, 4, 0)


def test_settings_precedence(clean_env, tmp_path, monkeypatch):
    config = tmp_path / "run.toml"
    config.write_text('n = 5\nk = 16\nseed = 3\nworkers = 2\nebn0_list = [1.0, 2.0]\n')
    monkeypatch.setenv("POLARSIM_WORKERS", "3")
    settings = load_settings(config, {"seed": 9, "batch_size": None})
    assert (settings.n, settings.k) == (5, 16)
    assert settings.workers == 3
    assert settings.seed == 9
    assert settings.batch_size == 64
    assert settings.ebn0_list == (1.0, 2.0)


def test_dotenv_file(clean_env, tmp_path):
    (tmp_path / ".env").write_text("POLARSIM_SEED=7\nPOLARSIM_MAX_FRAMES=500\n")
    settings = load_settings()
    assert settings.seed == 7
    assert settings.max_frames == 500


@pytest.mark.parametrize(
    "toml",
    [
        "colour = 'blue'\n",
        "n = [\n",
        "qi = 6\n",
        "n = 3\nk = 9\n",
        "algo = 'bp'\n",
        "workers = 0\n",
        "ebn0_list = 'high'\n",
        "qi = 10\nqic = 3\nqf = 8\n",
    ],
)
def test_settings_rejects(clean_env, tmp_path, toml):
    config = tmp_path / "bad.toml"
    config.write_text(toml)
    with pytest.raises(ConfigError):
        load_settings(config)


def test_settings_rejects_bad_environment(clean_env, monkeypatch):
    monkeypatch.setenv("POLARSIM_WORKERS", "many")
    with pytest.raises(ConfigError):
        load_settings()
    with pytest.raises(ConfigError):
        load_settings("missing.toml")


def test_frozen_mask_setting(clean_env, tmp_path):
    (tmp_path / "mask.txt").write_text("n=3 K=4\ne8\n")
    settings = SimulationSettings(n=3, k=4, p=2, frozen_mask=str(tmp_path / "mask.txt"))
    assert settings.build_code() == construct_code(3, 4)
    with pytest.raises(ConfigError):
        settings.replace(k=5).build_code()
    with pytest.raises(ConfigError, match="missing.txt"):
        settings.replace(frozen_mask=str(tmp_path / "missing.txt")).build_code()


# -- registry ------------------------------------------------------------------


def test_algorithm_registry():
    assert get_algorithm("arch").kind == "arch"
    assert get_algorithm_requirements("arch") == ["scheme", "p"]
    assert get_algorithm_requirements("msa") == []
    with pytest.raises(ParameterError):
        get_algorithm("bp")


def test_quantization_presets():
    assert preset_for_rate(0.9) == QuantScheme(6, 4, 0)
    assert preset_for_rate(0.3) == QuantScheme(6, 3, 2)
    assert preset_for_rate(0.8) == QuantScheme(6, 4, 1)
    assert set(QUANT_PRESETS) == {0.25, 0.5, 0.75, 0.9}
