"""Configuration, data-file and report repositories."""

import io
import math

import numpy as np
import pandas as pd
import pytest

from src.models.sample import SpectrumKind
from src.models.spectral import GridUnit, JointSpectrum, JointTemporal
from src.repositories.config_repository import ConfigRepository
from src.repositories.jsi_repository import JsiRepository
from src.repositories.report_repository import ReportEmitter, format_value
from src.repositories.series_repository import SeriesRepository
from src.repositories.spectrum_repository import SpectrumRepository
from src.tools.jsi import resample_to_frequency
from src.utils.exceptions import ConfigError, DataFormatError
from src.utils.units import wavelength_to_angular_frequency

PUBLISHED_ORDER = ["AF455", "Qdot605", "Fluorescein", "Rh6G", "C153", "9R-S"]


def test_published_config_keeps_file_order(published_config):
    assert list(published_config.samples) == PUBLISHED_ORDER
    assert published_config.run.coverage_k == 2.0
    assert published_config.apparatus_spec().photon_rate == 8.9e9


def test_config_problems_are_reported_together(data_dir):
    text = (data_dir / "published_config.ini").read_text()
    text = text.replace("[collection]", "[weird]").replace(
        "[apparatus]", "[apparatus]\nbogus_key = 1"
    )
    with pytest.raises(ConfigError) as info:
        ConfigRepository().parse(text)
    problems = info.value.problems
    assert "[weird]: unknown section" in problems
    assert "[collection]: missing" in problems
    assert "[apparatus] bogus_key: unknown key" in problems


def test_sample_needs_an_overlap_source():
    text = """
[apparatus]
rep_rate_hz = 8e7
pulse_fwhm_fs = 1040
beam_fwhm_x0_um = 51
beam_fwhm_y0_um = 84
rayleigh_mm = 0.4
wavelength_nm = 810
cuvette_length_cm = 1
path_transmittance = 0.76
f_lb_cps = 0.22

[collection]
kappa_max = 0.154
alpha_per_mm = 2.78
z0_mm = 1.51

[sample.Bare]
concentration_umol_per_l = 10
quantum_yield = 0.5
"""
    with pytest.raises(ConfigError) as info:
        ConfigRepository().parse(text)
    assert any(p.startswith("[sample.Bare]") for p in info.value.problems)


def test_malformed_ini_is_a_format_error():
    with pytest.raises(DataFormatError):
        ConfigRepository().parse("[run]\nthis line has no value separator\n")


def test_overlap_ratio_from_spectra(data_dir):
    repo = ConfigRepository()
    config = repo.load(data_dir / "sim_plan.ini")
    sample = repo.sample_spec("Rh6G", config.samples["Rh6G"])
    assert 0.0 < sample.spectral_overlap_ratio < 1.0
    assert config.sim is not None and config.sim.powers_uw == [4.0, 6.0, 8.0, 10.0, 12.0]


def test_missing_config_file_raises_os_error(tmp_path):
    with pytest.raises(OSError):
        ConfigRepository().load(tmp_path / "absent.ini")


def test_load_example_count_series(data_dir):
    series = SeriesRepository().load(data_dir / "count_series_example.csv")
    assert series.power_uw == 8.0
    assert series.counts.size == 80
    assert math.isclose(series.duration_s, 2.0)
    assert series.label == "Rh6G 8uW example"


def test_saved_series_keeps_metadata(tmp_path, data_dir):
    repo = SeriesRepository()
    series = repo.load(data_dir / "count_series_example.csv")
    path = repo.save(series, tmp_path / "copy.csv", rng_seed=42)
    reloaded = repo.load(path)
    assert np.array_equal(reloaded.counts, series.counts)
    assert reloaded.phases == series.phases
    assert repo.seeds(str(tmp_path / "*.csv")) == {str(path): 42}


def test_unknown_phase_points_at_its_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# t_end_s=2\nt_start_s,counts,phase\n0,5,signal\n1,3,sideways\n")
    with pytest.raises(DataFormatError) as info:
        SeriesRepository().load(path)
    assert info.value.line == 4


def test_non_numeric_counts_are_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t_start_s,counts,phase\n0,5,signal\n1,many,background\n")
    with pytest.raises(DataFormatError) as info:
        SeriesRepository().load(path)
    assert info.value.line == 3


def test_empty_glob_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        SeriesRepository().load_glob(str(tmp_path / "*.csv"))


def test_load_rates_record(data_dir):
    rates, interval = SeriesRepository().load_rates(data_dir / "rates_example.csv")
    assert rates.size == 3600
    assert interval == 1.0


def test_single_column_rates_need_interval(tmp_path):
    path = tmp_path / "rates.csv"
    path.write_text("1.0\n2.0\n3.0\n")
    with pytest.raises(DataFormatError):
        SeriesRepository().load_rates(path)
    path.write_text("# interval_s=0.5\n1.0\n2.0\n3.0\n")
    rates, interval = SeriesRepository().load_rates(path)
    assert interval == 0.5 and rates.size == 3


def test_load_example_jsi_and_resample(data_dir):
    jsi = JsiRepository().load_jsi(data_dir / "jsi_example.txt")
    assert jsi.unit == GridUnit.NANOMETER
    assert math.isclose(jsi.mass, 1.0, rel_tol=1e-12)
    resampled = resample_to_frequency(jsi, 128)
    assert resampled.unit == GridUnit.RAD_PER_FS
    assert resampled.intensity.shape == (128, 128)
    assert math.isclose(resampled.mass, 1.0, rel_tol=1e-12)
    assert abs(resampled.pump_center / wavelength_to_angular_frequency(810.0) - 1.0) < 0.01


def test_malformed_jsi_row(tmp_path):
    path = tmp_path / "jsi.txt"
    path.write_text("0 800 810\n800 1 2\n810 3 x\n")
    with pytest.raises(DataFormatError) as info:
        JsiRepository().load_jsi(path)
    assert info.value.line == 3


def test_jti_grid_with_zero_delay_is_written(tmp_path):
    times = (np.arange(6) - 3) * 2.5
    intensity = np.outer(np.exp(-(times**2) / 20.0), np.exp(-(times**2) / 30.0))
    jti = JointTemporal(grid_ts=times, grid_ti=times, intensity=intensity)
    path = JsiRepository().save_jti(jti, tmp_path / "jti.csv")

    table = pd.read_csv(path, comment="#", header=None).to_numpy()
    assert table.shape == (7, 7)
    np.testing.assert_allclose(table[0, 1:], times)
    np.testing.assert_allclose(table[1:, 0], times)
    np.testing.assert_allclose(table[1:, 1:], intensity, rtol=1e-9)


def test_jsi_grid_round_trip(tmp_path):
    omega = np.linspace(2.2, 2.45, 5)
    intensity = np.arange(25, dtype=float).reshape(5, 5) + 1.0
    jsi = JointSpectrum(
        grid_s=omega,
        grid_i=omega,
        intensity=intensity / intensity.sum(),
        unit=GridUnit.RAD_PER_FS,
        pump_center=2.325,
    )
    repo = JsiRepository()
    loaded = repo.load_jsi(repo.save_jsi(jsi, tmp_path / "jsi.csv"))
    assert loaded.unit == GridUnit.RAD_PER_FS
    assert loaded.pump_center == 2.325
    np.testing.assert_allclose(loaded.grid_i, omega)
    np.testing.assert_allclose(loaded.intensity, jsi.intensity, rtol=1e-9)


def test_spectrum_out_of_range_is_rejected(tmp_path):
    path = tmp_path / "filter.csv"
    path.write_text("wavelength_nm,t\n500,0.5\n600,1.5\n")
    with pytest.raises(DataFormatError):
        SpectrumRepository(tmp_path).load("filter.csv", SpectrumKind.TRANSMITTANCE)


def test_spectrum_cache(data_dir):
    repo = SpectrumRepository(data_dir)
    first = repo.load("spectra/detector_qe.csv", SpectrumKind.QUANTUM_EFFICIENCY)
    assert repo.load("spectra/detector_qe.csv", SpectrumKind.QUANTUM_EFFICIENCY) is first


def test_report_emitter_writes_report_and_records(tmp_path):
    stream = io.StringIO()
    emitter = ReportEmitter("sigma-c", tmp_path, stream=stream)
    emitter.provenance({"b": 2, "a": 0.123456789})
    emitter.section("result")
    emitter.values({"rate": 1.5})
    csv_path = emitter.table("points", pd.DataFrame({"x": [1, 2]}))
    path = emitter.close()

    assert path == tmp_path / "sigma_c_report.txt"
    text = path.read_text()
    assert text == stream.getvalue()
    assert text.index("a = 0.123457") < text.index("b = 2")
    assert "[result]" in text and "rate = 1.5" in text
    assert csv_path is not None and csv_path.exists()
    assert csv_path in emitter.written
    with pytest.raises(RuntimeError):
        emitter.line("late")


def test_report_without_output_directory():
    emitter = ReportEmitter("bounds", None)
    emitter.values({"x": [1.0, 2.5]})
    assert emitter.records("rows", [{"x": 1}]) is None
    assert emitter.close() is None
    assert format_value([1.0, 2.5]) == "1, 2.5"
