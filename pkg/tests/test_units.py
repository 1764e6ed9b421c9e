"""Unit conversions, the error hierarchy and exit codes."""

import math

import pytest

from src.utils import units
from src.utils.exceptions import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_NUMERIC,
    ConfigError,
    CutoffError,
    DataFormatError,
    DomainError,
    GridError,
    SaturationError,
    SingularityError,
    UnreachableError,
    exit_code_for,
)


def test_number_density_of_one_millimolar():
    assert math.isclose(units.number_density(1e-3), 6.02214076e17, rel_tol=1e-12)


@pytest.mark.parametrize("concentration", [0.0, -1e-3])
def test_number_density_rejects_non_positive(concentration):
    with pytest.raises(DomainError):
        units.number_density(concentration)


def test_photon_energy_at_810_nm():
    assert math.isclose(units.photon_energy(810.0), 2.4525e-19, rel_tol=1e-3)


def test_area_conversions_are_inverse():
    assert math.isclose(units.um2_to_cm2(2.1), 2.1e-8)
    assert math.isclose(units.cm2_to_um2(units.um2_to_cm2(2.1)), 2.1)


def test_bandwidth_conversion_matches_differential():
    """d(omega) = 2 pi c d(lambda) / lambda^2."""
    omega_hi = units.wavelength_to_angular_frequency(809.5)
    omega_lo = units.wavelength_to_angular_frequency(810.5)
    assert math.isclose(
        units.bandwidth_nm_to_angular(1.0, 810.0), omega_hi - omega_lo, rel_tol=1e-4
    )


@pytest.mark.parametrize(
    "error, code",
    [
        (ConfigError(["[run]: missing"]), EXIT_CONFIG),
        (DataFormatError("bad row", "x.csv", 3), EXIT_IO),
        (FileNotFoundError("gone"), EXIT_IO),
        (DomainError("negative"), EXIT_NUMERIC),
        (SingularityError("zero", factor="Q"), EXIT_NUMERIC),
        (SaturationError("pole"), EXIT_NUMERIC),
        (UnreachableError("too high"), EXIT_NUMERIC),
        (CutoffError("tail", tail_mass=1e-3), EXIT_NUMERIC),
        (GridError("coarse"), EXIT_NUMERIC),
        (RuntimeError("other"), EXIT_NUMERIC),
    ],
)
def test_exit_code_for(error, code):
    assert exit_code_for(error) == code


def test_config_error_lists_every_problem():
    error = ConfigError(["[apparatus] rep_rate_hz: missing", "[bogus]: unknown section"])
    assert error.problems == ["[apparatus] rep_rate_hz: missing", "[bogus]: unknown section"]
    assert "rep_rate_hz" in str(error) and "bogus" in str(error)


def test_data_format_error_carries_location():
    error = DataFormatError("expected a number", "jsi.txt", 12)
    assert str(error) == "jsi.txt:12: expected a number"
    assert error.line == 12


def test_domain_and_singularity_keep_builtin_bases():
    assert issubclass(DomainError, ValueError)
    assert issubclass(SingularityError, ZeroDivisionError)
    assert SingularityError("zero", factor="overlap").factor == "overlap"
