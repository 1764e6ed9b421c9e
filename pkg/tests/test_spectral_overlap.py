"""Collected-emission overlap integral."""

import numpy as np
import pytest

from src.models.sample import Spectrum, SpectrumKind
from src.tools.spectral_overlap import (
    collection_efficiency,
    spectral_overlap,
    spectral_overlap_ratio,
    union_grid,
)
from src.utils.exceptions import DomainError, GridError


def _flat(kind, value, lower=450.0, upper=650.0, name=""):
    return Spectrum(
        wavelength_nm=[lower, upper], intensity=[value, value], kind=kind, name=name or kind.value
    )


@pytest.fixture
def emission():
    grid = np.linspace(500.0, 600.0, 101)
    return Spectrum(
        wavelength_nm=grid,
        intensity=np.exp(-0.5 * ((grid - 550.0) / 15.0) ** 2),
        kind=SpectrumKind.EMISSION,
        name="gaussian",
    )


@pytest.mark.parametrize(
    "reflectance, cuvette, expected",
    [
        (0.0, None, 0.5),
        (1.0, None, 1.0),
        (1.0, 0.9, 0.9 * 0.5 * (1.0 + 0.81)),
    ],
)
def test_flat_chain_scales_the_yield(emission, reflectance, cuvette, expected):
    """With flat components the ratio equals gamma."""
    qe = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 1.0)
    mirror = _flat(SpectrumKind.REFLECTANCE, reflectance)
    wall = _flat(SpectrumKind.TRANSMITTANCE, cuvette) if cuvette is not None else None
    ratio = spectral_overlap_ratio(emission, [], qe, mirror, quantum_yield=0.9, cuvette=wall)
    assert np.isclose(ratio, expected, rtol=1e-9)


def test_overlap_is_normalized_to_quantum_yield(emission):
    qe = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 0.5)
    mirror = _flat(SpectrumKind.REFLECTANCE, 0.0)
    overlap = spectral_overlap(emission, [], qe, mirror, quantum_yield=0.9)
    assert np.isclose(overlap, 0.9 * 0.5 * 0.5, rtol=1e-9)


def test_chain_elements_multiply(emission):
    qe = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 1.0)
    mirror = _flat(SpectrumKind.REFLECTANCE, 0.0)
    chain = [_flat(SpectrumKind.TRANSMITTANCE, 0.8), _flat(SpectrumKind.TRANSMITTANCE, 0.5)]
    ratio = spectral_overlap_ratio(emission, chain, qe, mirror, quantum_yield=0.9)
    assert np.isclose(ratio, 0.8 * 0.5 * 0.5, rtol=1e-9)


def test_component_gap_raises(emission):
    qe = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 1.0, lower=520.0, name="narrow_qe")
    mirror = _flat(SpectrumKind.REFLECTANCE, 0.0)
    with pytest.raises(GridError, match="narrow_qe"):
        spectral_overlap(emission, [], qe, mirror)


def test_fill_outside_treats_gap_as_opaque(emission):
    narrow = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 1.0, lower=550.0)
    wide = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 1.0)
    mirror = _flat(SpectrumKind.REFLECTANCE, 0.0)
    clipped = spectral_overlap(emission, [], narrow, mirror, quantum_yield=1.0, fill_outside=True)
    full = spectral_overlap(emission, [], wide, mirror, quantum_yield=1.0)
    assert 0.4 * full < clipped < 0.6 * full


def test_rejects_non_emission_curve():
    not_emission = _flat(SpectrumKind.TRANSMITTANCE, 0.5)
    qe = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 1.0)
    mirror = _flat(SpectrumKind.REFLECTANCE, 0.0)
    with pytest.raises(DomainError):
        spectral_overlap(not_emission, [], qe, mirror)


def test_union_grid_keeps_every_sample_point(emission):
    filt = Spectrum(
        wavelength_nm=[450.0, 555.5, 650.0],
        intensity=[1.0, 0.5, 0.0],
        kind=SpectrumKind.TRANSMITTANCE,
    )
    grid = union_grid([emission, filt], 500.0, 600.0)
    assert 555.5 in grid and grid[0] == 500.0 and grid[-1] == 600.0
    assert np.all(np.diff(grid) > 0)


def test_collection_efficiency_on_grid():
    grid = np.array([500.0, 550.0])
    qe = _flat(SpectrumKind.QUANTUM_EFFICIENCY, 0.6)
    mirror = _flat(SpectrumKind.REFLECTANCE, 1.0)
    gamma = collection_efficiency(grid, [], qe, mirror)
    assert np.allclose(gamma, 0.6)


def test_published_spectra_give_a_physical_ratio(data_dir):
    from src.repositories.spectrum_repository import SpectrumRepository

    repo = SpectrumRepository(data_dir)
    ratio = spectral_overlap_ratio(
        repo.load("spectra/emission_rh6g.csv", SpectrumKind.EMISSION),
        repo.load_many(
            ["spectra/shortpass_filter.csv", "spectra/lens_pair.csv"],
            SpectrumKind.TRANSMITTANCE,
        ),
        repo.load("spectra/detector_qe.csv", SpectrumKind.QUANTUM_EFFICIENCY),
        repo.load("spectra/mirror_reflectance.csv", SpectrumKind.REFLECTANCE),
        quantum_yield=0.9,
        cuvette=repo.load("spectra/cuvette_wall.csv", SpectrumKind.TRANSMITTANCE),
    )
    assert 0.0 < ratio < 1.0


def _smooth(kind, offset, amplitude, points=21, name=""):
    grid = np.linspace(450.0, 650.0, points)
    return Spectrum(
        wavelength_nm=grid,
        intensity=offset + amplitude * np.sin(grid / 40.0),
        kind=kind,
        name=name or kind.value,
    )


def _refined(spectrum):
    grid = np.linspace(spectrum.lower_nm, spectrum.upper_nm, 2 * spectrum.wavelength_nm.size - 1)
    return spectrum.model_copy(
        update={
            "wavelength_nm": grid,
            "intensity": np.interp(grid, spectrum.wavelength_nm, spectrum.intensity),
        }
    )


@pytest.fixture
def smooth_chain():
    return (
        [_smooth(SpectrumKind.TRANSMITTANCE, 0.6, 0.3, name="filter")],
        _smooth(SpectrumKind.QUANTUM_EFFICIENCY, 0.5, 0.2),
        _smooth(SpectrumKind.REFLECTANCE, 0.7, 0.2),
    )


@pytest.mark.parametrize("lowered", ["filter", "mirror"])
def test_lowering_a_transmittance_never_raises_the_overlap(emission, smooth_chain, lowered):
    chain, qe, mirror = smooth_chain
    base = spectral_overlap(emission, chain, qe, mirror, quantum_yield=0.9)
    target = chain[0] if lowered == "filter" else mirror
    dip = 1.0 - 0.5 * np.exp(-0.5 * ((target.wavelength_nm - 560.0) / 20.0) ** 2)
    darker = target.model_copy(update={"intensity": target.intensity * dip})
    if lowered == "filter":
        chain = [darker]
    else:
        mirror = darker
    assert spectral_overlap(emission, chain, qe, mirror, quantum_yield=0.9) < base


def test_overlap_converges_on_a_finer_grid(emission, smooth_chain):
    chain, qe, mirror = smooth_chain
    coarse = spectral_overlap(emission, chain, qe, mirror, quantum_yield=0.9)
    fine = spectral_overlap(
        _refined(emission),
        [_refined(s) for s in chain],
        _refined(qe),
        _refined(mirror),
        quantum_yield=0.9,
    )
    assert abs(fine / coarse - 1.0) < 1e-3
