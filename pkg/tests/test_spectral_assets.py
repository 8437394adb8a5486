import numpy as np
import pytest
import tensorflow as tf

from prosailtvae.errors import AssetError
from prosailtvae.rtm import ProsailDecoder
from prosailtvae.spectral import load_assets, load_coefficient_tables, load_srf, resample, verify_checksums, \
    write_checksum_manifest, convolve_to_bands, band_centers, default_assets_dir, COEFFICIENT_FILE, SRF_FILE, ASSETS_ENV
from prosailtvae.test import write_synthetic_assets, S2_BAND_CENTERS
from prosailtvae.types import BAND_IDS, SpectralGrid, SpectrumCurve


def test_synthetic_assets_load(assets):
    assert assets.grid == SpectralGrid(400.0, 1.0, 2101)
    assert assets.srf.band_ids == BAND_IDS
    assert set(assets.checksums) == {'prospect5.txt', 'soil.txt', 's2_srf.txt'}
    np.testing.assert_allclose(np.sum(assets.srf.weight_matrix, axis=0), np.ones(len(BAND_IDS)))


def test_band_centers(assets):
    np.testing.assert_allclose(band_centers(assets.srf), [S2_BAND_CENTERS[band][0] for band in BAND_IDS], atol=0.5)


def test_convolve_constant_spectrum(assets):
    spectrum = SpectrumCurve(assets.grid, np.full(assets.grid.count, 0.3))
    np.testing.assert_allclose(convolve_to_bands(spectrum, assets.srf).numpy(), np.full(len(BAND_IDS), 0.3))


def test_convolve_is_linear(assets):
    rng = np.random.default_rng(0)
    x, y = rng.uniform(size=(2, assets.grid.count))
    combined = convolve_to_bands(2.0 * x + 3.0 * y, assets.srf).numpy()
    separate = 2.0 * convolve_to_bands(x, assets.srf).numpy() + 3.0 * convolve_to_bands(y, assets.srf).numpy()
    np.testing.assert_allclose(combined, separate, rtol=1e-12)


def test_convolve_grid_mismatch(assets):
    with pytest.raises(ValueError, match='grid mismatch'):
        convolve_to_bands(np.zeros(10), assets.srf)


def test_resample_linear():
    grid = SpectralGrid(400.0, 1.0, 11)
    curve = resample(np.array([390.0, 420.0]), np.array([0.0, 3.0]), grid)
    np.testing.assert_allclose(curve.values, 0.1 * (grid.wavelengths - 390.0))


def test_resample_requires_coverage():
    with pytest.raises(AssetError, match='does not include'):
        resample(np.array([450.0, 500.0]), np.array([0.0, 1.0]), SpectralGrid(400.0, 1.0, 11))


def test_non_monotonic_grid(tmp_path):
    path = tmp_path / COEFFICIENT_FILE
    path.write_text('# header\n'
                    '400 1.5 0 0 0 0 0\n'
                    '410 1.5 0 0 0 0 0\n'
                    '405 1.5 0 0 0 0 0\n')
    with pytest.raises(AssetError, match=f'{COEFFICIENT_FILE}:4: non-monotonic'):
        load_coefficient_tables(path)


def test_negative_absorption(tmp_path):
    path = tmp_path / COEFFICIENT_FILE
    path.write_text('400 1.5 0 0 0 0 0\n'
                    '410 1.5 -1 0 0 0 0\n')
    with pytest.raises(AssetError, match=':2: negative absorption'):
        load_coefficient_tables(path)


def test_malformed_row(tmp_path):
    path = tmp_path / COEFFICIENT_FILE
    path.write_text('400 1.5 0 0 0 0 0\n'
                    '410 1.5 0 0 0 0\n')
    with pytest.raises(AssetError, match=':2: expected 7 columns'):
        load_coefficient_tables(path)


def test_missing_file(tmp_path):
    with pytest.raises(AssetError, match='file not found'):
        load_coefficient_tables(tmp_path / 'missing.txt')


def test_srf_band_count(tmp_path, assets):
    path = tmp_path / SRF_FILE
    path.write_text('wavelength B2 B3\n'
                    '400 0 0\n'
                    '500 1 1\n'
                    '600 0 0\n')
    with pytest.raises(AssetError, match='expected 10 bands, found 2'):
        load_srf(path, assets.grid)


def test_checksum_mismatch(tmp_path):
    directory = write_synthetic_assets(tmp_path)
    with open(directory / SRF_FILE, 'a') as fp:
        fp.write('# modified\n')
    with pytest.raises(AssetError, match=f'{SRF_FILE}: checksum mismatch'):
        load_assets(directory)

    write_checksum_manifest(directory)
    assert set(verify_checksums(directory)) == {'prospect5.txt', 'soil.txt', 's2_srf.txt'}


def test_missing_checksum_manifest(tmp_path):
    directory = write_synthetic_assets(tmp_path, checksums=False)
    with pytest.raises(AssetError, match='SHA256SUMS: file not found'):
        load_assets(directory)
    assert load_assets(directory, verify=False).grid.count == 2101


def test_rectangular_response(tmp_path):
    bundle = load_assets(write_synthetic_assets(tmp_path, srf_shape='rectangular'))
    start, stop = bundle.srf.support()
    assert bundle.grid.wavelengths[start] == pytest.approx(490.0 - 32.5, abs=1.0)
    assert bundle.grid.wavelengths[stop - 1] == pytest.approx(2190.0 + 90.0, abs=1.0)


@pytest.mark.parametrize('header', [
    'wavelength B3 B2 B4 B5 B6 B7 B8 B8A B11 B12',
    'wavelength b2 b3 b4 b5 b6 b7 b8 b8a b11 b12',
    'wavelength B1 B2 B3 B4 B5 B6 B7 B8 B11 B12',
], ids=lambda header: header.split()[1] + '_first')
def test_srf_band_ids(tmp_path, assets, header):
    path = tmp_path / SRF_FILE
    path.write_text(f'# response functions\n{header}\n'
                    '400' + ' 0' * 10 + '\n'
                    '500' + ' 1' * 10 + '\n'
                    '600' + ' 0' * 10 + '\n')
    with pytest.raises(AssetError, match=f'{SRF_FILE}:2: expected bands B2 B3 .* in that order'):
        load_srf(path, assets.grid)


@pytest.fixture
def shipped_assets_dir(monkeypatch):
    monkeypatch.delenv(ASSETS_ENV, raising=False)
    return default_assets_dir()


def test_shipped_assets(shipped_assets_dir):
    assert set(verify_checksums(shipped_assets_dir)) == {'prospect5.txt', 'soil.txt', 's2_srf.txt'}
    bundle = load_assets(shipped_assets_dir)
    assert bundle.grid == SpectralGrid(400.0, 1.0, 2101)
    assert bundle.srf.band_ids == BAND_IDS
    np.testing.assert_allclose(np.sum(bundle.srf.weight_matrix, axis=0), np.ones(len(BAND_IDS)))
    np.testing.assert_allclose(band_centers(bundle.srf), [S2_BAND_CENTERS[band][0] for band in BAND_IDS], atol=15)


def test_shipped_assets_reflectance(shipped_assets_dir, typical_params):
    bundle = load_assets(shipped_assets_dir)
    bands = dict(zip(BAND_IDS, ProsailDecoder(bundle)(tf.constant([typical_params])).numpy()[0]))
    assert all(0.0 < value < 1.0 for value in bands.values())
    # green peak, red absorption, then the red edge into the near-infrared plateau
    assert bands['B3'] > bands['B4']
    assert bands['B4'] < bands['B5'] < bands['B6'] < bands['B7'] < bands['B8A']
    assert bands['B8'] > 0.3 and bands['B4'] < 0.1
