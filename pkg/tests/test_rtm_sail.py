from dataclasses import dataclass

import numpy as np
import pytest
import tensorflow as tf

from prosailtvae.errors import DomainError
from prosailtvae.rtm import prospect5, soil_spectrum, lidf_weights, lidf_classes, canopy_reflectance_factors
from prosailtvae.test import reference_prospect, reference_sail
from prosailtvae.types import LeafParams, CanopyParams, ViewGeometry


@dataclass
class CanopyCase:
    name: str
    lai: float
    ala: float
    hotspot: float
    tts: float
    tto: float
    psi: float


canopy_cases = [
    CanopyCase('typical', 3.0, 60.0, 0.2, 30.0, 5.0, 90.0),
    CanopyCase('sparse', 0.3, 30.0, 0.05, 55.0, 0.0, 0.0),
    CanopyCase('dense_erect', 8.0, 80.0, 0.5, 15.0, 10.0, 180.0),
    CanopyCase('hotspot_direction', 2.0, 45.0, 0.1, 40.0, 40.0, 0.0),
    CanopyCase('no_hotspot', 4.0, 57.0, 0.0, 25.0, 7.0, 120.0),
]


def _tensor(value):
    return tf.constant([value], dtype=tf.dtypes.float64)


def _run(assets, case, soil_wet=0.3, soil_bright=1.0):
    leaf = LeafParams(*map(_tensor, (1.5, 40.0, 8.0, 0.0, 0.01, 0.009)))
    canopy = CanopyParams(*map(_tensor, (case.lai, case.ala, case.hotspot, soil_wet, soil_bright)))
    geometry = ViewGeometry(*map(_tensor, (case.tts, case.tto, case.psi)))
    soil = soil_spectrum(canopy.soil_wet, canopy.soil_bright, assets.soil)
    return canopy_reflectance_factors(prospect5(leaf, assets.tables), canopy, geometry, soil), soil.numpy()[0]


@pytest.mark.parametrize("case", canopy_cases, ids=lambda case: case.name)
def test_sail_matches_reference(assets, case):
    factors, soil = _run(assets, case)
    rho, tau = reference_prospect(1.5, 40.0, 8.0, 0.0, 0.01, 0.009, assets.tables)
    expect = reference_sail(rho, tau, case.lai, case.ala, case.hotspot, soil, case.tts, case.tto, case.psi)
    for name in ('rsot', 'rdot', 'rsdt', 'rddt'):
        np.testing.assert_allclose(getattr(factors, name).numpy()[0], expect[name], rtol=1e-7, atol=1e-10,
                                   err_msg=name)


@pytest.mark.parametrize("case", canopy_cases, ids=lambda case: case.name)
def test_sail_reflectance_range(assets, case):
    factors, _ = _run(assets, case)
    for name in ('rdot', 'rsdt', 'rddt'):
        values = getattr(factors, name).numpy()
        assert np.all(values >= 0) and np.all(values <= 1), name


def test_bare_soil(assets):
    factors, soil = _run(assets, CanopyCase('bare', 0.0, 60.0, 0.2, 30.0, 5.0, 90.0))
    for name in ('rsot', 'rdot', 'rsdt', 'rddt'):
        np.testing.assert_allclose(getattr(factors, name).numpy()[0], soil)


def test_negative_lai(assets):
    with pytest.raises(DomainError, match='LAI must be non-negative'):
        _run(assets, CanopyCase('invalid', -0.1, 60.0, 0.2, 30.0, 5.0, 90.0))


def test_soil_spectrum_clipped(assets):
    soil = soil_spectrum(tf.constant([0.0, 1.0], dtype=tf.dtypes.float64),
                         tf.constant([3.5, 0.3], dtype=tf.dtypes.float64), assets.soil).numpy()
    np.testing.assert_allclose(soil[0], np.clip(3.5 * assets.soil.dry.values, 0, 1))
    np.testing.assert_allclose(soil[1], 0.3 * assets.soil.wet.values)


@pytest.mark.parametrize("ala", [5.0, 30.0, 57.3, 60.0, 80.0, 89.0], ids=lambda ala: f'ala_{ala:g}')
def test_lidf_weights_normalized(ala):
    centers, weights = lidf_weights(tf.constant([ala], dtype=tf.dtypes.float64))
    weights = weights.numpy()[0]
    assert centers.shape == (13, )
    assert np.all(weights >= 0)
    np.testing.assert_allclose(np.sum(weights), 1.0)


def test_lidf_mean_angle_orders_classes():
    centers, weights = lidf_weights(tf.constant([30.0, 80.0], dtype=tf.dtypes.float64))
    mean_angles = weights.numpy() @ centers
    assert mean_angles[0] < mean_angles[1]


def test_lidf_classes():
    bounds, centers = lidf_classes()
    np.testing.assert_allclose(centers, [5., 15., 25., 35., 45., 55., 65., 75., 81., 83., 85., 87., 89.])
    bounds, centers = lidf_classes(18)
    assert bounds[0] == 0 and bounds[-1] == 90 and centers.shape == (18, )
    with pytest.raises(ValueError, match='at least 9'):
        lidf_weights(tf.constant([50.0], dtype=tf.dtypes.float64), n_classes=5)


def test_lai_gradient_is_finite(assets):
    lai = tf.Variable([0.0, 1e-8, 2.0], dtype=tf.dtypes.float64)
    batch = lambda value: tf.constant([value] * 3, dtype=tf.dtypes.float64)  # noqa: E731
    leaf = LeafParams(*map(batch, (1.5, 40.0, 8.0, 0.0, 0.01, 0.009)))
    geometry = ViewGeometry(*map(batch, (30.0, 5.0, 90.0)))
    with tf.GradientTape() as tape:
        canopy = CanopyParams(lai, batch(60.0), batch(0.2), batch(0.5), batch(1.0))
        soil = soil_spectrum(canopy.soil_wet, canopy.soil_bright, assets.soil)
        rsot = canopy_reflectance_factors(prospect5(leaf, assets.tables), canopy, geometry, soil).rsot
        total = tf.reduce_sum(rsot)
    assert np.all(np.isfinite(tape.gradient(total, lai).numpy()))
