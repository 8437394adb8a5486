from dataclasses import dataclass

import numpy as np
import pytest
import scipy.special
import tensorflow as tf

from prosailtvae.errors import DomainError
from prosailtvae.rtm import exp1, plate_transmission, tav, prospect5
from prosailtvae.test import reference_prospect
from prosailtvae.types import LeafParams


@dataclass
class LeafCase:
    name: str
    n: float
    cab: float
    car: float
    cbrown: float
    cw: float
    cm: float


leaf_cases = [
    LeafCase('typical', 1.5, 40.0, 8.0, 0.0, 0.01, 0.009),
    LeafCase('thin', 1.0, 20.0, 5.0, 0.0, 0.0075, 0.003),
    LeafCase('thick_brown', 1.8, 90.0, 23.0, 2.0, 0.075, 0.011),
    LeafCase('no_pigment', 1.2, 0.0, 0.0, 0.0, 0.02, 0.005)
]


def _leaf(case, batch=1):
    return LeafParams(*(tf.constant([getattr(case, name)] * batch, dtype=tf.dtypes.float64)
                        for name in ('n', 'cab', 'car', 'cbrown', 'cw', 'cm')))


def test_exp1_matches_scipy():
    x = np.concatenate([np.geomspace(1e-10, 2.0, 200), np.linspace(2.0, 60.0, 200)])
    np.testing.assert_allclose(exp1(tf.constant(x)).numpy(), scipy.special.exp1(x), rtol=1e-9)


def test_plate_transmission_limits():
    np.testing.assert_allclose(plate_transmission(tf.constant([0.0, 1e-12], dtype=tf.dtypes.float64)).numpy(),
                               [1.0, 1.0], atol=1e-11)
    k = np.geomspace(1e-6, 50.0, 100)
    expect = (1 - k) * np.exp(-k) + k ** 2 * scipy.special.exp1(k)
    np.testing.assert_allclose(plate_transmission(tf.constant(k)).numpy(), expect, rtol=1e-9)


def test_plate_transmission_gradient():
    k = tf.constant([0.0, 1e-9, 0.1, 1.0, 5.0], dtype=tf.dtypes.float64)
    with tf.GradientTape() as tape:
        tape.watch(k)
        tau = plate_transmission(k)
    k_np = k.numpy()[2:]
    expect = np.concatenate([[-2.0, -2.0], 2.0 * (k_np * scipy.special.exp1(k_np) - np.exp(-k_np))])
    np.testing.assert_allclose(tape.gradient(tau, k).numpy(), expect, rtol=1e-6)


def test_tav_range():
    n = np.linspace(1.05, 1.8, 20)
    for angle in (40.0, 90.0):
        t = tav(angle, n).numpy()
        assert np.all(t > 0) and np.all(t <= 1)
    # normal-incidence Fresnel transmission bounds the hemispherical average from above
    assert np.all(tav(90.0, n).numpy() < 4 * n / (n + 1) ** 2)


@pytest.mark.parametrize("case", leaf_cases, ids=lambda case: case.name)
def test_prospect_matches_reference(assets, case):
    optics = prospect5(_leaf(case), assets.tables)
    r_expect, t_expect = reference_prospect(case.n, case.cab, case.car, case.cbrown, case.cw, case.cm, assets.tables)
    np.testing.assert_allclose(optics.reflectance.numpy()[0], r_expect, rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(optics.transmittance.numpy()[0], t_expect, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("case", leaf_cases, ids=lambda case: case.name)
def test_prospect_energy_conservation(assets, case):
    optics = prospect5(_leaf(case, batch=2), assets.tables)
    r, t = optics.reflectance.numpy(), optics.transmittance.numpy()
    assert r.shape == t.shape == (2, assets.grid.count)
    assert np.all(r > 0) and np.all(t >= 0)
    assert np.all(r + t <= 1.0 + 1e-12)


def test_prospect_rejects_n_below_one(assets):
    case = LeafCase('invalid', 0.9, 40.0, 8.0, 0.0, 0.01, 0.009)
    with pytest.raises(DomainError, match='N must be >= 1'):
        prospect5(_leaf(case), assets.tables)


def test_prospect_rejects_negative_content(assets):
    case = LeafCase('invalid', 1.5, -1.0, 8.0, 0.0, 0.01, 0.009)
    with pytest.raises(DomainError, match='non-negative'):
        prospect5(_leaf(case), assets.tables)
