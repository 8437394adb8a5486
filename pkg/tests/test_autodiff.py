from dataclasses import dataclass
from typing import Callable

import numpy as np
import pytest
import tensorflow as tf

from prosailtvae.autodiff import forward, gradient, grad_check, safe_where, safe_divide, check_domain, as_domain_error
from prosailtvae.errors import NonFiniteError, DomainError
from prosailtvae.test import compile_configs
from prosailtvae.types import PARAMETER_NAMES


@dataclass
class GradientExpectPair:
    name: str
    f: Callable[[tf.Tensor], tf.Tensor]
    x: np.ndarray
    expect: Callable[[np.ndarray], np.ndarray]


functions = [
    GradientExpectPair('polynomial', lambda x: tf.reduce_sum(x ** 3),
                       np.array([1.0, -2.0, 0.5]), lambda x: 3 * x ** 2),
    GradientExpectPair('exp_sin', lambda x: tf.math.exp(x[0]) * tf.math.sin(x[1]),
                       np.array([0.3, 1.2]), lambda x: np.array([np.exp(x[0]) * np.sin(x[1]),
                                                                 np.exp(x[0]) * np.cos(x[1])])),
    GradientExpectPair('log_sum', lambda x: tf.math.log(tf.reduce_sum(x)),
                       np.array([1.0, 2.0, 3.0]), lambda x: np.full(x.shape, 1 / np.sum(x)))
]


@pytest.mark.parametrize("info", functions, ids=lambda info: info.name)
def test_reverse_mode_gradient(info):
    y, tape = forward(info.f, info.x)
    np.testing.assert_allclose(y.numpy()[0], info.f(tf.constant(info.x)).numpy())
    np.testing.assert_allclose(gradient(tape), info.expect(info.x), rtol=1e-12)


def test_multiple_outputs_share_one_tape():
    y, tape = forward(lambda x: tf.stack([x[0] * x[1], x[1] ** 2]), [2.0, 3.0])
    np.testing.assert_allclose(y.numpy(), [6.0, 9.0])
    np.testing.assert_allclose(gradient(tape, 0), [3.0, 2.0])
    np.testing.assert_allclose(gradient(tape, 1), [0.0, 6.0])


def test_unreached_inputs_are_zero():
    _, tape = forward(lambda x: x[0] * 2.0, [1.0, 5.0])
    np.testing.assert_allclose(gradient(tape), [2.0, 0.0])


@pytest.mark.parametrize("info", functions, ids=lambda info: info.name)
def test_grad_check_passes(info):
    report = grad_check(info.f, info.x, step=1e-6, tol=1e-6)
    assert report.passed, str(report)
    assert list(report.table.columns) == ['coordinate', 'analytic', 'numeric', 'abs_error', 'rel_error', 'passed']
    assert report.table.shape[0] == info.x.size


def test_grad_check_detects_wrong_gradient():
    @tf.custom_gradient
    def wrong_square(x):
        return x * x, lambda upstream: upstream * 3.0 * x

    report = grad_check(lambda x: tf.reduce_sum(wrong_square(x)), [1.0, 2.0])
    assert not report.passed
    np.testing.assert_allclose(report.max_error, 1 / 3)
    assert report.worst_coordinate in (0, 1)
    assert 'FAILED' in str(report)


def test_grad_check_step_validation():
    with pytest.raises(ValueError, match='step must be positive'):
        grad_check(lambda x: tf.reduce_sum(x), [1.0], step=0.0)


def test_grad_check_prosail(decoder, typical_params):
    band = decoder.band_ids.index('B5')
    # interior point, central differences must not cross cbrown = 0
    x = np.array(typical_params)
    x[PARAMETER_NAMES.index('cbrown')] = 0.1
    report = grad_check(lambda x: decoder(x[tf.newaxis, :])[0, band], x, step=np.abs(x) * 1e-6, tol=1e-4)
    assert report.passed, str(report)
    assert report.table.shape[0] == len(PARAMETER_NAMES)


@pytest.mark.parametrize("x", [[0.0], [-1.0]], ids=['log_zero', 'log_negative'])
def test_non_finite_names_the_primitive(x):
    with pytest.raises(NonFiniteError, match='Log') as info:
        forward(lambda x: tf.math.log(x) * 2.0, x)
    assert info.value.op_name == 'Log'
    assert 'log domain' in str(info.value)


def test_non_finite_check_is_optional():
    y, _ = forward(lambda x: tf.math.log(x), [0.0], check_numerics=False)
    assert np.isneginf(y.numpy()[0])


def test_safe_where_gradient():
    x = tf.constant([0.0, 4.0], dtype=tf.dtypes.float64)
    with tf.GradientTape() as tape:
        tape.watch(x)
        y = safe_where(x > 0, tf.math.sqrt, lambda x: tf.zeros_like(x), x)
    np.testing.assert_allclose(y.numpy(), [0.0, 2.0])
    np.testing.assert_allclose(tape.gradient(y, x).numpy(), [0.0, 0.25])

    with tf.GradientTape() as tape:
        tape.watch(x)
        y = tf.where(x > 0, tf.math.sqrt(x), tf.zeros_like(x))
    assert not np.all(np.isfinite(tape.gradient(y, x).numpy()))


def test_safe_divide():
    num = tf.constant([1.0, 2.0], dtype=tf.dtypes.float64)
    den = tf.constant([0.0, 4.0], dtype=tf.dtypes.float64)
    with tf.GradientTape() as tape:
        tape.watch(den)
        y = safe_divide(num, den, fallback=7.0)
    np.testing.assert_allclose(y.numpy(), [7.0, 0.5])
    np.testing.assert_allclose(tape.gradient(y, den).numpy(), [0.0, -2.0 / 16.0])


def test_check_domain():
    check_domain(tf.constant([True, True]), 'unused')
    with pytest.raises(DomainError, match='LAI must be non-negative'):
        check_domain(tf.constant([True, False]), 'LAI must be non-negative')


@pytest.mark.parametrize("config", compile_configs, ids=lambda config: config.name)
def test_check_domain_in_forward(config):
    def scaled(x):
        check_domain(x >= 0.0, 'LAI must be non-negative')
        return x * 2.0

    y, _ = forward(config.compile(scaled), [1.0, 2.0])
    np.testing.assert_allclose(y.numpy(), [2.0, 4.0])
    with pytest.raises(DomainError, match='^LAI must be non-negative$'):
        forward(config.compile(scaled), [1.0, -2.0])


def test_check_domain_graph_assertion():
    @tf.function
    def scaled(x):
        check_domain(x >= 0.0, 'LAI must be non-negative')
        return x * 2.0

    with pytest.raises(tf.errors.InvalidArgumentError) as info:
        scaled(tf.constant([-1.0], dtype=tf.dtypes.float64))
    error = as_domain_error(info.value)
    assert isinstance(error, DomainError)
    assert str(error) == 'LAI must be non-negative'

    with pytest.raises(tf.errors.InvalidArgumentError) as other:
        tf.debugging.check_numerics(tf.constant([np.nan]), 'not a domain check')
    assert as_domain_error(other.value) is None
