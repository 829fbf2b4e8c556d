import math

import pytest

from extropy.errors import AccuracyError, DivergenceError, ParameterError
from extropy.quadrature import DEFAULT_CONFIG, IntegrationConfig, integrate, integrate2d


def test_defaults():
    assert DEFAULT_CONFIG.rel_tol == 1e-10
    assert DEFAULT_CONFIG.abs_tol == 1e-12
    assert DEFAULT_CONFIG.max_evals == 1_000_000


@pytest.mark.parametrize("kw", [{"rel_tol": 0}, {"abs_tol": -1e-3}, {"max_evals": 99}])
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        IntegrationConfig(**kw)


def test_polynomial_and_reversed_limits():
    r = integrate(lambda x: x * x, 0.0, 3.0)
    assert r.value == pytest.approx(9.0, rel=1e-14)
    assert r.error < 1e-10
    assert integrate(lambda x: x * x, 3.0, 0.0).value == pytest.approx(-9.0, rel=1e-14)


def test_infinite_range():
    assert integrate(lambda x: math.exp(-x), 0.0, math.inf).value == pytest.approx(1.0, rel=1e-12)


def test_endpoint_singularity():
    assert integrate(lambda x: 1 / math.sqrt(x), 0.0, 1.0).value == pytest.approx(2.0, rel=1e-10)


def test_divergent_integral_raises():
    with pytest.raises(DivergenceError):
        integrate(lambda x: 1.0, 0.0, math.inf)


def test_accuracy_error_carries_partial_estimate():
    cfg = IntegrationConfig(rel_tol=1e-14, abs_tol=1e-15, max_evals=100)
    with pytest.raises(AccuracyError) as info:
        integrate(lambda x: math.sin(1.0 / x) / x, 1e-4, 1.0, cfg)
    assert math.isfinite(info.value.estimate)
    assert info.value.error > 0


def test_double_integral():
    r = integrate2d(lambda x, y: x * y * y, (0.0, 2.0), (0.0, 3.0))
    assert r.value == pytest.approx(2.0 * 9.0, rel=1e-12)
