import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from bipartite_spectra.weights import (
    NotSamplableError,
    WeightModel,
    even_moments,
    sample_weight,
    sample_weights,
    validate_growth,
)


def test_rademacher_moments():
    assert even_moments(WeightModel.rademacher(), 3) == [1, 1, 1]


def test_gaussian_moments_double_factorial():
    assert even_moments(WeightModel.gaussian(1), 3) == [1, 3, 15]
    assert even_moments(WeightModel.gaussian(2), 2, exact=True) == [4, 48]


def test_uniform_moments_against_quadrature():
    got = even_moments(WeightModel.uniform_symmetric(1), 2)
    for f, val in enumerate(got, start=1):
        ref, _ = integrate.quad(lambda x: x ** (2 * f) / 2, -1, 1)
        assert val == pytest.approx(ref, rel=1e-12)
    assert even_moments(WeightModel.uniform_symmetric(1), 2, exact=True) == [Fraction(1, 3), Fraction(1, 5)]


def test_constant_moments():
    assert even_moments(WeightModel.constant(2), 3) == [4, 16, 64]


def test_custom_moments():
    m = WeightModel.custom([1, 3, 15, 105])
    assert even_moments(m, 3) == [1.0, 3.0, 15.0]
    with pytest.raises(ValueError, match="need 5"):
        even_moments(m, 5)


def test_custom_negative_rejected():
    with pytest.raises(ValueError, match="nonnegative"):
        WeightModel.custom([1, -2])


def test_custom_not_log_convex_warns():
    with pytest.warns(UserWarning, match="log-convexity"):
        WeightModel.custom([1, 5, 1])


def test_custom_is_not_samplable():
    with pytest.raises(NotSamplableError):
        sample_weight(WeightModel.custom([1, 1]), np.random.default_rng(0))


def test_constant_sample():
    assert sample_weight(WeightModel.constant(2), np.random.default_rng(3)) == 2


def test_rademacher_support_and_square():
    x = sample_weights(WeightModel.rademacher(), np.random.default_rng(1), 100_000)
    assert set(np.unique(x)) == {-1.0, 1.0}
    assert np.mean(x**2) == 1.0


@pytest.mark.parametrize("f", [1, 2, 3])
def test_gaussian_empirical_moments(f):
    x = sample_weights(WeightModel.gaussian(1), np.random.default_rng(7), 1_000_000)
    y = x ** (2 * f)
    se = y.std(ddof=1) / math.sqrt(len(y))
    assert abs(y.mean() - even_moments(WeightModel.gaussian(1), f)[-1]) <= 5 * se


def test_moments_independent_of_rng():
    np.random.seed(1)
    a = even_moments(WeightModel.uniform_symmetric(3), 4)
    np.random.seed(2)
    assert even_moments(WeightModel.uniform_symmetric(3), 4) == a


def test_growth_rademacher():
    assert validate_growth(even_moments(WeightModel.rademacher(), 5)) == 1.0


def test_growth_gaussian():
    ref = max(math.prod(range(1, 2 * f, 2)) ** (1 / (2 * f)) / f for f in range(1, 6))
    assert validate_growth(even_moments(WeightModel.gaussian(1), 5)) == pytest.approx(ref)


def test_growth_constant():
    assert validate_growth(even_moments(WeightModel.constant(10), 3)) == pytest.approx(10)


def test_growth_monotone_in_sequence():
    a = [1, 3, 15]
    b = [2, 3, 20]
    assert validate_growth(a) <= validate_growth(b)


def test_growth_empty():
    with pytest.raises(ValueError):
        validate_growth([])


@pytest.mark.parametrize(
    "text, model",
    [
        ("rademacher", WeightModel.rademacher()),
        ("gaussian:2", WeightModel.gaussian(2)),
        ("constant:1/2", WeightModel.constant(Fraction(1, 2))),
        ("custom:1,3,15", WeightModel.custom([1, 3, 15])),
        ('{"model": "uniform_symmetric", "param": 1}', WeightModel.uniform_symmetric(1)),
    ],
)
def test_parse(text, model):
    assert WeightModel.parse(text) == model


def test_dict_round_trip():
    for m in (WeightModel.gaussian(0.5), WeightModel.custom([1, 2]), WeightModel.rademacher()):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert WeightModel.from_dict(m.to_dict()) == m


def test_bad_models():
    with pytest.raises(ValueError):
        WeightModel.gaussian(0)
    with pytest.raises(ValueError):
        WeightModel("cauchy")
