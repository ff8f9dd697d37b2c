import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sasample.distribution import (
    discretize,
    from_pmf,
    load_pmf_csv,
    normal_approx,
    quantile,
    tailed_101,
)


@pytest.mark.parametrize(
    "support, weights, expected",
    [
        ([0], [7], [1.0]),
        ([0, 1], [1, 1], [0.5, 0.5]),
        ([0, 1, 2], [1, 2, 1], [0.25, 0.5, 0.25]),
    ],
)
def test_from_pmf_normalizes(support, weights, expected):
    d = from_pmf(support, weights)
    np.testing.assert_allclose(d.pmf, expected, rtol=0, atol=1e-15)
    assert d.cdf[-1] == 1.0


@pytest.mark.parametrize(
    "support, weights",
    [
        ([0, 1], [1]),
        ([1, 0], [1, 1]),
        ([0, 0], [1, 1]),
        ([0, 1], [0, 0]),
        ([0, 1], [-1, 2]),
        ([0, 1], [np.inf, 1]),
        ([0, 1], [np.nan, 1]),
        ([], []),
    ],
)
def test_from_pmf_rejects(support, weights):
    with pytest.raises(ValueError):
        from_pmf(support, weights)


def test_distribution_is_read_only():
    d = from_pmf([0, 1], [1, 3])
    with pytest.raises(ValueError):
        d.pmf[0] = 0.9


def test_discretize_uniform():
    d = discretize(lambda x: np.ones_like(x), 0.0, 1.0, 3)
    np.testing.assert_allclose(d.pmf, [1 / 3] * 3, atol=1e-15)
    np.testing.assert_allclose(d.support, [0.0, 0.5, 1.0])


def test_discretize_single_point_is_midpoint():
    d = discretize(lambda x: np.ones_like(x), -1.0, 3.0, 1)
    assert d.support.tolist() == [1.0]


@pytest.mark.parametrize("bad", [lambda x: -np.ones_like(x), lambda x: np.full_like(x, np.nan),
                                 lambda x: np.zeros_like(x)])
def test_discretize_rejects_bad_density(bad):
    with pytest.raises(ValueError):
        discretize(bad, 0.0, 1.0, 5)


def test_discretize_rejects_bad_interval():
    with pytest.raises(ValueError):
        discretize(np.ones_like, 1.0, 1.0, 5)
    with pytest.raises(ValueError):
        discretize(np.ones_like, 0.0, 1.0, 0)


@pytest.mark.parametrize("n", [2, 3, 101, 1009])
def test_symmetric_density_gives_symmetric_pmf(n):
    d = discretize(lambda x: np.exp(-np.abs(x)) + 0.1, -3.0, 3.0, n)
    np.testing.assert_allclose(d.pmf, d.pmf[::-1], rtol=0, atol=1e-12)


def test_tailed_101():
    d = tailed_101()
    assert d.n == 101
    assert d.support[0] == -10.0 and d.support[-1] == 10.0
    np.testing.assert_allclose(np.diff(d.support), 0.2, atol=1e-12)
    assert np.argmax(d.pmf) == 50 and d.support[50] == pytest.approx(0.0, abs=1e-12)
    assert d.pmf[-1] / d.pmf[0] == pytest.approx(1.0, abs=1e-12)
    # Density ratio computed from the closed form, independent of scipy.
    phi = lambda x: math.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    expected = (phi(0.0) + 0.02) / (phi(10.0) + 0.02)
    assert expected == pytest.approx(20.95, abs=5e-3)
    assert d.pmf[50] / d.pmf[100] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n, width", [(101, 4.0), (1009, 6.7)])
def test_normal_approx(n, width):
    d = normal_approx(n, width)
    assert d.n == n
    assert d.support[0] == -width and d.support[-1] == width
    assert abs(d.mean()) < 1e-12
    assert np.argmax(d.pmf) == n // 2
    np.testing.assert_allclose(d.pmf, d.pmf[::-1], atol=1e-12)
    # Shape check against the Gaussian density ratio between neighbouring points.
    h = d.support[1] - d.support[0]
    x = d.support[n // 2 + 1]
    assert d.pmf[n // 2 + 1] / d.pmf[n // 2] == pytest.approx(math.exp(-x * x / 2), rel=1e-9)
    assert h == pytest.approx(2 * width / (n - 1))


@pytest.mark.parametrize(
    "pmf, u, expected_index",
    [
        ([0.5, 0.5], 0.25, 0),
        ([0.5, 0.5], 0.5, 1),
        ([0.25, 0.5, 0.25], 0.7, 1),
        ([0.25, 0.5, 0.25], 0.0, 0),
        ([0.25, 0.5, 0.25], 0.75, 2),
    ],
)
def test_quantile(pmf, u, expected_index):
    support = [10.0, 20.0, 30.0][: len(pmf)]
    d = from_pmf(support, pmf)
    assert quantile(d, u) == support[expected_index]
    assert d.quantile(u) == support[expected_index]


@pytest.mark.parametrize("u", [-0.1, 1.0, 1.5])
def test_quantile_rejects_outside_unit_interval(u):
    with pytest.raises(ValueError):
        quantile(from_pmf([0, 1], [1, 1]), u)


def test_quantile_never_returns_trailing_zero_mass():
    d = from_pmf([0, 1, 2], [0.3, 0.7, 0.0])
    assert quantile(d, np.nextafter(1.0, 0.0)) == 1.0


def test_quantile_frequencies_on_uniform_grid():
    d = from_pmf([0, 1, 2], [1, 2, 1])
    m = 10**6
    counts = {0.0: 0, 1.0: 0, 2.0: 0}
    for i in range(m):
        counts[quantile(d, i / m)] += 1
    freq = np.array([counts[0.0], counts[1.0], counts[2.0]]) / m
    assert np.max(np.abs(freq - d.pmf)) <= 3e-3


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.one_of(st.just(0.0), st.floats(1e-3, 100.0)), min_size=1, max_size=40)
    .filter(lambda w: sum(w) > 0)
)
def test_normalization_and_quantile_round_trip(weights):
    d = from_pmf(np.arange(len(weights)), weights)
    assert abs(d.pmf.sum() - 1.0) <= 1e-12
    assert abs(d.cdf[-1] - 1.0) <= 1e-12
    assert np.all(np.diff(d.cdf) >= 0)
    for i in np.flatnonzero(d.pmf > 0):
        u = d.cdf[i] - d.pmf[i] / 2
        assert quantile(d, u) == d.support[i]


def test_load_pmf_csv(tmp_path):
    path = tmp_path / "pmf.csv"
    path.write_text("value,prob\n-1.5,2\n0,1\n2.25,1\n")
    d = load_pmf_csv(path)
    np.testing.assert_allclose(d.support, [-1.5, 0.0, 2.25])
    np.testing.assert_allclose(d.pmf, [0.5, 0.25, 0.25])


@pytest.mark.parametrize(
    "text",
    ["x,y\n0,1\n", "value,prob\n", "value,prob\n1,1\n0,1\n", "value,prob\n0,abc\n"],
)
def test_load_pmf_csv_rejects(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ValueError):
        load_pmf_csv(path)
