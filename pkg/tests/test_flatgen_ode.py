from flatgen.tests import *
from flatgen.ode import *

import pytest

SADDLE = np.array([[0., 1.], [4., 0.]])  # eigenvalues +2 and -2


def linear(a):
    return lambda t, x: x @ a.T


class TestRk4:
    def test_exponential(self):
        t = np.linspace(0, 1, 101)
        x = rk4(lambda t, x: -x, [1.], t)
        assert_close(x[:, 0], np.exp(-t), 1e-9)

    def test_callback(self):
        def stop(t, x):
            if t > 0.5:
                raise StopIteration
        with pytest.raises(StopIteration):
            rk4(lambda t, x: x, [1.], np.linspace(0, 1, 11), stop)


class TestLinearize:
    def test_saddle(self):
        assert_close(linearize(linear(SADDLE), 0., [0.3, -0.1]), SADDLE, 1e-8)


class TestDichotomy:
    def test_saddle(self):
        start, end = dichotomy(np.diag([2., -1.]))
        assert start.shape == end.shape == (1, 2)
        assert_close(np.abs(start), [[0, 1]])
        assert_close(np.abs(end), [[1, 0]])

    def test_centre(self):
        start, end = dichotomy(np.array([[0., 1.], [-1., 0.]]))
        assert start.shape == (2, 2)
        assert end.shape == (0, 2)

    def test_discrete(self):
        start, end = dichotomy(np.diag([0.5, -1.5, 1.]), discrete=True)
        assert start.shape == (2, 3) and end.shape == (1, 3)
        assert_close(start @ [0, 1, 0], np.zeros(2), 1e-12)
        assert_close(np.abs(end), [[0, 1, 0]])

    def test_coupled(self):
        start, end = dichotomy(SADDLE)
        growing, decaying = np.array([1., 2.]), np.array([1., -2.])
        assert_close(start @ growing, [0], 1e-12)
        assert_close(end @ decaying, [0], 1e-12)


class TestShooting:
    def test_saddle(self):
        # the decaying mode leaves the start, the growing one is pinned at the end
        times = np.linspace(0, 10, 1001)
        x, report = shooting(linear(SADDLE), times, [1., 0.], [0., 0.], SADDLE)
        assert report.converged
        assert x.shape == (1001, 2)
        expected = 0.5 * np.exp(-2 * times)[:, None] * [1., -2.]
        assert_close(x, expected, 1e-8)

    def test_stable(self):
        a = np.array([[-1., 0.], [0., -3.]])
        times = np.linspace(0, 2, 201)
        x, report = shooting(linear(a), times, [1., 2.], [5., 5.], a)
        assert_close(x[-1], [np.exp(-2.), 2 * np.exp(-6.)], 1e-9)
