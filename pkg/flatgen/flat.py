"""
flat output trajectories: position and yaw as polynomials of time

sigma = (x, y, z, psi) with x,y,z the world position of the center of mass
and psi the yaw, each component a polynomial defined on [0, tf]
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = ["http://osterone.bobstgroup.com/wiki/index.php?title=UtlCam"]
__license__ = "LGPL"

import logging
from math import factorial

import numpy as np
from scipy import linalg

from .decorators import memoize
from .polynomial import Polynomial

ORDERS = 4  # highest derivative carried by a FlatSample
DEGREE = 9  # rest to rest: value and 4 derivatives at both ends


class OutOfDomainError(ValueError):
    pass


class FlatSample:
    """flat output and its derivatives up to order 4 at a given time"""

    def __init__(self, t, derivatives):
        """
        :param t: float time
        :param derivatives: (5,4) array, row k is the k-th derivative of sigma
        """
        self.t = float(t)
        self.derivatives = np.asarray(derivatives, dtype=float)

    @property
    def sigma(self):
        return self.derivatives[0]

    @property
    def d1(self):
        return self.derivatives[1]

    @property
    def d2(self):
        return self.derivatives[2]

    @property
    def d3(self):
        return self.derivatives[3]

    @property
    def d4(self):
        return self.derivatives[4]

    def taylor(self, dt, order=0):
        """
        derivative of given order at t+dt, extrapolated from this sample
        (exact up to the 4th power of dt beyond the sample's orders)
        """
        res = np.zeros(4)
        for k in range(order, ORDERS + 1):
            res += self.derivatives[k] * dt ** (k - order) / factorial(k - order)
        return res

    def evaluate(self, t, order=0):
        """
        taylor extrapolation at the times t, same interface as FlatTrajectory.evaluate
        :return: array (...,4)
        """
        dt = np.asarray(t, dtype=float) - self.t
        res = np.zeros(dt.shape + (4,))
        for k in range(order, ORDERS + 1):
            res = res + np.multiply.outer(dt ** (k - order) / factorial(k - order), self.derivatives[k])
        return res

    def __repr__(self):
        return '%s(t=%g, sigma=%s)' % (self.__class__.__name__, self.t, self.sigma.tolist())


class FlatTrajectory:
    """4 polynomials of time, one per flat output component"""

    def __init__(self, coefficients, tf):
        """
        :param coefficients: (4, d+1) ascending coefficients per component
        :param tf: float final time > 0
        """
        if tf <= 0:
            raise ValueError('final time must be positive, got %g' % tf)
        self.tf = float(tf)
        self.polys = [[Polynomial(c)] for c in np.asarray(coefficients, dtype=float)]
        if len(self.polys) != 4:
            raise ValueError('4 flat output components needed')
        for chain in self.polys:  # derivative chain
            for _ in range(ORDERS):
                chain.append(chain[-1].derivative())

    @property
    def coefficients(self):
        n = max(len(chain[0].plist) for chain in self.polys)
        res = np.zeros((4, n))
        for i, chain in enumerate(self.polys):
            res[i, :len(chain[0].plist)] = chain[0].plist
        return res

    def evaluate(self, t, order=0):
        """
        derivative of sigma of given order, no domain check
        :param t: float or array of times
        :return: array (...,4)
        """
        return np.stack([chain[order](t) for chain in self.polys], axis=-1)

    def derivatives(self, t):
        """:return: (...,5,4) derivatives of orders 0..4 at t"""
        return np.stack([self.evaluate(t, k) for k in range(ORDERS + 1)], axis=-2)

    def __call__(self, t):
        """:return: FlatSample at t in [0,tf]"""
        if not -1e-12 * self.tf <= t <= self.tf * (1 + 1e-12):
            raise OutOfDomainError('t=%g outside [0,%g]' % (t, self.tf))
        return FlatSample(t, self.derivatives(t))

    sample = __call__

    def start(self):
        return self(0.)

    def end(self):
        return self(self.tf)

    def times(self, n, midpoints=False):
        """
        :param n: number of intervals
        :return: n+1 uniform times on [0,tf], or the n interval midpoints
        """
        if n < 1:
            raise ValueError('at least one interval needed')
        t = np.linspace(0., self.tf, n + 1)
        if midpoints:
            return 0.5 * (t[:-1] + t[1:])
        return t

    def __repr__(self):
        return '%s(tf=%g, start=%s, end=%s)' % (
            self.__class__.__name__, self.tf,
            self.evaluate(0.).tolist(), self.evaluate(self.tf).tolist())


@memoize
def boundary_matrix(tf, degree=DEGREE, orders=ORDERS):
    """
    rows: derivatives 0..orders at t=0 then at t=tf, columns: ascending powers
    the result is shared between calls, hence read only
    """
    n = degree + 1
    m = np.zeros((2 * (orders + 1), n))
    for k in range(orders + 1):
        m[k, k] = factorial(k)
        for j in range(k, n):
            m[orders + 1 + k, j] = factorial(j) / factorial(j - k) * tf ** (j - k)
    m.flags.writeable = False
    return m


def fit_rest_to_rest(start, end, tf, degree=DEGREE):
    """
    polynomial of given degree per component from start to end,
    with null derivatives of orders 1..4 at both ends

    :param start, end: 4-vectors (x, y, z, psi)
    :return: FlatTrajectory
    """
    start = np.asarray(start, dtype=float).reshape(4)
    end = np.asarray(end, dtype=float).reshape(4)
    if tf <= 0:
        raise ValueError('final time must be positive, got %g' % tf)
    orders = (degree - 1) // 2
    m = boundary_matrix(tf, degree, orders)
    rhs = np.zeros((2 * (orders + 1), 4))
    rhs[0], rhs[orders + 1] = start, end
    coefficients = linalg.solve(m, rhs)  # LU with partial pivoting
    logging.debug('rest to rest coefficients %s', coefficients.T)
    return FlatTrajectory(coefficients.T, tf)


def sample(trajectory, t):
    """:return: FlatSample of trajectory at t in [0,tf]"""
    return trajectory(t)


def sample_grid(trajectory, n, midpoints=False):
    """
    :param n: number of uniform samples, >= 2, first at 0 and last at tf
    :param midpoints: interleave the n-1 midpoints, as Hermite-Simpson grids need
    :return: list of FlatSample
    """
    if n < 2:
        raise ValueError('at least 2 samples needed, got %d' % n)
    t = trajectory.times(n - 1)
    if midpoints:
        t = np.sort(np.concatenate([t, trajectory.times(n - 1, midpoints=True)]))
    return [trajectory(ti) for ti in t]
