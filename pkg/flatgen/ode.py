"""
fixed step 4th order Runge-Kutta integration and multiple shooting of two point boundary value problems
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = ["https://en.wikipedia.org/wiki/Runge%E2%80%93Kutta_methods"]
__license__ = "LGPL"

import logging

import numpy as np
from scipy import linalg, sparse

from . import optim


def rk4_step(fn, t, x, h):
    """one step of the classical Runge-Kutta scheme for x' = fn(t, x)"""
    k1 = fn(t, x)
    k2 = fn(t + h / 2, x + h / 2 * k1)
    k3 = fn(t + h / 2, x + h / 2 * k2)
    k4 = fn(t + h, x + h * k3)
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4(fn, x0, t, callback=None):
    """
    :param fn: function (t, x) -> x'
    :param x0: initial state vector
    :param t: increasing array of times, x0 is the state at t[0]
    :param callback: optional function (t, x) called after each step,
      may raise to stop the integration
    :return: array of states, one row per time
    """
    x = np.array(x0, dtype=float)
    res = np.empty((len(t), x.size))
    res[0] = x
    for i in range(1, len(t)):
        x = rk4_step(fn, t[i - 1], x, t[i] - t[i - 1])
        if callback is not None:
            callback(t[i], x)
        res[i] = x
    return res


def linearize(fn, t, x, step=1e-6):
    """
    central difference Jacobian of a right hand side at (t, x)

    :param fn: function (t, x) -> x' accepting stacks of times (k,) and states (k,d)
    :return: (d,d) matrix
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    h = step * max(1., float(np.max(np.abs(x))))
    states = np.concatenate([x + h * np.eye(d), x - h * np.eye(d)])
    f = fn(np.full(2 * d, float(t)), states)
    return ((f[:d] - f[d:]) / (2 * h)).T


def dichotomy(a, discrete=False, tol=1e-6):
    """
    splits the d boundary conditions of the linear problem x' = a x,
    or x[k+1] = a x[k] if discrete, so that none of them acts against the flow:
    the growing modes are fixed at the end, all others at the start

    :return: start_rows (d-k, d), end_rows (k, d), k being the number of growing modes.
      both have orthonormal rows, start_rows vanish on the growing invariant subspace,
      end_rows on the invariant subspace of the other modes
    """
    a = np.asarray(a, dtype=float)
    if discrete:
        def grows(re, im):
            return np.hypot(re, im) > 1 + tol
    else:
        def grows(re, im):
            return re > tol
    _, z, k = linalg.schur(a, output='real', sort=grows)
    start = z[:, k:].T
    _, z, k = linalg.schur(a, output='real', sort=lambda re, im: not grows(re, im))
    end = z[:, k:].T
    return start, end


def shooting(fn, times, x_start, x_end, a, guess=None, span=3., tol=1e-10, max_iter=50):
    """
    multiple shooting of a two point boundary value problem on a uniform grid.
    RK4 steps are grouped in segments along which the fastest growing mode of a
    grows by at most e^span, segment continuity and the boundary rows of
    dichotomy(a) are solved by optim.newton_solve

    :param fn: function (t, x) -> x' accepting stacks of times (k,) and states (k,d)
    :param times: uniform increasing grid
    :param x_start: state the start rows apply to
    :param x_end: state the end rows apply to
    :param a: (d,d) linearization of fn deciding which modes are fixed where
    :param guess: optional (len(times), d) states, default x_start everywhere
    :return: (len(times), d) states, SolverReport
    :raise NonConvergenceError: if Newton iterations fail
    """
    times = np.asarray(times, dtype=float)
    x_start = np.asarray(x_start, dtype=float)
    x_end = np.asarray(x_end, dtype=float)
    d = x_start.size
    steps = len(times) - 1
    h = (times[-1] - times[0]) / steps
    growth = max(0., float(np.max(np.linalg.eigvals(a).real)))
    longest = steps if growth == 0 else max(1, int(span / (growth * h)))
    m = max(k for k in range(1, min(longest, steps) + 1) if steps % k == 0)
    count = steps // m
    start_rows, end_rows = dichotomy(a)
    k0 = len(start_rows)
    t0 = times[:-1:m]

    def propagate(y):
        x, t = y, t0
        res = [x]
        for _ in range(m):
            x = rk4_step(fn, t, x, h)
            t = t + h
            res.append(x)
        return np.stack(res)

    def residual(z):
        y = z.reshape(count, d)
        last = propagate(y)[-1]
        return np.concatenate([start_rows @ (y[0] - x_start), (last[:-1] - y[1:]).ravel(),
                               end_rows @ (last[-1] - x_end)])

    rows, cols = [], []

    def add(r, c):
        rr, cc = np.meshgrid(r, c, indexing='ij')
        rows.append(rr.ravel())
        cols.append(cc.ravel())

    block = np.arange(d)
    add(np.arange(k0), block)
    for s in range(count - 1):
        r = k0 + d * s + block
        add(r, d * s + block)
        rows.append(r)
        cols.append(d * (s + 1) + block)
    add(k0 + d * (count - 1) + np.arange(d - k0), d * (count - 1) + block)
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    sparsity = sparse.csc_matrix((np.ones(rows.size), (rows, cols)), shape=(count * d, count * d))
    sparsity.data[:] = 1.

    if guess is None:
        guess = np.tile(x_start, (steps + 1, 1))
    z0 = np.asarray(guess, dtype=float)[:-1:m].ravel()
    logging.debug('shooting over %d segments of %d steps, %d start and %d end conditions',
                  count, m, k0, d - k0)
    z, report = optim.newton_solve(residual, z0, sparsity, tol=tol, max_iter=max_iter)
    states = propagate(z.reshape(count, d))
    x = np.concatenate([states[:-1].transpose(1, 0, 2).reshape(count * m, d), states[-1, -1:]])
    return x, report
