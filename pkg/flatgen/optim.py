"""
sparse Newton solvers for square nonlinear systems and equality constrained least effort problems

Jacobians are obtained by forward finite differences,
perturbing together the columns that share no row (column coloring)
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = ["https://en.wikipedia.org/wiki/Newton%27s_method#Systems_of_equations",
               "https://en.wikipedia.org/wiki/Karush%E2%80%93Kuhn%E2%80%93Tucker_conditions"]
__license__ = "LGPL"

import logging

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

FD_STEP = 1e-7  # relative forward difference step of Jacobians
HESSIAN_STEP = 1e-4  # relative step of the Lagrangian Hessian
MIN_STEP = 2. ** -20  # smallest line search step length


class NonConvergenceError(RuntimeError):
    """raised when a solver stops without meeting its tolerance

    :ivar best: best iterate evaluated
    :ivar report: SolverReport of the failed run
    """

    def __init__(self, message, best=None, report=None):
        super().__init__(message)
        self.best = best
        self.report = report


class SingularJacobianError(NonConvergenceError):
    pass


class SingularKKTError(NonConvergenceError):
    pass


class BestIterate:
    """wraps a residual function and keeps track of the best iterate"""

    def __init__(self, fun):
        self.fun = fun
        self.best = None
        self.best_norm = None
        self.evaluations = 0

    def __call__(self, x):
        self.evaluations += 1
        return self.fun(x)

    def update(self, x, norm):
        if self.best is None or norm < self.best_norm:
            self.best_norm = norm
            self.best = np.array(x, copy=True)
            logging.info('new best residual: %g', self.best_norm)


class SolverReport:
    def __init__(self):
        self.iterations = 0
        self.residual = np.inf
        self.steps = []  # accepted line search step lengths
        self.evaluations = 0
        self.converged = False

    def __repr__(self):
        return '%s(iterations=%d, residual=%g, converged=%s)' % (
            self.__class__.__name__, self.iterations, self.residual, self.converged)


def column_groups(sparsity):
    """
    greedy coloring of the columns of a sparsity pattern
    so that no two columns of a group have a nonzero in the same row

    :param sparsity: scipy sparse (m,n) matrix, nonzeros mark dependencies
    :return: list of arrays of column indices
    """
    s = sparse.csc_matrix(sparsity)
    masks, groups = [], []
    for j in range(s.shape[1]):
        rows = s.indices[s.indptr[j]:s.indptr[j + 1]]
        for mask, group in zip(masks, groups):
            if not mask[rows].any():
                mask[rows] = True
                group.append(j)
                break
        else:
            mask = np.zeros(s.shape[0], dtype=bool)
            mask[rows] = True
            masks.append(mask)
            groups.append([j])
    return [np.array(g) for g in groups]


def fd_jacobian(fun, x, f0=None, sparsity=None, groups=None, rel_step=FD_STEP):
    """
    forward difference Jacobian of fun at x

    :param sparsity: optional scipy sparse pattern, dense Jacobian if None
    :param groups: column groups of sparsity, computed if None
    :return: scipy.sparse.csc_matrix
    """
    x = np.asarray(x, dtype=float)
    if f0 is None:
        f0 = fun(x)
    n = x.size
    if sparsity is None:
        sparsity = sparse.csc_matrix(np.ones((f0.size, n)))
    s = sparse.csc_matrix(sparsity)
    if groups is None:
        groups = column_groups(s)
    h = rel_step * np.maximum(1., np.abs(x))
    data = np.empty(s.nnz)
    for group in groups:
        xp = x.copy()
        xp[group] += h[group]
        df = fun(xp) - f0
        for j in group:
            lo, hi = s.indptr[j], s.indptr[j + 1]
            data[lo:hi] = df[s.indices[lo:hi]] / h[j]
    return sparse.csc_matrix((data, s.indices, s.indptr), shape=s.shape)


def _norm(r):
    return float(np.max(np.abs(r))) if r.size else 0.


def newton_solve(fun, x0, sparsity=None, tol=1e-9, max_iter=100, rel_step=FD_STEP, min_step=MIN_STEP):
    """
    damped Newton iteration on the square system fun(x) = 0,
    step halving until 1/2|fun|^2 decreases

    :return: x, SolverReport
    :raise SingularJacobianError: if the Jacobian cannot be factorized
    :raise NonConvergenceError: after max_iter iterations or a failed line search
    """
    fun = BestIterate(fun)
    report = SolverReport()
    x = np.array(x0, dtype=float)
    groups = column_groups(sparsity) if sparsity is not None else None
    r = fun(x)
    report.residual = _norm(r)
    fun.update(x, report.residual)
    while report.residual >= tol:
        if report.iterations >= max_iter:
            report.evaluations = fun.evaluations
            raise NonConvergenceError('no convergence after %d iterations, residual %g' % (
                report.iterations, fun.best_norm), fun.best, report)
        jac = fd_jacobian(fun, x, r, sparsity, groups, rel_step)
        try:
            dx = splinalg.splu(jac).solve(-r)
        except RuntimeError as e:
            report.evaluations = fun.evaluations
            raise SingularJacobianError('singular Jacobian: %s' % e, fun.best, report)
        phi0 = 0.5 * np.dot(r, r)
        alpha = 1.
        while alpha >= min_step:
            x_try = x + alpha * dx
            try:
                r_try = fun(x_try)
            except ValueError:  # trial point outside the domain of fun
                alpha *= 0.5
                continue
            if 0.5 * np.dot(r_try, r_try) < phi0:
                break
            alpha *= 0.5
        else:
            report.evaluations = fun.evaluations
            raise NonConvergenceError('line search failed at residual %g' % report.residual,
                                      fun.best, report)
        x, r = x_try, r_try
        report.iterations += 1
        report.steps.append(alpha)
        report.residual = _norm(r)
        fun.update(x, report.residual)
        logging.info('newton %d: residual=%g step=%g', report.iterations, report.residual, alpha)
    report.converged = True
    report.evaluations = fun.evaluations
    return x, report


class QuadraticCost:
    """cost = weight * sum of x[index]^2"""

    def __init__(self, index, weight, size):
        self.index = np.asarray(index)
        self.weight = float(weight)
        self.size = size

    def __call__(self, x):
        return self.weight * float(np.sum(x[self.index] ** 2))

    def gradient(self, x):
        g = np.zeros(self.size)
        g[self.index] = 2 * self.weight * x[self.index]
        return g

    def hessian(self):
        d = np.zeros(self.size)
        d[self.index] = 2 * self.weight
        return sparse.diags(d, format='csc')


def kkt_solve(constraints, cost, x0, sparsity=None, lam0=None, tol=1e-8, max_iter=100,
              rel_step=FD_STEP, hessian_step=HESSIAN_STEP, regularization=1e-8, min_step=MIN_STEP):
    """
    Newton iteration on the first order optimality conditions of
    min cost(x) subject to constraints(x) = 0

    [H  J^T] [dx  ]     [grad cost + J^T lam]
    [J  0  ] [dlam] = - [constraints(x)     ]

    H is the cost Hessian plus the forward difference of J^T lam,
    the step is halved until 1/2 |KKT residual|^2 decreases

    :param constraints: function x -> array of m < n residuals
    :param cost: object with __call__, gradient(x) and hessian() like QuadraticCost
    :return: x, lam, SolverReport with attribute kkt_residual
    :raise SingularKKTError: if the KKT matrix cannot be factorized
    :raise NonConvergenceError: after max_iter iterations or a failed line search
    """
    fun = BestIterate(constraints)
    report = SolverReport()
    x = np.array(x0, dtype=float)
    n = x.size
    c = fun(x)
    m = c.size
    if sparsity is None:
        sparsity = sparse.csc_matrix(np.ones((m, n)))
    s = sparse.csc_matrix(sparsity, dtype=float, copy=True)
    s.data[:] = 1.
    groups = column_groups(s)
    hs = sparse.csc_matrix(s.T @ s)
    hgroups = column_groups(hs)
    h_cost = cost.hessian()

    def jacobian(x, c):
        return fd_jacobian(fun, x, c, s, groups, rel_step)

    def lagrangian_gradient(x, lam, jac=None):
        if jac is None:
            jac = jacobian(x, fun(x))
        return cost.gradient(x) + jac.T @ lam

    jac = jacobian(x, c)
    if lam0 is None:
        lam = splinalg.lsqr(jac.T, -cost.gradient(x), atol=1e-14, btol=1e-14)[0]
    else:
        lam = np.array(lam0, dtype=float)
    g = lagrangian_gradient(x, lam, jac)
    f = np.concatenate([g, c])
    report.constraint_residual = _norm(c)
    report.residual = _norm(f)
    fun.update(x, report.residual)

    while report.residual >= tol:
        if report.iterations >= max_iter:
            report.evaluations = fun.evaluations
            raise NonConvergenceError('no KKT convergence after %d iterations, residual %g' % (
                report.iterations, fun.best_norm), fun.best, report)
        # Hessian of lam^T constraints by differences of J^T lam
        step = hessian_step * np.maximum(1., np.abs(x))
        data = np.empty(hs.nnz)
        jl0 = jac.T @ lam
        for group in hgroups:
            xp = x.copy()
            xp[group] += step[group]
            dg = jacobian(xp, fun(xp)).T @ lam - jl0
            for j in group:
                lo, hi = hs.indptr[j], hs.indptr[j + 1]
                data[lo:hi] = dg[hs.indices[lo:hi]] / step[j]
        hc = sparse.csc_matrix((data, hs.indices, hs.indptr), shape=hs.shape)
        hl = h_cost + 0.5 * (hc + hc.T) + regularization * sparse.identity(n, format='csc')
        kkt = sparse.bmat([[hl, jac.T], [jac, None]], format='csc')
        try:
            d = splinalg.splu(kkt).solve(-f)
        except RuntimeError as e:
            report.evaluations = fun.evaluations
            raise SingularKKTError('singular KKT matrix: %s' % e, fun.best, report)
        dx, dlam = d[:n], d[n:]
        phi0 = 0.5 * np.dot(f, f)
        alpha = 1.
        while alpha >= min_step:
            x_try, lam_try = x + alpha * dx, lam + alpha * dlam
            try:
                c_try = fun(x_try)
            except ValueError:
                alpha *= 0.5
                continue
            jac_try = jacobian(x_try, c_try)
            f_try = np.concatenate([lagrangian_gradient(x_try, lam_try, jac_try), c_try])
            if 0.5 * np.dot(f_try, f_try) < phi0:
                break
            alpha *= 0.5
        else:
            report.evaluations = fun.evaluations
            raise NonConvergenceError('KKT line search failed at residual %g' % report.residual,
                                      fun.best, report)
        x, lam, c, jac, f = x_try, lam_try, c_try, jac_try, f_try
        report.iterations += 1
        report.steps.append(alpha)
        report.residual = _norm(f)
        fun.update(x, report.residual)
        logging.info('kkt %d: residual=%g constraints=%g cost=%g step=%g',
                     report.iterations, report.residual, _norm(c), cost(x), alpha)
    report.converged = True
    report.evaluations = fun.evaluations
    report.constraint_residual = _norm(c)
    report.kkt_residual = report.residual
    return x, lam, report
