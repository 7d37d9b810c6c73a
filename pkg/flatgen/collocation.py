"""
direct collocation of the attitude dynamics along a flat output trajectory

the horizon [0,tf] is cut in n intervals of length ts = tf/n.
attitude theta and body rate omega are unknown at the n+1 knots,
thrusts u are unknown once per interval and held over it.
per interval the transcription imposes

  3 attitude kinematics equations   theta' = E(theta)^-1 omega
  3 rotational dynamics equations   J omega' = B u - omega x J omega
  3 thrust equations                A u = m R(theta)^T (sigma'' - g)
  1 yaw equation                    yaw = sigma_4 at the closing knot
  2 optional extra flat outputs     A u / |A u| along (sigma_5, sigma_6)

plus 6 boundary conditions on the deviation from the hovers with the yaw and
yaw rate of sigma_4 at both ends. the one interval map of the transcription
linearized at hover decides where each mode is fixed: the modes it amplifies
at the end, all others at the start.
the schemes differ by where the right hand sides are sampled:

  euler           implicit, at the closing knot, u belongs to the closing knot
  trapezoidal     knot average, thrust equation at the midpoint on the mean attitude
  hermite_simpson Hermite midpoint state and Simpson quadrature, u at the midpoint
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = ["https://en.wikipedia.org/wiki/Collocation_method"]
__license__ = "LGPL"

import logging

import numpy as np
from scipy import sparse

from . import se3, optim, ode
from . import vehicle as vm
from .decorators import timeit
from .simulation import effort_cost
from .state import StateTrajectory

SCHEMES = ('euler', 'trapezoidal', 'hermite_simpson')
MODES = ('square', 'min_effort')


class InfeasiblePairingError(ValueError):
    """vehicle, mode and extra outputs do not make a well posed problem"""


class InfeasibleOutputsError(optim.NonConvergenceError):
    """extra flat outputs describe no reachable hover"""


class CollocationProblem:
    def __init__(self, vehicle, trajectory, n=100, scheme='hermite_simpson', mode='square',
                 extra_outputs=None):
        """
        :param vehicle: Vehicle
        :param trajectory: FlatTrajectory
        :param n: number of intervals, >= 3
        :param scheme: one of SCHEMES
        :param mode: 'square' solves as many equations as unknowns,
          'min_effort' minimizes the effort cost subject to them
        :param extra_outputs: optional (sigma_5, sigma_6) constant body thrust direction components
        """
        if scheme not in SCHEMES:
            raise ValueError('unknown scheme %r, choose among %s' % (scheme, ', '.join(SCHEMES)))
        if mode not in MODES:
            raise ValueError('unknown mode %r, choose among %s' % (mode, ', '.join(MODES)))
        if n < 3:
            raise ValueError('at least 3 intervals needed, got %d' % n)
        self.vehicle = vehicle
        self.trajectory = trajectory
        self.n = int(n)
        self.scheme = scheme
        self.mode = mode
        self.extra_outputs = None if extra_outputs is None else tuple(float(s) for s in extra_outputs)
        self.n_extra = 0 if extra_outputs is None else 2

        alloc = vm.build_allocation(vehicle)
        self.A, self.B = alloc.A, alloc.B
        self.N = vehicle.N
        if mode == 'square' and self.N != 4 + self.n_extra:
            raise InfeasiblePairingError(
                '%r has %d inputs, square mode needs %d' % (vehicle, self.N, 4 + self.n_extra)
                + ('' if self.n_extra else ', add 2 extra outputs or minimize effort'))
        if mode == 'min_effort' and (self.N < 4 or self.n_extra):
            raise InfeasiblePairingError('effort minimization needs at least 4 inputs and no extra outputs')
        self.J = vehicle.inertia
        self.J_inv = np.linalg.inv(vehicle.inertia)

        self.ts = trajectory.tf / self.n
        self.knot_times = trajectory.times(self.n)
        if scheme == 'euler':
            self.input_times = self.knot_times[1:]
        else:
            self.input_times = trajectory.times(self.n, midpoints=True)
        # thrust demand m (sigma'' - g) in world frame at the input times
        self.demand = vehicle.mass * (trajectory.evaluate(self.input_times, 2)[:, :3]
                                      - vehicle.gravity_vector)
        self.yaw_reference = trajectory.evaluate(self.knot_times, 0)[:, 3]

        self.hover_angles, self.hover_input = self._hover()
        self.theta0, self.omega0 = self._rest(0.)
        self.theta_end, self.omega_end = self._rest(trajectory.tf)
        self.start_rows, self.end_rows = self._boundary_rows()
        self._sparsity = None

    def _rest(self, t):
        """:return: theta, omega of the hover with the yaw and yaw rate of sigma_4 at t"""
        theta = np.array([self.hover_angles.roll, self.hover_angles.pitch, self.trajectory.evaluate(t)[3]])
        omega = se3.euler_rate_matrix(theta) @ np.array([0., 0., self.trajectory.evaluate(t, 1)[3]])
        return theta, omega

    def _boundary_rows(self, step=1e-6):
        """
        :return: start_rows, end_rows from ode.dichotomy of the map from a knot
          to the next one, linearized at hover by central differences
        """
        if self.mode == 'min_effort' and self.N == 6:
            d = self.A @ self.hover_input
            companion = self.with_extra_outputs(*(d[:2] / np.linalg.norm(d)))
            return companion.start_rows, companion.end_rows
        theta = self.theta0.copy()
        v0 = np.concatenate([theta, np.zeros(3), theta, np.zeros(3), self.hover_input])
        size = v0.size
        v = np.concatenate([v0 + step * np.eye(size), v0 - step * np.eye(size)])
        demand = np.tile(-self.vehicle.mass * self.vehicle.gravity_vector, (2 * size, 1))
        blocks = self._intervals(v[:, 0:3], v[:, 6:9], v[:, 3:6], v[:, 9:12], v[:, 12:],
                                 demand, np.full(2 * size, theta[2]))
        r = np.concatenate([b.reshape(2 * size, -1) for b in blocks], axis=1)
        jac = ((r[:size] - r[size:]) / (2 * step)).T
        # next knot and input as functions of the current knot, minimum norm if underdetermined
        step_map = np.linalg.lstsq(jac[:, 6:], -jac[:, :6], rcond=None)[0][:6]
        return ode.dichotomy(step_map, discrete=True)

    def _hover(self):
        if self.extra_outputs is None:
            return vm.hover_solve(self.vehicle)
        s5, s6 = self.extra_outputs
        if s5 * s5 + s6 * s6 >= 1:
            raise InfeasibleOutputsError('extra outputs (%g, %g) are not components of a unit vector' % (s5, s6))
        d = np.array([s5, s6, np.sqrt(1 - s5 * s5 - s6 * s6)])
        try:
            return vm.hover_solve(self.vehicle, d)
        except vm.NoHoverError as e:
            raise InfeasibleOutputsError('extra outputs (%g, %g): %s' % (s5, s6, e))

    def __repr__(self):
        return '%s(%r, n=%d, scheme=%s, mode=%s, extra=%s)' % (
            self.__class__.__name__, self.vehicle, self.n, self.scheme, self.mode, self.extra_outputs)

    @property
    def n_unknowns(self):
        return 6 * (self.n + 1) + self.N * self.n

    @property
    def n_dynamics(self):
        """equations besides the boundary conditions"""
        return (10 + self.n_extra) * self.n

    @property
    def n_boundary(self):
        return 6

    @property
    def n_equations(self):
        return self.n_dynamics + self.n_boundary

    @property
    def input_slice(self):
        return slice(6 * (self.n + 1), self.n_unknowns)

    def unpack(self, z):
        """:return: theta (n+1,3), omega (n+1,3), u (n,N) views of z"""
        k = 3 * (self.n + 1)
        return (z[:k].reshape(self.n + 1, 3), z[k:2 * k].reshape(self.n + 1, 3),
                z[2 * k:].reshape(self.n, self.N))

    def pack(self, theta, omega, u):
        return np.concatenate([np.ravel(theta), np.ravel(omega), np.ravel(u)])

    def initial_guess(self):
        """hover attitude and thrusts everywhere, yaw following sigma_4"""
        theta = np.tile(self.theta0, (self.n + 1, 1))
        theta[:, 2] = self.yaw_reference
        omega = np.tile(self.omega0, (self.n + 1, 1))
        u = np.tile(self.hover_input, (self.n, 1))
        return self.pack(theta, omega, u)

    def _gyro(self, omega):
        return np.cross(omega, omega @ self.J.T)

    def _intervals(self, theta_a, theta_b, omega_a, omega_b, u, demand, yaw_b):
        """
        equations of independent intervals stacked along the first axis
        :return: kinematics (k,3), dynamics (k,3), thrust (k,3), yaw (k,) [, extra outputs (k,2)]
        """
        h = self.ts
        rates_a, rates_b = se3.euler_rates(theta_a, omega_a), se3.euler_rates(theta_b, omega_b)
        gyro_a, gyro_b = self._gyro(omega_a), self._gyro(omega_b)
        torque = u @ self.B.T
        thrust = u @ self.A.T
        if self.scheme == 'euler':
            kin = theta_b - theta_a - h * rates_b
            dyn = omega_b - omega_a - h * (torque - gyro_b) @ self.J_inv.T
            attitude = theta_b
        elif self.scheme == 'trapezoidal':
            kin = theta_b - theta_a - h / 2 * (rates_a + rates_b)
            dyn = omega_b - omega_a - h * (torque - (gyro_a + gyro_b) / 2) @ self.J_inv.T
            attitude = (theta_a + theta_b) / 2
        else:
            # the held thrust cancels in the Hermite midpoint rate
            omega_m = (omega_a + omega_b) / 2 + h / 8 * (gyro_b - gyro_a) @ self.J_inv.T
            theta_m = (theta_a + theta_b) / 2 + h / 8 * (rates_a - rates_b)
            rates_m = se3.euler_rates(theta_m, omega_m)
            gyro_m = self._gyro(omega_m)
            kin = theta_b - theta_a - h / 6 * (rates_a + 4 * rates_m + rates_b)
            dyn = omega_b - omega_a - h / 6 * (6 * torque - gyro_a - 4 * gyro_m - gyro_b) @ self.J_inv.T
            attitude = theta_m
        rot = se3.euler_to_rotation(attitude)
        force = thrust - np.einsum('kji,kj->ki', rot, demand)
        res = [kin, dyn, force, theta_b[:, 2] - yaw_b]
        if self.n_extra:
            norm = np.linalg.norm(thrust, axis=1)
            res.append(thrust[:, :2] / norm[:, None] - self.extra_outputs)
        return res

    def boundary_residual(self, theta, omega):
        """start rows on the first knot, end rows on the last one"""
        return np.concatenate([
            self.start_rows @ np.concatenate([theta[0] - self.theta0, omega[0] - self.omega0]),
            self.end_rows @ np.concatenate([theta[-1] - self.theta_end, omega[-1] - self.omega_end])])

    def residual(self, z):
        """
        :return: stacked residuals: boundary conditions, then per interval
          kinematics (n,3), dynamics (n,3), thrust (n,3), yaw (n,), extra outputs (n,2)
        :raise SingularityError: if a pitch leaves the Euler domain
        """
        theta, omega, u = self.unpack(np.asarray(z, dtype=float))
        blocks = self._intervals(theta[:-1], theta[1:], omega[:-1], omega[1:], u,
                                 self.demand, self.yaw_reference[1:])
        return np.concatenate([self.boundary_residual(theta, omega)] + [b.ravel() for b in blocks])

    def sparsity(self):
        """
        :return: scipy.sparse.csc_matrix pattern of the residual Jacobian,
          interval k depends on knots k, k+1 and on its own input only
        """
        if self._sparsity is not None:
            return self._sparsity
        n, N = self.n, self.N
        kt = lambda k: 3 * k + np.arange(3)
        ko = lambda k: 3 * (n + 1) + 3 * k + np.arange(3)
        ku = lambda k: 6 * (n + 1) + N * k + np.arange(N)
        rows, cols = [], []

        def add(r, c):
            rr, cc = np.meshgrid(r, c, indexing='ij')
            rows.append(rr.ravel())
            cols.append(cc.ravel())

        k0 = len(self.start_rows)
        add(np.arange(k0), np.concatenate([kt(0), ko(0)]))
        add(k0 + np.arange(6 - k0), np.concatenate([kt(n), ko(n)]))
        for k in range(n):
            states = np.concatenate([kt(k), kt(k + 1), ko(k), ko(k + 1)])
            add(6 + 3 * k + np.arange(3), states)  # kinematics
            add(6 + 3 * n + 3 * k + np.arange(3), np.concatenate([ko(k), ko(k + 1), ku(k)]))
            add(6 + 6 * n + 3 * k + np.arange(3), np.concatenate([states, ku(k)]))  # thrust
            add([6 + 9 * n + k], [3 * (k + 1) + 2])  # yaw
            if self.n_extra:
                add(6 + 10 * n + 2 * k + np.arange(2), ku(k))
        rows, cols = np.concatenate(rows), np.concatenate(cols)
        self._sparsity = sparse.csc_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(self.n_equations, self.n_unknowns))
        self._sparsity.data[:] = 1.
        return self._sparsity

    @property
    def cost_weight(self):
        """effort cost = cost_weight * sum of squared interval thrusts"""
        return self.ts * self.N / (self.trajectory.tf * self.vehicle.weight ** 2)

    def state_trajectory(self, z):
        theta, omega, u = self.unpack(np.asarray(z, dtype=float))
        return StateTrajectory(
            self.knot_times, theta.copy(), omega.copy(), vehicle=self.vehicle, flat=self.trajectory,
            input_times=self.input_times, input_values=u.copy(),
            input_weights=np.full(self.n, self.ts), scheme=self.scheme)

    def with_extra_outputs(self, sigma5, sigma6):
        return CollocationProblem(self.vehicle, self.trajectory, self.n, self.scheme,
                                  'square', (sigma5, sigma6))


def transcribe(vehicle, trajectory, n=100, scheme='hermite_simpson', mode='square'):
    """:return: CollocationProblem"""
    problem = CollocationProblem(vehicle, trajectory, n, scheme, mode)
    logging.info('%r: %d unknowns, %d equations', problem, problem.n_unknowns, problem.n_equations)
    return problem


def extra_output_constraints(problem, sigma5, sigma6):
    """
    :return: square problem completed by the 2 extra outputs,
      for vehicles with 2 inputs more than a quadrotor
    """
    if problem.N != 6:
        raise InfeasiblePairingError('extra outputs need 6 inputs, %r has %d' % (problem.vehicle, problem.N))
    return problem.with_extra_outputs(sigma5, sigma6)


class SolveReport:
    def __init__(self, problem, solver, trajectory, z):
        self.scheme = problem.scheme
        self.mode = problem.mode
        self.iterations = solver.iterations
        self.steps = solver.steps
        self.evaluations = solver.evaluations
        self.converged = solver.converged
        self.residual = float(np.max(np.abs(problem.residual(z))))
        self.kkt_residual = getattr(solver, 'kkt_residual', None)
        self.cost = effort_cost(trajectory)
        self.thrust_positive = trajectory.thrust_positive()
        try:
            se3.check_euler_domain(trajectory.theta)
            self.euler_domain = True
        except se3.SingularityError:
            self.euler_domain = False
        self.hover = trajectory.hover_check()

    def summary(self):
        res = {
            'status': 'converged' if self.converged else 'failed',
            'scheme': self.scheme,
            'mode': self.mode,
            'iterations': self.iterations,
            'residual': self.residual,
            'cost': self.cost,
            'thrust_positive': self.thrust_positive,
            'euler_domain': self.euler_domain,
        }
        if self.kkt_residual is not None:
            res['kkt_residual'] = self.kkt_residual
        res.update(self.hover)
        return res

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__, self.summary())


def _square(problem, initial_guess, tol, max_iter):
    z0 = problem.initial_guess() if initial_guess is None else np.asarray(initial_guess, dtype=float)
    return optim.newton_solve(problem.residual, z0, problem.sparsity(), tol=tol, max_iter=max_iter)


@timeit
def solve_square(problem, initial_guess=None, tol=1e-9, max_iter=100):
    """
    damped Newton solve of a square problem

    :return: StateTrajectory, SolveReport
    :raise NonConvergenceError: with the best iterate
    """
    if problem.n_unknowns != problem.n_equations:
        raise InfeasiblePairingError('%r is not square' % problem)
    z, solver = _square(problem, initial_guess, tol, max_iter)
    trajectory = problem.state_trajectory(z)
    return trajectory, SolveReport(problem, solver, trajectory, z)


def warm_start(problem, tol=1e-9, max_iter=100):
    """
    feasible starting point of an effort minimization: the square solve
    with the extra outputs of the minimum norm hover for 6 inputs,
    the square solve itself for 4, the hover otherwise
    """
    if problem.N == 6:
        d = problem.A @ problem.hover_input
        d = d / np.linalg.norm(d)
        z, _ = _square(problem.with_extra_outputs(d[0], d[1]), None, tol, max_iter)
        return z
    if problem.N == 4:
        square = CollocationProblem(problem.vehicle, problem.trajectory, problem.n, problem.scheme)
        z, _ = _square(square, None, tol, max_iter)
        return z
    return problem.initial_guess()


@timeit
def solve_min_effort(problem, initial_guess=None, tol=1e-8, max_iter=100):
    """
    minimizes the effort cost subject to the transcription by Newton iteration
    on the KKT conditions, started from warm_start

    :return: StateTrajectory, SolveReport
    :raise SingularKKTError: if the KKT matrix cannot be factorized
    :raise NonConvergenceError: with the best iterate
    """
    if problem.mode != 'min_effort':
        raise ValueError('%r is not an effort minimization' % problem)
    z0 = warm_start(problem) if initial_guess is None else np.asarray(initial_guess, dtype=float)
    index = np.arange(problem.n_unknowns)[problem.input_slice]
    cost = optim.QuadraticCost(index, problem.cost_weight, problem.n_unknowns)
    z, _, solver = optim.kkt_solve(problem.residual, cost, z0, problem.sparsity(),
                                   tol=tol, max_iter=max_iter)
    trajectory = problem.state_trajectory(z)
    return trajectory, SolveReport(problem, solver, trajectory, z)


def solve(problem, **kwargs):
    """dispatches on the problem mode"""
    if problem.mode == 'min_effort':
        return solve_min_effort(problem, **kwargs)
    return solve_square(problem, **kwargs)
