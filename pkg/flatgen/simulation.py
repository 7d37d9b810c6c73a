"""
forward simulation of the rigid body under a thrust schedule, replay metrics and effort cost

state x = (P, V, theta, omega) with
  P'' = g + R(theta) A u / m
  theta' = E(theta)^-1 omega
  omega' = J^-1 (B u - omega x J omega)
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = []
__license__ = "LGPL"

import logging

import numpy as np
from scipy.interpolate import CubicSpline

from . import se3, ode
from . import vehicle as vm
from .state import StateTrajectory, trapezoid_weights

DIVERGENCE = 1e3  # position norm [m] considered diverged


class DivergedError(RuntimeError):
    pass


class FullState:
    def __init__(self, position, velocity, theta, omega):
        self.position = np.asarray(position, dtype=float).reshape(3)
        self.velocity = np.asarray(velocity, dtype=float).reshape(3)
        self.theta = np.asarray(theta, dtype=float).reshape(3)
        self.omega = np.asarray(omega, dtype=float).reshape(3)

    def as_vector(self):
        return np.concatenate([self.position, self.velocity, self.theta, self.omega])

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[0:3], x[3:6], x[6:9], x[9:12])

    @classmethod
    def from_trajectory(cls, trajectory, flat=None):
        """initial state of a StateTrajectory, position and velocity from its flat outputs"""
        flat = flat or trajectory.flat
        t0 = trajectory.times[0]
        return cls(flat.evaluate(t0)[:3], flat.evaluate(t0, 1)[:3],
                   trajectory.theta[0], trajectory.omega[0])

    def __repr__(self):
        return '%s(P=%s, theta=%s)' % (self.__class__.__name__, self.position.tolist(), self.theta.tolist())


class _Dynamics:
    """vehicle constants used at each right hand side evaluation"""

    def __init__(self, vehicle):
        alloc = vm.build_allocation(vehicle)
        self.A, self.B = alloc.A, alloc.B
        self.J = vehicle.inertia
        self.J_inv = np.linalg.inv(vehicle.inertia)
        self.mass = vehicle.mass
        self.g = vehicle.gravity_vector

    def __call__(self, x, u):
        theta, omega = x[6:9], x[9:12]
        rot = se3.euler_to_rotation(theta)
        acc = self.g + rot @ (self.A @ u) / self.mass
        theta_dot = se3.euler_rates(theta, omega)
        omega_dot = self.J_inv @ (self.B @ u - np.cross(omega, self.J @ omega))
        return np.concatenate([x[3:6], acc, theta_dot, omega_dot])


def dynamics_rhs(state, u, vehicle):
    """
    :param state: FullState
    :param u: (N,) thrusts
    :return: FullState holding the time derivatives
    """
    return FullState.from_vector(_Dynamics(vehicle)(state.as_vector(), np.asarray(u, dtype=float)))


def normalized_input(u, vehicle):
    """u_n = N u / (m g)"""
    return vehicle.N * np.asarray(u, dtype=float) / vehicle.weight


def effort_cost(source, vehicle=None, weights=None):
    """
    (1 / (N tf)) sum of w_k u_n,k^T u_n,k

    :param source: StateTrajectory, SimulationResult,
      or (K,N) array of inputs with weights given
    :param weights: quadrature weights summing to tf, needed for arrays
    """
    if isinstance(source, StateTrajectory):
        vehicle = vehicle or source.vehicle
        u, w = source.input_values, source.input_weights
    elif isinstance(source, SimulationResult):
        vehicle = vehicle or source.vehicle
        u, w = source.inputs, trapezoid_weights(source.times)
    else:
        if weights is None or vehicle is None:
            raise ValueError('input arrays need weights and a vehicle')
        u, w = np.asarray(source, dtype=float), np.asarray(weights, dtype=float)
    un = normalized_input(u, vehicle)
    tf = float(np.sum(w))
    return float(np.sum(w * np.sum(un * un, axis=-1)) / (vehicle.N * tf))


def input_schedule(times, inputs):
    """:return: cubic spline t -> (N,) thrusts, extrapolated outside times"""
    return CubicSpline(np.asarray(times, dtype=float), np.asarray(inputs, dtype=float), axis=0)


class SimulationResult:
    def __init__(self, times, states, inputs, vehicle, flat=None):
        self.times = times
        self.states = states
        self.inputs = inputs
        self.vehicle = vehicle
        self.rms_position_error = self.max_position_error = self.max_yaw_error = None
        if flat is not None:
            err = self.positions - flat.evaluate(times)[:, :3]
            dist = np.linalg.norm(err, axis=1)
            self.rms_position_error = float(np.sqrt(np.mean(dist ** 2)))
            self.max_position_error = float(np.max(dist))
            yaw_err = np.angle(np.exp(1j * (self.theta[:, 2] - flat.evaluate(times)[:, 3])))
            self.max_yaw_error = float(np.max(np.abs(yaw_err)))

    @property
    def positions(self):
        return self.states[:, 0:3]

    @property
    def theta(self):
        return self.states[:, 6:9]

    @property
    def omega(self):
        return self.states[:, 9:12]

    def metrics(self):
        return {
            'replay_rms': self.rms_position_error,
            'replay_max': self.max_position_error,
            'replay_yaw': self.max_yaw_error,
        }


def forward_simulate(vehicle, schedule, x0, tf, steps=2000, flat=None):
    """
    RK4 integration of the rigid body from x0 over [0,tf]

    :param schedule: StateTrajectory, or function t -> (N,) thrusts
    :param x0: FullState or 12-vector
    :param flat: optional FlatTrajectory to compute the replay errors against
    :raise DivergedError: if the position norm exceeds DIVERGENCE
    :raise SingularityError: if the pitch reaches the Euler singularity
    """
    if isinstance(schedule, StateTrajectory):
        schedule = input_schedule(schedule.input_times, schedule.input_values)
    if isinstance(x0, FullState):
        x0 = x0.as_vector()
    f = _Dynamics(vehicle)
    times = np.linspace(0., tf, steps + 1)

    def check(t, x):
        if not np.all(np.isfinite(x)) or np.linalg.norm(x[0:3]) > DIVERGENCE:
            raise DivergedError('simulation diverged at t=%g' % t)

    states = ode.rk4(lambda t, x: f(x, schedule(t)), x0, times, check)
    inputs = np.stack([schedule(t) for t in times])
    res = SimulationResult(times, states, inputs, vehicle, flat)
    logging.info('replay over %g s: %s', tf, res.metrics())
    return res
