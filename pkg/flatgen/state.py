"""
attitude, angular velocity and input histories produced by the trajectory generators
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = []
__license__ = "LGPL"

import numpy as np
from scipy.interpolate import CubicSpline

from . import vehicle as vm


def trapezoid_weights(times):
    """quadrature weights of the trapezoidal rule on the given times"""
    t = np.asarray(times, dtype=float)
    w = np.zeros_like(t)
    dt = np.diff(t)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return w


class StateTrajectory:
    """
    knot history of a generated trajectory

    :ivar times: (K,) knot times
    :ivar theta: (K,3) roll, pitch, yaw
    :ivar omega: (K,3) body angular velocity
    :ivar inputs: (K,N) thrusts at the knots
    :ivar input_times, input_values: the inputs as the generator defines them,
      one per interval for collocation, equal to the knot inputs otherwise
    :ivar input_weights: quadrature weights of input_values on [0,tf]
    """

    def __init__(self, times, theta, omega, inputs=None, vehicle=None, flat=None,
                 input_times=None, input_values=None, input_weights=None, scheme=None, extras=None):
        self.times = np.asarray(times, dtype=float)
        self.theta = np.asarray(theta, dtype=float)
        self.omega = np.asarray(omega, dtype=float)
        if input_values is None:
            input_times, input_values = self.times, np.asarray(inputs, dtype=float)
            input_weights = trapezoid_weights(self.times)
        self.input_times = np.asarray(input_times, dtype=float)
        self.input_values = np.asarray(input_values, dtype=float)
        self.input_weights = np.asarray(input_weights, dtype=float)
        if inputs is None:
            inputs = CubicSpline(self.input_times, self.input_values, axis=0)(self.times)
        self.inputs = np.asarray(inputs, dtype=float)
        self.vehicle = vehicle
        self.flat = flat
        self.scheme = scheme
        self.extras = extras or {}

    def __len__(self):
        return len(self.times)

    @property
    def tf(self):
        return self.times[-1]

    def normalized_inputs(self):
        """u_n = N u / (m g), 1 for each rotor of an aligned quadrotor at hover"""
        return self.vehicle.N * self.inputs / self.vehicle.weight

    def thrust_positive(self):
        return self.vehicle.thrust_positive(self.input_values)

    def tilt(self):
        """:return: (T_alpha, alpha) knot histories of a tilting vehicle"""
        if self.vehicle is None or not self.vehicle.tilting:
            raise ValueError('trajectory of a vehicle without tilting arm')
        return vm.merge_thrust(self.inputs[:, 2], self.inputs[:, 3])

    def hover_check(self):
        """
        :return: dict of figures that vanish for a trajectory starting and ending in hover
          with constant roll and pitch
        """
        return {
            'omega_start': float(np.linalg.norm(self.omega[0])),
            'omega_end': float(np.linalg.norm(self.omega[-1])),
            'roll_pitch_drift': float(np.max(np.abs(self.theta[-1, :2] - self.theta[0, :2]))),
            'yaw_change': float(self.theta[-1, 2] - self.theta[0, 2]),
        }

    def __repr__(self):
        return '%s(%d knots, tf=%g, scheme=%s)' % (
            self.__class__.__name__, len(self), self.tf, self.scheme)
