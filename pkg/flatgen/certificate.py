"""
independent check of generated trajectories

re-evaluates the collocation equations interval by interval with
scipy rotations and a numerically inverted Euler rate matrix,
and checks knot histories read back from files against the thrust and yaw equations
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = []
__license__ = "LGPL"

import logging

import numpy as np
from scipy.spatial.transform import Rotation

EQUATIONS = ('boundary', 'kinematics', 'dynamics', 'thrust', 'yaw', 'extra')


class Certificate:
    def __init__(self):
        self.worst = {eq: (0., None) for eq in EQUATIONS}  # max |residual|, interval

    def record(self, equation, values, interval=None):
        v = float(np.max(np.abs(values)))
        if v > self.worst[equation][0]:
            self.worst[equation] = (v, interval)

    @property
    def max_residual(self):
        return max(v for v, _ in self.worst.values())

    @property
    def location(self):
        """:return: (equation, interval) of the largest residual"""
        eq = max(self.worst, key=lambda e: self.worst[e][0])
        return eq, self.worst[eq][1]

    def __repr__(self):
        return '%s(max=%g at %s)' % (self.__class__.__name__, self.max_residual, self.location)


def _rotation(angles):
    roll, pitch, yaw = angles
    return Rotation.from_euler('ZYX', [yaw, pitch, roll]).as_matrix()


def _rate_matrix(angles):
    roll, pitch, _ = angles
    return np.array([
        [1., 0., -np.sin(pitch)],
        [0., np.cos(roll), np.sin(roll) * np.cos(pitch)],
        [0., -np.sin(roll), np.cos(roll) * np.cos(pitch)],
    ])


def _angle_rates(angles, omega):
    return np.linalg.inv(_rate_matrix(angles)) @ omega


def certify(problem, trajectory):
    """
    :param problem: CollocationProblem the trajectory solves
    :param trajectory: StateTrajectory with the interval inputs
    :return: Certificate
    """
    veh = problem.vehicle
    A = np.column_stack([p.v for p in veh.propellers])
    B = np.column_stack([np.cross(p.r, p.v) + p.c * p.v for p in veh.propellers])
    J = veh.inertia
    Jinv = np.linalg.inv(J)
    flat = problem.trajectory
    g = np.array([0., 0., -veh.gravity])
    h = problem.ts
    th, om, u = trajectory.theta, trajectory.omega, trajectory.input_values

    def torque_rate(w, thrust):
        return Jinv @ (B @ thrust - np.cross(w, J @ w))

    cert = Certificate()
    cert.record('boundary', problem.boundary_residual(th, om))
    for k in range(problem.n):
        t0, t1 = k * h, (k + 1) * h
        a, b = th[k], th[k + 1]
        wa, wb = om[k], om[k + 1]
        uk = u[k]
        if problem.scheme == 'euler':
            kin = b - a - h * _angle_rates(b, wb)
            dyn = wb - wa - h * torque_rate(wb, uk)
            att, t_force = b, t1
        elif problem.scheme == 'trapezoidal':
            kin = b - a - h / 2 * (_angle_rates(a, wa) + _angle_rates(b, wb))
            dyn = wb - wa - h / 2 * (torque_rate(wa, uk) + torque_rate(wb, uk))
            att, t_force = (a + b) / 2, (t0 + t1) / 2
        else:
            fa, fb = _angle_rates(a, wa), _angle_rates(b, wb)
            ga, gb = torque_rate(wa, uk), torque_rate(wb, uk)
            att = (a + b) / 2 + h / 8 * (fa - fb)
            wm = (wa + wb) / 2 + h / 8 * (ga - gb)
            kin = b - a - h / 6 * (fa + 4 * _angle_rates(att, wm) + fb)
            dyn = wb - wa - h / 6 * (ga + 4 * torque_rate(wm, uk) + gb)
            t_force = (t0 + t1) / 2
        acc = flat.evaluate(t_force, 2)[:3]
        force = A @ uk - veh.mass * _rotation(att).T @ (acc - g)
        cert.record('kinematics', kin, k)
        cert.record('dynamics', dyn, k)
        cert.record('thrust', force, k)
        cert.record('yaw', b[2] - flat.evaluate(t1)[3], k)
        if problem.extra_outputs is not None:
            f = A @ uk
            cert.record('extra', f[:2] / np.linalg.norm(f) - np.array(problem.extra_outputs), k)
    logging.info('certificate of %r: %r', problem, cert)
    return cert


def knot_consistency(vehicle, flat, trajectory):
    """
    thrust and yaw equations at the knots of a history, with its knot inputs

    :return: Certificate with 'thrust' and 'yaw' entries located at knots
    """
    A = np.column_stack([p.v for p in vehicle.propellers])
    g = np.array([0., 0., -vehicle.gravity])
    cert = Certificate()
    for k, t in enumerate(trajectory.times):
        acc = flat.evaluate(t, 2)[:3]
        force = A @ trajectory.inputs[k] - vehicle.mass * _rotation(trajectory.theta[k]).T @ (acc - g)
        cert.record('thrust', force, k)
        yaw = np.angle(np.exp(1j * (trajectory.theta[k, 2] - flat.evaluate(t)[3])))
        cert.record('yaw', yaw, k)
    return cert
