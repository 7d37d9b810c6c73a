"""
trajectory generation by integrating the attitude dynamics that the flat outputs leave free

rank(A) = 3, 4 rotors: the thrusts u and body acceleration omega' solve at each time
the 7x7 linear system

  A u                = m R^T (sigma'' - g)
  -B u + J omega'    = -omega x J omega
  row3(E^-1) omega'  = sigma_4'' - d/dt(row3(E^-1)) omega

leaving a second order ODE in the roll and pitch.

rank(A) = 2 (tricopter mapped to 4 inputs): in the frame Q of the singular value
decomposition A = Q Sigma V^T, the attitude is written

  R Q = Rz(gamma) R_f Rz(Theta)

with R_f the minimal rotation bringing e1 onto f = Rz(gamma)^T (sigma'' - g).
the heading gamma is solved at each time so that the z-y-x yaw of R is sigma_4,
the remaining angle Theta obeys a scalar second order ODE.

both ODEs linearized at hover have modes growing as fast as e^(57 t) for the
preset quadrotor, they are solved as two point boundary value problems
between the hovers at both ends of the trajectory, see ode.shooting.
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = ["https://en.wikipedia.org/wiki/Flatness_(systems_theory)"]
__license__ = "LGPL"

import logging

import numpy as np

from . import se3, ode
from . import vehicle as vm
from .flat import FlatSample
from .state import StateTrajectory

FD_STEP = 1e-3  # [s] and [rad], second differences of the reframed attitude
HEADING_STEP = 1e-6
HEADING_ITER = 30
FREE_FALL = 1e-6
COND_MAX = 1e12


class SingularSystemError(ValueError):
    pass


class FreeFallError(ValueError):
    """sigma'' = g leaves the thrust direction undefined"""


def _check_rank3(vehicle):
    alloc = vm.build_allocation(vehicle)
    if alloc.rank_a != 3 or vehicle.N != 4:
        raise vm.RankError('rank 3 flatness needs 4 inputs and rank(A)=3, %r has %d and %d' % (
            vehicle, vehicle.N, alloc.rank_a))
    return alloc


def _check_finite(*arrays):
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise SingularSystemError('state is not finite')


def _still(trajectory, t):
    """FlatSample at rest at sigma(t)"""
    derivatives = np.zeros((5, 4))
    derivatives[0] = trajectory.evaluate(t)
    return FlatSample(t, derivatives)


def _rank3_solve(acc, yaw_acc, theta, omega, vehicle, alloc):
    """
    the 7x7 systems, vectorized over the leading axes
    :return: (...,7) u and omega'
    """
    _check_finite(theta, omega)
    J = vehicle.inertia
    rot = se3.euler_to_rotation(theta)
    einv = se3.inverse_euler_rate_matrix(theta)
    rates = np.einsum('...ij,...j->...i', einv, omega)
    phi_dot, theta_dot = rates[..., 0:1], rates[..., 1:2]
    cf, sf = np.cos(theta[..., 0]), np.sin(theta[..., 0])
    ct, st = np.cos(theta[..., 1]), np.sin(theta[..., 1])
    zero = np.zeros_like(cf)
    row3_dot = (phi_dot * np.stack([zero, cf / ct, -sf / ct], axis=-1)
                + theta_dot * np.stack([zero, sf * st / ct ** 2, cf * st / ct ** 2], axis=-1))

    shape = np.shape(theta)[:-1]
    m = np.zeros(shape + (7, 7))
    rhs = np.zeros(shape + (7,))
    m[..., 0:3, 0:4] = alloc.A
    rhs[..., 0:3] = vehicle.mass * np.einsum('...ji,...j->...i', rot, acc - vehicle.gravity_vector)
    m[..., 3:6, 0:4] = -alloc.B
    m[..., 3:6, 4:7] = J
    rhs[..., 3:6] = -np.cross(omega, omega @ J.T)
    m[..., 6, 4:7] = einv[..., 2, :]
    rhs[..., 6] = yaw_acc - np.sum(row3_dot * omega, axis=-1)
    if np.any(np.linalg.cond(m) > COND_MAX):
        raise SingularSystemError('rank 3 system singular')
    return np.linalg.solve(m, rhs[..., None])[..., 0]


def rank3_rhs(sample, theta, omega, vehicle, alloc=None):
    """
    :param sample: FlatSample
    :param theta: roll, pitch, yaw
    :param omega: body rate
    :return: u (4,), omega' (3,)
    :raise SingularSystemError: if the 7x7 system is singular
    """
    alloc = alloc or _check_rank3(vehicle)
    x = _rank3_solve(sample.d2[:3], sample.d2[3], np.asarray(theta, dtype=float),
                     np.asarray(omega, dtype=float), vehicle, alloc)
    return x[:4], x[4:]


def _rank3_flow(source, vehicle, alloc):
    """:return: vectorized right hand side (t, [theta, omega]) -> [theta', omega']"""
    def f(t, x):
        acc = source.evaluate(t, 2)
        sol = _rank3_solve(acc[..., :3], acc[..., 3], x[..., :3], x[..., 3:], vehicle, alloc)
        return np.concatenate([se3.euler_rates(x[..., :3], x[..., 3:]), sol[..., 4:]], axis=-1)
    return f


def rest_state(trajectory, vehicle, t=0.):
    """
    :return: theta, omega at hover with the yaw and yaw rate of the trajectory at t
    """
    angles, _ = vm.hover_solve(vehicle)
    theta = np.array([angles.roll, angles.pitch, trajectory.evaluate(t)[3]])
    omega = se3.euler_rate_matrix(theta) @ np.array([0., 0., trajectory.evaluate(t, 1)[3]])
    return theta, omega


def rest_initial_state(trajectory, vehicle):
    return rest_state(trajectory, vehicle, 0.)


def integrate_rank3(trajectory, theta0, omega0, vehicle, steps=2000, theta_end=None, omega_end=None,
                    tol=1e-10):
    """
    roll and pitch dynamics on a uniform grid, RK4 steps inside multiple shooting segments.
    (theta0, omega0) fixes the modes of the hover linearization that do not grow,
    the growing ones are fixed by (theta_end, omega_end) at the end,
    by default the hover with the yaw and yaw rate of the trajectory end

    :return: StateTrajectory on steps+1 times
    :raise SingularSystemError: if the 7x7 system becomes singular
    :raise NonConvergenceError: if the boundary value problem is not solved
    """
    alloc = _check_rank3(vehicle)
    if theta_end is None or omega_end is None:
        theta_end, omega_end = rest_state(trajectory, vehicle, trajectory.tf)
    times = np.linspace(0., trajectory.tf, steps + 1)

    hover, _ = rest_state(trajectory, vehicle, 0.)
    a = ode.linearize(_rank3_flow(_still(trajectory, 0.), vehicle, alloc), 0.,
                      np.concatenate([hover, np.zeros(3)]))
    guess = np.zeros((steps + 1, 6))
    guess[:, :3] = hover
    guess[:, 2] = trajectory.evaluate(times)[:, 3]
    yaw_rate = np.zeros((steps + 1, 3))
    yaw_rate[:, 2] = trajectory.evaluate(times, 1)[:, 3]
    guess[:, 3:] = np.einsum('kij,kj->ki', se3.euler_rate_matrix(guess[:, :3]), yaw_rate)

    x, report = ode.shooting(_rank3_flow(trajectory, vehicle, alloc), times,
                             np.concatenate([theta0, omega0]), np.concatenate([theta_end, omega_end]),
                             a, guess, tol=tol)
    acc = trajectory.evaluate(times, 2)
    u = _rank3_solve(acc[:, :3], acc[:, 3], x[:, :3], x[:, 3:], vehicle, alloc)[:, :4]
    logging.info('rank 3 integration over %d steps in %d iterations, final state %s',
                 steps, report.iterations, x[-1])
    return StateTrajectory(times, x[:, :3], x[:, 3:], u, vehicle=vehicle, flat=trajectory,
                           scheme='analytic_rank3')


def thrust_frame(sample, gravity=vm.GRAVITY, dt=0.):
    """
    :param dt: time offset from the sample, extrapolated with its derivatives
    :return: R_f, f with f = Rz(sigma_4)^T (sigma'' - g) and R_f e1 = f/|f|
    :raise FreeFallError: if |sigma'' - g| < FREE_FALL
    """
    acc = sample.taylor(dt, 2)[:3] - np.array([0., 0., -gravity])
    if np.linalg.norm(acc) < FREE_FALL:
        raise FreeFallError('free fall at t=%g' % (sample.t + dt))
    f = se3.rotation_z(sample.taylor(dt, 0)[3]).T @ acc
    return se3.minimal_rotation_to(f), f


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def reframed_attitude(source, t, angle, reframed):
    """
    attitude P = R Q = Rz(gamma) R_f Rz(Theta) of the reframed body,
    with the heading gamma such that the z-y-x yaw of R is sigma_4

    :param source: FlatTrajectory or FlatSample
    :param t: times, broadcast with angle
    :param angle: Theta
    :return: P (...,3,3), gamma (...)
    :raise FreeFallError: if |sigma'' - g| < FREE_FALL
    :raise SingularSystemError: if the heading is not found
    """
    t, angle = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(angle, dtype=float))
    _check_finite(angle)
    acc = source.evaluate(t, 2)[..., :3] + np.array([0., 0., reframed.gravity])
    if np.any(np.linalg.norm(acc, axis=-1) < FREE_FALL):
        raise FreeFallError('free fall')
    yaw = source.evaluate(t, 0)[..., 3]
    spin = se3.rotation_z(angle)
    x_axis = reframed.Q[0]  # Q^T e1

    def attitude(gamma):
        rz = se3.rotation_z(gamma)
        f = np.einsum('...ji,...j->...i', rz, acc)
        return rz @ se3.minimal_rotation_to(f) @ spin

    def heading_error(gamma):
        x = attitude(gamma) @ x_axis
        return _wrap(np.arctan2(x[..., 1], x[..., 0]) - yaw)

    gamma = yaw.copy()
    for _ in range(HEADING_ITER):
        slope = _wrap(heading_error(gamma + HEADING_STEP) - heading_error(gamma - HEADING_STEP)) / (2 * HEADING_STEP)
        if np.any(np.abs(slope) < 1e-6):
            break
        delta = heading_error(gamma) / slope
        gamma = gamma - delta
        if np.max(np.abs(delta), initial=0.) < 1e-14:
            return attitude(gamma), gamma
    raise SingularSystemError('no heading gives the yaw of the flat output')


def _rank2_solve(source, t, angle, rate, reframed, step=FD_STEP):
    """
    vectorized over the leading axes of t, angle and rate
    :return: Theta'', u_bar (...,4), omega_bar (...,3)
    """
    t, angle, rate = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, angle, rate)))
    _check_finite(rate)
    times = np.stack([t, t + step, t - step, t, t])
    angles = np.stack([angle, angle + step * rate, angle - step * rate, angle + step, angle - step])
    p, _ = reframed_attitude(source, times, angles, reframed)
    p0t = np.swapaxes(p[0], -1, -2)

    def rate_of(m):
        return se3.vee(se3.skew_part(p0t @ m))

    omega_bar = rate_of((p[1] - p[2]) / (2 * step))
    drift = rate_of((p[1] - 2 * p[0] + p[2]) / step ** 2)  # omega_bar' at Theta'' = 0
    k = rate_of((p[3] - p[4]) / (2 * step))  # d omega_bar / d Theta'

    l1, l2 = reframed.lambdas
    acc = source.evaluate(t, 2)[..., :3] + np.array([0., 0., reframed.gravity])
    mf = reframed.mass * np.linalg.norm(acc, axis=-1)
    u12 = np.stack([np.cos(angle) * mf / l1, -np.sin(angle) * mf / l2], axis=-1)
    jb, bb = reframed.J_bar, reframed.B_bar
    # J_bar (drift + k Theta'') + omega_bar x J_bar omega_bar = B_bar u_bar
    m = np.zeros(t.shape + (3, 3))
    m[..., :, 0] = k @ jb.T
    m[..., :, 1:] = -bb[:, 2:4]
    rhs = u12 @ bb[:, :2].T - np.cross(omega_bar, omega_bar @ jb.T) - drift @ jb.T
    if np.any(np.linalg.cond(m) > COND_MAX):
        raise SingularSystemError('thrusts 3,4 undetermined')
    x = np.linalg.solve(m, rhs[..., None])[..., 0]
    return x[..., 0], np.concatenate([u12, x[..., 1:]], axis=-1), omega_bar


def rank2_inputs(sample, state, reframed, step=FD_STEP):
    """
    :param state: (Theta, Theta')
    :return: Theta'', reframed thrusts u_bar (4,), reframed body rate omega_bar (3,)
    :raise SingularSystemError: if the thrusts 3,4 cannot be solved for
    """
    angle, rate = state
    angle_acc, u_bar, omega_bar = _rank2_solve(sample, sample.t, angle, rate, reframed, step)
    return float(angle_acc), u_bar, omega_bar


def rank2_ode_rhs(sample, state, reframed):
    """:return: Theta'', u_bar"""
    angle_acc, u_bar, _ = rank2_inputs(sample, state, reframed)
    return angle_acc, u_bar


def _rank2_flow(source, reframed):
    def f(t, x):
        angle_acc = _rank2_solve(source, t, x[..., 0], x[..., 1], reframed)[0]
        return np.stack([x[..., 1], angle_acc], axis=-1)
    return f


def rest_rank2_state(vehicle, reframed=None):
    """
    :return: Theta, Theta' = 0 of the hover
    """
    reframed = reframed or vm.svd_reframe(vehicle)
    _, u = vm.hover_solve(vehicle)
    u_bar = reframed.V.T @ u
    l1, l2 = reframed.lambdas
    return float(np.arctan2(-l2 * u_bar[1], l1 * u_bar[0])), 0.


def integrate_rank2(trajectory, angle0, rate0, reframed, steps=2000, vehicle=None,
                    angle_end=None, rate_end=None, tol=1e-10):
    """
    Theta ODE on a uniform grid, RK4 steps inside multiple shooting segments,
    then reconstruction of R = Rz(gamma) R_f Rz(Theta) Q^T, omega = Q omega_bar and u = V u_bar.
    (angle0, rate0) fixes the modes of the hover linearization that do not grow,
    the growing ones are fixed by (angle_end, rate_end), by default the hover

    :param vehicle: Vehicle, needed for the default end state
    :return: StateTrajectory on steps+1 times, extras hold Theta and Theta'
    :raise NonConvergenceError: if the boundary value problem is not solved
    """
    if angle_end is None or rate_end is None:
        if vehicle is None:
            raise ValueError('the hover at the end needs the vehicle')
        angle_end, rate_end = rest_rank2_state(vehicle, reframed)
    times = np.linspace(0., trajectory.tf, steps + 1)
    a = ode.linearize(_rank2_flow(_still(trajectory, 0.), reframed), 0., [angle_end, 0.])
    x, report = ode.shooting(_rank2_flow(trajectory, reframed), times, [angle0, rate0],
                             [angle_end, rate_end], a, np.tile([angle_end, 0.], (steps + 1, 1)), tol=tol)

    _, u_bar, omega_bar = _rank2_solve(trajectory, times, x[:, 0], x[:, 1], reframed)
    p, _ = reframed_attitude(trajectory, times, x[:, 0], reframed)
    theta = se3.rotation_to_euler(p @ reframed.Q.T)
    logging.info('rank 2 integration over %d steps in %d iterations, final Theta=%g',
                 steps, report.iterations, x[-1, 0])
    return StateTrajectory(times, np.unwrap(theta, axis=0), omega_bar @ reframed.Q.T, u_bar @ reframed.V.T,
                           vehicle=vehicle, flat=trajectory, scheme='analytic_rank2',
                           extras={'Theta_T': x[:, 0], 'Theta_T_dot': x[:, 1]})
