"""
rotations, z-y-x Euler angle kinematics and hat/vee algebra

all functions accept arrays with arbitrary leading axes,
angles are stored as (roll, pitch, yaw) = (phi, theta, psi) in the last axis
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = []
__license__ = "LGPL"

from typing import NamedTuple

import numpy as np
from scipy.spatial.transform import Rotation

EULER_EPS = 1e-3  # minimal |cos(pitch)| accepted by the Euler rate maps
SKEW_TOL = 1e-10


class SingularityError(ValueError):
    """pitch too close to +-pi/2 for the z-y-x Euler rate map"""


class NotSkewError(ValueError):
    """vee applied to a matrix that is not skew symmetric"""


class DegenerateError(ValueError):
    """direction undefined or antipodal to the reference axis"""


class EulerAngles(NamedTuple):
    roll: float = 0.
    pitch: float = 0.
    yaw: float = 0.


def _angles(angles):
    a = np.asarray(angles, dtype=float)
    if a.shape[-1] != 3:
        raise ValueError('Euler angles need 3 components, got shape %s' % (a.shape,))
    return a[..., 0], a[..., 1], a[..., 2]


def _stack(rows):
    """builds (...,3,3) matrices from a 3x3 nested list of broadcastable entries"""
    rows = [np.broadcast_arrays(*row) for row in rows]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def rotation_x(a):
    c, s = np.cos(a), np.sin(a)
    one, zero = np.ones_like(c), np.zeros_like(c)
    return _stack([[one, zero, zero], [zero, c, -s], [zero, s, c]])


def rotation_y(a):
    c, s = np.cos(a), np.sin(a)
    one, zero = np.ones_like(c), np.zeros_like(c)
    return _stack([[c, zero, s], [zero, one, zero], [-s, zero, c]])


def rotation_z(a):
    c, s = np.cos(a), np.sin(a)
    one, zero = np.ones_like(c), np.zeros_like(c)
    return _stack([[c, -s, zero], [s, c, zero], [zero, zero, one]])


def euler_to_rotation(angles):
    """
    :param angles: (...,3) roll, pitch, yaw
    :return: (...,3,3) body to world rotation Rz(yaw) Ry(pitch) Rx(roll)
    """
    phi, theta, psi = _angles(angles)
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    return _stack([
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ])


def check_euler_domain(angles, eps=EULER_EPS):
    """raises SingularityError if any pitch has |cos| < eps"""
    _, theta, _ = _angles(angles)
    ct = np.abs(np.cos(theta))
    if np.any(ct < eps):
        raise SingularityError('|cos(pitch)|=%g below %g' % (np.min(ct), eps))


def euler_rate_matrix(angles, eps=EULER_EPS):
    """
    :return: (...,3,3) E such that the body angular velocity is E @ angle rates
    """
    check_euler_domain(angles, eps)
    phi, theta, _ = _angles(angles)
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    one, zero = np.ones_like(cf), np.zeros_like(cf)
    return _stack([
        [one, zero, -st],
        [zero, cf, sf * ct],
        [zero, -sf, cf * ct],
    ])


def inverse_euler_rate_matrix(angles, eps=EULER_EPS):
    """
    :return: (...,3,3) inverse of euler_rate_matrix, in closed form
    """
    check_euler_domain(angles, eps)
    phi, theta, _ = _angles(angles)
    cf, sf = np.cos(phi), np.sin(phi)
    ct, tt = np.cos(theta), np.tan(theta)
    one, zero = np.ones_like(cf), np.zeros_like(cf)
    return _stack([
        [one, sf * tt, cf * tt],
        [zero, cf, -sf],
        [zero, sf / ct, cf / ct],
    ])


def euler_rates(angles, omega, eps=EULER_EPS):
    """angle rates from body angular velocity, vectorized over leading axes"""
    einv = inverse_euler_rate_matrix(angles, eps)
    return np.einsum('...ij,...j->...i', einv, np.asarray(omega, dtype=float))


def rotation_to_euler(rotation, eps=EULER_EPS):
    """
    z-y-x angles of a rotation matrix on the |pitch| < pi/2 branch
    :return: (...,3) roll, pitch, yaw
    """
    r = np.asarray(rotation, dtype=float)
    ct = np.hypot(r[..., 2, 1], r[..., 2, 2])
    if np.any(ct < eps):
        raise SingularityError('|cos(pitch)|=%g below %g' % (np.min(ct), eps))
    phi = np.arctan2(r[..., 2, 1], r[..., 2, 2])
    theta = np.arctan2(-r[..., 2, 0], ct)
    psi = np.arctan2(r[..., 1, 0], r[..., 0, 0])
    return np.stack([phi, theta, psi], axis=-1)


def hat(v):
    """:return: (...,3,3) skew matrix M such that M @ w == cross(v, w)"""
    v = np.asarray(v, dtype=float)
    zero = np.zeros_like(v[..., 0])
    return _stack([
        [zero, -v[..., 2], v[..., 1]],
        [v[..., 2], zero, -v[..., 0]],
        [-v[..., 1], v[..., 0], zero],
    ])


def vee(m, tol=SKEW_TOL):
    """inverse of hat
    :raise NotSkewError: if the symmetric part of m exceeds tol
    """
    m = np.asarray(m, dtype=float)
    sym = np.linalg.norm(m + np.swapaxes(m, -1, -2), axis=(-2, -1))
    if np.any(sym >= tol):
        raise NotSkewError('symmetric part %g exceeds %g' % (np.max(sym), tol))
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def skew_part(m):
    m = np.asarray(m, dtype=float)
    return 0.5 * (m - np.swapaxes(m, -1, -2))


def minimal_rotation_to(f, tol=1e-9):
    """
    rotation about e1 x f of the angle between e1 and f,
    so that R @ e1 == f/|f|

    :param f: (...,3) vectors
    :return: (...,3,3)
    :raise DegenerateError: if |f| <= tol or f points along -e1
    """
    f = np.asarray(f, dtype=float)
    norm = np.linalg.norm(f, axis=-1)
    if np.any(norm <= tol):
        raise DegenerateError('direction of a vector of norm %g is undefined' % np.min(norm))
    n = (f / norm[..., None]).reshape(-1, 3)
    if np.any(1. + n[:, 0] < 1e-12):
        raise DegenerateError('minimal rotation to -e1 is not unique')
    axis = np.stack([np.zeros(len(n)), -n[:, 2], n[:, 1]], axis=-1)  # e1 x n
    s = np.linalg.norm(axis, axis=-1)
    scale = np.arctan2(s, n[:, 0]) / np.where(s > 0, s, 1.)
    res = Rotation.from_rotvec(axis * scale[:, None]).as_matrix()
    return res.reshape(f.shape + (3,))
