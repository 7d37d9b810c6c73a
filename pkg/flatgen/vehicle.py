"""
multirotor vehicle model: propellers, allocation matrices, reframing and hover

a propeller i at body position r_i, with unit thrust axis v_i and drag-to-thrust
ratio c_i (positive for clockwise rotation) produces the body force u_i v_i
and the body moment u_i (hat(r_i) + c_i I) v_i
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = []
__license__ = "LGPL"

import logging
from typing import NamedTuple

import numpy as np
from scipy import linalg

from . import se3, units

GRAVITY = 9.81
RANK_RTOL = 1e-8  # singular values below RANK_RTOL * largest are zero


class ControllabilityError(ValueError):
    """moment allocation matrix B is not of rank 3"""


class RankError(ValueError):
    """force allocation matrix A has an unsupported rank"""


class NoHoverError(ValueError):
    """the vehicle cannot hover with positive thrusts"""


class Propeller:
    def __init__(self, r, v, c, bidirectional=False):
        """
        :param r: 3-vector position in body frame [m]
        :param v: 3-vector thrust axis, renormalized
        :param c: drag to thrust ratio [m], sign gives the rotation direction
        :param bidirectional: True if the thrust may be negative
        """
        self.r = np.array(r, dtype=float).reshape(3)
        v = np.array(v, dtype=float).reshape(3)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError('null thrust axis')
        self.v = v / norm
        self.c = float(c)
        self.bidirectional = bool(bidirectional)

    def moment_arm(self):
        """:return: body moment per unit thrust"""
        return moment_matrix(self) @ self.v

    def __repr__(self):
        return '%s(r=%s, v=%s, c=%g)' % (
            self.__class__.__name__, self.r.tolist(), np.round(self.v, 4).tolist(), self.c)


def moment_matrix(propeller):
    """:return: hat(r) + c I, the moment per unit thrust vector"""
    return se3.hat(propeller.r) + propeller.c * np.eye(3)


class AllocationPair(NamedTuple):
    A: np.ndarray  # 3xN force allocation
    B: np.ndarray  # 3xN moment allocation
    rank_a: int


class ReframedVehicle(NamedTuple):
    Q: np.ndarray  # 3x3 proper rotation
    sigma: np.ndarray  # 3xN, diag(lambda1, lambda2, 0)
    V: np.ndarray  # NxN orthogonal
    lambdas: tuple
    J_bar: np.ndarray
    B_bar: np.ndarray
    mass: float
    gravity: float


class Vehicle:
    def __init__(self, mass, inertia, propellers, gravity=GRAVITY, name=None, tilting=False):
        """
        :param mass: float [kg]
        :param inertia: 3x3 symmetric positive definite matrix, or 3 diagonal values [kg m^2]
        :param propellers: list of at least 3 Propeller
        :param gravity: float [m/s^2]
        :param tilting: True for a tricopter mapped through tricopter_to_quad
        """
        self.mass = float(mass)
        if self.mass <= 0:
            raise ValueError('mass must be positive')
        inertia = np.array(inertia, dtype=float)
        if inertia.shape == (3,):
            inertia = np.diag(inertia)
        if inertia.shape != (3, 3) or not np.allclose(inertia, inertia.T):
            raise ValueError('inertia must be a symmetric 3x3 matrix')
        try:
            np.linalg.cholesky(inertia)
        except np.linalg.LinAlgError:
            raise ValueError('inertia must be positive definite')
        self.inertia = inertia
        self.propellers = list(propellers)
        if len(self.propellers) < 3:
            raise ValueError('at least 3 propellers required, got %d' % len(self.propellers))
        self.gravity = float(gravity)
        self.name = name
        self.tilting = tilting

    @property
    def N(self):
        return len(self.propellers)

    @property
    def A(self):
        return np.stack([p.v for p in self.propellers], axis=1)

    @property
    def B(self):
        return np.stack([p.moment_arm() for p in self.propellers], axis=1)

    @property
    def gravity_vector(self):
        return np.array([0., 0., -self.gravity])

    @property
    def weight(self):
        return self.mass * self.gravity

    @property
    def bidirectional(self):
        """boolean mask of propellers allowed to push backwards"""
        return np.array([p.bidirectional for p in self.propellers])

    def thrust_positive(self, u):
        """:return: True if all unidirectional thrusts in u (...,N) are > 0"""
        u = np.asarray(u, dtype=float)
        return bool(np.all(u[..., ~self.bidirectional] > 0))

    def describe(self):
        alloc = build_allocation(self)
        lines = ['%s: N=%d m=%g kg rank(A)=%d%s' % (
            self.name or 'vehicle', self.N, self.mass, alloc.rank_a,
            ' tilting' if self.tilting else '')]
        j = self.inertia
        if np.count_nonzero(j - np.diag(np.diag(j))) == 0:
            lines.append('  J=diag(%s) kg m^2' % ', '.join('%g' % x for x in np.diag(j)))
        else:
            lines.append('  J=%s kg m^2' % np.round(j, 6).tolist())
        for i, p in enumerate(self.propellers, 1):
            lines.append('  %d r=%s v=%s c=%+g' % (
                i, np.round(p.r, 4).tolist(), np.round(p.v, 4).tolist(), p.c))
        return '\n'.join(lines)

    def __repr__(self):
        return '%s(%r, N=%d)' % (self.__class__.__name__, self.name, self.N)


def matrix_rank(m, rtol=RANK_RTOL):
    s = linalg.svd(np.asarray(m, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def build_allocation(vehicle):
    """
    :return: AllocationPair(A, B, rank(A))
    :raise ControllabilityError: if rank(B) < 3
    """
    a, b = vehicle.A, vehicle.B
    if matrix_rank(b) < 3:
        raise ControllabilityError('moment allocation of %r has rank %d' % (vehicle, matrix_rank(b)))
    return AllocationPair(a, b, matrix_rank(a))


def svd_reframe(vehicle):
    """
    singular value decomposition A = Q Sigma V^T of a rank 2 force allocation,
    with det(Q) = +1

    :return: ReframedVehicle with J_bar = Q^T J Q and B_bar = Q^T B V
    :raise RankError: if rank(A) != 2
    """
    alloc = build_allocation(vehicle)
    if alloc.rank_a != 2:
        raise RankError('reframing needs rank(A)=2, got %d' % alloc.rank_a)
    q, s, vt = linalg.svd(alloc.A, full_matrices=True)
    if linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]  # column of the null singular value
    sigma = np.zeros((3, vehicle.N))
    sigma[0, 0], sigma[1, 1] = s[0], s[1]
    v = vt.T
    return ReframedVehicle(
        Q=q, sigma=sigma, V=v, lambdas=(s[0], s[1]),
        J_bar=q.T @ vehicle.inertia @ q,
        B_bar=q.T @ alloc.B @ v,
        mass=vehicle.mass,
        gravity=vehicle.gravity,
    )


def tricopter_to_quad(vehicle):
    """
    maps a tricopter whose third arm tilts about body x onto a 4 input vehicle:
    the tilting rotor becomes a vertical rotor and a horizontal one along -y
    at the same position and with the same drag ratio
    """
    if vehicle.N != 3:
        raise ValueError('tricopter needs 3 propellers, got %d' % vehicle.N)
    p1, p2, p3 = vehicle.propellers
    props = [
        Propeller(p1.r, p1.v, p1.c),
        Propeller(p2.r, p2.v, p2.c),
        Propeller(p3.r, [0, 0, 1], p3.c),
        Propeller(p3.r, [0, -1, 0], p3.c, bidirectional=True),
    ]
    return Vehicle(vehicle.mass, vehicle.inertia, props, vehicle.gravity,
                   name=vehicle.name, tilting=True)


def split_thrust(t_alpha, alpha):
    """thrust of the tilting rotor to its vertical and horizontal parts"""
    return t_alpha * np.cos(alpha), t_alpha * np.sin(alpha)


def merge_thrust(t3, t4):
    """:return: (T_alpha, alpha) of the tilting rotor"""
    return np.hypot(t3, t4), np.arctan2(t4, t3)


def attitude_from_direction(d, yaw=0.):
    """
    :param d: unit thrust direction in body frame, third row of R
    :return: EulerAngles with given yaw
    """
    d = np.asarray(d, dtype=float)
    return se3.EulerAngles(
        float(np.arctan2(d[1], d[2])),
        float(np.arcsin(np.clip(-d[0], -1., 1.))),
        float(yaw))


def hover_solve(vehicle, direction=None, tol=1e-9):
    """
    static hover: [A;B] u = [m g d; 0] with d the body direction of the world vertical

    :param direction: optional unit 3-vector d imposed in the body frame,
      default is the direction with the smallest hover thrust norm
      among those the allocation can produce
    :return: EulerAngles (yaw 0), u as (N,) array
    :raise NoHoverError: if no direction works or a thrust is not positive
    """
    alloc = build_allocation(vehicle)
    w = np.vstack([alloc.A, alloc.B])
    mg = vehicle.weight
    if direction is None:
        left = linalg.null_space(w.T, rcond=RANK_RTOL)  # 6 x k
        free = linalg.null_space(left[:3, :].T, rcond=RANK_RTOL) if left.size else np.eye(3)
        if free.shape[1] == 0:
            raise NoHoverError('%r cannot balance its weight without moment' % vehicle)
        k = linalg.pinv(w)[:, :3] @ free
        _, vecs = linalg.eigh(k.T @ k)
        d = free @ vecs[:, 0]
        d = d / np.linalg.norm(d)
        if d[2] < 0:
            d = -d
    else:
        d = np.asarray(direction, dtype=float)
        if abs(np.linalg.norm(d) - 1) > 1e-9:
            raise NoHoverError('hover direction must be a unit vector')
    rhs = np.concatenate([mg * d, np.zeros(3)])
    u, *_ = linalg.lstsq(w, rhs)
    err = np.max(np.abs(w @ u - rhs))
    if err > tol * max(1., mg):
        raise NoHoverError('hover residual %g along direction %s' % (err, d))
    if d[2] <= 0 or not vehicle.thrust_positive(u):
        raise NoHoverError('hover thrusts %s are not positive' % u)
    angles = attitude_from_direction(d)
    logging.info('hover of %r: angles=%s u=%s', vehicle, np.round(angles, 6), u)
    return angles, u


def preset_quad_tilted(alpha=None):
    return _build('quad_tilted',
                  axes=[[0.20, 0, 0.98], [0, 0.30, 0.96], [0.30, 0, 0.96], [0, -0.10, 0.99]],
                  arms=[[19, 0, 0], [0, -19, 0], [-19, 0, 0], [0, 19, 0]])


def preset_quad_aligned(alpha=None):
    return _build('quad_aligned',
                  axes=[[0, 0, 1]] * 4,
                  arms=[[19, 0, 0], [0, -19, 0], [-19, 0, 0], [0, 19, 0]])


def preset_tricopter(alpha=0.):
    """tricopter with its third arm tilted by alpha about body x"""
    return _build('tricopter',
                  axes=[[0, 0, 1], [0, 0, 1], [0, -np.sin(alpha), np.cos(alpha)]],
                  arms=[[-10, -17, 0], [-10, 17, 0], [19, 0, 0]])


def preset_hexacopter_tilted(alpha=None):
    return _build('hexacopter_tilted',
                  axes=[[0.20, 0, 0.98], [0, 0.30, 0.96], [0, -0.10, 0.99],
                        [0.20, 0, 0.98], [0, 0.10, 0.99], [0, 0.20, 0.98]],
                  arms=[[-19, 0, 0], [-9, 17, 0], [9, 17, 0],
                        [19, 0, 0], [9, -17, 0], [-9, -17, 0]])


def _build(name, axes, arms, unit='cm', mass=1., inertia=(5e-3, 5e-3, 10e-3), drag=1.6):
    """propellers spin alternately clockwise and counterclockwise, drag ratio in unit"""
    arms = units.length(arms, unit)
    c = units.length(drag, unit)
    props = [Propeller(r, v, c if i % 2 == 0 else -c) for i, (r, v) in enumerate(zip(arms, axes))]
    return Vehicle(mass, inertia, props, name=name)


PRESETS = {
    'quad_tilted': preset_quad_tilted,
    'quad_aligned': preset_quad_aligned,
    'tricopter': preset_tricopter,
    'hexacopter_tilted': preset_hexacopter_tilted,
}


def preset(name):
    """
    :param name: one of PRESETS
    :return: new Vehicle, tricopters are returned already mapped by tricopter_to_quad
    """
    try:
        vehicle = PRESETS[name]()
    except KeyError:
        raise KeyError('unknown vehicle preset %r, choose among %s' % (name, ', '.join(PRESETS)))
    if name == 'tricopter':
        vehicle = tricopter_to_quad(vehicle)
    return vehicle
