from flatgen.tests import *
from flatgen.vehicle import *
from flatgen import se3

import pytest


def hover_residual(vehicle, angles, u):
    """max deviation of [A;B] u from the weight in body frame"""
    alloc = build_allocation(vehicle)
    weight = se3.euler_to_rotation(angles).T @ [0, 0, vehicle.weight]
    return max(np.max(np.abs(alloc.A @ u - weight)), np.max(np.abs(alloc.B @ u)))


class TestPropeller:
    def test___init__(self):
        p = Propeller([1, 0, 0], [0, 3, 4], 0.02)
        assert_close(p.v, [0, 0.6, 0.8])
        with pytest.raises(ValueError):
            Propeller([0, 0, 0], [0, 0, 0], 0)

    def test_moment_matrix(self):
        assert_close(moment_matrix(Propeller([0, 0, 0], [0, 0, 1], 0)), np.zeros((3, 3)))
        p = Propeller([0.19, 0, 0], [0, 0, 1], 0.016)
        m = moment_matrix(p)
        assert_close(m, se3.hat([0.19, 0, 0]) + 0.016 * np.eye(3))
        v = np.array([0.2, -0.1, 0.97])
        assert_close(m @ v, np.cross(p.r, v) + 0.016 * v, 1e-15)

    def test_moment_arm(self):
        p = Propeller([0.19, 0, 0], [0.2, 0, 0.98], -0.016)
        assert_close(p.moment_arm(), np.cross(p.r, p.v) - 0.016 * p.v, 1e-15)


class TestVehicle:
    def test___init__(self):
        props = [Propeller([0.1, 0, 0], [0, 0, 1], 0.01)] * 3
        with pytest.raises(ValueError):
            Vehicle(1, [1, 1, -1], props)  # not positive definite
        with pytest.raises(ValueError):
            Vehicle(1, [1, 1, 1], props[:2])
        v = Vehicle(1, [1, 2, 3], props)
        assert v.N == 3
        assert_close(v.inertia, np.diag([1, 2, 3]))

    def test_describe(self):
        assert 'quad_tilted' in preset('quad_tilted').describe()

    def test_preset_is_fresh(self):
        v = preset('quad_tilted')
        v.propellers.pop()
        v.mass = 2.
        w = preset('quad_tilted')
        assert w is not v
        assert w.N == 4 and w.mass == 1.


class TestAllocation:
    def test_ranks(self):
        assert build_allocation(preset('quad_tilted')).rank_a == 3
        assert build_allocation(preset('hexacopter_tilted')).rank_a == 3
        assert build_allocation(preset('tricopter')).rank_a == 2
        assert build_allocation(preset('quad_aligned')).rank_a == 1

    def test_columns(self):
        v = preset('quad_tilted')
        alloc = build_allocation(v)
        for i, p in enumerate(v.propellers):
            assert_close(alloc.A[:, i], p.v)
            assert_close(alloc.B[:, i], np.cross(p.r, p.v) + p.c * p.v, 1e-15)

    def test_controllability(self):
        props = [Propeller([0, 0, 0], [0, 0, 1], 0)] * 4
        with pytest.raises(ControllabilityError):
            build_allocation(Vehicle(1, [1, 1, 1], props))


class TestReframe:
    def test_svd_reframe(self):
        v = preset('tricopter')
        rf = svd_reframe(v)
        assert np.linalg.det(rf.Q) == pytest.approx(1)
        assert_close(rf.Q @ rf.sigma @ rf.V.T, v.A, 1e-12)
        assert_close(rf.V.T @ rf.V, np.eye(4), 1e-12)
        l1, l2 = rf.lambdas
        assert l1 == pytest.approx(np.sqrt(3))
        assert l2 == pytest.approx(1)
        assert_close(rf.J_bar, rf.Q.T @ v.inertia @ rf.Q, 1e-15)
        assert_close(rf.B_bar, rf.Q.T @ v.B @ rf.V, 1e-15)

    def test_rank_error(self):
        with pytest.raises(RankError):
            svd_reframe(preset('quad_tilted'))


class TestTricopter:
    def test_tricopter_to_quad(self):
        tri = preset_tricopter(0.3)
        quad = tricopter_to_quad(tri)
        assert quad.N == 4 and quad.tilting
        p3, p4 = quad.propellers[2:]
        assert_close(p3.r, tri.propellers[2].r)
        assert_close(p4.r, tri.propellers[2].r)
        assert_close(p3.v, [0, 0, 1])
        assert_close(p4.v, [0, -1, 0])
        assert p3.c == p4.c == tri.propellers[2].c
        assert list(quad.bidirectional) == [False, False, False, True]
        with pytest.raises(ValueError):
            tricopter_to_quad(quad)

    def test_thrust_split(self):
        t3, t4 = split_thrust(3., 0.2)
        t_alpha, alpha = merge_thrust(t3, t4)
        assert t_alpha == pytest.approx(3.)
        assert alpha == pytest.approx(0.2)
        # the tilted rotor force is the sum of the 2 mapped rotors
        tri, quad = preset_tricopter(0.2), preset('tricopter')
        assert_close(tri.A[:, 2] * 3., quad.A[:, 2] * t3 + quad.A[:, 3] * t4, 1e-14)


class TestHover:
    def test_aligned(self):
        v = preset('quad_aligned')
        angles, u = hover_solve(v)
        assert_close(u, np.full(4, 2.4525), 1e-12)
        assert_close(angles, [0, 0, 0], 1e-12)

    @pytest.mark.parametrize('name', ['quad_tilted', 'hexacopter_tilted', 'tricopter'])
    def test_hover_solve(self, name):
        v = preset(name)
        angles, u = hover_solve(v)
        assert hover_residual(v, angles, u) < 1e-9
        assert v.thrust_positive(u)

    def test_minimum_norm(self):
        v = preset('hexacopter_tilted')
        angles, u = hover_solve(v)
        cost = np.mean((v.N * u / v.weight) ** 2)
        assert 1 < cost < 1.3
        # any other direction needs more thrust
        d = se3.euler_to_rotation(angles).T @ [0, 0, 1]
        other = d + [0.02, -0.01, 0]
        _, u2 = hover_solve(v, other / np.linalg.norm(other))
        assert np.linalg.norm(u2) > np.linalg.norm(u)

    def test_direction(self):
        v = preset('hexacopter_tilted')
        d = np.array([0.07, 0.06, np.sqrt(1 - 0.07 ** 2 - 0.06 ** 2)])
        angles, u = hover_solve(v, d)
        assert_close(v.A @ u / np.linalg.norm(v.A @ u), d, 1e-12)
        assert hover_residual(v, angles, u) < 1e-9

    def test_no_hover(self):
        v = preset('quad_aligned')
        with pytest.raises(NoHoverError):
            hover_solve(v, [0.1, 0, np.sqrt(0.99)])  # aligned rotors cannot push sideways


class TestPresets:
    def test_preset(self):
        assert set(PRESETS) == {'quad_tilted', 'quad_aligned', 'tricopter', 'hexacopter_tilted'}
        v = preset('quad_tilted')
        assert v.mass == 1 and v.N == 4
        assert_close(v.propellers[0].r, [0.19, 0, 0])
        assert [p.c for p in v.propellers] == pytest.approx([0.016, -0.016, 0.016, -0.016])
        assert preset('hexacopter_tilted').N == 6
        with pytest.raises(KeyError):
            preset('octocopter')
