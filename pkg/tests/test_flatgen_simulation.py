from flatgen.tests import *
from flatgen.simulation import *
from flatgen.flat import fit_rest_to_rest
from flatgen.state import StateTrajectory, trapezoid_weights
from flatgen.vehicle import preset, hover_solve, Propeller, Vehicle
from flatgen import se3

import pytest

HOVER = [0.3, -0.2, 1., 0.]


class TestDynamics:
    def test_hover(self):
        quad = preset('quad_tilted')
        angles, u = hover_solve(quad)
        state = FullState([1, 2, 3], [0, 0, 0], angles, [0, 0, 0])
        d = dynamics_rhs(state, u, quad)
        assert_close(d.as_vector(), np.zeros(12), 1e-12)

    def test_free_fall(self):
        quad = preset('quad_aligned')
        state = FullState([0, 0, 0], [1, 0, 0], [0, 0, 0], [0, 0, 0])
        d = dynamics_rhs(state, np.zeros(4), quad)
        assert_close(d.position, [1, 0, 0])
        assert_close(d.velocity, [0, 0, -9.81])

    def test_full_state(self):
        x = np.arange(12.)
        s = FullState.from_vector(x)
        assert_close(s.theta, [6, 7, 8])
        assert_close(s.as_vector(), x)


class TestEffortCost:
    def test_aligned_hover(self):
        quad = preset('quad_aligned')
        times = np.linspace(0, 2, 11)
        u = np.full((11, 4), quad.weight / 4)
        assert effort_cost(u, quad, trapezoid_weights(times)) == pytest.approx(1)
        assert effort_cost(2 * u, quad, trapezoid_weights(times)) == pytest.approx(4)
        trajectory = StateTrajectory(times, np.zeros((11, 3)), np.zeros((11, 3)), u, vehicle=quad)
        assert effort_cost(trajectory) == pytest.approx(1)

    def test_arguments(self):
        with pytest.raises(ValueError):
            effort_cost(np.ones((3, 4)))


class TestForwardSimulate:
    def test_hover(self):
        quad = preset('quad_tilted')
        angles, u = hover_solve(quad)
        flat = fit_rest_to_rest(HOVER, HOVER, 1.)
        x0 = FullState(HOVER[:3], [0, 0, 0], angles, [0, 0, 0])
        sim = forward_simulate(quad, lambda t: u, x0, 1., steps=200, flat=flat)
        assert sim.states.shape == (201, 12)
        assert sim.rms_position_error < 1e-9
        assert sim.metrics()['replay_yaw'] < 1e-9
        assert_close(sim.omega, np.zeros((201, 3)), 1e-9)

    def test_schedule(self):
        times = np.linspace(0, 1, 6)
        inputs = np.column_stack([times, times ** 2, np.ones(6), -times])
        schedule = input_schedule(times, inputs)
        assert_close(schedule(times), inputs, 1e-12)

    def test_trajectory_schedule(self):
        quad = preset('quad_aligned')
        times = np.linspace(0, 1, 11)
        u = np.full((11, 4), quad.weight / 4)
        trajectory = StateTrajectory(times, np.zeros((11, 3)), np.zeros((11, 3)), u, vehicle=quad)
        sim = forward_simulate(quad, trajectory, np.zeros(12), 1., steps=100)
        assert_close(sim.positions[-1], np.zeros(3), 1e-9)
        assert sim.rms_position_error is None

    def test_diverged(self):
        quad = preset('quad_aligned')
        with pytest.raises(DivergedError):
            forward_simulate(quad, lambda t: np.full(4, 1000.), np.zeros(12), 2., steps=200)

    def test_ballistic(self):
        quad = preset('quad_aligned')
        x0 = FullState([0.1, 0.2, 3.], [1., -0.5, 2.], [0.1, -0.2, 0.3], [0, 0, 0])
        sim = forward_simulate(quad, lambda t: np.zeros(4), x0, 1.5, steps=150)
        t = sim.times[:, None]
        expected = x0.position + x0.velocity * t + 0.5 * quad.gravity_vector * t ** 2
        assert_close(sim.positions, expected, 1e-10)
        assert_close(sim.omega, np.zeros((151, 3)), 1e-12)
        assert_close(sim.theta, np.tile(x0.theta, (151, 1)), 1e-12)

    def test_order(self):
        # torque free axisymmetric body: the spin precesses, every Euler angle moves
        quad = preset('quad_aligned')
        x0 = FullState([0, 0, 0], [0, 0, 0], [0, 0, 0], [1., 0., 2.])

        def final(steps):
            return forward_simulate(quad, lambda t: np.zeros(4), x0, 1., steps=steps).states[-1]

        reference = final(1600)
        e50 = np.max(np.abs(final(50) - reference))
        e100 = np.max(np.abs(final(100) - reference))
        assert 12 < e50 / e100 < 20

    def test_body_frame(self):
        # the same vehicle described in a rotated body frame flies the same path
        quad = preset('quad_tilted')
        r = se3.euler_to_rotation([0.4, -0.3, 1.1])
        props = [Propeller(r @ p.r, r @ p.v, p.c) for p in quad.propellers]
        turned = Vehicle(quad.mass, r @ quad.inertia @ r.T, props)
        theta = np.array([0.1, 0.2, -0.3])
        omega = np.array([0.5, -0.2, 0.3])
        turned_theta = se3.rotation_to_euler(se3.euler_to_rotation(theta) @ r.T)
        u = hover_solve(quad)[1] * np.array([1.05, 0.97, 1.02, 0.99])
        sim = forward_simulate(quad, lambda t: u, FullState([0, 0, 0], [0, 0, 0], theta, omega),
                               0.5, steps=2000)
        other = forward_simulate(turned, lambda t: u,
                                 FullState([0, 0, 0], [0, 0, 0], turned_theta, r @ omega),
                                 0.5, steps=2000)
        assert_close(other.positions, sim.positions, 1e-8)
        assert_close(other.omega, sim.omega @ r.T, 1e-8)
        assert_close(se3.euler_to_rotation(other.theta[-1]) @ r,
                     se3.euler_to_rotation(sim.theta[-1]), 1e-8)
