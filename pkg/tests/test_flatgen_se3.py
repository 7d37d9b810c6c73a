from flatgen.tests import *
from flatgen.se3 import *

import pytest


class TestRotations:
    @classmethod
    def setup_class(self):
        rng = np.random.default_rng(1)
        self.angles = rng.uniform([-1.2, -1.2, -3], [1.2, 1.2, 3], (20, 3))

    def test_euler_to_rotation(self):
        r = euler_to_rotation(self.angles)
        ref = rotation_z(self.angles[:, 2]) @ rotation_y(self.angles[:, 1]) @ rotation_x(self.angles[:, 0])
        assert_close(r, ref, 1e-14)
        assert_close(r @ np.swapaxes(r, -1, -2), np.broadcast_to(np.eye(3), r.shape), 1e-14)
        assert_close(np.linalg.det(r), 1., 1e-14)

    def test_rotation_to_euler(self):
        assert_close(rotation_to_euler(euler_to_rotation(self.angles)), self.angles, 1e-12)

    def test_scalar(self):
        assert euler_to_rotation([0, 0, 0]).shape == (3, 3)
        assert_close(euler_to_rotation(EulerAngles()), np.eye(3))


class TestEulerRates:
    def test_inverse(self):
        rng = np.random.default_rng(2)
        angles = rng.uniform(-1.3, 1.3, (10, 3))
        e = euler_rate_matrix(angles)
        einv = inverse_euler_rate_matrix(angles)
        assert_close(e @ einv, np.broadcast_to(np.eye(3), e.shape), 1e-12)

    def test_body_rate(self):
        # omega = vee(R^T R') along a path with constant angle rates
        angles = np.array([0.3, -0.4, 1.1])
        rates = np.array([0.7, -0.2, 0.5])
        d = 1e-6
        r_dot = (euler_to_rotation(angles + d * rates) - euler_to_rotation(angles - d * rates)) / (2 * d)
        omega = vee(skew_part(euler_to_rotation(angles).T @ r_dot))
        assert_close(euler_rate_matrix(angles) @ rates, omega, 1e-8)
        assert_close(euler_rates(angles, omega), rates, 1e-8)

    def test_singularity(self):
        with pytest.raises(SingularityError):
            euler_rate_matrix([0, np.pi / 2, 0])
        with pytest.raises(SingularityError):
            inverse_euler_rate_matrix([[0, 0, 0], [0.1, -np.pi / 2, 0.3]])
        euler_rate_matrix([0, np.pi / 2 - 0.01, 0])  # still inside the domain


class TestHatVee:
    def test_hat(self):
        v, w = np.array([1., -2., 3.]), np.array([0.5, 4., -1.])
        assert_close(hat(v) @ w, np.cross(v, w), 1e-15)
        assert_close(hat(v), -hat(v).T)

    def test_vee(self):
        v = np.array([[1., -2., 3.], [0, 0.1, 0]])
        assert_close(vee(hat(v)), v)
        with pytest.raises(NotSkewError):
            vee(np.eye(3))


class TestMinimalRotation:
    def test_minimal_rotation_to(self):
        for f in ([0, 0, 1], [1, 2, 3], [0.1, -5, 0.2], [-1, 0.01, 0], [-1, 1e-4, 0], [-1, 0, 2e-6]):
            r = minimal_rotation_to(f)
            assert_close(r @ [1, 0, 0], np.array(f) / np.linalg.norm(f), 1e-10)
            assert_close(r @ r.T, np.eye(3), 1e-10)
            assert np.linalg.det(r) == pytest.approx(1)

    def test_axis(self):
        r = minimal_rotation_to([0, 0, 2])
        assert_close(r @ [0, 1, 0], [0, 1, 0], 1e-15)  # e2 is the rotation axis
        assert_close(minimal_rotation_to([3, 0, 0]), np.eye(3))

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            minimal_rotation_to([-1, 0, 0])
        with pytest.raises(DegenerateError):
            minimal_rotation_to([0, 0, 1e-12])


class TestInvariants:
    @classmethod
    def setup_class(self):
        rng = np.random.default_rng(7)
        self.angles = rng.uniform([-np.pi, -1.5, -np.pi], [np.pi, 1.5, np.pi], (10000, 3))
        self.vectors = rng.normal(size=(10000, 3))

    def test_orthonormal(self):
        r = euler_to_rotation(self.angles)
        eye = np.broadcast_to(np.eye(3), r.shape)
        assert np.max(np.abs(r @ np.swapaxes(r, -1, -2) - eye)) < 1e-10
        assert np.max(np.abs(np.linalg.det(r) - 1)) < 1e-10

    def test_euler_round_trip(self):
        r = euler_to_rotation(self.angles)
        assert np.max(np.abs(euler_to_rotation(rotation_to_euler(r)) - r)) < 1e-10

    def test_hat_vee(self):
        v = self.vectors
        assert_close(vee(hat(v)), v, 1e-15)
        assert_close(hat(v) @ v[..., None], np.zeros((len(v), 3, 1)), 1e-12)

    def test_rate_maps(self):
        e = euler_rate_matrix(self.angles)
        einv = inverse_euler_rate_matrix(self.angles)
        assert np.max(np.abs(e @ einv - np.eye(3))) < 1e-8

    def test_minimal_rotation(self):
        for f in self.vectors[:2000]:
            r = minimal_rotation_to(f)
            assert np.max(np.abs(r @ r.T - np.eye(3))) < 1e-10
            assert np.max(np.abs(r[:, 0] - f / np.linalg.norm(f))) < 1e-10
