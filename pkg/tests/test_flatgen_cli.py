from flatgen.tests import *
from flatgen.cli import *
from flatgen.table import Table

import pytest

MILD = ['0.2', '-0.1', '0.3', '0.05']


def run(tmp_path, *args):
    out = str(tmp_path / 'traj.csv')
    return main(['generate', '--tf', '2', '--end'] + MILD + ['--out', out] + list(args)), out


class TestConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.knots == 100 and config.tf == 4.
        assert config.end == (-1., 1., 1.5, 0.2)

    def test_validate(self):
        with pytest.raises(ConfigError):
            RunConfig(method='shooting')
        with pytest.raises(ConfigError):
            RunConfig(knots=2)
        with pytest.raises(ConfigError):
            RunConfig(sigma5=0.1)
        with pytest.raises(ConfigError):
            RunConfig(vehicle='octocopter')
        with pytest.raises(ConfigError):
            RunConfig(color='blue')

    def test_read_config(self, tmp_path):
        filename = tmp_path / 'run.ini'
        filename.write_text('\n'.join([
            '[vehicle]',
            'name = square',
            'units = cm',
            'mass = 1.2',
            'inertia = 5e-3 5e-3 1e-2',
            'arm_1 = 19 0 0',
            'drag_1 = 1.6',
            'arm_2 = 0 -19 0',
            'drag_2 = -1.6',
            'arm_3 = -19 0 0',
            'drag_3 = 1.6',
            'arm_4 = 0 19 0',
            'drag_4 = -1.6',
            '[trajectory]',
            'tf = 3  # seconds',
            'end = 1, 0, 0, 0',
            '[solver]',
            'method = collocation_square',
            'knots = 30',
        ]))
        values = read_config(str(filename))
        vehicle = values['vehicle']
        assert vehicle.N == 4 and vehicle.mass == 1.2
        assert_close(vehicle.propellers[0].r, [0.19, 0, 0], 1e-15)
        assert vehicle.propellers[1].c == pytest.approx(-0.016)
        assert values['tf'] == 3 and values['knots'] == 30
        assert values['end'] == (1, 0, 0, 0)
        config = RunConfig(**values)
        assert config.vehicle_model() is vehicle

    def test_missing_config(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config(str(tmp_path / 'nothing.ini'))

    def test_columns(self):
        quad = vm.preset('quad_tilted')
        assert columns(quad)[:5] == ['t', 'sigma_x', 'sigma_y', 'sigma_z', 'sigma_psi']
        assert len(columns(quad)) == 11 + 8
        assert columns(vm.preset('tricopter'))[-2:] == ['alpha', 'T_alpha']


class TestMain:
    def test_presets(self, capsys):
        assert main(['presets']) == EXIT_OK
        out = capsys.readouterr().out
        for name in vm.PRESETS:
            assert name in out
        assert 'N=6' in out
        assert '[0.19, 0.0, 0.0]' in out
        assert 'J=diag(0.005, 0.005, 0.01)' in out

    def test_config_errors(self, tmp_path):
        assert main(['generate', '--method', 'bogus']) == EXIT_CONFIG
        assert main(['generate', '--config', str(tmp_path / 'missing.ini')]) == EXIT_CONFIG
        assert main([]) == EXIT_CONFIG

    def test_pairing(self, tmp_path):
        code, _ = run(tmp_path, '--vehicle', 'hexacopter_tilted', '--method', 'collocation_square', '--knots', '5')
        assert code == EXIT_PAIRING
        code, _ = run(tmp_path, '--vehicle', 'tricopter', '--method', 'analytic_rank3')
        assert code == EXIT_PAIRING

    def test_generate(self, tmp_path, capsys):
        code, out = run(tmp_path, '--knots', '20', '--steps', '400')
        assert code == EXIT_OK
        assert 'status=converged' in capsys.readouterr().out
        table = Table().read_csv(out)
        assert len(table) == 21
        assert table.titles == columns(vm.preset('quad_tilted'))
        assert_close(table.col('psi'), table.col('sigma_psi'), 1e-9)
        with open(out) as f:
            first = f.read()
        run(tmp_path, '--knots', '20', '--steps', '400')
        with open(out) as f:
            assert f.read() == first

    def test_verify(self, tmp_path, capsys):
        code, out = run(tmp_path, '--knots', '20', '--steps', '400')
        assert code == EXIT_OK
        table = Table().read_csv(out)
        table[5][table.find_col('phi')] += 0.05
        table.write_csv(out)
        capsys.readouterr()
        assert main(['verify', out, '--tf', '2', '--end'] + MILD + ['--steps', '400']) == EXIT_SOLVE
        summary = capsys.readouterr().out
        assert 'status=FAIL' in summary
        assert 'thrust_knot=5' in summary

    def test_verify_columns(self, tmp_path):
        _, out = run(tmp_path, '--knots', '20', '--steps', '400')
        assert main(['verify', out, '--vehicle', 'hexacopter_tilted', '--tf', '2']) == EXIT_CONFIG

    def test_rank2(self, tmp_path):
        code, out = run(tmp_path, '--vehicle', 'tricopter', '--method', 'analytic_rank2', '--steps', '400')
        assert code == EXIT_OK
        table = Table().read_csv(out)
        assert len(table) == 401
        assert np.all(table.col('T_alpha') > 0)
