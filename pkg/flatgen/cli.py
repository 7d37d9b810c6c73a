"""
command line interface: generate, verify and list trajectories

  flatgen generate --vehicle quad_tilted --method collocation_square --out traj.csv
  flatgen verify traj.csv --vehicle quad_tilted
  flatgen presets

exit codes: 0 success, 1 configuration error, 2 solver failure or failed
verification, 3 vehicle and method that do not make a well posed problem
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2026, Philippe Guglielmetti"
__credits__ = []
__license__ = "LGPL"

import argparse
import configparser
import logging
import sys

import numpy as np

from . import __version__
from . import se3, flatness, collocation, certificate, optim, simulation
from . import vehicle as vm
from .flat import fit_rest_to_rest
from .state import StateTrajectory
from .table import Table
from .tests import setlog
from .units import UnitError, length

EXIT_OK, EXIT_CONFIG, EXIT_SOLVE, EXIT_PAIRING = 0, 1, 2, 3

METHODS = ('collocation_square', 'collocation_min_effort', 'collocation_extra_outputs',
           'analytic_rank3', 'analytic_rank2')


class ConfigError(ValueError):
    pass


class RunConfig:
    """all the settings of a run, config file values overridden by command line flags"""
    defaults = {
        'vehicle': 'quad_tilted',
        'method': 'collocation_square',
        'knots': 100,
        'scheme': 'hermite_simpson',
        'tf': 4.,
        'start': (0., 0., 0., 0.),
        'end': (-1., 1., 1.5, 0.2),
        'sigma5': None,
        'sigma6': None,
        'out': 'trajectory.csv',
        'steps': 2000,
        'seed': None,  # reserved, all methods are deterministic
        'replay_bound': 1e-2,
        'yaw_bound': 1e-2,
        'residual_bound': 5e-2,
    }

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.defaults)
        if unknown:
            raise ConfigError('unknown settings %s' % sorted(unknown))
        for key, value in self.defaults.items():
            setattr(self, key, kwargs.get(key, value) if kwargs.get(key) is not None else value)
        self.validate()

    def validate(self):
        if self.method not in METHODS:
            raise ConfigError('unknown method %r, choose among %s' % (self.method, ', '.join(METHODS)))
        if self.scheme not in collocation.SCHEMES:
            raise ConfigError('unknown scheme %r' % self.scheme)
        if self.knots < 3:
            raise ConfigError('at least 3 intervals needed, got %d' % self.knots)
        if self.tf <= 0:
            raise ConfigError('final time must be positive')
        if self.steps < 1:
            raise ConfigError('at least one integration step needed')
        if len(self.start) != 4 or len(self.end) != 4:
            raise ConfigError('start and end need x, y, z, yaw')
        if (self.sigma5 is None) != (self.sigma6 is None):
            raise ConfigError('sigma5 and sigma6 go together')
        if self.method == 'collocation_extra_outputs' and self.sigma5 is None:
            raise ConfigError('%s needs sigma5 and sigma6' % self.method)
        if isinstance(self.vehicle, str) and self.vehicle not in vm.PRESETS:
            raise ConfigError('unknown vehicle preset %r, choose among %s' % (
                self.vehicle, ', '.join(vm.PRESETS)))

    def vehicle_model(self):
        if isinstance(self.vehicle, vm.Vehicle):
            return self.vehicle
        return vm.preset(self.vehicle)

    def flat(self):
        return fit_rest_to_rest(self.start, self.end, self.tf)


def _floats(text, n=None, what='value'):
    try:
        values = tuple(float(x) for x in text.replace(',', ' ').split())
    except ValueError:
        raise ConfigError('%s: %r is not a list of numbers' % (what, text))
    if n is not None and len(values) != n:
        raise ConfigError('%s needs %d values, got %d' % (what, n, len(values)))
    return values


def parse_vehicle(section):
    """
    :param section: mapping of an inline vehicle description
    :return: Vehicle, lengths converted to meters from the 'units' key
    """
    unit = section.get('units', 'm')
    try:
        props = []
        i = 1
        while 'arm_%d' % i in section:
            props.append(vm.Propeller(
                length(_floats(section['arm_%d' % i], 3, 'arm_%d' % i), unit),
                _floats(section.get('axis_%d' % i, '0 0 1'), 3, 'axis_%d' % i),
                float(length(float(section.get('drag_%d' % i, '0')), unit)),
                section.get('bidirectional_%d' % i, 'false').lower() in ('1', 'true', 'yes')))
            i += 1
        inertia = _floats(section.get('inertia', ''), None, 'inertia')
        if len(inertia) == 9:
            inertia = np.reshape(inertia, (3, 3))
        vehicle = vm.Vehicle(float(section.get('mass', '1')), inertia, props,
                             float(section.get('gravity', str(vm.GRAVITY))), name=section.get('name', 'custom'))
    except (ValueError, UnitError) as e:
        raise ConfigError('vehicle: %s' % e)
    if section.get('tilting', 'false').lower() in ('1', 'true', 'yes'):
        vehicle = vm.tricopter_to_quad(vehicle)
    return vehicle


def read_config(filename):
    """
    :return: dict of RunConfig settings found in an INI-style file
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=('#', ';'))
    try:
        if not parser.read(filename):
            raise ConfigError('cannot read config file %s' % filename)
    except configparser.Error as e:
        raise ConfigError('%s: %s' % (filename, e))
    values = {}
    if parser.has_section('vehicle'):
        section = parser['vehicle']
        values['vehicle'] = section['preset'] if 'preset' in section else parse_vehicle(section)
    if parser.has_section('trajectory'):
        section = parser['trajectory']
        for key in ('start', 'end'):
            if key in section:
                values[key] = _floats(section[key], 4, key)
        if 'tf' in section:
            values['tf'] = _floats(section['tf'], 1, 'tf')[0]
    if parser.has_section('solver'):
        section = parser['solver']
        for key in ('method', 'scheme'):
            if key in section:
                values[key] = section[key].strip()
        for key in ('knots', 'steps', 'seed'):
            if key in section:
                try:
                    values[key] = int(section[key])
                except ValueError:
                    raise ConfigError('%s must be an integer' % key)
        for key in ('sigma5', 'sigma6', 'replay_bound', 'yaw_bound', 'residual_bound'):
            if key in section:
                values[key] = _floats(section[key], 1, key)[0]
    if parser.has_section('output') and 'path' in parser['output']:
        values['out'] = parser['output']['path']
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parser():
    parser = _Parser(prog='flatgen', description='flatness based trajectories of multirotors with tilted rotors')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p):
        p.add_argument('--config', help='INI file with [vehicle], [trajectory], [solver], [output] sections')
        p.add_argument('--vehicle', help='preset name among %s' % ', '.join(vm.PRESETS))
        p.add_argument('--tf', type=float, help='final time [s]')
        p.add_argument('--start', type=float, nargs=4, metavar=('X', 'Y', 'Z', 'YAW'))
        p.add_argument('--end', type=float, nargs=4, metavar=('X', 'Y', 'Z', 'YAW'))
        p.add_argument('--steps', type=int, help='RK4 steps of integrations and replays')
        p.add_argument('--seed', type=int, help='reserved')

    gen = sub.add_parser('generate', help='generate a trajectory and write it as CSV')
    common(gen)
    gen.add_argument('--method', choices=METHODS)
    gen.add_argument('--knots', type=int, help='number of collocation intervals')
    gen.add_argument('--scheme', choices=collocation.SCHEMES)
    gen.add_argument('--sigma5', type=float)
    gen.add_argument('--sigma6', type=float)
    gen.add_argument('--out', help='CSV output file')

    ver = sub.add_parser('verify', help='replay a CSV trajectory and check its equations')
    common(ver)
    ver.add_argument('csv', help='CSV file written by generate')

    sub.add_parser('presets', help='list the vehicle presets')
    return parser


def build_config(args):
    values = read_config(args.config) if getattr(args, 'config', None) else {}
    for key in RunConfig.defaults:
        value = getattr(args, key, None)
        if value is not None:
            values[key] = tuple(value) if isinstance(value, list) else value
    return RunConfig(**values)


def columns(vehicle):
    titles = ['t', 'sigma_x', 'sigma_y', 'sigma_z', 'sigma_psi', 'phi', 'theta', 'psi', 'wx', 'wy', 'wz']
    titles += ['u_%d' % i for i in range(1, vehicle.N + 1)]
    titles += ['un_%d' % i for i in range(1, vehicle.N + 1)]
    if vehicle.tilting:
        titles += ['alpha', 'T_alpha']
    return titles


def trajectory_table(trajectory, flat):
    """:return: Table with one row per knot"""
    vehicle = trajectory.vehicle
    data = [trajectory.times[:, None], flat.evaluate(trajectory.times), trajectory.theta,
            trajectory.omega, trajectory.inputs, trajectory.normalized_inputs()]
    if vehicle.tilting:
        t_alpha, alpha = trajectory.tilt()
        data += [alpha[:, None], t_alpha[:, None]]
    rows = np.hstack(data)
    return Table([[float(x) for x in row] for row in rows], titles=columns(vehicle))


def read_trajectory(filename, vehicle, flat):
    """:return: StateTrajectory from a CSV written by generate"""
    table = Table().read_csv(filename)
    expected = columns(vehicle)
    if table.titles != expected:
        raise ConfigError('%s columns %s do not match %r: %s' % (filename, table.titles, vehicle, expected))
    return StateTrajectory(
        table.col('t'), table.cols(['phi', 'theta', 'psi']), table.cols(['wx', 'wy', 'wz']),
        table.cols(['u_%d' % i for i in range(1, vehicle.N + 1)]), vehicle=vehicle, flat=flat)


def _replay(trajectory, flat, config):
    try:
        sim = simulation.forward_simulate(trajectory.vehicle, trajectory,
                                          simulation.FullState.from_trajectory(trajectory, flat),
                                          flat.tf, config.steps, flat)
    except (simulation.DivergedError, se3.SingularityError) as e:
        logging.warning('replay failed: %s', e)
        return {'replay': 'diverged'}
    return sim.metrics()


def generate(config):
    """
    :return: StateTrajectory, summary dict
    """
    vehicle = config.vehicle_model()
    flat = config.flat()
    method = config.method
    if method.startswith('collocation'):
        mode = 'min_effort' if method == 'collocation_min_effort' else 'square'
        problem = collocation.CollocationProblem(vehicle, flat, config.knots, config.scheme, mode)
        if method == 'collocation_extra_outputs':
            problem = collocation.extra_output_constraints(problem, config.sigma5, config.sigma6)
        trajectory, report = collocation.solve(problem)
        summary = report.summary()
        summary['certificate'] = certificate.certify(problem, trajectory).max_residual
    else:
        if method == 'analytic_rank3':
            theta0, omega0 = flatness.rest_initial_state(flat, vehicle)
            trajectory = flatness.integrate_rank3(flat, theta0, omega0, vehicle, config.steps)
        else:
            reframed = vm.svd_reframe(vehicle)
            angle0, rate0 = flatness.rest_rank2_state(vehicle, reframed)
            trajectory = flatness.integrate_rank2(flat, angle0, rate0, reframed, config.steps, vehicle)
        summary = {'status': 'integrated', 'method': method,
                   'cost': simulation.effort_cost(trajectory),
                   'thrust_positive': trajectory.thrust_positive()}
        summary.update(trajectory.hover_check())
    if vehicle.tilting:
        t_alpha, alpha = trajectory.tilt()
        summary.update(alpha_min=float(np.min(alpha)), alpha_max=float(np.max(alpha)),
                       T_alpha_min=float(np.min(t_alpha)), T_alpha_max=float(np.max(t_alpha)))
    summary.update(_replay(trajectory, flat, config))
    return trajectory, summary


def verify(config, filename):
    """
    :return: passed boolean, summary dict
    """
    vehicle = config.vehicle_model()
    flat = config.flat()
    trajectory = read_trajectory(filename, vehicle, flat)
    cert = certificate.knot_consistency(vehicle, flat, trajectory)
    thrust, thrust_knot = cert.worst['thrust']
    yaw, yaw_knot = cert.worst['yaw']
    summary = {'thrust_residual': thrust, 'thrust_knot': thrust_knot,
               'yaw_residual': yaw, 'yaw_knot': yaw_knot}
    summary.update(_replay(trajectory, flat, config))
    passed = (thrust <= config.residual_bound and yaw <= config.yaw_bound
              and summary.get('replay_rms') is not None
              and summary['replay_rms'] <= config.replay_bound
              and summary['replay_yaw'] <= config.yaw_bound)
    summary['status'] = 'PASS' if passed else 'FAIL'
    return passed, summary


def presets():
    """:return: description of every vehicle preset"""
    return '\n'.join(vm.preset(name).describe() for name in vm.PRESETS)


def _format(value):
    if isinstance(value, float):
        return '%.6g' % value
    return str(value)


def print_summary(summary, file=None):
    file = file or sys.stdout
    for key, value in summary.items():
        print('%s=%s' % (key, _format(value)), file=file)


def main(argv=None):
    """:return: exit code"""
    setlog()
    try:
        args = _parser().parse_args(argv)
        if args.command == 'presets':
            print(presets())
            return EXIT_OK
        config = build_config(args)
        if args.command == 'generate':
            trajectory, summary = generate(config)
            trajectory_table(trajectory, config.flat()).write_csv(config.out)
            summary['out'] = config.out
            print_summary(summary)
            return EXIT_OK
        passed, summary = verify(config, args.csv)
        print_summary(summary)
        return EXIT_OK if passed else EXIT_SOLVE
    except (ConfigError, FileNotFoundError) as e:
        print('configuration error: %s' % e, file=sys.stderr)
        return EXIT_CONFIG
    except (collocation.InfeasiblePairingError, vm.RankError) as e:
        print('infeasible: %s' % e, file=sys.stderr)
        return EXIT_PAIRING
    except optim.NonConvergenceError as e:
        print('no convergence: %s' % e, file=sys.stderr)
        if e.report is not None:
            print_summary({'status': 'failed', 'iterations': e.report.iterations,
                           'residual': e.report.residual})
        return EXIT_SOLVE
    except (simulation.DivergedError, flatness.SingularSystemError, flatness.FreeFallError,
            se3.SingularityError, vm.NoHoverError) as e:
        print('failed: %s' % e, file=sys.stderr)
        return EXIT_SOLVE


if __name__ == '__main__':
    sys.exit(main())
