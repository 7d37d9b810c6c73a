#!/usr/bin/env python
# coding: utf8

"""
flatgen generates trajectories of multirotors with tilted rotors
from differentially flat outputs: position and yaw

Project location : https://github.com/goulu/flatgen
"""

__version__ = '1.0.0'

__all__ = [
    'certificate',
    'cli',
    'collocation',
    'decorators',
    'flat',
    'flatness',
    'ode',
    'optim',
    'polynomial',
    'se3',
    'simulation',
    'state',
    'table',
    'tests',
    'units',
    'vehicle',
]
