"""
Package initialization for the cohesive group agency toolkit.
"""

from .formula import Group, render
from .networks import ALL_HELP_REST, C0, CohesionNetwork, members, minimal_members, parse_class_spec
from .parser import parse
from .reduction import expand, expand_minimal, is_biat
from .solver import countermodel, equivalent, sat, satisfiable, valid

__all__ = [
    'ALL_HELP_REST',
    'C0',
    'CohesionNetwork',
    'Group',
    'countermodel',
    'equivalent',
    'expand',
    'expand_minimal',
    'is_biat',
    'members',
    'minimal_members',
    'parse',
    'parse_class_spec',
    'render',
    'sat',
    'satisfiable',
    'valid',
]
