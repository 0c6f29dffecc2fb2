"""
Models Module

This module contains the sweep row model and its CSV and SVG emitters.
"""

from .transformer import SweepRow, COLUMNS, flatten_point
from .exporter import CurveSpec, emit_csv, emit_svg, group_curves

__all__ = [
    'SweepRow',
    'COLUMNS',
    'flatten_point',
    'CurveSpec',
    'emit_csv',
    'emit_svg',
    'group_curves',
]
