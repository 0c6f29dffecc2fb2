"""
Sweep Exporter Module

This module writes sweep rows to CSV and renders them as SVG line plots.

CSV values use the shortest round-trip decimal form, so the bytes written
depend only on the rows. SVG output is rendered with a fixed hash salt and
no date metadata for the same reason.
"""

import csv
import io
import logging
import os
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib
from matplotlib.figure import Figure

from ..utils.performance_monitor import increment_counter, timed
from .transformer import COLUMNS, SweepRow

logger = logging.getLogger(__name__)

SVG_RC = {
    'svg.hashsalt': 'twocrystal-opo',
    'svg.fonttype': 'none',
    'path.simplify': False,
}
LINE_STYLES = ('-', '--', '-.', ':')
CURVE_PATH = re.compile(r'(<g id="curve-[^"]*">\s*)<path d="([^"]*)"([^>]*?)\s*/>')
PATH_VERTEX = re.compile(r'[ML]\s*([-+0-9.eE]+)\s+([-+0-9.eE]+)')


@dataclass(frozen=True)
class CurveSpec:
    """One plotted column; every (sigma, c) group in the rows becomes a curve."""

    column: str
    label: Optional[str] = None
    scale: float = 1.0


def _format_value(value: float) -> str:
    return repr(float(value))


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def emit_csv(rows: Sequence[SweepRow], path: str) -> str:
    """
    Write rows as CSV with the fixed column header.

    Args:
        rows: Non-empty sequence of sweep rows
        path: Output file path

    Returns:
        str: The path written

    Raises:
        ValueError: If rows is empty
        OSError: If the path cannot be written
    """
    if not rows:
        raise ValueError("emit_csv needs at least one row")
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_format_value(v) for v in row.values()])
    increment_counter("csv_rows_written", len(rows))
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def group_curves(rows: Sequence[SweepRow]) -> Dict[Tuple[float, float], List[SweepRow]]:
    """Group rows by (sigma, c) in first-seen order, each group sorted by omega."""
    groups: Dict[Tuple[float, float], List[SweepRow]] = {}
    for row in rows:
        groups.setdefault((row.sigma, row.c), []).append(row)
    return {key: sorted(group, key=lambda r: r.omega) for key, group in groups.items()}


def curve_id(column: str, sigma: float, c: float) -> str:
    return f"curve-{column}-sigma{sigma!r}-c{c!r}"


def _as_polyline(match: re.Match) -> str:
    points = " ".join(f"{x},{y}" for x, y in PATH_VERTEX.findall(match.group(2)))
    return f'{match.group(1)}<polyline points="{points}"{match.group(3)}/>'


def curves_to_polylines(svg: str) -> Tuple[str, int]:
    """Rewrite each tagged curve path as a polyline; returns (svg, curves rewritten)."""
    return CURVE_PATH.subn(_as_polyline, svg)


def emit_svg(rows: Sequence[SweepRow], path: str,
             curves: Sequence[CurveSpec] = (CurveSpec('S_r'),),
             title: Optional[str] = None, ylabel: str = 'normalized spectrum') -> str:
    """
    Render rows as a log-x SVG line plot.

    Every (sigma, c) group gives one <polyline> per CurveSpec, tagged with an
    id of the form 'curve-<column>-sigma<sigma>-c<c>'.

    Returns:
        str: The path written
    """
    if not rows:
        raise ValueError("emit_svg needs at least one row")
    for spec in curves:
        if spec.column not in COLUMNS:
            raise ValueError(f"unknown column {spec.column!r}")

    groups = group_curves(rows)
    _ensure_parent(path)
    with timed("emit_svg"), matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(7.0, 4.5))
        ax = fig.add_subplot(1, 1, 1)
        for style_idx, spec in enumerate(curves):
            style = LINE_STYLES[style_idx % len(LINE_STYLES)]
            name = spec.label or spec.column
            for (sigma, c), group in groups.items():
                omegas = [r.omega for r in group]
                values = [getattr(r, spec.column) * spec.scale for r in group]
                ax.plot(omegas, values, linestyle=style,
                        label=f"{name} (sigma={sigma:g}, c={c:g})",
                        gid=curve_id(spec.column, sigma, c))
        ax.set_xscale('log')
        ax.set_xlabel('analysis frequency (cavity bandwidths)')
        ax.set_ylabel(ylabel)
        ax.axhline(1.0, color='0.6', linewidth=0.8)
        if title:
            ax.set_title(title)
        legend = ax.legend(fontsize='small')
        for line in legend.get_lines():
            line.set_gid(None)
        buffer = io.StringIO()
        fig.savefig(buffer, format='svg', metadata={'Date': None})

    svg, count = curves_to_polylines(buffer.getvalue())
    with open(path, 'w', encoding='utf-8') as file:
        file.write(svg)
    increment_counter("svg_curves_written", count)
    logger.info(f"Wrote {count} curves to {path}")
    return path
