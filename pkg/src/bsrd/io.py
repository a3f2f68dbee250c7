"""Diagnostics CSV, state snapshots, and SVG chart emission.

Floats are printed with 17 significant digits so files round-trip exactly
and determinism checks can byte-compare output.  The SVG writer is
hand-rolled to keep the bytes deterministic.
"""

import json
import math
import os

import numpy as np

from .errors import ValidationError

CSV_HEADER = ("t,M1,M2,dM1_rel,dM2_rel,E,D,E_rel,"
              "u_min,u_max,w_min,w_max,z_min,z_max,dt")


def _fmt(v):
    if v is None:
        return ""
    return f"{v:.17g}"


def format_row(row):
    """One diagnostics row as a CSV line (no newline)."""
    return ",".join(_fmt(v) for v in (
        row.t, row.M1, row.M2, row.dM1_rel, row.dM2_rel,
        row.E, row.D, row.E_rel,
        row.u_min, row.u_max, row.w_min, row.w_max, row.z_min, row.z_max,
        row.dt,
    ))


def write_diagnostics(rows, path):
    """Write time-ordered diagnostics rows to a CSV file."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(format_row(row) + "\n")


class DiagnosticsWriter:
    """Streaming variant: header on open, one line per row, flushed."""

    def __init__(self, path):
        self._fh = open(path, "w")
        self._fh.write(CSV_HEADER + "\n")
        self._fh.flush()

    def write(self, row):
        self._fh.write(format_row(row) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


def read_diagnostics(path):
    """Read a diagnostics CSV into a dict of column name -> float array
    (missing entries become nan)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValidationError(f"unexpected CSV header in {path}")
        names = header.split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = {}
    for i, name in enumerate(names):
        cols[name] = np.array(
            [float(r[i]) if r[i] != "" else math.nan for r in rows]
        )
    return cols


def write_snapshot(state, grid, preset, path_base):
    """Write a state as flat CSV matrices plus a JSON sidecar."""
    for name, arr in (("u", state.u), ("w", state.w), ("z", state.z)):
        np.savetxt(f"{path_base}_{name}.csv", np.atleast_2d(arr),
                   delimiter=",", fmt="%.17g")
    sidecar = {
        "t": state.t,
        "grid": {"Nx": grid.Nx, "Ny": grid.Ny, "P_x": grid.P_x},
        "motion": {
            "kind": preset.kind, "a": preset.a, "b": preset.b,
            "v_tau": preset.v_tau, "H": preset.H, "P_x": preset.P_x,
        },
    }
    with open(f"{path_base}.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_snapshot(path_base):
    """Read back a snapshot written by write_snapshot; returns (state_dict,
    sidecar)."""
    with open(f"{path_base}.json") as fh:
        sidecar = json.load(fh)
    fields = {}
    for name in ("u", "w", "z"):
        arr = np.loadtxt(f"{path_base}_{name}.csv", delimiter=",", ndmin=2)
        fields[name] = arr if name == "u" else arr.ravel()
    return fields, sidecar


# ---------------------------------------------------------------------------
# SVG chart

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 70, 20, 20, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if raw <= m * mag:
            step = m * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(v)
        v += step
    return out


def emit_plot(csv_path, columns, out_path, logy=None):
    """Render the requested columns of a diagnostics CSV against t as a
    standalone SVG line chart.

    logy defaults to automatic: a log axis is used when E_rel is among the
    requested columns (and all plotted values are positive).
    """
    cols = read_diagnostics(csv_path)
    missing = [c for c in columns if c not in cols]
    if missing:
        raise ValidationError(
            f"missing column(s) {missing}; available: {sorted(cols)}"
        )
    t = cols["t"]
    if t.size == 0:
        raise ValidationError("no data rows")
    series = {c: cols[c] for c in columns}
    if logy is None:
        logy = "E_rel" in columns
    if logy:
        for c, v in series.items():
            series[c] = np.where(v > 0, v, math.nan)

    def ty(v):
        return math.log10(v) if logy else v

    allv = np.concatenate([v[np.isfinite(v)] for v in series.values()])
    if allv.size == 0:
        raise ValidationError("no finite values to plot")
    ylo, yhi = float(np.min(allv)), float(np.max(allv))
    if logy:
        ylo, yhi = math.log10(ylo), math.log10(yhi)
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    xlo, xhi = float(t[0]), float(t[-1])
    if xhi - xlo < 1e-12:
        xhi = xlo + 1.0

    def sx(v):
        return _ML + (v - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>',
    ]
    for xv in _ticks(xlo, xhi):
        px = sx(xv)
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" font-size="11" '
                     f'text-anchor="middle">{xv:g}</text>')
    for yv in _ticks(ylo, yhi):
        py = sy(yv)
        label = f"1e{yv:g}" if logy else f"{yv:g}"
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                     f'y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{label}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.0f}" y="{_H - 12}" '
                 f'font-size="12" text-anchor="middle">t</text>')
    for ci, (name, v) in enumerate(series.items()):
        pts = [
            f"{sx(tv):.2f},{sy(ty(vv)):.2f}"
            for tv, vv in zip(t, v) if np.isfinite(vv)
        ]
        color = _COLORS[ci % len(_COLORS)]
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 8}" y="{_MT + 16 + 14 * ci}" '
                     f'font-size="12" text-anchor="end" fill="{color}">{name}</text>')
    parts.append("</svg>")
    with open(out_path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def output_dir(spec):
    """Resolve the output directory, honoring the BSRD_OUT override."""
    d = os.environ.get("BSRD_OUT", spec.directory)
    os.makedirs(d, exist_ok=True)
    return d
