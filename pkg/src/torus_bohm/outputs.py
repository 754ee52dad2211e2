"""File writers: CSV with round-trip floats, gnuplot scripts and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__


def fmt(value) -> str:
    """Shortest round-trip text for numbers; everything else via str."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, columns, rows) -> Path:
    """rows: dicts keyed by column, or sequences in column order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                row = [row[c] for c in columns]
            writer.writerow([fmt(v) for v in row])
    return path


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


TRAJECTORY_COLUMNS = ("t", "theta", "phi", "theta_mod", "phi_mod", "theta_dot", "phi_dot")
PHASE_COLUMNS = ("t", "theta_mod", "theta_dot")


def trajectory_rows(record):
    return zip(record.t, record.theta, record.phi, record.theta_mod, record.phi_mod,
               record.theta_dot, record.phi_dot)


def phase_rows(record):
    return zip(record.t, record.theta_mod, record.theta_dot)


def surface_plot_script(csv_name: str, title: str, R: float, a: float) -> str:
    """gnuplot script drawing a path on the embedded torus (flat runs are projected onto it)."""
    return f"""# {title}
set datafile separator ","
set key autotitle columnhead
set view equal xyz
set xyplane 0
unset key
set title "{title}"
R = {R!r}
a = {a!r}
set parametric
set isosamples 36, 18
set urange [0:2*pi]
set vrange [0:2*pi]
splot (R+a*cos(v))*cos(u), (R+a*cos(v))*sin(u), a*sin(v) with lines lc rgb "#d0d0d0", \\
      "{csv_name}" using ((R+a*cos($2))*cos($3)):((R+a*cos($2))*sin($3)):(a*sin($2)) with lines lw 1.5 lc rgb "#1f4e99"
pause mouse close
"""


def phase_plot_script(csv_names, title: str) -> str:
    """gnuplot script for (theta mod 2 pi, theta_dot) scatter plots, one panel per file."""
    n = len(csv_names)
    lines = [
        f"# {title}",
        'set datafile separator ","',
        "set key autotitle columnhead",
        "unset key",
        'set xlabel "theta"',
        'set ylabel "theta_dot"',
        "set xrange [0:2*pi]",
        f"set multiplot layout 1,{n} title \"{title}\"",
    ]
    for name in csv_names:
        lines.append(f'plot "{name}" using 2:3 with dots lc rgb "#1f4e99"')
    lines += ["unset multiplot", "pause mouse close", ""]
    return "\n".join(lines)


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, *, command: str, config_hash: str, files, status: str, wall_time: float,
                   details: dict | None = None) -> Path:
    """Write manifest.json atomically; it is the last file a run produces."""
    out_dir = Path(out_dir)
    entries = []
    for path in sorted(Path(p) for p in files):
        entries.append({"path": path.relative_to(out_dir).as_posix(), "sha256": sha256_file(path)})
    manifest = {
        "command": command,
        "config_hash": config_hash,
        "version": __version__,
        "status": status,
        "wall_time": round(wall_time, 3),
        "files": entries,
    }
    if details:
        manifest["details"] = details
    path = out_dir / "manifest.json"
    tmp = out_dir / "manifest.json.tmp"
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=False) + "\n")
    os.replace(tmp, path)
    return path
