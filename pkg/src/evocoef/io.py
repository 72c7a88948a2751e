"""Result file formats.

traces.csv      ``t,h1,h2``
recovery.csv    ``t,coef_true,coef_rec,abs_err,valid``
convergence.csv ``n_steps,dt,error,order``
report.json     metrics, diagnostics, effective config, seed

Numbers are written in shortest round-trip form, rows in ascending ``t``,
lines end with LF.  Nothing time-dependent goes into these files.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import TimeGrid, Trace
from .errors import ConfigError


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _rows(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"


def traces_csv(times, h1, h2) -> str:
    return _rows(("t", "h1", "h2"),
                 ((fmt(t), fmt(a), fmt(b)) for t, a, b in zip(times, h1, h2)))


def recovery_csv(times, truth, recovered, valid) -> str:
    rows = []
    for t, c, r, v in zip(times, truth, recovered, valid):
        err = abs(r - c) if np.isfinite(r) else float("nan")
        rows.append((fmt(t), fmt(c), fmt(r), fmt(err), "1" if v else "0"))
    return _rows(("t", "coef_true", "coef_rec", "abs_err", "valid"), rows)


def convergence_csv(rows) -> str:
    return _rows(("n_steps", "dt", "error", "order"),
                 ((str(r.n_steps), fmt(r.dt), fmt(r.error), fmt(r.order)) for r in rows))


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def report_json(doc: dict) -> str:
    return json.dumps(_finite(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_files(outdir, files: dict):
    """Write ``{name: text}`` into ``outdir`` (created if needed)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        with open(outdir / name, "w", newline="\n") as fh:
            fh.write(text)


def read_traces(path):
    """Read a traces.csv back into ``(h1, h2)`` on a uniform time grid."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"traces file not found: {path}", "recovery.traces")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t", "h1", "h2"]:
            raise ConfigError(f"{path}: header must be t,h1,h2", "recovery.traces")
        try:
            data = np.array([[float(v) for v in row] for row in reader if row])
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}", "recovery.traces") from None
    if data.ndim != 2 or data.shape[0] < 5 or data.shape[1] != 3:
        raise ConfigError(f"{path}: need at least 5 rows of t,h1,h2", "recovery.traces")
    t = data[:, 0]
    grid = TimeGrid(t[-1], t.size - 1)
    if t[0] != 0 or not np.allclose(t, grid.nodes, rtol=0, atol=1e-12 * max(1.0, t[-1])):
        raise ConfigError(f"{path}: times must be uniform and start at 0",
                          "recovery.traces")
    return Trace(data[:, 1], grid, "h1"), Trace(data[:, 2], grid, "h2")
