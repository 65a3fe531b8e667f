"""Deterministic CSV/JSON writers.

CSV files open with '#'-prefixed machine-parseable ``key=value`` metadata
lines, then a column-name row, then '%.17g'-formatted values, so repeated
runs with the same inputs are byte identical.
"""

from __future__ import annotations

import json
from pathlib import Path


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return "nan"
    return str(value)


def write_csv(path, columns: dict, meta: dict | None = None) -> Path:
    """Write named columns of equal length with a metadata preamble."""
    path = Path(path)
    names = list(columns.keys())
    series = [list(columns[n]) for n in names]
    n_rows = len(series[0]) if series else 0
    if any(len(s) != n_rows for s in series):
        raise ValueError("all columns must have equal length")
    lines = []
    for key, value in (meta or {}).items():
        lines.append(f"# {key}={_fmt(value)}")
    lines.append(",".join(names))
    for i in range(n_rows):
        lines.append(",".join(_fmt(s[i]) for s in series))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def snapshot_meta(mp, settings=None) -> dict:
    """Model-parameter snapshot for CSV headers; enough to re-run the case."""
    meta = {
        "omega1": mp.omega1, "omega2": mp.omega2,
        "gamma1": mp.gamma1, "gamma2": mp.gamma2,
        "kappa": mp.kappa, "delta": mp.delta,
        "g1": mp.g1, "g2": mp.g2, "E1": mp.E1, "E2": mp.E2,
        "nbar1": mp.nbar1, "nbar2": mp.nbar2,
        "tau_s": mp.tau, "topology": mp.topology,
    }
    if settings is not None:
        meta.update({
            "frequency_convention": settings.frequency_convention,
            "cubic_kappa_convention": settings.cubic_kappa_convention,
            "spectrum_cascade_sign": settings.spectrum_cascade_sign,
            "seed": settings.seed,
        })
    return meta
