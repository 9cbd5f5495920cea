"""CSV/JSON writers and run manifests.

Floats are written with ``.17g`` so values round-trip exactly.  Every run
writes one manifest listing its output files; the manifest carries the
wall-clock duration and is therefore the only file that differs between
identical runs.
"""
from __future__ import annotations

import csv
import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

__all__ = [
    "fmt",
    "RunManifest",
    "write_json",
    "write_csv",
    "write_edges",
    "write_rho",
    "write_occupancy",
    "write_kernel_csv",
    "write_gue_csv",
    "read_csv",
]


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with Path(path).open(encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(v) for v in row] for row in r])
    return header, data


def write_edges(path, stats) -> Path:
    rows = zip(stats.t, stats.mean_R, stats.var_R, stats.mean_L, stats.var_L)
    return write_csv(path, ["t", "mean_R", "var_R", "mean_L", "var_L"], rows)


def write_rho(path, stats) -> Path:
    """Edge histograms, one row per (t, link) where either edge has weight."""
    links = stats.links

    def rows():
        for t in stats.t:
            rr = stats.rho_R(t)
            rl = stats.rho_L(t)
            for i in np.flatnonzero((rr > 0) | (rl > 0)):
                yield int(t), int(links[i]), rr[i], rl[i]

    return write_csv(path, ["t", "x", "rho_R", "rho_L"], rows())


def write_occupancy(path, stats) -> Path:
    dens = stats.occupancy_density()

    def rows():
        for t in range(dens.shape[0]):
            for x in np.flatnonzero(dens[t]):
                yield t, int(x), dens[t, x]

    return write_csv(path, ["t", "x", "density"], rows())


def write_kernel_csv(path_or_file, k, exact: bool = False):
    labels = list(k.labels())
    rows = []
    for i in range(16):
        vals = [str(v) for v in k.exact[i]] if exact else [fmt(v) for v in k.matrix[i]]
        rows.append([labels[i], *vals])
    if hasattr(path_or_file, "write"):
        w = csv.writer(path_or_file, lineterminator="\n")
        w.writerow(["in", *labels])
        w.writerows(rows)
        return None
    return write_csv(path_or_file, ["in", *labels], rows)


def write_gue_csv(path, run) -> Path:
    rows = zip(run.t, run.g_initial, run.g_commute, run.g_anticommute, run.r2)
    return write_csv(path, ["t", "g_initial", "g_commute", "g_anticommute", "r2"], rows)


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    seed: int | None
    version: str = __version__
    duration_s: float = 0.0
    outputs: list[str] = field(default_factory=list)
    python: str = field(default_factory=platform.python_version)

    def write(self, path) -> Path:
        return write_json(path, asdict(self))
