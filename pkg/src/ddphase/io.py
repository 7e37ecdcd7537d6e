"""Result tables: CSV and JSON writers and a reader for stored spectra.

CSV layout::

    # ddphase <version>
    # config {"engine": ...}
    alpha,omega_dd_hz,P_phi_0pi,P_phi_0.25pi,...,W
    1,1000000,0.5,...

Floats are written with 17 significant digits so a round trip is bit exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .disambiguation import PhaseCycleSet, witness


class ResultIOError(OSError):
    pass


@dataclass(frozen=True)
class ResultRow:
    alpha: float
    omega_dd_hz: float
    probabilities: tuple[float, ...]
    w: float


def phase_tag(phi: float) -> str:
    """Column tag for a phase, in units of pi (``pi/4`` -> ``0.25pi``)."""
    x = round(phi / math.pi, 12)
    return f"{x + 0.0:.12g}pi"


def parse_phase_tag(tag: str) -> float:
    if not tag.endswith("pi"):
        raise ValueError(f"bad phase tag {tag!r}")
    return float(tag[:-2]) * math.pi


def header(phases: Sequence[float]) -> list[str]:
    return ["alpha", "omega_dd_hz", *(f"P_phi_{phase_tag(p)}" for p in phases), "W"]


def rows_from_sweep(pcs: PhaseCycleSet, omega_ref: float) -> list[ResultRow]:
    w = witness(pcs).w
    return [
        ResultRow(
            alpha=float(a),
            omega_dd_hz=float(a * omega_ref / (2 * math.pi)),
            probabilities=tuple(float(v) for v in pcs.probabilities[:, k]),
            w=float(w[k]),
        )
        for k, a in enumerate(pcs.alphas)
    ]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _check_rows(rows, n_phases):
    for r in rows:
        if len(r.probabilities) != n_phases:
            raise ValueError("rows do not share the phase schema")


def write_results(
    rows: Sequence[ResultRow],
    path: str,
    format: str = "csv",
    phases: Sequence[float] = (),
    metadata: dict | None = None,
) -> None:
    """Write a result table. ``phases`` fixes the columns even for zero rows."""
    phases = tuple(float(p) for p in phases)
    if not phases and rows:
        raise ValueError("phases are required to name the probability columns")
    _check_rows(rows, len(phases))
    meta = {"version": __version__, "config": metadata or {}}
    cols = header(phases)
    if format == "csv":
        lines = [f"# ddphase {__version__}", "# config " + json.dumps(meta["config"], sort_keys=True)]
        lines.append(",".join(cols))
        for r in rows:
            lines.append(",".join(_fmt(v) for v in (r.alpha, r.omega_dd_hz, *r.probabilities, r.w)))
        text = "\n".join(lines) + "\n"
    elif format == "json":
        doc = {
            "metadata": meta,
            "columns": cols,
            "rows": [[r.alpha, r.omega_dd_hz, *r.probabilities, r.w] for r in rows],
        }
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    else:
        raise ValueError(f"format must be csv or json, got {format!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ResultIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


@dataclass(frozen=True)
class ResultTable:
    phases: tuple[float, ...]
    rows: tuple[ResultRow, ...]
    metadata: dict

    def phase_cycle_set(self) -> PhaseCycleSet:
        return PhaseCycleSet(
            alphas=np.array([r.alpha for r in self.rows]),
            phases=np.array(self.phases),
            probabilities=np.array([r.probabilities for r in self.rows]).reshape(
                len(self.rows), len(self.phases)
            ).T,
        )


def _table(cols, data, meta) -> ResultTable:
    if len(cols) < 3 or cols[:2] != ["alpha", "omega_dd_hz"] or cols[-1] != "W":
        raise ValueError(f"unexpected columns {cols}")
    tags = cols[2:-1]
    if not all(t.startswith("P_phi_") for t in tags):
        raise ValueError(f"unexpected columns {cols}")
    phases = tuple(parse_phase_tag(t[len("P_phi_"):]) for t in tags)
    rows = []
    for values in data:
        if len(values) != len(cols):
            raise ValueError(f"row has {len(values)} fields, expected {len(cols)}")
        v = [float(x) for x in values]
        rows.append(ResultRow(v[0], v[1], tuple(v[2:-1]), v[-1]))
    return ResultTable(phases, tuple(rows), meta)


def read_results(path: str) -> ResultTable:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ResultIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return _parse_text(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise ResultIOError(f"cannot parse {path}: {exc}") from exc


def _parse_text(text: str) -> ResultTable:
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return _table(doc["columns"], doc["rows"], doc.get("metadata", {}))
    meta = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("# config "):
            meta["config"] = json.loads(line[len("# config "):])
        elif line.startswith("# ddphase "):
            meta["version"] = line[len("# ddphase "):]
        elif line and not line.startswith("#"):
            lines.append(line.split(","))
    if not lines:
        raise ValueError("no header line")
    return _table(lines[0], lines[1:], meta)


def merge_tables(tables: Sequence[ResultTable]) -> PhaseCycleSet:
    """Combine stored spectra into one phase-cycle set; grids must be identical."""
    if not tables:
        raise ValueError("no tables")
    grid = [r.alpha for r in tables[0].rows]
    phases, probs = [], []
    for t in tables:
        if [r.alpha for r in t.rows] != grid:
            raise ValueError("stored spectra are on different alpha grids")
        pcs = t.phase_cycle_set()
        for phi, p in zip(pcs.phases, pcs.probabilities):
            if any(math.isclose(phi, q, abs_tol=1e-12) for q in phases):
                raise ValueError(f"phase {phase_tag(phi)} appears twice")
            phases.append(float(phi))
            probs.append(p)
    return PhaseCycleSet(np.array(grid), np.array(phases), np.array(probs).reshape(len(phases), len(grid)))
