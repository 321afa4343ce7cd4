"""CSV and JSON emission.

All floats are written with repr (shortest round-trip), so a fixed
configuration and seed produce byte-identical output.  '#'-prefixed
header lines carry run metadata.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .simulation import EnsembleStats, SampleTrajectory
from .spectral_operators import SpectralOperator


def _fmt(x: float) -> str:
    return repr(float(x))


def _meta_lines(metadata: Mapping[str, object]) -> list[str]:
    return [f"# {key} = {value}" for key, value in metadata.items()]


def trajectory_csv(traj: SampleTrajectory, metadata: Mapping[str, object] | None = None) -> str:
    lines = _meta_lines(metadata or {})
    lines.append("t,x")
    lines.extend(f"{_fmt(t)},{_fmt(x)}" for t, x in zip(traj.grid, traj.values))
    return "\n".join(lines) + "\n"


def trajectories_csv(
    trajectories: Sequence[SampleTrajectory], metadata: Mapping[str, object] | None = None
) -> str:
    """Wide format t,x_1,...,x_N on the common grid."""
    if len(trajectories) == 1:
        return trajectory_csv(trajectories[0], metadata)
    grid = trajectories[0].grid
    lines = _meta_lines(metadata or {})
    lines.append("t," + ",".join(f"x_{k+1}" for k in range(len(trajectories))))
    for row, t in enumerate(grid):
        vals = ",".join(_fmt(traj.values[row]) for traj in trajectories)
        lines.append(f"{_fmt(t)},{vals}")
    return "\n".join(lines) + "\n"


def stats_csv(stats: EnsembleStats, metadata: Mapping[str, object] | None = None) -> str:
    lines = _meta_lines(metadata or {})
    lines.append("t,mean,var,stderr")
    for t, m, v, se in zip(stats.grid, stats.mean, stats.variance, stats.stderr_mean):
        lines.append(f"{_fmt(t)},{_fmt(m)},{_fmt(v)},{_fmt(se)}")
    return "\n".join(lines) + "\n"


def operator_csv(op: SpectralOperator, metadata: Mapping[str, object] | None = None) -> str:
    """Sparse triplet form i,j,value (row-major), prefixed with metadata."""
    meta = {"T": op.T, "L": op.L, "provenance": op.provenance, "source": op.source}
    meta.update(metadata or {})
    lines = _meta_lines(meta)
    lines.append("i,j,value")
    for i in range(op.L):
        for j in range(op.L):
            lines.append(f"{i},{j},{_fmt(op.matrix[i, j])}")
    return "\n".join(lines) + "\n"


def operator_json(op: SpectralOperator, metadata: Mapping[str, object] | None = None) -> dict:
    doc = {
        "T": op.T,
        "L": op.L,
        "provenance": op.provenance,
        "source": op.source,
        "matrix": [[float(v) for v in row] for row in op.matrix],
    }
    doc.update(metadata or {})
    return doc


def error_table_csv(reports, metadata: Mapping[str, object] | None = None) -> str:
    lines = _meta_lines(metadata or {})
    lines.append("L,epsilon,epsilon1,epsilon2")
    for r in reports:
        lines.append(f"{r.order},{_fmt(r.epsilon)},{_fmt(r.epsilon1)},{_fmt(r.epsilon2)}")
    return "\n".join(lines) + "\n"


def error_table_markdown(reports) -> str:
    """Markdown table in the eps (eps1) layout used for reporting."""
    header = "| L | " + " | ".join(str(r.order) for r in reports) + " |"
    rule = "|---" * (len(reports) + 1) + "|"
    eps_row = "| eps | " + " | ".join(f"{r.epsilon:.6f}" for r in reports) + " |"
    eps1_row = "| (eps1) | " + " | ".join(f"({r.epsilon1:.6f})" for r in reports) + " |"
    return "\n".join([header, rule, eps_row, eps1_row]) + "\n"


def matrix_from_json(doc: Mapping) -> np.ndarray:
    return np.asarray(doc["matrix"], dtype=float)
