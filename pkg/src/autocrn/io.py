"""CSV export/import of distributions, marginals and trajectories.

All floats are written with 17 significant digits so that values survive a
round trip exactly. Files are written to a temporary sibling and renamed
into place.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .simulate import Trajectory
from .states import ExactDistribution, count_states

__all__ = [
    "atomic_write",
    "fmt",
    "joint_csv",
    "marginals_csv",
    "trajectory_csv",
    "read_joint_csv",
    "JOINT_LIMIT",
]

JOINT_LIMIT = 10**6


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to ``path`` via a temporary file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _header(prefix: Sequence[str], n: int, suffix: Sequence[str] = ()) -> str:
    return ",".join([*prefix, *(f"x_{i + 1}" for i in range(n)), *suffix])


def joint_csv(dist: ExactDistribution) -> str:
    """``state_index,x_1..x_n,probability`` in lexicographic state order."""
    if count_states(dist.n_species, dist.N) > JOINT_LIMIT:
        raise ValueError("joint table exceeds the export limit")
    lines = [_header(["state_index"], dist.n_species, ["probability"])]
    for k, (x, p) in enumerate(zip(dist.states.tolist(), dist.probs.tolist())):
        lines.append(",".join([str(k), *map(str, x), fmt(p)]))
    return "\n".join(lines) + "\n"


def marginals_csv(marginals: Sequence[np.ndarray], species: Sequence[str]) -> str:
    """``species,count,probability``, one block per species."""
    lines = ["species,count,probability"]
    for name, p in zip(species, marginals):
        lines.extend(f"{name},{m},{fmt(v)}" for m, v in enumerate(p))
    return "\n".join(lines) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    """``time,x_1..x_n``; one row per visited state, starting at time 0."""
    n = traj.states.shape[1]
    lines = [_header(["time"], n)]
    for t, x in zip(traj.times.tolist(), traj.states.tolist()):
        lines.append(",".join([fmt(t), *map(str, x)]))
    return "\n".join(lines) + "\n"


def read_joint_csv(text: str) -> ExactDistribution:
    """Parse the joint format back into an :class:`ExactDistribution`."""
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    if header[0] != "state_index" or header[-1] != "probability":
        raise ValueError("not a joint distribution CSV")
    body = [r for r in rows[1:] if r]
    states = np.array([[int(v) for v in r[1:-1]] for r in body], dtype=np.int64)
    probs = np.array([float(r[-1]) for r in body])
    totals = set(states.sum(axis=1).tolist())
    if len(totals) != 1:
        raise ValueError("states in a joint CSV must share one total")
    return ExactDistribution(totals.pop(), states, probs)
