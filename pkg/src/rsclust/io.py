"""CSV and JSON file formats.

Raw epochs: one CSV per channel under ``epochs/``, rows are epochs and
columns samples; the file stem is the channel label. Lines starting with
``#`` are comments.
"""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, ShapeError

EPOCH_DIR = "epochs"
FLOAT_FMT = "%.12g"


def _header(seed) -> str:
    return f"# seed={seed}\n" if seed is not None else ""


def write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_rows(path, columns, rows, seed=None):
    buf = _io.StringIO()
    buf.write(_header(seed))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    write_text(path, buf.getvalue())


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return FLOAT_FMT % value
    return value


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_epochs(directory, epochs: np.ndarray, labels, seed=None):
    directory = Path(directory) / EPOCH_DIR
    directory.mkdir(parents=True, exist_ok=True)
    for label, channel in zip(labels, epochs):
        buf = _io.StringIO()
        buf.write(_header(seed))
        np.savetxt(buf, channel, delimiter=",", fmt=FLOAT_FMT)
        (directory / f"{label}.csv").write_text(buf.getvalue())


def read_epochs(directory) -> tuple[np.ndarray, list[str]]:
    """Load every channel CSV of a dataset directory (or of a bare directory of CSVs)."""
    directory = Path(directory)
    if not directory.exists():
        raise FileNotFoundError(f"input path {directory} does not exist")
    if (directory / EPOCH_DIR).is_dir():
        directory = directory / EPOCH_DIR
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise FileNotFoundError(f"no channel CSV files in {directory}")
    channels = []
    for path in files:
        try:
            data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except ValueError as exc:
            raise InvalidInputError(f"{path.name}: {exc}") from None
        channels.append(data)
    shapes = {c.shape for c in channels}
    if len(shapes) != 1:
        raise ShapeError(f"channel files disagree on (epochs, samples): {sorted(shapes)}")
    return np.stack(channels), [p.stem for p in files]


def write_truth(path, labels, truth, seed=None):
    write_rows(path, ["channel_label", "cluster_id"], zip(labels, (int(t) for t in truth)), seed)


def read_truth(path, labels) -> np.ndarray:
    rows = {r["channel_label"]: int(r["cluster_id"]) for r in read_rows(path)}
    missing = [lab for lab in labels if lab not in rows]
    if missing:
        raise ShapeError(f"truth file lacks channels {missing[:5]}")
    return np.array([rows[lab] for lab in labels])


def write_mask(path, labels, mask, seed=None):
    rows = ((lab, e, int(mask[c, e])) for c, lab in enumerate(labels) for e in range(mask.shape[1]))
    write_rows(path, ["channel_label", "epoch", "contaminated"], rows, seed)


def write_partition(path, labels, assignment, seed=None):
    write_rows(path, ["channel_label", "cluster_id"], zip(labels, (int(a) for a in assignment)), seed)


def write_trace(path, trace, labels, seed=None):
    def name(members):
        return ";".join(labels[i] for i in members)
    rows = ((s.n_before, s.dissimilarity, name(s.merged_a), name(s.merged_b)) for s in trace.steps)
    write_rows(path, ["n_clusters", "min_dissimilarity", "merged_a", "merged_b"], rows, seed)


def write_matrix(path, matrix: np.ndarray, names, seed=None):
    rows = ([names[i]] + list(matrix[i]) for i in range(len(names)))
    write_rows(path, [""] + list(names), rows, seed)
