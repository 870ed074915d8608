"""Deterministic, atomic writers for tables and JSON documents."""

import dataclasses
import json
import logging
import os
import tempfile

import numpy as np
import pandas as pd

from models import GameParams, Histogram, Spectrum, Trajectory

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
TRAJECTORY_COLUMNS = ["round", "t", "I", "K", "tau_B", "omega", "mass", "x", "r", "S"]


def atomic_write(path: str, data: bytes) -> str:
    """Write to a temp file beside ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.debug(f"Wrote {path} ({len(data)} bytes)")
    return path


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def dumps_json(document) -> bytes:
    return (json.dumps(document, indent=2, sort_keys=True, default=_json_default) + "\n").encode("utf-8")


def write_json(out_dir: str, name: str, document) -> str:
    return atomic_write(os.path.join(out_dir, f"{name}.json"), dumps_json(document))


def write_table(out_dir: str, name: str, frame: pd.DataFrame, fmt: str = "csv") -> str:
    """Write a table as CSV (17 significant digits) or a JSON list of records."""
    if fmt == "json":
        return write_json(out_dir, name, frame.to_dict(orient="records"))
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return atomic_write(os.path.join(out_dir, f"{name}.csv"), text.encode("utf-8"))


def params_document(params: GameParams) -> dict:
    doc = dataclasses.asdict(params)
    doc["i0"] = "random" if params.i0 is None else params.i0
    return doc


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    dt = trajectory.params.dt
    rows = [
        (s.t, s.t * dt, s.i, s.k, s.tau_b, s.omega, s.mass, s.x, s.r, s.s)
        for s in trajectory.states
    ]
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)


def trajectory_metadata(trajectory: Trajectory) -> dict:
    return {**trajectory.metadata, "params": params_document(trajectory.params)}


def spectrum_frame(spectrum: Spectrum) -> pd.DataFrame:
    return pd.DataFrame(spectrum.points, columns=["alpha", "f", "resolution"])[["resolution", "alpha", "f"]]


def peak_summary(spectrum: Spectrum) -> dict:
    finest = spectrum.finest
    return {
        "peak_alpha": spectrum.peak_alpha,
        "peak_f": spectrum.peak_f,
        "resolution": finest.box_count,
        "box_size": finest.box_size,
        "dropped_boxes": finest.dropped_boxes,
    }


def histogram_frame(hist: Histogram) -> pd.DataFrame:
    return pd.DataFrame({"bin_center": hist.centers, "density": hist.density})
