"""XYZ/CSV point-cloud files and colored PLY export."""

import logging
import os
from typing import Optional

import numpy as np
from plyfile import PlyData, PlyElement

from pcexplain.pointcloud.cloud import Heatmap, PointCloud
from pcexplain.utils.exceptions import (
    ConfigError,
    ContractError,
    ParseError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

CLOUD_FORMATS = ("xyz", "csv")
CSV_HEADER = "x,y,z"
FLOAT_FORMAT = "%.17g"

LOW_COLOR = np.array([0.0, 0.0, 255.0])
HIGH_COLOR = np.array([255.0, 0.0, 0.0])


def format_from_path(path: str) -> str:
    """Cloud format implied by the file extension."""
    extension = os.path.splitext(path)[1].lstrip(".").lower()
    if extension not in CLOUD_FORMATS:
        raise ConfigError(f"cannot infer cloud format from {path!r}; use .xyz or .csv")
    return extension


def _check_format(fmt: str) -> None:
    if fmt not in CLOUD_FORMATS:
        raise ConfigError(f"unknown cloud format {fmt!r}; choose from {', '.join(CLOUD_FORMATS)}")


def load_cloud(path: str, fmt: Optional[str] = None, label: Optional[int] = None) -> PointCloud:
    """Read one x y z triple per line (whitespace for xyz, commas for csv).

    A csv file may start with the header ``x,y,z``. Blank lines are skipped.
    """
    fmt = fmt or format_from_path(path)
    _check_format(fmt)
    rows = []
    with open(path, "r", encoding="UTF-8") as file:
        for line_number, line in enumerate(file, start=1):
            text = line.strip()
            if not text:
                continue
            if fmt == "csv" and line_number == 1 and text.replace(" ", "") == CSV_HEADER:
                continue
            fields = text.split(",") if fmt == "csv" else text.split()
            if len(fields) != 3:
                raise ParseError(path, line_number, text)
            try:
                rows.append([float(value) for value in fields])
            except ValueError as error:
                raise ParseError(path, line_number, text) from error
    if not rows:
        raise PreconditionError(f"{path} contains no points")
    return PointCloud.from_points(np.array(rows), label=label)


def save_cloud(cloud: PointCloud, path: str, fmt: Optional[str] = None) -> None:
    """Write the cloud's current coordinates at full float64 precision."""
    fmt = fmt or format_from_path(path)
    _check_format(fmt)
    if fmt == "csv":
        np.savetxt(
            path, cloud.points, fmt=FLOAT_FORMAT, delimiter=",", header=CSV_HEADER, comments=""
        )
    else:
        np.savetxt(path, cloud.points, fmt=FLOAT_FORMAT, delimiter=" ")


def heatmap_colors(values) -> np.ndarray:
    """Blue (0) to red (1) through purple, as uint8 RGB rows."""
    weights = np.asarray(values, dtype=np.float64)[:, None]
    colors = (1.0 - weights) * LOW_COLOR + weights * HIGH_COLOR
    return np.rint(colors).astype(np.uint8)


def export_heatmap_ply(cloud: PointCloud, heatmap: Heatmap, path: str) -> None:
    """Write an ASCII PLY with one colored vertex per point."""
    if heatmap.n != cloud.n:
        raise ContractError(
            f"heatmap has {heatmap.n} values for a cloud of {cloud.n} points"
        )
    colors = heatmap_colors(heatmap.values)
    vertices = np.empty(
        cloud.n,
        dtype=[
            ("x", "f4"),
            ("y", "f4"),
            ("z", "f4"),
            ("red", "u1"),
            ("green", "u1"),
            ("blue", "u1"),
        ],
    )
    vertices["x"] = cloud.points[:, 0].astype("f4")
    vertices["y"] = cloud.points[:, 1].astype("f4")
    vertices["z"] = cloud.points[:, 2].astype("f4")
    vertices["red"] = colors[:, 0]
    vertices["green"] = colors[:, 1]
    vertices["blue"] = colors[:, 2]
    PlyData([PlyElement.describe(vertices, "vertex")], text=True).write(path)
    logger.debug("Wrote %d colored vertices to %s", cloud.n, path)
