"""Heatmap CSV files and their JSON metadata."""

import json
import logging
import os
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from pcexplain.explain.base_explainer import ExplanationResult
from pcexplain.pointcloud.cloud import Heatmap, PointCloud
from pcexplain.pointcloud.cloud_io import FLOAT_FORMAT, export_heatmap_ply
from pcexplain.utils.exceptions import ParseError

logger = logging.getLogger(__name__)

HEATMAP_HEADER = "x,y,z,value"


def save_heatmap_csv(cloud: PointCloud, heatmap: Heatmap, path: str) -> None:
    """One row per point: coordinates as loaded, then the heatmap value."""
    heatmap.check_aligned(cloud)
    rows = np.column_stack([cloud.points, heatmap.values])
    np.savetxt(path, rows, fmt=FLOAT_FORMAT, delimiter=",", header=HEATMAP_HEADER, comments="")


def load_heatmap_csv(path: str) -> Tuple[PointCloud, Heatmap]:
    """Read a file written by save_heatmap_csv."""
    with open(path, "r", encoding="UTF-8") as file:
        header = file.readline().strip()
    if header != HEATMAP_HEADER:
        raise ParseError(path, 1, header)
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.shape[1] != 4:
        raise ParseError(path, 2, f"{rows.shape[1]} columns")
    return PointCloud.from_points(rows[:, :3]), Heatmap(rows[:, 3])


def explanation_metadata(
    result: ExplanationResult, config: Dict[str, Any], source: Optional[str] = None
) -> Dict[str, Any]:
    """Everything recorded next to a heatmap file."""
    return {
        "method": result.method,
        "target_class": result.target_class,
        "predicted_class": result.predicted_class,
        "config": config,
        "diagnostics": result.metadata,
        "source": source,
    }


def save_explanation(
    cloud: PointCloud,
    result: ExplanationResult,
    out_dir: str,
    stem: str,
    config: Dict[str, Any],
    source: Optional[str] = None,
    export_ply: bool = False,
    save_iterations: bool = False,
) -> List[str]:
    """Write <stem>.heatmap.csv and <stem>.json, plus optional PLY and per-iteration CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    csv_path = os.path.join(out_dir, f"{stem}.heatmap.csv")
    save_heatmap_csv(cloud, result.heatmap, csv_path)
    written.append(csv_path)

    if save_iterations:
        for i, heatmap in enumerate(result.iteration_heatmaps, start=1):
            path = os.path.join(out_dir, f"{stem}.iteration{i}.csv")
            save_heatmap_csv(cloud, heatmap, path)
            written.append(path)

    if export_ply:
        ply_path = os.path.join(out_dir, f"{stem}.ply")
        export_heatmap_ply(cloud, result.heatmap, ply_path)
        written.append(ply_path)

    json_path = os.path.join(out_dir, f"{stem}.json")
    with open(json_path, "w", encoding="UTF-8") as file:
        json.dump(explanation_metadata(result, config, source), file, indent=2, sort_keys=True)
        file.write("\n")
    written.append(json_path)

    logger.debug("Wrote %s explanation files for %s", len(written), stem)
    return written
