"""Point-cloud data model, dropping, IO and synthetic datasets."""

from pcexplain.pointcloud.cloud import (
    Heatmap,
    PointCloud,
    centroid,
    drop_points,
    mark_explained,
    minmax_normalize,
    normalize_unit_sphere,
    rank_points,
)
from pcexplain.pointcloud.cloud_io import (
    export_heatmap_ply,
    heatmap_colors,
    load_cloud,
    save_cloud,
)
from pcexplain.pointcloud.dataset import (
    LabeledDataset,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from pcexplain.pointcloud.shapes import SHAPE_CLASSES, hole_centers, make_shape

__all__ = [
    "Heatmap",
    "LabeledDataset",
    "PointCloud",
    "SHAPE_CLASSES",
    "centroid",
    "drop_points",
    "export_heatmap_ply",
    "generate_dataset",
    "heatmap_colors",
    "hole_centers",
    "load_cloud",
    "load_dataset",
    "make_shape",
    "mark_explained",
    "minmax_normalize",
    "normalize_unit_sphere",
    "rank_points",
    "save_cloud",
    "save_dataset",
]
