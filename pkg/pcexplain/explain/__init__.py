"""Heatmap explanations: the iterative method and its baselines."""

from typing import Dict, Type

from pcexplain.explain.ape import (
    APEConfig,
    APEExplainer,
    APEResult,
    InitialHeatmapResult,
    PartialHeatmap,
    ape_explain,
    compute_initial_heatmap,
    feature_gradients,
    gap_weights,
    initial_heatmap,
    merge_heatmaps,
    partial_heatmap,
    run_ape,
)
from pcexplain.explain.base_explainer import BaseExplainer, ExplanationResult, resolve_target
from pcexplain.explain.baselines import (
    GradientsExplainer,
    PcSNExplainer,
    RandomExplainer,
    gradients_baseline,
    pcsn_baseline,
    point_gradients,
    random_heatmap,
)
from pcexplain.explain.batch import explain_clouds
from pcexplain.explain.heatmap_io import load_heatmap_csv, save_explanation, save_heatmap_csv

EXPLAINERS: Dict[str, Type[BaseExplainer]] = {
    APEExplainer.name: APEExplainer,
    GradientsExplainer.name: GradientsExplainer,
    PcSNExplainer.name: PcSNExplainer,
    RandomExplainer.name: RandomExplainer,
}

__all__ = [
    "APEConfig",
    "APEExplainer",
    "APEResult",
    "BaseExplainer",
    "EXPLAINERS",
    "ExplanationResult",
    "GradientsExplainer",
    "InitialHeatmapResult",
    "PartialHeatmap",
    "PcSNExplainer",
    "RandomExplainer",
    "ape_explain",
    "compute_initial_heatmap",
    "explain_clouds",
    "feature_gradients",
    "gap_weights",
    "gradients_baseline",
    "initial_heatmap",
    "load_heatmap_csv",
    "merge_heatmaps",
    "partial_heatmap",
    "pcsn_baseline",
    "point_gradients",
    "random_heatmap",
    "resolve_target",
    "run_ape",
    "save_explanation",
    "save_heatmap_csv",
]
