"""Method comparison tables: AUC per method, drop mode and network."""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from pcexplain.evaluation.point_drop import (
    DEFAULT_STEPS,
    DROP_MODES,
    HIGH_DROP,
    LOW_DROP,
    PDCCurve,
    auc,
    point_drop_curve,
)
from pcexplain.networks.base_network import BaseNetwork
from pcexplain.pointcloud.cloud import Heatmap, PointCloud
from pcexplain.utils.exceptions import ContractError, PreconditionError

logger = logging.getLogger(__name__)

MODE_LABELS = {HIGH_DROP: "H.D. ↓", LOW_DROP: "L.D. ↑"}

CurveKey = Tuple[str, str, str]


@dataclass
class ComparisonTable:
    """Point-dropping curves keyed by (network, method, mode)."""

    curves: Dict[CurveKey, PDCCurve] = field(default_factory=dict)

    @property
    def networks(self) -> List[str]:
        """Network names in insertion order."""
        return list(dict.fromkeys(key[0] for key in self.curves))

    @property
    def methods(self) -> List[str]:
        """Method names in insertion order."""
        return list(dict.fromkeys(key[1] for key in self.curves))

    @property
    def modes(self) -> List[str]:
        """Drop modes present, in canonical order."""
        present = {key[2] for key in self.curves}
        return [mode for mode in DROP_MODES if mode in present]

    def add(self, network: str, curve: PDCCurve) -> None:
        """Insert one curve; the method and mode come from the curve."""
        key = (network, curve.method, curve.mode)
        if key in self.curves:
            raise ContractError(f"duplicate curve for {key}")
        self.curves[key] = curve

    def auc(self, network: str, method: str, mode: str) -> Optional[float]:
        """AUC of one cell, None when the cell is empty."""
        curve = self.curves.get((network, method, mode))
        return None if curve is None else auc(curve)

    def best(self, network: str, mode: str) -> Optional[str]:
        """Lowest-AUC method for high_drop, highest for low_drop; ties keep the first."""
        scored = [
            (method, self.auc(network, method, mode))
            for method in self.methods
            if (network, method, mode) in self.curves
        ]
        if not scored:
            return None
        if mode == HIGH_DROP:
            return min(scored, key=lambda item: item[1])[0]
        return max(scored, key=lambda item: item[1])[0]

    def merge(self, other: "ComparisonTable") -> "ComparisonTable":
        """Table holding the curves of both; overlapping cells are an error."""
        overlap = set(self.curves) & set(other.curves)
        if overlap:
            raise ContractError(f"tables overlap on {sorted(overlap)}")
        return ComparisonTable({**self.curves, **other.curves})

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready report: full curves, AUCs and best methods per network."""
        networks: Dict[str, Any] = {}
        for network in self.networks:
            methods: Dict[str, Any] = {}
            for method in self.methods:
                cells = {
                    mode: self.curves[(network, method, mode)].to_dict()
                    for mode in self.modes
                    if (network, method, mode) in self.curves
                }
                if cells:
                    methods[method] = cells
            networks[network] = {
                "methods": methods,
                "best": {mode: self.best(network, mode) for mode in self.modes},
            }
        return {"networks": networks}

    def to_markdown(self) -> str:
        """Method rows with H.D./L.D. sub-rows and one column per network; best in bold."""
        networks = self.networks
        lines = [
            "| Method | Drop | " + " | ".join(networks) + " |",
            "|---|---|" + "---|" * len(networks),
        ]
        for method in self.methods:
            for position, mode in enumerate(self.modes):
                cells = []
                for network in networks:
                    value = self.auc(network, method, mode)
                    if value is None:
                        cells.append("–")
                    elif self.best(network, mode) == method:
                        cells.append(f"**{value:.3f}**")
                    else:
                        cells.append(f"{value:.3f}")
                label = method if position == 0 else ""
                lines.append(f"| {label} | {MODE_LABELS[mode]} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def compare_methods(
    net: BaseNetwork,
    clouds: Sequence[PointCloud],
    heatmaps_by_method: Mapping[str, Sequence[Heatmap]],
    steps: int = DEFAULT_STEPS,
    network: str = "network",
    modes: Sequence[str] = DROP_MODES,
) -> ComparisonTable:
    """Point-dropping curves in every mode for every method's frozen heatmaps."""
    if not heatmaps_by_method:
        raise PreconditionError("compare_methods needs at least one method")
    table = ComparisonTable()
    for method, heatmaps in heatmaps_by_method.items():
        for mode in modes:
            table.add(network, point_drop_curve(net, clouds, heatmaps, mode, steps, method))
    for mode in table.modes:
        logger.info(
            "%s best %s: %s",
            network,
            mode,
            table.best(network, mode),
            extra={"tag": "comparison", "network": network, "mode": mode},
        )
    return table


def write_report(
    table: ComparisonTable, out_dir: str, extra: Optional[Dict[str, Any]] = None
) -> Tuple[str, str]:
    """Write report.json and report.md; returns both paths."""
    os.makedirs(out_dir, exist_ok=True)
    payload = table.to_dict()
    payload.update(extra or {})
    json_path = os.path.join(out_dir, "report.json")
    with open(json_path, "w", encoding="UTF-8") as file:
        json.dump(payload, file, indent=2, sort_keys=True)
        file.write("\n")
    markdown_path = os.path.join(out_dir, "report.md")
    with open(markdown_path, "w", encoding="UTF-8") as file:
        file.write(table.to_markdown())
    logger.info("Wrote comparison report to %s", out_dir)
    return json_path, markdown_path
