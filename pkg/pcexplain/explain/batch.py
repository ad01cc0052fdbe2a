"""Concurrent explanation of many clouds."""

import asyncio
import logging
from typing import List, Sequence

from pcexplain.explain.base_explainer import BaseExplainer, ExplanationResult
from pcexplain.networks.base_network import BaseNetwork
from pcexplain.pointcloud.cloud import PointCloud
from pcexplain.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)


async def explain_clouds(
    explainer: BaseExplainer,
    net: BaseNetwork,
    clouds: Sequence[PointCloud],
    max_workers: int = 4,
) -> List[ExplanationResult]:
    """Explain every cloud in worker threads; results keep the input order.

    Each task owns its cloud and tape and only reads the network parameters.
    """
    if max_workers < 1:
        raise ConfigError(f"max_workers must be positive, got {max_workers}")
    semaphore = asyncio.Semaphore(max_workers)

    async def _explain(index: int, cloud: PointCloud) -> ExplanationResult:
        async with semaphore:
            result = await asyncio.to_thread(explainer.explain, net, cloud)
            logger.debug(
                "Explained cloud %d with %s",
                index,
                explainer.name,
                extra={"tag": "explain", "cloud": index, "method": explainer.name},
            )
            return result

    results = await asyncio.gather(*(_explain(i, c) for i, c in enumerate(clouds)))
    logger.info("Explained %d clouds with %s", len(results), explainer.name)
    return list(results)
