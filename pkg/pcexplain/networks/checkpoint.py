"""Checkpoint files: magic, header length, JSON header, float64 parameter block."""

import json
import logging
from dataclasses import asdict
from typing import Dict, Type

import numpy as np

from pcexplain.networks.base_network import BaseNetwork
from pcexplain.networks.fixed_net import FixedNet
from pcexplain.networks.variable_net import VariableNet
from pcexplain.utils.exceptions import CheckpointError, ConfigError, ContractError

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
MAGIC = b"PCXCKPT\n"
LENGTH_DTYPE = np.dtype("<u8")
PARAMETER_DTYPE = np.dtype("<f8")

NETWORK_KINDS: Dict[str, Type[BaseNetwork]] = {
    FixedNet.kind: FixedNet,
    VariableNet.kind: VariableNet,
}


def save_model(net: BaseNetwork, path: str) -> None:
    """Write a network so that load_model reproduces its logits exactly."""
    parameters = net.parameters
    header = {
        "version": CHECKPOINT_VERSION,
        "architecture": net.kind,
        "config": asdict(net.config),
        "dtype": PARAMETER_DTYPE.str,
        "parameters": [
            {"name": name, "shape": list(value.shape)} for name, value in parameters.items()
        ],
    }
    encoded = json.dumps(header, sort_keys=True).encode("UTF-8")
    with open(path, "wb") as file:
        file.write(MAGIC)
        file.write(np.array([len(encoded)], dtype=LENGTH_DTYPE).tobytes())
        file.write(encoded)
        for value in parameters.values():
            file.write(np.ascontiguousarray(value, dtype=PARAMETER_DTYPE).tobytes())
    logger.info("Saved %s network checkpoint to %s", net.kind, path)


def load_model(path: str) -> BaseNetwork:
    """Read a checkpoint written by save_model."""
    with open(path, "rb") as file:
        data = file.read()
    if not data.startswith(MAGIC):
        raise CheckpointError(f"{path} is not a checkpoint file")

    offset = len(MAGIC)
    if len(data) < offset + LENGTH_DTYPE.itemsize:
        raise CheckpointError(f"{path} is truncated")
    length = int(np.frombuffer(data, dtype=LENGTH_DTYPE, count=1, offset=offset)[0])
    offset += LENGTH_DTYPE.itemsize
    try:
        header = json.loads(data[offset : offset + length].decode("UTF-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as error:
        raise CheckpointError(f"{path}: unreadable header") from error
    offset += length

    if header.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint version {header.get('version')} is not supported "
            f"(expected {CHECKPOINT_VERSION})"
        )
    network_class = NETWORK_KINDS.get(header.get("architecture"))
    if network_class is None:
        raise CheckpointError(f"{path}: unknown architecture {header.get('architecture')!r}")
    try:
        config = network_class.config_type(**header["config"])
    except (TypeError, ConfigError) as error:
        raise CheckpointError(f"{path}: invalid network config: {error}") from error

    expected = sum(int(np.prod(entry["shape"])) for entry in header["parameters"])
    if len(data) - offset != expected * PARAMETER_DTYPE.itemsize:
        raise CheckpointError(
            f"{path}: parameter block has {len(data) - offset} bytes, header lists {expected} values"
        )
    block = np.frombuffer(data, dtype=PARAMETER_DTYPE, offset=offset)

    parameters = {}
    position = 0
    for entry in header["parameters"]:
        size = int(np.prod(entry["shape"]))
        parameters[entry["name"]] = (
            block[position : position + size].reshape(entry["shape"]).astype(np.float64)
        )
        position += size
    try:
        net = network_class(config, parameters)
    except ContractError as error:
        raise CheckpointError(f"{path}: {error}") from error
    logger.info("Loaded %s network checkpoint from %s", net.kind, path)
    return net
