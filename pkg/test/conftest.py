"""Pytest fixtures for tests"""

from test.helper.synthetic_data import (
    random_cloud,
    shape_cloud,
    tiny_dataset,
    tiny_fixed_net,
    tiny_variable_net,
)

import pytest

from pcexplain.pointcloud import save_dataset


@pytest.fixture
def cloud16():
    """16 random points"""
    return random_cloud(16, seed=3)


@pytest.fixture
def sphere64():
    """Sphere of 64 points labeled 0"""
    return shape_cloud("sphere", 64, seed=1, label=0)


@pytest.fixture
def fixed_net():
    """Untrained two-class fixed network"""
    return tiny_fixed_net()


@pytest.fixture
def variable_net():
    """Untrained two-class variable network"""
    return tiny_variable_net()


@pytest.fixture
def dataset():
    """Sphere/box dataset with 4 train and 1 test cloud per class"""
    return tiny_dataset()


@pytest.fixture
def manifest_path(tmp_path, dataset):
    """Dataset written to disk"""
    return save_dataset(dataset, str(tmp_path / "data"))
