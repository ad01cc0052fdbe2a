"""Point cloud model, dropping and synthetic shapes testing."""

from test.helper.synthetic_data import random_cloud

import numpy as np
import pytest

from pcexplain.pointcloud import (
    SHAPE_CLASSES,
    Heatmap,
    PointCloud,
    centroid,
    drop_points,
    generate_dataset,
    hole_centers,
    make_shape,
    mark_explained,
    minmax_normalize,
    rank_points,
)
from pcexplain.pointcloud.shapes import FLANGE, SHAPE_SAMPLERS
from pcexplain.utils.exceptions import (
    ConfigError,
    ContractError,
    PointIndexError,
    PreconditionError,
)


class TestPointCloud:
    """Cloud construction and masks"""

    def test_from_points_core_is_centroid(self):
        """core is the mean of the loaded points"""
        cloud = PointCloud.from_points([[0.0, 0.0, 0.0], [2.0, 4.0, 6.0]])

        np.testing.assert_array_equal(cloud.core, [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(centroid(cloud), [1.0, 2.0, 3.0])
        assert cloud.alive_mask.all()
        assert not cloud.explained_mask.any()

    def test_single_point_centroid(self):
        """n = 1"""
        cloud = PointCloud.from_points([[1.0, 2.0, 3.0]])

        np.testing.assert_array_equal(centroid(cloud), [1.0, 2.0, 3.0])

    @pytest.mark.parametrize(
        "points", [np.zeros((0, 3)), np.zeros((4, 2)), [[np.nan, 0.0, 0.0]]]
    )
    def test_invalid_points(self, points):
        """empty, wrong width or non-finite input"""
        with pytest.raises((PreconditionError, ContractError)):
            PointCloud.from_points(points)

    def test_arrays_are_read_only(self, cloud16):
        """clouds are values"""
        with pytest.raises(ValueError):
            cloud16.points[0, 0] = 5.0


class TestDropping:
    """Shift-to-core dropping"""

    def test_drop_moves_points_to_core(self, cloud16):
        """dropped points sit at the core and are not alive"""
        dropped = drop_points(cloud16, [2, 5])

        np.testing.assert_array_equal(dropped.points[2], cloud16.core)
        np.testing.assert_array_equal(dropped.points[5], cloud16.core)
        assert not dropped.alive_mask[[2, 5]].any()
        assert dropped.n == cloud16.n

    def test_drop_keeps_original(self, cloud16):
        """the input cloud is unchanged"""
        before = cloud16.points.copy()
        drop_points(cloud16, [0])

        np.testing.assert_array_equal(cloud16.points, before)
        assert cloud16.alive_mask.all()

    def test_drop_nothing(self, cloud16):
        """empty index list"""
        dropped = drop_points(cloud16, [])

        np.testing.assert_array_equal(dropped.points, cloud16.points)

    def test_drop_all_collapses_to_core(self, cloud16):
        """every point ends at the core"""
        dropped = drop_points(cloud16, range(cloud16.n))

        np.testing.assert_allclose(dropped.points, np.tile(cloud16.core, (cloud16.n, 1)))

    def test_core_survives_drops(self, cloud16):
        """core stays the centroid of the points as loaded"""
        dropped = drop_points(drop_points(cloud16, [0, 1]), [2])

        np.testing.assert_array_equal(dropped.core, cloud16.core)

    @pytest.mark.parametrize("index", [-1, 16])
    def test_out_of_range(self, cloud16, index):
        """index outside the cloud"""
        with pytest.raises(PointIndexError):
            drop_points(cloud16, [index])

    def test_drop_twice(self, cloud16):
        """an already dropped point"""
        with pytest.raises(PointIndexError):
            drop_points(drop_points(cloud16, [3]), [3])

    def test_fresh_resets_masks(self, cloud16):
        """fresh keeps coordinates and clears the bookkeeping"""
        cloud = mark_explained(cloud16, [1])
        fresh = cloud.fresh()

        assert fresh.alive_mask.all()
        assert not fresh.explained_mask.any()

    def test_mark_explained(self, cloud16):
        """explained mask"""
        cloud = mark_explained(cloud16, [0, 4])

        assert cloud.explained_mask[[0, 4]].all()
        assert cloud.explained_mask.sum() == 2


class TestHeatmapValues:
    """Normalization, ranking and heatmap invariants"""

    def test_minmax(self):
        """values map onto [0, 1]"""
        np.testing.assert_allclose(minmax_normalize([2.0, 4.0, 3.0]), [0.0, 1.0, 0.5])

    def test_minmax_constant(self):
        """max == min gives zeros"""
        np.testing.assert_array_equal(minmax_normalize([3.0, 3.0]), [0.0, 0.0])

    def test_heatmap_rejects_unnormalized(self):
        """max must be 1 unless all values are 0"""
        with pytest.raises(ContractError):
            Heatmap(np.array([0.2, 0.5]))

    def test_heatmap_all_zero(self):
        """all-zero heatmap is valid"""
        assert Heatmap(np.zeros(3)).n == 3

    def test_check_aligned(self, cloud16):
        """length must equal n"""
        with pytest.raises(ContractError):
            Heatmap(np.array([0.0, 1.0])).check_aligned(cloud16)

    def test_rank_ties_by_index(self):
        """equal values keep ascending index order"""
        values = [0.5, 0.1, 0.5, 0.1]

        np.testing.assert_array_equal(rank_points(values, descending=False), [1, 3, 0, 2])
        np.testing.assert_array_equal(rank_points(values, descending=True), [0, 2, 1, 3])

    def test_rank_candidates(self):
        """only candidates are ranked"""
        ranked = rank_points([0.9, 0.1, 0.5, 0.0], descending=False, candidates=[0, 2])

        np.testing.assert_array_equal(ranked, [2, 0])


class TestShapes:
    """Seeded synthetic shapes"""

    @pytest.mark.parametrize("shape", SHAPE_CLASSES)
    def test_deterministic_and_normalized(self, shape):
        """same seed, same cloud; farthest point at distance 1"""
        first = make_shape(shape, 64, seed=5)
        second = make_shape(shape, 64, seed=5)

        np.testing.assert_array_equal(first.points, second.points)
        np.testing.assert_allclose(first.core, 0.0, atol=1e-12)
        assert np.max(np.linalg.norm(first.points, axis=1)) == pytest.approx(1.0)

    def test_seed_changes_cloud(self):
        """different seeds differ"""
        assert not np.array_equal(
            make_shape("box", 64, seed=1).points, make_shape("box", 64, seed=2).points
        )

    @pytest.mark.parametrize("n", [64, 65])
    def test_sphere_radius_constant(self, n):
        """every sphere point lies on the unit sphere"""
        cloud = make_shape("sphere", n, seed=0)

        np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), 1.0)

    @pytest.mark.parametrize("shape,holes", [("flange4", 4), ("flange8", 8)])
    def test_flange_avoids_holes(self, shape, holes):
        """no sampled point falls inside a hole"""
        raw = SHAPE_SAMPLERS[shape](np.random.default_rng(0), 512)
        distance = np.linalg.norm(raw[:, None, :2] - hole_centers(holes)[None, :, :2], axis=2)

        np.testing.assert_array_equal(raw[:, 2], 0.0)
        assert raw.shape == (512, 3)
        assert np.min(distance) > FLANGE.hole_radius
        assert np.all(np.linalg.norm(raw[:, :2], axis=1) >= FLANGE.inner_radius)

    def test_unknown_class(self):
        """unknown class lists the known ones"""
        with pytest.raises(ConfigError) as error:
            make_shape("torus", 64, seed=0)

        assert "sphere" in str(error.value)

    def test_too_few_points(self):
        """n < 32"""
        with pytest.raises(PreconditionError):
            make_shape("box", 16, seed=0)


class TestDataset:
    """Generated datasets"""

    def test_split_disjoint_and_exhaustive(self):
        """every cloud has exactly one split, stratified per class"""
        dataset = generate_dataset(["sphere", "box"], 10, 32, seed=0, test_fraction=0.2)

        assert len(dataset.clouds) == 20
        assert len(dataset.train_clouds) + len(dataset.test_clouds) == 20
        assert sorted(c.label for c in dataset.test_clouds) == [0, 0, 1, 1]

    def test_deterministic(self):
        """same seed, same dataset"""
        first = generate_dataset(["sphere", "box"], 3, 32, seed=4)
        second = generate_dataset(["sphere", "box"], 3, 32, seed=4)

        assert first.splits == second.splits
        for a, b in zip(first.clouds, second.clouds):
            np.testing.assert_array_equal(a.points, b.points)

    def test_per_class_zero(self):
        """no clouds requested"""
        with pytest.raises(PreconditionError):
            generate_dataset(["sphere"], 0, 32, seed=0)

    def test_majority_prior(self, dataset):
        """balanced classes give 0.5"""
        assert dataset.majority_prior("test") == pytest.approx(0.5)

    def test_random_cloud_helper_labels(self):
        """labels pass through"""
        assert random_cloud(8, label=1).label == 1
