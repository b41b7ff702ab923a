"""점 구름과 부분집합 족 시험"""
import numpy as np
import pytest

from src.errors import DuplicatePointError, GeometryError
from src.geometry.family import DECREASING, INCREASING, decreasing_family, nested_exhaustion, space_filling_order
from src.geometry.point_cloud import PointCloud, make_interval, make_sphere, union


class TestMakeSphere:
    def test_circle_of_four(self):
        cloud = make_sphere(2, 1.0, 4)
        expected = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        np.testing.assert_allclose(cloud.points, expected, atol=1e-15)

    def test_points_lie_on_radius(self):
        cloud = make_sphere(3, 1.0, 100)
        np.testing.assert_allclose(cloud.norms(), 1.0, atol=1e-12)
        assert cloud.min_pairwise_distance() > 0

    def test_nearest_neighbour_scales_with_radius(self):
        unit = make_sphere(3, 1.0, 100)
        half = make_sphere(3, 0.5, 100)
        np.testing.assert_allclose(half.nearest_neighbor_distances(),
                                   0.5 * unit.nearest_neighbor_distances(), rtol=1e-12)

    def test_is_deterministic(self):
        np.testing.assert_array_equal(make_sphere(3, 2.0, 50).points, make_sphere(3, 2.0, 50).points)

    def test_default_region_label(self):
        assert make_sphere(3, 0.5, 10).regions() == ["S(0,0.5)"]

    @pytest.mark.parametrize("dim,count", [(4, 10), (1, 10), (3, 3)])
    def test_rejects_bad_arguments(self, dim, count):
        with pytest.raises(GeometryError):
            make_sphere(dim, 1.0, count)


class TestMakeInterval:
    def test_three_points_in_plane(self):
        cloud = make_interval(-1.0, 1.0, 3, 2)
        np.testing.assert_array_equal(cloud.points, [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])

    def test_two_points_in_space(self):
        cloud = make_interval(0.0, 1.0, 2, 3)
        np.testing.assert_array_equal(cloud.points, [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])

    def test_spacing(self):
        cloud = make_interval(-1.0, 1.0, 101, 2)
        np.testing.assert_allclose(np.diff(cloud.points[:, 0]), 0.02, atol=1e-15)

    def test_rejects_empty_interval(self):
        with pytest.raises(GeometryError):
            make_interval(1.0, 1.0, 5, 1)


class TestPointCloud:
    def test_coincident_points_are_rejected(self):
        with pytest.raises(DuplicatePointError):
            PointCloud(2, [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], ("a", "a", "a"))

    def test_region_labels_must_match(self):
        with pytest.raises(GeometryError):
            PointCloud(2, [[0.0, 0.0], [1.0, 0.0]], ("a",))

    def test_shape_must_match_dim(self):
        with pytest.raises(GeometryError):
            PointCloud(3, [[0.0, 0.0], [1.0, 0.0]], ("a", "a"))

    def test_points_are_read_only(self):
        cloud = make_sphere(2, 1.0, 8)
        with pytest.raises(ValueError):
            cloud.points[0, 0] = 5.0

    def test_csv_reingests_exactly(self, tmp_path):
        cloud = union(make_sphere(3, 1.0, 30, "outer"), make_sphere(3, 0.5, 20, "inner"))
        path = tmp_path / "cloud.csv"
        cloud.to_csv(path)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "x0,x1,x2,region"
        restored = PointCloud.from_csv(path)
        np.testing.assert_array_equal(restored.points, cloud.points)
        assert restored.region == cloud.region

    def test_subset_keeps_labels(self):
        cloud = union(make_sphere(2, 1.0, 4, "a"), make_sphere(2, 0.5, 4, "b"))
        part = cloud.subset([1, 5])
        assert part.region == ("a", "b")
        np.testing.assert_array_equal(part.points, cloud.points[[1, 5]])


class TestUnion:
    def test_concatenates_in_order(self):
        a = make_sphere(2, 1.0, 4, "a")
        b = make_sphere(2, 0.5, 8, "b")
        cloud = union(a, b)
        assert cloud.size == 12
        assert cloud.region == ("a",) * 4 + ("b",) * 8
        np.testing.assert_array_equal(cloud.points[:4], a.points)

    def test_empty_is_identity(self):
        a = make_sphere(2, 1.0, 4)
        assert union(a, PointCloud.empty(2)) is a

    def test_rejects_overlap(self):
        with pytest.raises(DuplicatePointError):
            union(make_sphere(2, 1.0, 4, "a"), make_sphere(2, 1.0, 4, "b"))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(GeometryError):
            union(make_sphere(2, 1.0, 4), make_sphere(3, 1.0, 4))


class TestFamilies:
    def test_exhaustion_sizes(self):
        cloud = make_sphere(3, 1.0, 100)
        family = nested_exhaustion(cloud, [0.25, 0.5, 1.0])
        assert family.kind == INCREASING
        assert family.sizes() == [25, 50, 100]
        assert family.is_monotone()
        np.testing.assert_array_equal(family.stages[-1], np.arange(100))

    def test_exhaustion_of_ten(self):
        family = nested_exhaustion(make_sphere(2, 1.0, 10), [0.5, 1.0])
        assert family.sizes() == [5, 10]

    @pytest.mark.parametrize("fractions", [[], [0.5, 0.5, 1.0], [0.5, 0.9], [0.0, 1.0]])
    def test_exhaustion_rejects_bad_fractions(self, fractions):
        with pytest.raises(GeometryError):
            nested_exhaustion(make_sphere(2, 1.0, 10), fractions)

    def test_space_filling_order_groups_regions(self):
        cloud = PointCloud(1, [[0.0], [1.0], [2.0], [3.0]], ("a", "b", "a", "b"))
        np.testing.assert_array_equal(space_filling_order(cloud), [0, 2, 1, 3])

    def test_exhaustion_fills_first_region_first(self):
        cloud = union(make_sphere(3, 1.0, 80, "outer"), make_sphere(3, 0.5, 40, "inner"))
        family = nested_exhaustion(cloud, [0.5, 1.0])
        assert all(cloud.region[i] == "outer" for i in family.stages[0])

    def test_decreasing_family(self):
        cloud = make_sphere(2, 1.0, 6)
        family = decreasing_family(cloud, [range(6), [0, 1, 2, 3], [1, 2]])
        assert family.kind == DECREASING
        assert family.sizes() == [6, 4, 2]
        assert family.mask(2).sum() == 2

    def test_decreasing_family_rejects_growth(self):
        with pytest.raises(GeometryError):
            decreasing_family(make_sphere(2, 1.0, 6), [[0, 1], [0, 1, 2]])

    def test_rejects_out_of_range_index(self):
        with pytest.raises(GeometryError):
            decreasing_family(make_sphere(2, 1.0, 6), [[0, 7]])
