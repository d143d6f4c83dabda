import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpface.errors import DegenerateInputError, DomainError, InvalidInputError
from lpface.image import GrayImage, resize_nearest, rotate_nearest
from lpface.logpolar import (
    LogPolarConfig,
    ReferenceCircle,
    cartesian_to_polar,
    column_shift,
    log_polar_transform,
    log_radial,
    output_size,
    reference_circle,
    sample_grid,
)


class TestReferenceCircle:
    def test_orl_geometry(self):
        assert reference_circle(GrayImage.blank(92, 112)) == ReferenceCircle(46, 56, 45)

    def test_small_square(self):
        assert reference_circle(GrayImage.blank(8, 8)) == ReferenceCircle(4, 4, 3)

    def test_too_small(self):
        with pytest.raises(DegenerateInputError):
            reference_circle(GrayImage.blank(3, 3))


class TestOutputSize:
    @pytest.mark.parametrize("radius,base,side", [(45, 2, 64), (3, 2, 4), (32, 2, 32), (33, 2, 64), (10, 3, 27), (1, 2, 1)])
    def test_examples(self, radius, base, side):
        assert output_size(radius, base) == side

    @given(st.integers(1, 10**6), st.integers(2, 9))
    def test_smallest_power_not_below_radius(self, radius, base):
        side = output_size(radius, base)
        q = round(math.log(side, base))
        assert base ** q == side
        assert side >= radius
        assert side == 1 or side // base < radius

    def test_transform_sizes(self):
        assert log_polar_transform(GrayImage.blank(92, 112)).size == (64, 64)
        assert log_polar_transform(GrayImage.blank(8, 8)).size == (4, 4)


class TestPolar:
    circle = ReferenceCircle(0, 0, 10)

    def test_first_quadrant(self):
        r, theta = cartesian_to_polar(3, 4, self.circle)
        assert r == pytest.approx(5.0, abs=1e-9)
        assert theta == pytest.approx(math.degrees(math.atan2(4, 3)), abs=1e-9)
        assert theta == pytest.approx(53.130, abs=1e-3)

    def test_negative_y_wraps(self):
        r, theta = cartesian_to_polar(0, -3, self.circle)
        assert (r, theta) == pytest.approx((3.0, 270.0), abs=1e-9)

    def test_centre(self):
        assert cartesian_to_polar(0, 0, self.circle) == (0.0, 0.0)

    @given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
    def test_angle_range(self, x, y):
        r, theta = cartesian_to_polar(x, y, self.circle)
        assert r >= 0
        assert 0 <= theta < 360


class TestLogRadial:
    def test_endpoints(self):
        assert log_radial(1, 45, 1) == 0.0
        assert log_radial(45, 45, 1) == pytest.approx(1.0, abs=1e-12)

    def test_geometric_midpoint(self):
        assert log_radial(math.sqrt(45), 45, 1) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("r", [0.5, 46, -1])
    def test_outside_domain(self, r):
        with pytest.raises(DomainError):
            log_radial(r, 45, 1)

    def test_bad_cutoff(self):
        with pytest.raises(DomainError):
            log_radial(5, 45, 45)

    @given(st.floats(1, 45), st.floats(1, 45))
    def test_monotone(self, r1, r2):
        if r1 < r2:
            assert log_radial(r1, 45, 1) <= log_radial(r2, 45, 1)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [{"base": 1}, {"base": 2.5}, {"r_min": 0}, {"fill": 300}, {"size": 1}])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInputError):
            LogPolarConfig(**kwargs)

    def test_scaled(self):
        cfg = LogPolarConfig(r_min=1.5, size=64).scaled(2)
        assert (cfg.r_min, cfg.size) == (3.0, 64)

    def test_cutoff_must_be_inside_disk(self):
        with pytest.raises(DegenerateInputError):
            log_polar_transform(GrayImage.blank(8, 8), LogPolarConfig(r_min=3))


class TestTransform:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(5, 120), st.integers(5, 120), st.integers(0, 255))
    def test_uniform_input(self, w, h, value):
        out = log_polar_transform(GrayImage.blank(w, h, value=value))
        assert np.all(out.pixels == value)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(5, 200), st.integers(5, 200), st.sampled_from([2, 3]))
    def test_grid_stays_in_frame(self, w, h, base):
        xs, ys = sample_grid(w, h, LogPolarConfig(base=base))
        assert xs.min() >= 0 and xs.max() < w
        assert ys.min() >= 0 and ys.max() < h

    def test_row_zero_samples_inner_ring(self):
        xs, ys = sample_grid(92, 112, LogPolarConfig())
        dist = np.hypot(xs - 46, ys - 56)
        assert dist[0].max() <= 1.5
        assert np.all(np.abs(dist[-1] - 45) <= 1.0)

    def test_column_zero_points_along_positive_x(self):
        xs, ys = sample_grid(92, 112, LogPolarConfig())
        assert np.all(ys[:, 0] == 56)
        assert np.all(np.diff(xs[:, 0]) >= 0)

    def test_reads_pixel_at_row_y_column_x(self):
        pixels = np.zeros((112, 92), dtype=np.uint8)
        pixels[56, 46 + 45] = 255  # rim on the positive x axis
        out = log_polar_transform(GrayImage(pixels))
        assert out.pixels[-1, 0] == 255

    def test_rotation_is_column_shift(self, faces):
        img = faces[0]
        base = log_polar_transform(img)
        rotated = log_polar_transform(rotate_nearest(img, 90))
        diff = np.abs(rotated.pixels.astype(float) - column_shift(base, 16).pixels)
        assert diff.mean() <= 10

    def test_scale_is_row_shift_free_with_scaled_cutoff(self, faces):
        img = faces[2]
        base = log_polar_transform(img)
        up = resize_nearest(img, img.width * 2, img.height * 2)
        out = log_polar_transform(up, LogPolarConfig(size=64).scaled(2))
        assert np.abs(out.pixels.astype(float) - base.pixels).mean() <= 10


def test_column_shift_wraps():
    img = GrayImage.from_rows([[1, 2, 3, 4]])
    assert column_shift(img, 1) == GrayImage.from_rows([[4, 1, 2, 3]])
    assert column_shift(img, -4) == img
