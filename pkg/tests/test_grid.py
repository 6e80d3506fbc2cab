import numpy as np
import pytest

from voxseg import (
    GridMismatch,
    IndexOutOfBounds,
    LabelVolume,
    ScalarVolume,
    ensure_grid_compatible,
    grids_compatible,
    voxel_center_mm,
)


def _vol(spacing=(1, 1, 1), origin=(0, 0, 0), shape=(5, 5, 5)):
    return ScalarVolume(data=np.zeros(shape, np.float32), spacing=spacing, origin=origin)


def test_voxel_center_identity_spacing():
    assert voxel_center_mm(_vol(), (3, 0, 0)) == (3.0, 0.0, 0.0)


def test_voxel_center_origin_and_spacing():
    v = _vol(spacing=(2, 1, 1), origin=(10, 0, 0))
    assert voxel_center_mm(v, (3, 0, 0)) == (16.0, 0.0, 0.0)


def test_voxel_center_half_spacing():
    v = _vol(spacing=(0.5, 0.5, 0.5))
    assert voxel_center_mm(v, (1, 1, 1)) == (0.5, 0.5, 0.5)


def test_voxel_center_out_of_bounds():
    with pytest.raises(IndexOutOfBounds):
        voxel_center_mm(_vol(), (5, 0, 0))
    with pytest.raises(IndexOutOfBounds):
        voxel_center_mm(_vol(), (0, -1, 0))


def test_dims_order_is_xyz():
    v = ScalarVolume(data=np.zeros((2, 3, 4), np.float32), spacing=(1, 1, 1))
    assert v.dims == (4, 3, 2)


def test_grid_compat_tolerates_tiny_spacing_noise():
    a = _vol(spacing=(1, 1, 1))
    b = _vol(spacing=(1 + 1e-8, 1, 1))
    assert grids_compatible(a, b)
    c = _vol(spacing=(1 + 1e-4, 1, 1))
    assert not grids_compatible(a, c)
    with pytest.raises(GridMismatch):
        ensure_grid_compatible(a, c)


def test_grid_compat_checks_dims():
    a = _vol(shape=(5, 5, 5))
    b = _vol(shape=(5, 5, 6))
    assert not grids_compatible(a, b)


def test_spacing_must_be_positive():
    with pytest.raises(ValueError):
        _vol(spacing=(0, 1, 1))


def test_label_volume_is_uint8():
    lv = LabelVolume(labels=np.ones((2, 2, 2), np.int64), spacing=(1, 1, 1))
    assert lv.labels.dtype == np.uint8
