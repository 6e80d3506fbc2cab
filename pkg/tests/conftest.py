from __future__ import annotations

import numpy as np
import pytest

from voxseg import GrowCutConfig, LabelVolume, ScalarVolume, growcut_run


def make_mask(shape_zyx, voxels_xyz=(), spacing=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)) -> LabelVolume:
    """A binary LabelVolume with the given (x, y, z) voxels set to 1."""
    arr = np.zeros(shape_zyx, np.uint8)
    for x, y, z in voxels_xyz:
        arr[z, y, x] = 1
    return LabelVolume(labels=arr, spacing=spacing, origin=origin)


def make_scalar(arr, spacing=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)) -> ScalarVolume:
    return ScalarVolume(data=np.asarray(arr, np.float32), spacing=spacing, origin=origin,
                        scalar_kind="f32")


def random_case(rng, lo=10, hi=20, interior_only=False, pin_corners=False):
    """Random intensity volume plus >=2-label random seeds."""
    n = rng.integers(lo, hi + 1, 3)
    img = make_scalar((rng.random((n[2], n[1], n[0])) * 200.0).astype(np.float32))
    lab = np.zeros((n[2], n[1], n[0]), np.uint8)
    pad = 2 if interior_only else 0
    for _ in range(int(rng.integers(2, 8))):
        lab[rng.integers(pad, n[2] - pad), rng.integers(pad, n[1] - pad),
            rng.integers(pad, n[0] - pad)] = rng.integers(1, 4)
    if len(np.unique(lab[lab > 0])) < 2:
        lab[pad, pad, pad] = 1
        lab[n[2] - 1 - pad, n[1] - 1 - pad, n[0] - 1 - pad] = 2
    if pin_corners:
        lab[0, 0, 0] = 1
        lab[-1, -1, -1] = 2
    return img, LabelVolume(labels=lab, spacing=(1.0, 1.0, 1.0))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed tests measure steady state."""
    img = make_scalar(np.zeros((3, 3, 3), np.float32))
    lab = np.zeros((3, 3, 3), np.uint8)
    lab[0, 0, 0] = 1
    lab[2, 2, 2] = 2
    seeds = LabelVolume(labels=lab, spacing=(1.0, 1.0, 1.0))
    growcut_run(img, seeds, GrowCutConfig(worker_count=2))
    from voxseg import growcut_run_naive

    growcut_run_naive(img, seeds)
