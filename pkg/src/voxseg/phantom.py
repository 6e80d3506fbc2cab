"""Synthetic sphere phantoms used as fixtures and acceptance inputs.

The truth mask digitizes the analytic shape by the voxel-center rule: a
voxel is foreground iff its center lies within the radius.  Images are
float32; noise comes from a seeded generator so files are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import LabelVolume, ScalarVolume


@dataclass
class PhantomSpec:
    shape: str = "sphere"
    size: int = 64  # cube edge, voxels
    radius: float = 20.0  # voxels
    inside: float = 100.0
    outside: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.shape != "sphere":
            raise ValueError(f"unknown phantom shape {self.shape!r}")
        if self.size < 2:
            raise ValueError("size must be at least 2")
        if not self.radius < self.size / 2:
            raise ValueError(f"radius {self.radius} must be < size/2 = {self.size / 2}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


def _center_distances(size: int) -> np.ndarray:
    # Center on the voxel at size//2 so odd-diameter spans digitize exactly.
    c = float(size // 2)
    ax = np.arange(size, dtype=np.float64) - c
    z, y, x = np.meshgrid(ax, ax, ax, indexing="ij")
    return np.sqrt(x * x + y * y + z * z)


def sphere_phantom(spec: PhantomSpec) -> tuple[ScalarVolume, LabelVolume]:
    """Image and analytic truth mask for the given spec."""
    dist = _center_distances(spec.size)
    inside = dist <= spec.radius
    img = np.where(inside, np.float32(spec.inside), np.float32(spec.outside))
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        img = img + rng.normal(0.0, spec.noise_sigma, img.shape).astype(np.float32)
    image = ScalarVolume(data=img.astype(np.float32), spacing=spec.spacing, scalar_kind="f32")
    truth = LabelVolume(labels=inside.astype(np.uint8), spacing=spec.spacing)
    return image, truth


def canonical_seeds(size: int, fg_radius: float = 5.0,
                    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)) -> LabelVolume:
    """Center ball labeled 1 plus all six boundary faces labeled 2."""
    dist = _center_distances(size)
    labels = np.zeros((size, size, size), np.uint8)
    labels[dist <= fg_radius] = 1
    labels[0, :, :] = 2
    labels[-1, :, :] = 2
    labels[:, 0, :] = 2
    labels[:, -1, :] = 2
    labels[:, :, 0] = 2
    labels[:, :, -1] = 2
    return LabelVolume(labels=labels, spacing=spacing)
