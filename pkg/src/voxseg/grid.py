"""Voxel-grid data model: intensity volumes, label maps, strength fields.

Array data is stored C-contiguous and indexed ``[z, y, x]`` so the flat
(raveled) order is x-fastest, matching the raw payload order of the file
format.  ``dims`` is reported in header order ``(nx, ny, nz)``; ``spacing``
is mm per voxel along (x, y, z); ``origin`` is the physical position (mm)
of the center of voxel (0, 0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, IndexOutOfBounds, NonBinaryMask

SCALAR_KINDS = {
    "u8": np.dtype(np.uint8),
    "i16": np.dtype(np.int16),
    "u16": np.dtype(np.uint16),
    "f32": np.dtype(np.float32),
}

# Tolerances for deciding whether two grids share a lattice: headers that
# round-trip through text must still compare equal.
SPACING_RTOL = 1e-6
ORIGIN_ATOL_MM = 1e-6


def _check_grid_fields(data: np.ndarray, spacing, origin) -> None:
    if data.ndim != 3:
        raise ValueError(f"volume data must be 3-dimensional, got {data.ndim}D")
    if len(spacing) != 3 or len(origin) != 3:
        raise ValueError("spacing and origin must each have 3 components")
    if any(s <= 0 for s in spacing):
        raise ValueError(f"spacing components must be positive, got {spacing}")


@dataclass(eq=False)
class ScalarVolume:
    """3D intensity grid with physical spacing and origin."""

    data: np.ndarray  # (nz, ny, nx), dtype per scalar_kind
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    scalar_kind: str = "f32"

    def __post_init__(self):
        if self.scalar_kind not in SCALAR_KINDS:
            raise ValueError(f"unknown scalar_kind {self.scalar_kind!r}")
        self.spacing = tuple(float(s) for s in self.spacing)
        self.origin = tuple(float(o) for o in self.origin)
        self.data = np.ascontiguousarray(self.data, dtype=SCALAR_KINDS[self.scalar_kind])
        _check_grid_fields(self.data, self.spacing, self.origin)

    @property
    def dims(self) -> tuple[int, int, int]:
        nz, ny, nx = self.data.shape
        return (nx, ny, nz)


@dataclass(eq=False)
class LabelVolume:
    """3D label grid on the same lattice conventions as ScalarVolume.

    Label 0 is reserved for "unlabeled"; 1 is the foreground class and 2 the
    background class by convention, but any uint8 id is allowed.
    """

    labels: np.ndarray  # (nz, ny, nx) uint8
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        self.spacing = tuple(float(s) for s in self.spacing)
        self.origin = tuple(float(o) for o in self.origin)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.uint8)
        _check_grid_fields(self.labels, self.spacing, self.origin)

    @property
    def dims(self) -> tuple[int, int, int]:
        nz, ny, nx = self.labels.shape
        return (nx, ny, nz)


@dataclass(eq=False)
class StrengthField:
    """Per-voxel confidence in [0, 1] driving the cellular automaton."""

    values: np.ndarray  # (nz, ny, nx) float64
    spacing: tuple[float, float, float]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        self.spacing = tuple(float(s) for s in self.spacing)
        self.origin = tuple(float(o) for o in self.origin)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        _check_grid_fields(self.values, self.spacing, self.origin)

    @property
    def dims(self) -> tuple[int, int, int]:
        nz, ny, nx = self.values.shape
        return (nx, ny, nz)


GridLike = ScalarVolume | LabelVolume | StrengthField


def grid_array(vol: GridLike) -> np.ndarray:
    """Return the backing (nz, ny, nx) array of any volume type."""
    for attr in ("data", "labels", "values"):
        arr = getattr(vol, attr, None)
        if arr is not None:
            return arr
    raise TypeError(f"not a volume type: {type(vol).__name__}")


def grids_compatible(a: GridLike, b: GridLike) -> bool:
    if a.dims != b.dims:
        return False
    for sa, sb in zip(a.spacing, b.spacing):
        if abs(sa - sb) > SPACING_RTOL * max(abs(sa), abs(sb)):
            return False
    return all(abs(oa - ob) <= ORIGIN_ATOL_MM for oa, ob in zip(a.origin, b.origin))


def ensure_grid_compatible(a: GridLike, b: GridLike) -> None:
    if not grids_compatible(a, b):
        raise GridMismatch(
            f"grids differ: dims {a.dims} vs {b.dims}, "
            f"spacing {a.spacing} vs {b.spacing}, origin {a.origin} vs {b.origin}"
        )


def voxel_center_mm(vol: GridLike, index: tuple[int, int, int]) -> tuple[float, float, float]:
    """Physical coordinates (mm) of the center of the voxel at (x, y, z)."""
    dims = vol.dims
    for i, n in zip(index, dims):
        if not 0 <= i < n:
            raise IndexOutOfBounds(f"index {tuple(index)} outside dims {dims}")
    return tuple(o + i * s for o, i, s in zip(vol.origin, index, vol.spacing))


def require_binary(mask: LabelVolume) -> np.ndarray:
    """Return the mask as a bool array; reject labels outside {0, 1}."""
    arr = mask.labels
    if arr.max(initial=0) > 1:
        raise NonBinaryMask(f"mask contains labels other than 0/1 (max={int(arr.max())})")
    return arr.astype(bool)


def like_labels(template: GridLike, labels: np.ndarray) -> LabelVolume:
    """A LabelVolume on the same lattice as ``template``."""
    return LabelVolume(labels=labels.astype(np.uint8), spacing=template.spacing, origin=template.origin)
