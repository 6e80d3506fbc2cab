"""Binary morphology for mask refinement: dilate, erode, island removal.

All operations treat out-of-bounds neighbors as background, so erosion eats
mask voxels touching the volume edge and dilation never wraps.  Connected
components are numbered 1..K in order of first encounter in flat (x-fastest)
scan order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyMask, UnknownOperation
from .grid import LabelVolume, like_labels, require_binary

_CONNECTIVITY_RANK = {6: 1, 18: 2, 26: 3}


@dataclass(frozen=True)
class StructuringElement:
    """Radius-1 neighborhood: 6 (faces), 18 (+edges) or 26 (+corners)."""

    connectivity: int = 6

    def __post_init__(self):
        if self.connectivity not in _CONNECTIVITY_RANK:
            raise ValueError(f"connectivity must be one of {sorted(_CONNECTIVITY_RANK)}")

    @property
    def structure(self) -> np.ndarray:
        return ndimage.generate_binary_structure(3, _CONNECTIVITY_RANK[self.connectivity])


def dilate(mask: LabelVolume, se: StructuringElement = StructuringElement(), iterations: int = 1) -> LabelVolume:
    """Voxel becomes 1 if it or any neighbor was 1, repeated ``iterations`` times."""
    if iterations < 1:
        raise ValueError("iterations must be positive")
    arr = require_binary(mask)
    out = ndimage.binary_dilation(arr, structure=se.structure, iterations=iterations, border_value=0)
    return like_labels(mask, out)


def erode(mask: LabelVolume, se: StructuringElement = StructuringElement(), iterations: int = 1) -> LabelVolume:
    """Voxel stays 1 only if it and all neighbors were 1, repeated ``iterations`` times."""
    if iterations < 1:
        raise ValueError("iterations must be positive")
    arr = require_binary(mask)
    out = ndimage.binary_erosion(arr, structure=se.structure, iterations=iterations, border_value=0)
    return like_labels(mask, out)


@dataclass
class ComponentLabeling:
    """Per-voxel component ids (0 = background) and per-component voxel counts.

    ``counts[k - 1]`` is the size of component ``k``.
    """

    ids: np.ndarray  # (nz, ny, nx) int32
    counts: np.ndarray  # (K,) int64

    @property
    def n_components(self) -> int:
        return len(self.counts)


def connected_components(mask: LabelVolume, se: StructuringElement = StructuringElement()) -> ComponentLabeling:
    arr = require_binary(mask)
    raw, n = ndimage.label(arr, structure=se.structure)
    if n == 0:
        return ComponentLabeling(ids=np.zeros(arr.shape, np.int32), counts=np.zeros(0, np.int64))
    # Renumber so ids follow first encounter in flat scan order regardless of
    # how the underlying labeling pass numbered them.
    flat = raw.ravel()
    first_seen = np.full(n + 1, flat.size, np.int64)
    nz_pos = np.flatnonzero(flat)
    np.minimum.at(first_seen, flat[nz_pos], nz_pos)
    order = np.argsort(first_seen[1:], kind="stable")  # old id-1 -> rank
    remap = np.zeros(n + 1, np.int32)
    remap[order + 1] = np.arange(1, n + 1, dtype=np.int32)
    ids = remap[raw]
    counts = np.bincount(ids.ravel(), minlength=n + 1)[1:].astype(np.int64)
    return ComponentLabeling(ids=ids, counts=counts)


def remove_islands(
    mask: LabelVolume,
    se: StructuringElement = StructuringElement(),
    policy: str = "keep-largest",
    min_size: int | None = None,
) -> LabelVolume:
    """Drop components per policy: ``keep-largest`` or ``min-size`` (count >= n).

    keep-largest ties resolve to the smaller component id.
    """
    comp = connected_components(mask, se)
    if policy == "keep-largest":
        if comp.n_components == 0:
            raise EmptyMask("keep-largest needs at least one component")
        keep = int(np.argmax(comp.counts)) + 1  # argmax returns first (smallest id) on ties
        out = comp.ids == keep
    elif policy == "min-size":
        if min_size is None or min_size < 0:
            raise ValueError("min-size policy requires a non-negative n")
        keep_ids = np.flatnonzero(comp.counts >= min_size) + 1
        out = np.isin(comp.ids, keep_ids)
    else:
        raise UnknownOperation(f"unknown island-removal policy: {policy!r}")
    return like_labels(mask, out)


def apply_pipeline(mask: LabelVolume, ops: list[str], connectivity: int = 6) -> LabelVolume:
    """Apply a comma-list of op tokens left to right.

    Tokens: ``dilate``, ``erode``, ``keep-largest``, ``min-size=N``.
    """
    se = StructuringElement(connectivity)
    out = mask
    for token in ops:
        token = token.strip()
        if token == "dilate":
            out = dilate(out, se)
        elif token == "erode":
            out = erode(out, se)
        elif token == "keep-largest":
            out = remove_islands(out, se, policy="keep-largest")
        elif token.startswith("min-size="):
            try:
                n = int(token.split("=", 1)[1])
            except ValueError:
                raise UnknownOperation(f"bad op token: {token!r}") from None
            out = remove_islands(out, se, policy="min-size", min_size=n)
        else:
            raise UnknownOperation(f"unknown op token: {token!r}")
    return out
