"""Segmentation agreement metrics on binary masks.

DSC = 2*V(A intersect R) / (V(A) + V(R)); the voxel-volume factor cancels on
a shared grid, so voxel counts suffice.  The Hausdorff distance is computed
in mm between the centers of boundary voxels: a voxel is boundary when it is
foreground and at least one 6-neighbor is background or out of bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import BothEmpty, EmptyMask, TooFewValues
from .grid import LabelVolume, ensure_grid_compatible, require_binary


def dice(a: LabelVolume, r: LabelVolume) -> float:
    """Relative volume overlap of two binary masks, in [0, 1]."""
    ensure_grid_compatible(a, r)
    am = require_binary(a)
    rm = require_binary(r)
    na = int(np.count_nonzero(am))
    nr = int(np.count_nonzero(rm))
    if na == 0 and nr == 0:
        raise BothEmpty("dice undefined for two empty masks")
    overlap = int(np.count_nonzero(am & rm))
    return 2.0 * overlap / (na + nr)


@dataclass
class BoundaryPointSet:
    """Physical coordinates (mm) of mask boundary voxel centers, (n, 3) x/y/z."""

    points: np.ndarray


def boundary_points(mask: LabelVolume) -> BoundaryPointSet:
    arr = require_binary(mask)
    if not arr.any():
        raise EmptyMask("boundary of an empty mask")
    six = ndimage.generate_binary_structure(3, 1)
    interior = ndimage.binary_erosion(arr, structure=six, border_value=0)
    boundary = arr & ~interior
    zyx = np.argwhere(boundary)
    sx, sy, sz = mask.spacing
    ox, oy, oz = mask.origin
    pts = np.empty((len(zyx), 3), np.float64)
    pts[:, 0] = ox + zyx[:, 2] * sx
    pts[:, 1] = oy + zyx[:, 1] * sy
    pts[:, 2] = oz + zyx[:, 0] * sz
    return BoundaryPointSet(points=pts)


@dataclass
class HausdorffDistances:
    """Directed distances h(A,R), h(R,A) and their maximum, all in mm."""

    h_ar: float
    h_ra: float
    h_sym: float


def hausdorff(a: LabelVolume, r: LabelVolume) -> HausdorffDistances:
    """Directed and symmetric Hausdorff distance between boundary point sets."""
    ensure_grid_compatible(a, r)
    pa = boundary_points(a).points
    pr = boundary_points(r).points
    h_ar = float(cKDTree(pr).query(pa, k=1)[0].max())
    h_ra = float(cKDTree(pa).query(pr, k=1)[0].max())
    return HausdorffDistances(h_ar=h_ar, h_ra=h_ra, h_sym=max(h_ar, h_ra))


@dataclass
class AgreementStats:
    """min/max/mean/sample standard deviation of a list of agreement scores."""

    minimum: float
    maximum: float
    mean: float
    stddev: float


def aggregate_stats(values) -> AgreementStats:
    vals = np.asarray(list(values), dtype=np.float64)
    if len(vals) < 2:
        raise TooFewValues("need at least two values")
    return AgreementStats(
        minimum=float(vals.min()),
        maximum=float(vals.max()),
        mean=float(vals.mean()),
        stddev=float(vals.std(ddof=1)),
    )


def _max_pair_distance(pts: np.ndarray) -> tuple[float, int, int]:
    """Largest pairwise distance and its (i, j) pair, i < j.

    Ties resolve to the lexicographically smallest (i, j) in point order.
    Points on the convex hull are enough candidates once the set is large.
    """
    n = len(pts)
    cand = np.arange(n)
    if n > 400:
        try:
            from scipy.spatial import ConvexHull

            cand = np.sort(np.asarray(ConvexHull(pts).vertices))
        except Exception:  # degenerate (collinear) input: fall through to brute force
            cand = np.arange(n)
    sub = pts[cand]
    diff = sub[:, None, :] - sub[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    best = dist.max()
    ii, jj = np.unravel_index(int(np.argmax(dist >= best)), dist.shape)
    i, j = int(cand[ii]), int(cand[jj])
    if i > j:
        i, j = j, i
    return float(best), i, j


def macdonald_product(mask: LabelVolume, axis: str = "z") -> float:
    """Largest (slice diameter x perpendicular extent) over slices, in mm^2.

    For each slice perpendicular to ``axis``: d1 is the largest pairwise
    distance between foreground voxel centers in the plane, d2 the extent of
    the foreground projected on the in-plane direction perpendicular to the
    d1 chord.
    """
    arr = require_binary(mask)
    if not arr.any():
        raise EmptyMask("bidimensional product of an empty mask")
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    ax = {"x": 2, "y": 1, "z": 0}[axis]  # array axis (z,y,x order)
    sx, sy, sz = mask.spacing
    inplane_spacing = {
        0: (sx, sy),  # slice along z: plane coords (x, y)
        1: (sx, sz),  # slice along y: plane coords (x, z)
        2: (sy, sz),  # slice along x: plane coords (y, z)
    }[ax]
    best = 0.0
    for k in range(arr.shape[ax]):
        plane = np.take(arr, k, axis=ax)
        vu = np.argwhere(plane)  # rows are the two remaining array axes, slow-first
        if len(vu) == 0:
            continue
        pts = np.empty((len(vu), 2), np.float64)
        pts[:, 0] = vu[:, 1] * inplane_spacing[0]
        pts[:, 1] = vu[:, 0] * inplane_spacing[1]
        if len(pts) == 1:
            continue
        d1, i, j = _max_pair_distance(pts)
        if d1 == 0.0:
            continue
        chord = (pts[j] - pts[i]) / d1
        perp = np.array([-chord[1], chord[0]])
        proj = pts @ perp
        d2 = float(proj.max() - proj.min())
        best = max(best, d1 * d2)
    return best
