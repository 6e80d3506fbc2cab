"""Brute-force reference implementations used as test oracles.

Deliberately slow and independent of the library code paths they check.
"""

from __future__ import annotations

import numpy as np

_OFFSETS = {
    6: [(dz, dy, dx) for dz in (-1, 0, 1) for dy in (-1, 0, 1) for dx in (-1, 0, 1)
        if abs(dz) + abs(dy) + abs(dx) == 1],
    18: [(dz, dy, dx) for dz in (-1, 0, 1) for dy in (-1, 0, 1) for dx in (-1, 0, 1)
         if 1 <= abs(dz) + abs(dy) + abs(dx) <= 2],
    26: [(dz, dy, dx) for dz in (-1, 0, 1) for dy in (-1, 0, 1) for dx in (-1, 0, 1)
         if not dz == dy == dx == 0],
}


def brute_dilate(mask: np.ndarray, connectivity: int, iterations: int = 1) -> np.ndarray:
    out = mask.astype(bool).copy()
    nz, ny, nx = out.shape
    for _ in range(iterations):
        cur = out.copy()
        for z in range(nz):
            for y in range(ny):
                for x in range(nx):
                    if cur[z, y, x]:
                        continue
                    for dz, dy, dx in _OFFSETS[connectivity]:
                        zz, yy, xx = z + dz, y + dy, x + dx
                        if 0 <= zz < nz and 0 <= yy < ny and 0 <= xx < nx and cur[zz, yy, xx]:
                            out[z, y, x] = True
                            break
    return out


def brute_erode(mask: np.ndarray, connectivity: int, iterations: int = 1) -> np.ndarray:
    out = mask.astype(bool).copy()
    nz, ny, nx = out.shape
    for _ in range(iterations):
        cur = out.copy()
        for z in range(nz):
            for y in range(ny):
                for x in range(nx):
                    if not cur[z, y, x]:
                        continue
                    for dz, dy, dx in _OFFSETS[connectivity]:
                        zz, yy, xx = z + dz, y + dy, x + dx
                        if not (0 <= zz < nz and 0 <= yy < ny and 0 <= xx < nx) or not cur[zz, yy, xx]:
                            out[z, y, x] = False
                            break
    return out


def brute_boundary_points(mask: np.ndarray, spacing, origin=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Centers (mm) of mask voxels with a background or out-of-bounds 6-neighbor."""
    nz, ny, nx = mask.shape
    pts = []
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if not mask[z, y, x]:
                    continue
                for dz, dy, dx in _OFFSETS[6]:
                    zz, yy, xx = z + dz, y + dy, x + dx
                    if not (0 <= zz < nz and 0 <= yy < ny and 0 <= xx < nx) or not mask[zz, yy, xx]:
                        pts.append((origin[0] + x * spacing[0],
                                    origin[1] + y * spacing[1],
                                    origin[2] + z * spacing[2]))
                        break
    return np.asarray(pts, dtype=np.float64)


def brute_directed_hausdorff(pa: np.ndarray, pb: np.ndarray) -> float:
    """max over a of min over b of ||a - b||, O(|A|*|B|)."""
    worst = 0.0
    for a in pa:
        best = np.inf
        for b in pb:
            d = np.sqrt(((a - b) ** 2).sum())
            if d < best:
                best = d
        if best > worst:
            worst = best
    return float(worst)


def brute_macdonald(mask: np.ndarray, spacing, axis: str) -> float:
    """Max over slices of (largest chord) * (extent perpendicular to it)."""
    ax = {"x": 2, "y": 1, "z": 0}[axis]
    sx, sy, sz = spacing
    plane_spacing = {0: (sx, sy), 1: (sx, sz), 2: (sy, sz)}[ax]
    best = 0.0
    for k in range(mask.shape[ax]):
        plane = np.take(mask, k, axis=ax)
        vu = np.argwhere(plane)
        if len(vu) < 2:
            continue
        pts = np.stack([vu[:, 1] * plane_spacing[0], vu[:, 0] * plane_spacing[1]], axis=1).astype(float)
        d1 = 0.0
        pair = None
        n = len(pts)
        for i in range(n):
            for j in range(i + 1, n):
                d = np.sqrt(((pts[i] - pts[j]) ** 2).sum())
                if d > d1:
                    d1 = d
                    pair = (i, j)
        if pair is None or d1 == 0.0:
            continue
        chord = (pts[pair[1]] - pts[pair[0]]) / d1
        perp = np.array([-chord[1], chord[0]])
        proj = pts @ perp
        best = max(best, d1 * float(proj.max() - proj.min()))
    return best
