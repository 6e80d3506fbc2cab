export type Axis = "x" | "y" | "z";
export type ViewName = "axial" | "sagittal" | "coronal";
export type Layer = "image" | "label";
export type Tool = "paint-fg" | "paint-bg" | "erase";
export type RefineOp = "dilate" | "erode" | "keep-largest";

export interface SessionInfo {
  session_id: string;
  dims: [number, number, number]; // (nx, ny, nz)
  spacing: [number, number, number];
  intensity_range: [number, number];
}

export interface Stroke {
  axis: Axis;
  slice_index: number;
  polyline: Array<[number, number]>;
  brush_radius_mm: number;
  label: number;
}

export interface StrokeResult {
  revision: number;
  labeled_voxel_count: number;
}

export interface RunSummary {
  iterations: number;
  converged: boolean;
  roi: { lo: [number, number, number]; hi: [number, number, number] };
  elapsed: Record<string, number>;
}

export interface MorphResult {
  revision: number;
  volume_mm3: number;
}

export interface SessionStats {
  volume_mm3: number;
  slice_span: number;
  iterations: number;
  elapsed: Record<string, number>;
  revision: number;
}

export interface RawSlice {
  width: number;
  height: number;
  revision: number;
  bytes: Uint8Array;
}

/** Screen plane of each view: which volume axis is sliced, and which axes
 * span the plane's u (columns) and v (rows) directions.  Mirrors the
 * service's slice extraction exactly. */
export const VIEW_GEOMETRY: Record<ViewName, { axis: Axis; uAxis: 0 | 1 | 2; vAxis: 0 | 1 | 2 }> = {
  axial: { axis: "z", uAxis: 0, vAxis: 1 }, // u = x, v = y
  coronal: { axis: "y", uAxis: 0, vAxis: 2 }, // u = x, v = z
  sagittal: { axis: "x", uAxis: 1, vAxis: 2 }, // u = y, v = z
};
