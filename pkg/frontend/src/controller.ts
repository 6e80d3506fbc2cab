import { ApiError, SessionClient } from "./api.js";
import type {
  RawSlice,
  RefineOp,
  RunSummary,
  SessionInfo,
  SessionStats,
  Stroke,
  StrokeResult,
  Tool,
  ViewName,
} from "./types.js";
import { VIEW_GEOMETRY } from "./types.js";

const TOOL_LABELS: Record<Tool, number> = {
  "paint-fg": 1,
  "paint-bg": 2,
  erase: 0,
};

export interface ViewState {
  sliceIndex: number;
}

export interface UiState {
  sessionId: string | null;
  dims: [number, number, number];
  spacing: [number, number, number];
  views: Record<ViewName, ViewState>;
  window: number;
  level: number;
  tool: Tool;
  brushRadiusMm: number;
  overlayVisible: boolean;
  revision: number;
  hasForeground: boolean;
  hasBackground: boolean;
  volumeMm3: number | null;
  lastRun: RunSummary | null;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    dims: [0, 0, 0],
    spacing: [1, 1, 1],
    views: { axial: { sliceIndex: 0 }, coronal: { sliceIndex: 0 }, sagittal: { sliceIndex: 0 } },
    window: 1,
    level: 0,
    tool: "paint-fg",
    brushRadiusMm: 10, // default brush: 1 cm
    overlayVisible: true,
    revision: 0,
    hasForeground: false,
    hasBackground: false,
    volumeMm3: null,
    lastRun: null,
  };
}

/** One pointer gesture on a view becomes exactly one stroke: the path is
 * in-plane voxel coordinates (u, v); label and radius come from the
 * active tool settings. */
export function buildStroke(
  state: UiState,
  view: ViewName,
  path: Array<[number, number]>,
): Stroke {
  if (path.length === 0) throw new Error("empty gesture");
  const geom = VIEW_GEOMETRY[view];
  return {
    axis: geom.axis,
    slice_index: state.views[view].sliceIndex,
    polyline: path,
    brush_radius_mm: state.brushRadiusMm,
    label: TOOL_LABELS[state.tool],
  };
}

export class UiNotice extends Error {}

/** Drives a segmentation session.  All truth (seeds, results, volumes)
 * lives server-side; this controller only sequences calls and caches the
 * last responses for the DOM layer to draw. */
export class SessionController {
  readonly state: UiState = initialState();

  constructor(private client: SessionClient) {}

  async loadVolume(nrrd: Uint8Array): Promise<SessionInfo> {
    const info = await this.client.createSession(nrrd);
    const s = this.state;
    s.sessionId = info.session_id;
    s.dims = info.dims;
    s.spacing = info.spacing;
    s.views.axial.sliceIndex = Math.floor(info.dims[2] / 2);
    s.views.coronal.sliceIndex = Math.floor(info.dims[1] / 2);
    s.views.sagittal.sliceIndex = Math.floor(info.dims[0] / 2);
    const [lo, hi] = info.intensity_range;
    s.window = hi - lo || 1;
    s.level = (hi + lo) / 2;
    s.hasForeground = false;
    s.hasBackground = false;
    s.volumeMm3 = null;
    s.lastRun = null;
    s.revision = 0;
    return info;
  }

  private sessionId(): string {
    if (!this.state.sessionId) throw new UiNotice("load a volume first");
    return this.state.sessionId;
  }

  setSlice(view: ViewName, index: number): void {
    const geom = VIEW_GEOMETRY[view];
    const axisSize = this.state.dims[{ x: 0, y: 1, z: 2 }[geom.axis]];
    this.state.views[view].sliceIndex = Math.min(Math.max(index, 0), axisSize - 1);
  }

  setTool(tool: Tool): void {
    this.state.tool = tool;
  }

  setWindowLevel(window: number, level: number): void {
    this.state.window = window;
    this.state.level = level;
  }

  canSegment(): boolean {
    return this.state.hasForeground && this.state.hasBackground;
  }

  async paintGesture(view: ViewName, path: Array<[number, number]>): Promise<StrokeResult> {
    const stroke = buildStroke(this.state, view, path);
    const result = await this.client.postStrokes(this.sessionId(), [stroke]);
    this.state.revision = result.revision;
    if (stroke.label === 1) this.state.hasForeground = true;
    if (stroke.label === 2) this.state.hasBackground = true;
    return result;
  }

  async runSegmentation(overrides: Record<string, unknown> = {}): Promise<RunSummary> {
    if (!this.canSegment()) {
      throw new UiNotice("need foreground and background seeds");
    }
    let summary: RunSummary;
    try {
      summary = await this.client.segment(this.sessionId(), overrides);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        throw new UiNotice("need foreground and background seeds");
      }
      throw err;
    }
    this.state.lastRun = summary;
    await this.refreshStats();
    return summary;
  }

  async refine(op: RefineOp): Promise<void> {
    try {
      await this.client.morph(this.sessionId(), [op], 6);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        throw new UiNotice("run a segmentation first");
      }
      throw err;
    }
    await this.refreshStats();
  }

  /** Volume readout comes from the server stats, never from client math. */
  async refreshStats(): Promise<SessionStats> {
    const stats = await this.client.stats(this.sessionId());
    this.state.volumeMm3 = stats.volume_mm3;
    this.state.revision = stats.revision;
    return stats;
  }

  volumeReadout(): string {
    const v = this.state.volumeMm3;
    return v === null ? "-" : `${Math.round(v)} mm³`;
  }

  async fetchSlice(view: ViewName, layer: "image" | "label"): Promise<RawSlice> {
    const geom = VIEW_GEOMETRY[view];
    return this.client.sliceRaw(this.sessionId(), {
      axis: geom.axis,
      index: this.state.views[view].sliceIndex,
      layer,
      window: layer === "image" ? this.state.window : undefined,
      level: layer === "image" ? this.state.level : undefined,
    });
  }

  async downloadLabel(): Promise<Uint8Array> {
    return this.client.downloadLabel(this.sessionId());
  }
}
