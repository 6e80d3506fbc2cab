import type {
  Axis,
  Layer,
  MorphResult,
  RawSlice,
  RunSummary,
  SessionInfo,
  SessionStats,
  Stroke,
  StrokeResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function raise(resp: Response): Promise<never> {
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, message);
}

export interface SliceParams {
  axis: Axis;
  index: number;
  layer?: Layer;
  window?: number;
  level?: number;
}

/** Thin typed wrapper over the segmentation service HTTP API.
 * All volume math happens server-side; this client only moves bytes. */
export class SessionClient {
  constructor(private baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async createSession(nrrd: Uint8Array): Promise<SessionInfo> {
    const resp = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/octet-stream" },
      body: nrrd as unknown as BodyInit,
    });
    if (resp.status !== 201) await raise(resp);
    return resp.json();
  }

  async postStrokes(sessionId: string, strokes: Stroke[]): Promise<StrokeResult> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/strokes`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(strokes),
    });
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async segment(sessionId: string, overrides: Record<string, unknown> = {}): Promise<RunSummary> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/segment`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(overrides),
    });
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async morph(sessionId: string, ops: string[], connectivity = 6): Promise<MorphResult> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/morph`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ops, connectivity }),
    });
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async stats(sessionId: string): Promise<SessionStats> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/stats`));
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async sliceRaw(sessionId: string, params: SliceParams): Promise<RawSlice> {
    const q = new URLSearchParams({
      axis: params.axis,
      index: String(params.index),
      layer: params.layer ?? "image",
      format: "raw",
    });
    if (params.window !== undefined) q.set("window", String(params.window));
    if (params.level !== undefined) q.set("level", String(params.level));
    const resp = await fetch(this.url(`/sessions/${sessionId}/slice?${q}`));
    if (!resp.ok) await raise(resp);
    const bytes = new Uint8Array(await resp.arrayBuffer());
    return {
      width: Number(resp.headers.get("X-Slice-Width")),
      height: Number(resp.headers.get("X-Slice-Height")),
      revision: Number(resp.headers.get("X-Revision")),
      bytes,
    };
  }

  async downloadLabel(sessionId: string): Promise<Uint8Array> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/label`));
    if (!resp.ok) await raise(resp);
    return new Uint8Array(await resp.arrayBuffer());
  }
}
