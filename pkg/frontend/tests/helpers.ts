/** Test fixtures and a direct-fetch reference script for the live service. */

export const TEST_BASE = "http://127.0.0.1:8931";

function nrrdHeader(nx: number, ny: number, nz: number): string {
  return (
    "NRRD0004\n" +
    "dimension: 3\n" +
    `sizes: ${nx} ${ny} ${nz}\n` +
    "type: float\n" +
    "encoding: raw\n" +
    "endian: little\n" +
    "spacings: 1 1 1\n" +
    "space origin: (0,0,0)\n" +
    "\n"
  );
}

export function floatVolumeNrrd(
  nx: number,
  ny: number,
  nz: number,
  value: (x: number, y: number, z: number) => number,
): Uint8Array {
  const header = new TextEncoder().encode(nrrdHeader(nx, ny, nz));
  const data = new Float32Array(nx * ny * nz);
  let i = 0;
  for (let z = 0; z < nz; z++) {
    for (let y = 0; y < ny; y++) {
      for (let x = 0; x < nx; x++) {
        data[i++] = value(x, y, z);
      }
    }
  }
  const out = new Uint8Array(header.length + data.byteLength);
  out.set(header, 0);
  out.set(new Uint8Array(data.buffer), header.length);
  return out;
}

/** Bright sphere (value 100) on a dark background, center at size//2. */
export function spherePhantomNrrd(size: number, radius: number): Uint8Array {
  const c = Math.floor(size / 2);
  return floatVolumeNrrd(size, size, size, (x, y, z) => {
    const d2 = (x - c) ** 2 + (y - c) ** 2 + (z - c) ** 2;
    return d2 <= radius * radius ? 100 : 0;
  });
}

/** Linear ramp with non-integral f32 values to exercise display rounding. */
export function rampFixtureNrrd(nx = 64, ny = 32): Uint8Array {
  return floatVolumeNrrd(nx, ny, 1, (x, y) => Math.fround(x * 0.37 + y * 0.11 - 7.13));
}

export const SCRIPT_SIZE = 32;
export const SCRIPT_RADIUS = 9;

export function scriptStrokes(): Array<Record<string, unknown>> {
  const c = SCRIPT_SIZE / 2;
  const square: Array<[number, number]> = [
    [1, 1],
    [SCRIPT_SIZE - 2, 1],
    [SCRIPT_SIZE - 2, SCRIPT_SIZE - 2],
    [1, SCRIPT_SIZE - 2],
    [1, 1],
  ];
  return [
    { axis: "z", slice_index: c, polyline: [[c, c]], brush_radius_mm: 4.0, label: 1 },
    { axis: "z", slice_index: 1, polyline: square, brush_radius_mm: SCRIPT_SIZE - 1, label: 2 },
    { axis: "z", slice_index: SCRIPT_SIZE - 2, polyline: square, brush_radius_mm: SCRIPT_SIZE - 1, label: 2 },
  ];
}

export interface ScriptOutcome {
  labelBytes: Uint8Array;
  stats: { volume_mm3: number; slice_span: number; revision: number };
}

/** The service-only reference flow: raw fetch calls, no UI code involved. */
export async function runScriptedSessionDirect(base: string): Promise<ScriptOutcome> {
  const create = await fetch(`${base}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/octet-stream" },
    body: spherePhantomNrrd(SCRIPT_SIZE, SCRIPT_RADIUS) as unknown as BodyInit,
  });
  if (create.status !== 201) throw new Error(`create failed: ${create.status}`);
  const sid = (await create.json()).session_id as string;

  for (const stroke of scriptStrokes()) {
    const resp = await fetch(`${base}/sessions/${sid}/strokes`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify([stroke]),
    });
    if (!resp.ok) throw new Error(`strokes failed: ${resp.status}`);
  }

  const seg = await fetch(`${base}/sessions/${sid}/segment`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ worker_count: 4 }),
  });
  if (!seg.ok) throw new Error(`segment failed: ${seg.status}`);

  for (const op of ["dilate", "erode", "erode"]) {
    const resp = await fetch(`${base}/sessions/${sid}/morph`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ops: [op], connectivity: 6 }),
    });
    if (!resp.ok) throw new Error(`morph failed: ${resp.status}`);
  }

  const label = await fetch(`${base}/sessions/${sid}/label`);
  const stats = await fetch(`${base}/sessions/${sid}/stats`);
  return {
    labelBytes: new Uint8Array(await label.arrayBuffer()),
    stats: await stats.json(),
  };
}
