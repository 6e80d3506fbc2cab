/** Pixel conversion helpers.  The displayed value for every voxel comes
 * from the server's raw windowed bytes; the only client-side math is
 * copying those bytes into RGBA buffers (plus the overlay palette). */

// Matches the service palette: 0 transparent, 1 green, 2 yellow, then extras.
export const LABEL_COLORS: Array<[number, number, number]> = [
  [0, 0, 0],
  [0, 255, 0],
  [255, 255, 0],
  [255, 0, 0],
  [0, 128, 255],
  [255, 0, 255],
  [0, 255, 255],
  [255, 128, 0],
];

export const OVERLAY_ALPHA = 128;

export function grayscaleRGBA(display: Uint8Array): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(display.length * 4);
  for (let i = 0; i < display.length; i++) {
    const v = display[i];
    out[i * 4] = v;
    out[i * 4 + 1] = v;
    out[i * 4 + 2] = v;
    out[i * 4 + 3] = 255;
  }
  return out;
}

export function labelOverlayRGBA(labels: Uint8Array): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(labels.length * 4);
  for (let i = 0; i < labels.length; i++) {
    const id = labels[i];
    if (id === 0) continue; // transparent
    const [r, g, b] = LABEL_COLORS[id % LABEL_COLORS.length];
    out[i * 4] = r;
    out[i * 4 + 1] = g;
    out[i * 4 + 2] = b;
    out[i * 4 + 3] = OVERLAY_ALPHA;
  }
  return out;
}

/** Mirror of the service's window/level rule, used by tests to check the
 * displayed bytes; rendering itself never recomputes intensities. */
export function windowDisplay(value: number, window: number, level: number): number {
  let d = (value - (level - window / 2)) / window;
  if (d < 0) d = 0;
  if (d > 1) d = 1;
  return Math.floor(d * 255 + 0.5);
}
