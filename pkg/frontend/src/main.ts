import { SessionClient } from "./api.js";
import { SessionController, UiNotice } from "./controller.js";
import { grayscaleRGBA, labelOverlayRGBA } from "./render.js";
import type { RefineOp, Tool, ViewName } from "./types.js";

const client = new SessionClient(window.location.origin);
const controller = new SessionController(client);

const VIEWS: ViewName[] = ["axial", "sagittal", "coronal"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const notice = el<HTMLDivElement>("notice");

function showNotice(text: string): void {
  notice.textContent = text;
  notice.classList.toggle("hidden", text === "");
}

function setBusy(busy: boolean): void {
  document.body.classList.toggle("busy", busy);
  for (const button of document.querySelectorAll("button, input")) {
    (button as HTMLButtonElement).disabled = busy;
  }
  if (!busy) syncControls();
}

function syncControls(): void {
  el<HTMLButtonElement>("run").disabled = !controller.canSegment();
  const noResult = controller.state.lastRun === null;
  for (const op of ["dilate", "erode", "keep-largest"]) {
    el<HTMLButtonElement>(`refine-${op}`).disabled = noResult;
  }
  el<HTMLSpanElement>("volume-readout").textContent = controller.volumeReadout();
  for (const tool of ["paint-fg", "paint-bg", "erase"]) {
    el<HTMLButtonElement>(`tool-${tool}`).classList.toggle(
      "active", controller.state.tool === tool);
  }
}

async function renderView(view: ViewName): Promise<void> {
  if (!controller.state.sessionId) return;
  const image = await controller.fetchSlice(view, "image");
  const base = el<HTMLCanvasElement>(`canvas-${view}`);
  base.width = image.width;
  base.height = image.height;
  const ctx = base.getContext("2d")!;
  ctx.putImageData(new ImageData(grayscaleRGBA(image.bytes), image.width, image.height), 0, 0);

  const overlay = el<HTMLCanvasElement>(`overlay-${view}`);
  overlay.width = image.width;
  overlay.height = image.height;
  const octx = overlay.getContext("2d")!;
  octx.clearRect(0, 0, overlay.width, overlay.height);
  if (controller.state.overlayVisible) {
    const labels = await controller.fetchSlice(view, "label");
    octx.putImageData(
      new ImageData(labelOverlayRGBA(labels.bytes), labels.width, labels.height), 0, 0);
  }
}

async function renderAll(): Promise<void> {
  await Promise.all(VIEWS.map(renderView));
}

function canvasToVoxel(canvas: HTMLCanvasElement, ev: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const u = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const v = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  return [Math.min(Math.max(u - 0.5, 0), canvas.width - 1),
          Math.min(Math.max(v - 0.5, 0), canvas.height - 1)];
}

function wirePainting(view: ViewName): void {
  const overlay = el<HTMLCanvasElement>(`overlay-${view}`);
  let path: Array<[number, number]> | null = null;

  overlay.addEventListener("pointerdown", (ev) => {
    if (!controller.state.sessionId) return;
    overlay.setPointerCapture(ev.pointerId);
    path = [canvasToVoxel(overlay, ev)];
  });
  overlay.addEventListener("pointermove", (ev) => {
    if (path) path.push(canvasToVoxel(overlay, ev));
  });
  overlay.addEventListener("pointerup", async () => {
    if (!path) return;
    const gesture = path;
    path = null;
    try {
      await controller.paintGesture(view, gesture);
      showNotice("");
      await renderView(view);
    } catch (err) {
      showNotice(String(err instanceof Error ? err.message : err));
    }
    syncControls();
  });
}

function wireSlider(view: ViewName): void {
  const slider = el<HTMLInputElement>(`slice-${view}`);
  slider.addEventListener("input", async () => {
    controller.setSlice(view, Number(slider.value));
    await renderView(view);
  });
}

function resetSliders(): void {
  const dims = controller.state.dims;
  const max: Record<ViewName, number> = { axial: dims[2], coronal: dims[1], sagittal: dims[0] };
  for (const view of VIEWS) {
    const slider = el<HTMLInputElement>(`slice-${view}`);
    slider.max = String(max[view] - 1);
    slider.value = String(controller.state.views[view].sliceIndex);
  }
}

async function main(): Promise<void> {
  el<HTMLInputElement>("volume-file").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    setBusy(true);
    try {
      const bytes = new Uint8Array(await file.arrayBuffer());
      const info = await controller.loadVolume(bytes);
      el<HTMLInputElement>("window").value = String(controller.state.window);
      el<HTMLInputElement>("level").value = String(controller.state.level);
      showNotice("");
      resetSliders();
      await renderAll();
      el<HTMLSpanElement>("session-info").textContent =
        `${info.dims.join("×")} @ ${info.spacing.join("/")} mm`;
    } catch (err) {
      showNotice(String(err instanceof Error ? err.message : err));
    } finally {
      setBusy(false);
    }
  });

  for (const tool of ["paint-fg", "paint-bg", "erase"] as Tool[]) {
    el<HTMLButtonElement>(`tool-${tool}`).addEventListener("click", () => {
      controller.setTool(tool);
      syncControls();
    });
  }

  el<HTMLInputElement>("brush-radius").addEventListener("change", (ev) => {
    controller.state.brushRadiusMm = Number((ev.target as HTMLInputElement).value);
  });

  const applyWindowLevel = async () => {
    controller.setWindowLevel(
      Number(el<HTMLInputElement>("window").value),
      Number(el<HTMLInputElement>("level").value));
    await renderAll();
  };
  el<HTMLInputElement>("window").addEventListener("change", applyWindowLevel);
  el<HTMLInputElement>("level").addEventListener("change", applyWindowLevel);

  el<HTMLInputElement>("overlay-visible").addEventListener("change", async (ev) => {
    controller.state.overlayVisible = (ev.target as HTMLInputElement).checked;
    await renderAll();
  });

  el<HTMLButtonElement>("run").addEventListener("click", async () => {
    setBusy(true);
    try {
      const summary = await controller.runSegmentation();
      showNotice(`converged=${summary.converged} in ${summary.iterations} iterations, ` +
        `${(summary.elapsed.total ?? 0).toFixed(2)}s`);
      await renderAll();
    } catch (err) {
      showNotice(err instanceof UiNotice ? err.message : String(err));
    } finally {
      setBusy(false);
    }
  });

  for (const op of ["dilate", "erode", "keep-largest"] as RefineOp[]) {
    el<HTMLButtonElement>(`refine-${op}`).addEventListener("click", async () => {
      setBusy(true);
      try {
        await controller.refine(op);
        showNotice("");
        await renderAll();
      } catch (err) {
        showNotice(err instanceof UiNotice ? err.message : String(err));
      } finally {
        setBusy(false);
      }
    });
  }

  el<HTMLButtonElement>("download").addEventListener("click", async () => {
    try {
      const bytes = await controller.downloadLabel();
      const blob = new Blob([bytes as unknown as BlobPart], { type: "application/octet-stream" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = "label.nrrd";
      link.click();
      URL.revokeObjectURL(link.href);
    } catch (err) {
      showNotice(String(err instanceof Error ? err.message : err));
    }
  });

  for (const view of VIEWS) {
    wirePainting(view);
    wireSlider(view);
  }
  syncControls();
}

main();
