// App wiring: upload, panels, playback loop, viewport + timeline
// interaction. All analysis numbers come from the server; this file
// only moves them onto the screen.

import {
  ApiClient,
  ApiError,
  CollisionsDoc,
  DiffDoc,
  FrameDoc,
  JointCurvesDoc,
  KeyposesDoc,
  PathsDoc,
  PoseClustersDoc,
  SceneObjectDoc,
  SessionDoc,
} from "./api.js";
import { OrbitCamera } from "./project.js";
import { bonesFromParents } from "./skeleton.js";
import { StudioState } from "./state.js";
import { BarDragController, GUTTER, TimelineView } from "./timeline.js";
import { renderViewport, ViewportData } from "./viewport.js";

const api = new ApiClient();
const state = new StudioState();
const camera = new OrbitCamera();

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
};

const viewportCanvas = el<HTMLCanvasElement>("viewport");
const timelineCanvas = el<HTMLCanvasElement>("timeline");
const banner = el<HTMLDivElement>("banner");
const resetButton = el<HTMLButtonElement>("reset-camera");
const frameReadout = el<HTMLSpanElement>("frame-readout");
const timeline = new TimelineView(timelineCanvas);

let bones: { parent: number; child: number }[] = [];
let clusters: PoseClustersDoc | null = null;
let curves: JointCurvesDoc | null = null;
const keyposes = new Map<string, KeyposesDoc>();
let paths: PathsDoc | null = null;
let collisions: CollisionsDoc | null = null;
let diff: DiffDoc | null = null;
let frame: FrameDoc | null = null;
let ghosts: { frame: FrameDoc; distance: number }[] = [];
let scene: SceneObjectDoc[] = [];
let playhead = 0; // fractional local playback position

function showError(err: unknown): void {
  const message =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  state.guidance = message;
  state.touch();
}

function fitCanvas(canvas: HTMLCanvasElement): void {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth;
  const h = canvas.clientHeight;
  if (canvas.width !== w * dpr || canvas.height !== h * dpr) {
    canvas.width = w * dpr;
    canvas.height = h * dpr;
    const ctx = canvas.getContext("2d");
    ctx?.setTransform(dpr, 0, 0, dpr, 0, 0);
  }
}

function timelineExtent(): number {
  const picked = state.selectedClips();
  if (picked.length === 0) return 0;
  if (state.playbackMode === "sequential") {
    return picked.reduce((n, c) => n + c.frames, 0);
  }
  return Math.max(...picked.map((c) => c.offset + c.frames));
}

// -- server fetches, keyed by revision so stale responses drop --------------

async function fetchAnalyses(): Promise<void> {
  if (!state.sessionId) return;
  const revision = state.revision;
  const id = state.sessionId;
  try {
    const [clustersDoc, curvesDoc] = await Promise.all([
      api.poseClusters(id),
      api.jointCurves(id, state.temporalJoint),
    ]);
    if (state.isStale(revision)) return;
    clusters = clustersDoc;
    curves = curvesDoc;
    if (state.spatial.has("paths")) {
      const pathsDoc = await api.paths(id, state.temporalJoint);
      if (state.isStale(revision)) return;
      paths = pathsDoc;
    }
    if (state.spatial.has("keyposes")) {
      for (const clip of state.clips) {
        const doc = await api.keyposes(id, clip.name);
        if (state.isStale(revision)) return;
        keyposes.set(clip.name, doc);
      }
    }
    const collisionsDoc = await api.collisions(id);
    if (state.isStale(revision)) return;
    collisions = collisionsDoc;
  } catch (err) {
    showError(err);
  }
}

async function fetchFrame(): Promise<void> {
  if (!state.sessionId) return;
  const revision = state.revision;
  const id = state.sessionId;
  const t = state.currentFrame;
  try {
    const frameDoc = await api.frame(id, t);
    if (state.isStale(revision) || t !== state.currentFrame) return;
    frame = frameDoc;

    if (state.spatial.has("trace") && state.traceN > 0) {
      const step = Math.max(1, Math.round(state.traceN / 4));
      const wanted: number[] = [];
      for (let d = -state.traceN; d <= state.traceN; d += step) {
        if (d !== 0 && t + d >= 0 && t + d < timelineExtent()) wanted.push(d);
      }
      const docs = await Promise.all(wanted.map((d) => api.frame(id, t + d)));
      if (state.isStale(revision) || t !== state.currentFrame) return;
      ghosts = docs.map((doc, i) => ({ frame: doc, distance: wanted[i] }));
    } else {
      ghosts = [];
    }

    const pair = state.diffPair();
    if (state.cameraLens === "diff" && pair) {
      try {
        const diffDoc = await api.diff(id, pair[0].name, pair[1].name, t);
        if (state.isStale(revision) || t !== state.currentFrame) return;
        diff = diffDoc;
      } catch (err) {
        // a frame where one clip is inactive: keep the last good diff
        if (!(err instanceof ApiError && err.code === "frame_out_of_range")) {
          throw err;
        }
      }
    } else {
      diff = null;
    }
  } catch (err) {
    showError(err);
  }
}

// -- state pushes ------------------------------------------------------------

async function pushRows(): Promise<void> {
  if (!state.sessionId) return;
  try {
    const doc = await api.putTimeline(state.sessionId, {
      rows: state.clips.map((c) => ({ offset: c.offset, selected: c.selected })),
    });
    if (doc.diff_reverted) state.noteDiffReverted();
  } catch (err) {
    showError(err);
  }
}

async function pushLens(patch: Record<string, unknown>): Promise<void> {
  if (!state.sessionId) return;
  try {
    await api.putLens(state.sessionId, patch);
  } catch (err) {
    showError(err);
  }
}

const drag = new BarDragController(
  () => timeline.ppf(state),
  (change) => {
    state.clips[change.row].offset = change.offset;
    state.touch();
    void pushRows().then(fetchFrame);
  },
);

// -- panels ------------------------------------------------------------------

function rebuildClipPanel(): void {
  const list = el<HTMLDivElement>("clip-list");
  list.textContent = "";
  state.clips.forEach((clip, i) => {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = clip.selected;
    box.addEventListener("change", () => {
      state.setSelected(i, box.checked);
      void pushRows().then(() => {
        void fetchFrame();
      });
      render();
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(` ${clip.name} (${clip.frames}f)`));
    list.appendChild(label);
  });
}

function rebuildJointPanel(): void {
  const list = el<HTMLDivElement>("joint-list");
  list.textContent = "";
  state.jointNames.forEach((name, i) => {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.jointFilter.has(i);
    box.addEventListener("change", () => {
      if (box.checked) state.jointFilter.add(i);
      else state.jointFilter.delete(i);
      state.touch();
      void pushLens({ joint_filter: [...state.jointFilter] });
      render();
    });
    label.appendChild(box);
    label.appendChild(document.createTextNode(` ${name}`));
    list.appendChild(label);
  });

  const select = el<HTMLSelectElement>("temporal-joint");
  select.textContent = "";
  state.jointNames.forEach((name, i) => {
    const option = document.createElement("option");
    option.value = String(i);
    option.textContent = name;
    if (i === state.temporalJoint) option.selected = true;
    select.appendChild(option);
  });
}

function rebuildScenePanel(): void {
  const list = el<HTMLDivElement>("scene-list");
  list.textContent = "";
  for (const obj of scene) {
    const row = document.createElement("div");
    row.className = "scene-row";
    row.textContent = `${obj.kind} ${obj.id} `;
    const remove = document.createElement("button");
    remove.textContent = "x";
    remove.addEventListener("click", () => {
      scene = scene.filter((o) => o.id !== obj.id);
      state.touch();
      void pushScene();
    });
    row.appendChild(remove);
    list.appendChild(row);
  }

  const report = el<HTMLDivElement>("collision-list");
  report.textContent = "";
  for (const event of collisions?.events ?? []) {
    const row = document.createElement("div");
    const spans = event.frame_intervals
      .map(([a, b]) => `${a}-${b}`)
      .join(", ");
    row.textContent = `${event.clip}/${event.joint_name} x ${event.object_id}: ${spans}`;
    report.appendChild(row);
  }
}

async function pushScene(): Promise<void> {
  if (!state.sessionId) return;
  try {
    await api.putObjects(state.sessionId, scene);
    collisions = await api.collisions(state.sessionId);
    rebuildScenePanel();
    render();
  } catch (err) {
    showError(err);
  }
}

// -- render ------------------------------------------------------------------

function render(): void {
  fitCanvas(viewportCanvas);
  fitCanvas(timelineCanvas);

  banner.hidden = state.guidance === null;
  banner.textContent = state.guidance ?? "";
  resetButton.hidden = !camera.moved;
  frameReadout.textContent = `frame ${state.currentFrame} / ${Math.max(0, timelineExtent() - 1)}`;

  document.querySelectorAll<HTMLButtonElement>("[data-camera-lens]").forEach((button) => {
    button.classList.toggle("active", button.dataset.cameraLens === state.cameraLens);
  });
  document.querySelectorAll<HTMLInputElement>("[data-spatial]").forEach((box) => {
    box.checked = state.spatial.has(box.dataset.spatial ?? "");
  });

  const ctx = viewportCanvas.getContext("2d");
  if (ctx) {
    const data: ViewportData = {
      frame,
      ghosts,
      keyposes,
      paths,
      diff,
      scene,
      collisions,
    };
    renderViewport(
      ctx,
      viewportCanvas.clientWidth,
      viewportCanvas.clientHeight,
      camera,
      state,
      data,
      bones,
    );
  }

  timeline.render(
    state,
    clusters,
    curves,
    drag.active ? { row: drag.activeRow, dx: drag.previewDx } : null,
  );
}

// -- session loading -----------------------------------------------------------

function adoptDocument(doc: SessionDoc): void {
  state.clips = doc.clips.map((clip, i) => ({
    name: clip.name,
    frames: clip.data.frames.length,
    offset: doc.timeline.rows[i]?.offset ?? 0,
    selected: doc.timeline.rows[i]?.selected ?? true,
  }));
  const joints = doc.clips[0]?.data.skeleton.joints ?? [];
  state.jointNames = joints.map((j) => j.name);
  state.jointFilter = new Set(doc.lens.joint_filter);
  bones = bonesFromParents(joints.map((j) => j.parent));
  state.cameraLens = doc.lens.camera_lens;
  state.spatial = new Set(doc.lens.spatial);
  state.temporalLens = doc.lens.temporal_lens;
  state.temporalJoint = doc.lens.temporal_joint;
  state.traceN = doc.lens.params.trace_n;
  state.keyposeK = doc.lens.params.keypose_k;
  state.fps = doc.timeline.fps;
  state.speed = doc.timeline.speed;
  state.playbackMode = doc.timeline.playback_mode;
  state.currentFrame = doc.timeline.current_frame;
  playhead = state.currentFrame;
  scene = doc.scene;
  state.touch();
}

async function loadSession(files: File[], seed: number | undefined): Promise<void> {
  try {
    const id = await api.createSession(files, seed);
    state.sessionId = id;
    el<HTMLSpanElement>("session-label").textContent = id;
    adoptDocument(await api.document(id));
    camera.setHome();
    rebuildClipPanel();
    rebuildJointPanel();
    rebuildScenePanel();
    await fetchAnalyses();
    await fetchFrame();
    state.clearGuidance();
    render();
  } catch (err) {
    showError(err);
    render();
  }
}

// -- interaction -----------------------------------------------------------

function bindViewport(): void {
  let button = -1;
  let lastX = 0;
  let lastY = 0;

  viewportCanvas.addEventListener("contextmenu", (e) => e.preventDefault());
  viewportCanvas.addEventListener("pointerdown", (e) => {
    button = e.button;
    lastX = e.clientX;
    lastY = e.clientY;
    viewportCanvas.setPointerCapture(e.pointerId);
  });
  viewportCanvas.addEventListener("pointermove", (e) => {
    if (button < 0) return;
    const dx = e.clientX - lastX;
    const dy = e.clientY - lastY;
    lastX = e.clientX;
    lastY = e.clientY;
    if (button === 2) camera.pan(dx, dy); // right: pan
    else camera.orbit(-dx * 0.008, dy * 0.008); // left: rotate
    render();
  });
  viewportCanvas.addEventListener("pointerup", () => {
    button = -1;
  });
  viewportCanvas.addEventListener(
    "wheel",
    (e) => {
      e.preventDefault();
      camera.zoom(Math.exp(e.deltaY * 0.001));
      render();
    },
    { passive: false },
  );
  resetButton.addEventListener("click", () => {
    camera.reset();
    render();
  });
}

function bindTimeline(): void {
  timelineCanvas.addEventListener("pointerdown", (e) => {
    const rect = timelineCanvas.getBoundingClientRect();
    const x = e.clientX - rect.left;
    const y = e.clientY - rect.top;
    const row = timeline.hitBar(state, x, y);
    if (row >= 0) {
      drag.begin(row, state.clips[row].offset, x);
      timelineCanvas.setPointerCapture(e.pointerId);
    } else {
      scrub(x);
    }
  });
  timelineCanvas.addEventListener("pointermove", (e) => {
    if (!drag.active) return;
    const rect = timelineCanvas.getBoundingClientRect();
    drag.move(e.clientX - rect.left);
    renderDrag();
  });
  timelineCanvas.addEventListener("pointerup", (e) => {
    if (!drag.active) return;
    const rect = timelineCanvas.getBoundingClientRect();
    drag.end(e.clientX - rect.left);
    render();
  });

  function renderDrag(): void {
    // redraw with the dragged bar tracking the pointer
    fitCanvas(timelineCanvas);
    timeline.render(state, clusters, curves, {
      row: drag.activeRow,
      dx: drag.previewDx,
    });
  }
}

function scrub(x: number): void {
  const ppf = timeline.ppf(state);
  if (ppf <= 0) return;
  const frameAt = Math.round((x - GUTTER) / ppf);
  state.currentFrame = Math.max(0, Math.min(frameAt, Math.max(0, timelineExtent() - 1)));
  playhead = state.currentFrame;
  state.touch();
  void fetchFrame().then(render);
}

function bindControls(): void {
  el<HTMLButtonElement>("play").addEventListener("click", () => {
    state.playing = !state.playing;
    el<HTMLButtonElement>("play").textContent = state.playing ? "pause" : "play";
    if (!state.playing && state.sessionId) {
      void api
        .putTimeline(state.sessionId, { current_frame: state.currentFrame })
        .catch(showError);
    }
  });
  el<HTMLSelectElement>("speed").addEventListener("change", (e) => {
    state.speed = Number((e.target as HTMLSelectElement).value);
  });
  el<HTMLSelectElement>("mode").addEventListener("change", (e) => {
    state.playbackMode = (e.target as HTMLSelectElement).value as
      | "concurrent"
      | "sequential";
    state.touch();
    if (state.sessionId) {
      void api
        .putTimeline(state.sessionId, { playback_mode: state.playbackMode })
        .then(() => fetchFrame())
        .then(render)
        .catch(showError);
    }
  });

  document.querySelectorAll<HTMLButtonElement>("[data-camera-lens]").forEach((button) => {
    button.addEventListener("click", () => {
      const ok = state.requestCameraLens(
        button.dataset.cameraLens as "overlay" | "grid" | "diff",
      );
      if (ok) void pushLens({ camera_lens: state.cameraLens });
      void fetchFrame().then(render);
    });
  });

  document.querySelectorAll<HTMLInputElement>("[data-spatial]").forEach((box) => {
    box.addEventListener("change", () => {
      const name = box.dataset.spatial ?? "";
      if (box.checked) state.spatial.add(name);
      else state.spatial.delete(name);
      state.touch();
      void pushLens({ spatial: [...state.spatial] });
      void fetchAnalyses()
        .then(() => fetchFrame())
        .then(render);
    });
  });

  document.querySelectorAll<HTMLInputElement>("[data-temporal]").forEach((radio) => {
    radio.addEventListener("change", () => {
      if (!radio.checked) return;
      state.temporalLens = radio.dataset.temporal as "pose" | "joint";
      state.touch();
      void pushLens({ temporal_lens: state.temporalLens });
      render();
    });
  });

  el<HTMLSelectElement>("temporal-joint").addEventListener("change", (e) => {
    state.temporalJoint = Number((e.target as HTMLSelectElement).value);
    state.touch();
    void pushLens({ temporal_joint: state.temporalJoint });
    void fetchAnalyses().then(render);
  });

  el<HTMLButtonElement>("add-box").addEventListener("click", () => {
    const id = `box${scene.length + 1}`;
    scene = [
      ...scene,
      {
        id,
        kind: "cube",
        position: [0, 0.5, 0],
        rotation: [1, 0, 0, 0],
        scale: [1, 1, 1],
      },
    ];
    state.touch();
    void pushScene();
  });

  el<HTMLFormElement>("upload-form").addEventListener("submit", (e) => {
    e.preventDefault();
    const input = el<HTMLInputElement>("file-input");
    const seedRaw = el<HTMLInputElement>("seed-input").value.trim();
    const files = [...(input.files ?? [])];
    if (files.length === 0) {
      state.guidance = "Pick one or more BVH / Clip-JSON files first.";
      state.touch();
      render();
      return;
    }
    void loadSession(files, seedRaw === "" ? undefined : Number(seedRaw));
  });

  banner.addEventListener("click", () => {
    state.clearGuidance();
    render();
  });
}

// -- playback loop -----------------------------------------------------------

let lastTick = performance.now();

function loop(now: number): void {
  const dt = (now - lastTick) / 1000;
  lastTick = now;
  if (state.playing && state.sessionId) {
    const extent = timelineExtent();
    if (extent > 0) {
      playhead += dt * state.fps * state.speed;
      let next = Math.floor(playhead);
      if (next >= extent) {
        playhead -= extent;
        next = Math.floor(playhead);
      }
      if (next !== state.currentFrame) {
        state.currentFrame = next;
        state.touch();
        void fetchFrame().then(render);
      }
    }
  }
  requestAnimationFrame(loop);
}

bindViewport();
bindTimeline();
bindControls();
render();
requestAnimationFrame(loop);
