// Draws the 3D view: ground plane, scene blocking, capsule skeletons
// through the active camera lens (overlay / grid / diff) and the
// spatial overlays (trace ghosts, keyposes, joint paths).

import {
  CollisionsDoc,
  DiffDoc,
  FrameDoc,
  KeyposesDoc,
  PathsDoc,
  SceneObjectDoc,
} from "./api.js";
import { ghostOpacity, gridCells } from "./layout.js";
import { OrbitCamera, Vec3 } from "./project.js";
import { Bone, drawPolyline, drawSkeleton } from "./skeleton.js";
import { StudioState } from "./state.js";

// Clip identity colors (viewport + timeline rows). Cluster colors come
// from the engine's palette instead — never from this list.
export const CLIP_COLORS = [
  "#6ca6e8",
  "#e8926c",
  "#7fd08a",
  "#d98ddb",
  "#e0c268",
  "#6cd3cf",
  "#ce7287",
  "#9b9b9b",
];

export function clipColor(index: number): string {
  return CLIP_COLORS[index % CLIP_COLORS.length];
}

export interface ViewportData {
  frame: FrameDoc | null;
  ghosts: { frame: FrameDoc; distance: number }[];
  keyposes: Map<string, KeyposesDoc>;
  paths: PathsDoc | null;
  diff: DiffDoc | null;
  scene: SceneObjectDoc[];
  collisions: CollisionsDoc | null;
}

function rotateByQuat(q: number[], v: Vec3): Vec3 {
  // q (w, x, y, z) applied to v: q v q*
  const [w, x, y, z] = q;
  const ux = y * v[2] - z * v[1] + w * v[0];
  const uy = z * v[0] - x * v[2] + w * v[1];
  const uz = x * v[1] - y * v[0] + w * v[2];
  return [
    v[0] + 2 * (y * uz - z * uy),
    v[1] + 2 * (z * ux - x * uz),
    v[2] + 2 * (x * uy - y * ux),
  ];
}

function transformLocal(obj: SceneObjectDoc, p: Vec3): Vec3 {
  const scaled: Vec3 = [p[0] * obj.scale[0], p[1] * obj.scale[1], p[2] * obj.scale[2]];
  const rotated = rotateByQuat(obj.rotation, scaled);
  return [
    rotated[0] + obj.position[0],
    rotated[1] + obj.position[1],
    rotated[2] + obj.position[2],
  ];
}

function circlePoints(axis: "x" | "y" | "z", r: number, level: number, n = 24): Vec3[] {
  const pts: Vec3[] = [];
  for (let i = 0; i <= n; i++) {
    const a = (i / n) * Math.PI * 2;
    const u = r * Math.cos(a);
    const v = r * Math.sin(a);
    if (axis === "y") pts.push([u, level, v]);
    else if (axis === "x") pts.push([level, u, v]);
    else pts.push([u, v, level]);
  }
  return pts;
}

/** Wireframe polylines of a unit primitive in its local frame. */
function primitiveWires(kind: string): Vec3[][] {
  const h = 0.5;
  switch (kind) {
    case "cube": {
      const c = (s: number[]): Vec3 => [h * s[0], h * s[1], h * s[2]];
      const bottom = [c([-1, -1, -1]), c([1, -1, -1]), c([1, -1, 1]), c([-1, -1, 1]), c([-1, -1, -1])];
      const top = [c([-1, 1, -1]), c([1, 1, -1]), c([1, 1, 1]), c([-1, 1, 1]), c([-1, 1, -1])];
      const posts: Vec3[][] = [0, 1, 2, 3].map((i) => [bottom[i], top[i]]);
      return [bottom, top, ...posts];
    }
    case "sphere":
      return [circlePoints("y", h, 0), circlePoints("x", h, 0), circlePoints("z", h, 0)];
    case "plane":
      return [[[-h, 0, -h], [h, 0, -h], [h, 0, h], [-h, 0, h], [-h, 0, -h]]];
    case "cylinder": {
      const top = circlePoints("y", h, h);
      const bottom = circlePoints("y", h, -h);
      const sides: Vec3[][] = [0, 6, 12, 18].map((i) => [top[i], bottom[i]]);
      return [top, bottom, ...sides];
    }
    case "cone": {
      const base = circlePoints("y", h, -h);
      const apex: Vec3 = [0, h, 0];
      const sides: Vec3[][] = [0, 6, 12, 18].map((i) => [base[i], apex]);
      return [base, ...sides];
    }
    default:
      return [];
  }
}

function drawGround(
  ctx: CanvasRenderingContext2D,
  camera: OrbitCamera,
  width: number,
  height: number,
): void {
  ctx.save();
  ctx.strokeStyle = "rgba(255,255,255,0.09)";
  ctx.lineWidth = 1;
  const extent = 6;
  for (let i = -extent; i <= extent; i++) {
    for (const line of [
      [
        [i, 0, -extent],
        [i, 0, extent],
      ],
      [
        [-extent, 0, i],
        [extent, 0, i],
      ],
    ]) {
      const a = camera.project(line[0] as Vec3, width, height);
      const b = camera.project(line[1] as Vec3, width, height);
      if (!a.visible || !b.visible) continue;
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
      ctx.stroke();
    }
  }
  ctx.restore();
}

function drawScene(
  ctx: CanvasRenderingContext2D,
  camera: OrbitCamera,
  scene: SceneObjectDoc[],
  collisions: CollisionsDoc | null,
  width: number,
  height: number,
): void {
  const hitIds = new Set(collisions?.events.map((e) => e.object_id) ?? []);
  for (const obj of scene) {
    const color = hitIds.has(obj.id) ? "#e05c5c" : "rgba(255,255,255,0.35)";
    for (const wire of primitiveWires(obj.kind)) {
      drawPolyline(
        ctx,
        camera,
        wire.map((p) => transformLocal(obj, p)),
        color,
        width,
        height,
      );
    }
  }
}

function drawSpatialOverlays(
  ctx: CanvasRenderingContext2D,
  camera: OrbitCamera,
  state: StudioState,
  data: ViewportData,
  bones: Bone[],
  colorOf: (clip: string) => string,
  width: number,
  height: number,
  onlyClip?: string,
): void {
  const wanted = (clip: string) => onlyClip === undefined || clip === onlyClip;

  if (state.spatial.has("trace")) {
    for (const ghost of data.ghosts) {
      const alpha = 0.5 * ghostOpacity(ghost.distance, state.traceN);
      for (const clip of ghost.frame.clips) {
        if (!wanted(clip.clip)) continue;
        drawSkeleton(
          ctx, camera, clip.positions, bones,
          colorOf(clip.clip), alpha, width, height, state.jointFilter,
        );
      }
    }
  }

  if (state.spatial.has("keyposes")) {
    for (const [clip, doc] of data.keyposes) {
      if (!wanted(clip)) continue;
      for (const pose of doc.poses) {
        drawSkeleton(
          ctx, camera, pose.positions, bones,
          colorOf(clip), 0.22, width, height, state.jointFilter,
        );
      }
    }
  }

  if (state.spatial.has("paths") && data.paths) {
    for (const clip of data.paths.clips) {
      if (!wanted(clip.clip)) continue;
      drawPolyline(ctx, camera, clip.points, colorOf(clip.clip), width, height);
    }
  }
}

function diffLineColor(distance: number, max: number): string {
  const t = max > 0 ? Math.min(distance / max, 1) : 0;
  const r = Math.round(90 + t * 165);
  const g = Math.round(200 - t * 140);
  return `rgb(${r}, ${g}, 80)`;
}

export function renderViewport(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  camera: OrbitCamera,
  state: StudioState,
  data: ViewportData,
  bones: Bone[],
): void {
  ctx.clearRect(0, 0, width, height);
  drawGround(ctx, camera, width, height);
  drawScene(ctx, camera, data.scene, data.collisions, width, height);

  const selected = state.selectedClips();
  const colorOf = (clip: string) =>
    clipColor(state.clips.findIndex((c) => c.name === clip));
  const frameClips = data.frame?.clips ?? [];
  const byName = new Map(frameClips.map((c) => [c.clip, c]));
  const showModel = state.spatial.has("model") || state.spatial.size === 0;

  if (state.cameraLens === "grid") {
    // one sub-view per selected clip, all sharing the main camera
    const cells = gridCells(selected.length, width, height);
    selected.forEach((entry, i) => {
      const cell = cells[i];
      ctx.save();
      ctx.beginPath();
      ctx.rect(cell.x, cell.y, cell.width, cell.height);
      ctx.clip();
      ctx.strokeStyle = "rgba(255,255,255,0.2)";
      ctx.strokeRect(cell.x + 0.5, cell.y + 0.5, cell.width - 1, cell.height - 1);
      const clip = byName.get(entry.name);
      if (clip && showModel) {
        drawSkeleton(
          ctx, camera, clip.positions, bones,
          colorOf(entry.name), 1, width, height, state.jointFilter,
        );
      }
      drawSpatialOverlays(
        ctx, camera, state, data, bones, colorOf, width, height, entry.name,
      );
      ctx.fillStyle = "rgba(255,255,255,0.75)";
      ctx.font = "12px system-ui, sans-serif";
      ctx.fillText(entry.name, cell.x + 8, cell.y + 18);
      ctx.restore();
    });
    return;
  }

  if (state.cameraLens === "diff" && data.diff) {
    const pair = [data.diff.a, data.diff.b];
    for (const name of pair) {
      const clip = byName.get(name);
      if (clip) {
        drawSkeleton(
          ctx, camera, clip.positions, bones,
          colorOf(name), 0.9, width, height, state.jointFilter,
        );
      }
    }
    const max = Math.max(...data.diff.joints.map((j) => j.distance), 0);
    ctx.save();
    ctx.lineWidth = 2;
    for (const joint of data.diff.joints) {
      if (state.jointFilter.size > 0 && !state.jointFilter.has(joint.joint)) continue;
      const a = camera.project(joint.pos_a as Vec3, width, height);
      const b = camera.project(joint.pos_b as Vec3, width, height);
      if (!a.visible || !b.visible) continue;
      ctx.strokeStyle = diffLineColor(joint.distance, max);
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
      ctx.stroke();
    }
    ctx.restore();
    return;
  }

  // overlay: everything in one view
  if (showModel) {
    for (const clip of frameClips) {
      drawSkeleton(
        ctx, camera, clip.positions, bones,
        colorOf(clip.clip), 1, width, height, state.jointFilter,
      );
    }
  }
  drawSpatialOverlays(ctx, camera, state, data, bones, colorOf, width, height);
}
