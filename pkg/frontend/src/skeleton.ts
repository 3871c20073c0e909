// Capsule-skeleton drawing: bones are thick round-capped strokes from
// parent to child joint, depth-sorted so nearer limbs overdraw farther
// ones. No mesh — the capsules ARE the character.

import { OrbitCamera, ScreenPoint, Vec3 } from "./project.js";

export interface Bone {
  parent: number;
  child: number;
}

export function bonesFromParents(parents: number[]): Bone[] {
  const bones: Bone[] = [];
  for (let child = 1; child < parents.length; child++) {
    const parent = parents[child];
    if (parent >= 0) bones.push({ parent, child });
  }
  return bones;
}

const BONE_RADIUS = 0.05; // world units

export function drawSkeleton(
  ctx: CanvasRenderingContext2D,
  camera: OrbitCamera,
  positions: number[][],
  bones: Bone[],
  color: string,
  alpha: number,
  width: number,
  height: number,
  jointFilter?: Set<number>,
): void {
  const screen: ScreenPoint[] = positions.map((p) =>
    camera.project(p as Vec3, width, height),
  );

  const visible = (i: number) =>
    screen[i].visible && (!jointFilter || jointFilter.has(i));

  // far bones first so near ones paint over them
  const order = bones
    .filter((b) => visible(b.parent) && visible(b.child))
    .sort(
      (a, b) =>
        (screen[b.parent].depth + screen[b.child].depth) -
        (screen[a.parent].depth + screen[a.child].depth),
    );

  ctx.save();
  ctx.globalAlpha = alpha;
  ctx.strokeStyle = color;
  ctx.fillStyle = color;
  ctx.lineCap = "round";
  for (const bone of order) {
    const a = screen[bone.parent];
    const b = screen[bone.child];
    const depth = (a.depth + b.depth) / 2;
    ctx.lineWidth = Math.max(
      1.5,
      2 * BONE_RADIUS * camera.pixelsPerUnit(depth, height),
    );
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
  // joints on top, slightly larger than the bone radius
  for (let i = 0; i < screen.length; i++) {
    if (!visible(i)) continue;
    const r = Math.max(
      2,
      1.3 * BONE_RADIUS * camera.pixelsPerUnit(screen[i].depth, height),
    );
    ctx.beginPath();
    ctx.arc(screen[i].x, screen[i].y, r, 0, Math.PI * 2);
    ctx.fill();
  }
  ctx.restore();
}

export function drawPolyline(
  ctx: CanvasRenderingContext2D,
  camera: OrbitCamera,
  points: number[][],
  color: string,
  width: number,
  height: number,
  dashed = false,
): void {
  ctx.save();
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  if (dashed) ctx.setLineDash([4, 4]);
  ctx.beginPath();
  let pen = false;
  for (const p of points) {
    const s = camera.project(p as Vec3, width, height);
    if (!s.visible) {
      pen = false;
      continue;
    }
    if (pen) ctx.lineTo(s.x, s.y);
    else ctx.moveTo(s.x, s.y);
    pen = true;
  }
  ctx.stroke();
  ctx.restore();
}
