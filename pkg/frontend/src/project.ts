// Viewport camera: an orbit rig around a target point plus a pinhole
// projection to canvas pixels. This is view-only math — the engine's
// main camera (used for the Joint Lens curves) lives server-side and
// is only written through the API.

export type Vec3 = [number, number, number];

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]) || 1;
  return [v[0] / n, v[1] / n, v[2] / n];
}

export interface ScreenPoint {
  x: number;
  y: number;
  depth: number;
  visible: boolean;
}

const MIN_PITCH = -1.45;
const MAX_PITCH = 1.45;

export class OrbitCamera {
  yaw = 0.5;
  pitch = 0.35;
  distance = 6;
  target: Vec3 = [0, 1, 0];
  verticalFov = Math.PI / 3;
  near = 0.1;

  private home = { yaw: 0.5, pitch: 0.35, distance: 6, target: [0, 1, 0] as Vec3 };

  /** Remember the current pose as "main" so reset() can return to it. */
  setHome(): void {
    this.home = {
      yaw: this.yaw,
      pitch: this.pitch,
      distance: this.distance,
      target: [...this.target] as Vec3,
    };
  }

  /** True when the user has orbited/panned away from the main angle —
   * the cue for showing the reset button. */
  get moved(): boolean {
    const h = this.home;
    return (
      Math.abs(this.yaw - h.yaw) > 1e-9 ||
      Math.abs(this.pitch - h.pitch) > 1e-9 ||
      Math.abs(this.distance - h.distance) > 1e-9 ||
      this.target.some((v, i) => Math.abs(v - h.target[i]) > 1e-9)
    );
  }

  reset(): void {
    this.yaw = this.home.yaw;
    this.pitch = this.home.pitch;
    this.distance = this.home.distance;
    this.target = [...this.home.target] as Vec3;
  }

  orbit(dYaw: number, dPitch: number): void {
    this.yaw += dYaw;
    this.pitch = Math.min(MAX_PITCH, Math.max(MIN_PITCH, this.pitch + dPitch));
  }

  pan(dx: number, dy: number): void {
    // move the target in the camera's screen plane, scaled by distance
    const k = this.distance * 0.0022;
    const [right, up] = this.basis();
    this.target = [
      this.target[0] - right[0] * dx * k + up[0] * dy * k,
      this.target[1] - right[1] * dx * k + up[1] * dy * k,
      this.target[2] - right[2] * dx * k + up[2] * dy * k,
    ];
  }

  zoom(factor: number): void {
    this.distance = Math.min(100, Math.max(0.5, this.distance * factor));
  }

  position(): Vec3 {
    const cp = Math.cos(this.pitch);
    return [
      this.target[0] + this.distance * cp * Math.sin(this.yaw),
      this.target[1] + this.distance * Math.sin(this.pitch),
      this.target[2] + this.distance * cp * Math.cos(this.yaw),
    ];
  }

  private basis(): [Vec3, Vec3, Vec3] {
    const eye = this.position();
    const forward = normalize(sub(this.target, eye));
    const right = normalize(cross(forward, [0, 1, 0]));
    const up = cross(right, forward);
    return [right, up, forward];
  }

  /** World point -> canvas pixel. Points behind the near plane come
   * back with visible=false (and a parked position). */
  project(point: Vec3, width: number, height: number): ScreenPoint {
    const eye = this.position();
    const [right, up, forward] = this.basis();
    const rel = sub(point, eye);
    const depth = dot(rel, forward);
    if (depth < this.near) {
      return { x: -1e6, y: -1e6, depth, visible: false };
    }
    const f = height / 2 / Math.tan(this.verticalFov / 2);
    const x = width / 2 + (dot(rel, right) / depth) * f;
    const y = height / 2 - (dot(rel, up) / depth) * f;
    return { x, y, depth, visible: true };
  }

  /** Pixel size of a world-space length at a given depth — used to
   * scale capsule bone widths with distance. */
  pixelsPerUnit(depth: number, height: number): number {
    const f = height / 2 / Math.tan(this.verticalFov / 2);
    return f / Math.max(depth, this.near);
  }
}
