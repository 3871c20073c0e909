// Timeline: one horizontal bar per clip, positioned by its frame
// offset, painted with pose-cluster segments or the joint curve.
// Dragging a bar horizontally re-offsets the clip on the engine's
// timeline — exactly one PUT per completed gesture.

import { JointCurvesDoc, PoseClustersDoc } from "./api.js";
import { dragFrameDelta, pixelsPerFrame, segmentSpans } from "./layout.js";
import { StudioState } from "./state.js";
import { clipColor } from "./viewport.js";

export const ROW_HEIGHT = 26;
export const BAR_HEIGHT = 18;
export const GUTTER = 110; // label column, px

export interface BarGeometry {
  row: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface OffsetCommit {
  row: number;
  offset: number;
}

/**
 * One drag gesture over a timeline bar. Pixels accumulate while the
 * pointer is down; on release the travelled distance becomes a frame
 * offset via round(dx / pixels-per-frame) and — only if it is nonzero
 * — a single commit is issued.
 */
export class BarDragController {
  private row = -1;
  private baseOffset = 0;
  private startX = 0;
  private lastX = 0;
  private dragging = false;

  constructor(
    private ppf: () => number,
    private commit: (change: OffsetCommit) => void,
  ) {}

  get active(): boolean {
    return this.dragging;
  }

  /** Row under the pointer while dragging; -1 otherwise. */
  get activeRow(): number {
    return this.dragging ? this.row : -1;
  }

  /** Live pixel displacement, for drawing the bar under the pointer. */
  get previewDx(): number {
    return this.dragging ? this.lastX - this.startX : 0;
  }

  begin(row: number, baseOffset: number, x: number): void {
    this.row = row;
    this.baseOffset = baseOffset;
    this.startX = x;
    this.lastX = x;
    this.dragging = true;
  }

  move(x: number): void {
    if (this.dragging) this.lastX = x;
  }

  /** Finish the gesture; returns the committed offset, or null when
   * the drag rounded to zero frames. */
  end(x: number): number | null {
    if (!this.dragging) return null;
    this.lastX = x;
    const delta = dragFrameDelta(x - this.startX, this.ppf());
    this.dragging = false;
    if (delta === 0) return null;
    const offset = this.baseOffset + delta;
    this.commit({ row: this.row, offset });
    return offset;
  }

  cancel(): void {
    this.dragging = false;
  }
}

export class TimelineView {
  constructor(private canvas: HTMLCanvasElement) {}

  /** Frames spanned by the view, padded so negative offsets stay visible. */
  private extentFrames(state: StudioState): { origin: number; total: number } {
    let origin = 0;
    let end = 1;
    for (const clip of state.clips) {
      origin = Math.min(origin, clip.offset);
      end = Math.max(end, clip.offset + clip.frames);
    }
    return { origin, total: Math.max(1, end - origin) };
  }

  ppf(state: StudioState): number {
    const { total } = this.extentFrames(state);
    return pixelsPerFrame(this.canvas.clientWidth - GUTTER, total);
  }

  barGeometry(state: StudioState, row: number, previewDx = 0): BarGeometry {
    const { origin } = this.extentFrames(state);
    const ppf = this.ppf(state);
    const clip = state.clips[row];
    const x = GUTTER + (clip.offset - origin) * ppf + previewDx;
    return {
      row,
      x,
      y: row * ROW_HEIGHT + (ROW_HEIGHT - BAR_HEIGHT) / 2,
      width: Math.round(clip.frames * ppf),
      height: BAR_HEIGHT,
    };
  }

  rowAt(y: number): number {
    const row = Math.floor(y / ROW_HEIGHT);
    return row >= 0 && row < Math.floor(this.canvas.clientHeight / ROW_HEIGHT) ? row : -1;
  }

  hitBar(state: StudioState, x: number, y: number): number {
    const row = this.rowAt(y);
    if (row < 0 || row >= state.clips.length) return -1;
    const bar = this.barGeometry(state, row);
    return x >= bar.x && x <= bar.x + bar.width ? row : -1;
  }

  render(
    state: StudioState,
    clusters: PoseClustersDoc | null,
    curves: JointCurvesDoc | null,
    drag: { row: number; dx: number } | null,
  ): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const width = this.canvas.clientWidth;
    const height = this.canvas.clientHeight;
    ctx.clearRect(0, 0, width, height);

    const { origin } = this.extentFrames(state);
    const ppf = this.ppf(state);
    const segmentsByClip = new Map(
      clusters?.clips.map((c) => [c.clip, c.segments]) ?? [],
    );
    const samplesByClip = new Map(
      curves?.clips.map((c) => [c.clip, c.samples]) ?? [],
    );

    state.clips.forEach((clip, row) => {
      const dx = drag && drag.row === row ? drag.dx : 0;
      const bar = this.barGeometry(state, row, dx);

      ctx.fillStyle = clip.selected ? "#e7e7ea" : "#6b6b72";
      ctx.font = "12px system-ui, sans-serif";
      ctx.textBaseline = "middle";
      ctx.fillText(clip.name, 8, bar.y + bar.height / 2, GUTTER - 16);

      ctx.globalAlpha = clip.selected ? 1 : 0.35;
      ctx.fillStyle = "#3d3d44";
      ctx.fillRect(bar.x, bar.y, bar.width, bar.height);

      if (state.temporalLens === "pose" && clusters) {
        const segments = segmentsByClip.get(clip.name) ?? [];
        for (const span of segmentSpans(segments, clip.frames, bar.width)) {
          ctx.fillStyle =
            clusters.palette[span.clusterId % clusters.palette.length];
          ctx.fillRect(bar.x + span.x, bar.y, span.width, bar.height);
        }
      } else if (state.temporalLens === "joint") {
        const samples = samplesByClip.get(clip.name) ?? [];
        ctx.strokeStyle = clipColor(row);
        ctx.lineWidth = 1.5;
        let pen = false;
        ctx.beginPath();
        for (const s of samples) {
          // out-of-view samples break the stroke; drawn after as dots
          if (s.out_of_view) {
            pen = false;
            continue;
          }
          const px = bar.x + (s.frame + 0.5) * (bar.width / clip.frames);
          const py = bar.y + (1 - s.bar_y) * bar.height;
          if (pen) ctx.lineTo(px, py);
          else ctx.moveTo(px, py);
          pen = true;
        }
        ctx.stroke();
        ctx.fillStyle = "rgba(255,255,255,0.4)";
        for (const s of samples) {
          if (!s.out_of_view) continue;
          const px = bar.x + (s.frame + 0.5) * (bar.width / clip.frames);
          ctx.fillRect(px - 1, bar.y + bar.height - 3, 2, 2);
        }
      }

      ctx.strokeStyle = clip.selected ? "rgba(255,255,255,0.5)" : "rgba(255,255,255,0.15)";
      ctx.strokeRect(bar.x + 0.5, bar.y + 0.5, bar.width - 1, bar.height - 1);
      ctx.globalAlpha = 1;
    });

    // playhead
    const px = GUTTER + (state.currentFrame - origin) * ppf;
    ctx.strokeStyle = "#f2f2f2";
    ctx.beginPath();
    ctx.moveTo(px, 0);
    ctx.lineTo(px, height);
    ctx.stroke();
  }
}
