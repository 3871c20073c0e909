// Layout math shared by the viewport grid and the timeline. Everything
// here is a pure function of numbers so it can be unit tested without
// a DOM.

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Columns for an m-clip grid: the squarest arrangement that fits. */
export function gridColumns(m: number): number {
  if (m <= 1) return 1;
  return Math.ceil(Math.sqrt(m));
}

export function gridRows(m: number): number {
  return Math.max(1, Math.ceil(m / gridColumns(m)));
}

/** Row-major sub-view rectangles for m clips inside width x height. */
export function gridCells(m: number, width: number, height: number): Rect[] {
  const cols = gridColumns(m);
  const rows = gridRows(m);
  const cells: Rect[] = [];
  for (let i = 0; i < m; i++) {
    const col = i % cols;
    const row = Math.floor(i / cols);
    // integer edges so neighbouring cells share a border exactly
    const x0 = Math.round((col * width) / cols);
    const x1 = Math.round(((col + 1) * width) / cols);
    const y0 = Math.round((row * height) / rows);
    const y1 = Math.round(((row + 1) * height) / rows);
    cells.push({ x: x0, y: y0, width: x1 - x0, height: y1 - y0 });
  }
  return cells;
}

export function pixelsPerFrame(barWidth: number, frames: number): number {
  if (frames <= 0) return 0;
  return barWidth / frames;
}

export interface Segment {
  cluster_id: number;
  start: number;
  end: number;
}

export interface SegmentSpan {
  clusterId: number;
  x: number;
  width: number;
}

/**
 * Pixel spans for the cluster segments of one clip's timeline bar.
 * Adjacent spans share their rounded edge, so the widths always total
 * the full bar width (frames map to [0, barWidth] end to end).
 */
export function segmentSpans(
  segments: Segment[],
  frames: number,
  barWidth: number,
): SegmentSpan[] {
  const ppf = pixelsPerFrame(barWidth, frames);
  return segments.map((s) => {
    const left = Math.round(s.start * ppf);
    const right = Math.round(s.end * ppf);
    return { clusterId: s.cluster_id, x: left, width: right - left };
  });
}

/** Frame-offset change for a horizontal bar drag of dx pixels. */
export function dragFrameDelta(dxPx: number, ppf: number): number {
  if (ppf <= 0) return 0;
  return Math.round(dxPx / ppf);
}

/**
 * Opacity for an onion-skin ghost `distance` frames from the current
 * one: solid at the centre, fading to a floor at the window edge.
 */
export function ghostOpacity(distance: number, n: number): number {
  if (n <= 0) return 1;
  const t = Math.min(Math.abs(distance) / n, 1);
  return 1 - 0.85 * t;
}
