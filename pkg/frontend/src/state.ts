// Client-side view state. The engine owns the analysis parameters; this
// tracks what the user is looking at, guards lens rules the server
// would reject anyway, and hands out revision numbers so late fetch
// responses can be discarded.

export type CameraLens = "overlay" | "grid" | "diff";
export type TemporalLens = "pose" | "joint";

export interface ClipEntry {
  name: string;
  frames: number;
  offset: number;
  selected: boolean;
}

export class StudioState {
  revision = 0;
  sessionId: string | null = null;
  clips: ClipEntry[] = [];
  jointNames: string[] = [];
  jointFilter: Set<number> = new Set();

  cameraLens: CameraLens = "overlay";
  spatial: Set<string> = new Set(["model"]);
  temporalLens: TemporalLens = "pose";
  temporalJoint = 0;
  traceN = 10;
  keyposeK = 15;

  currentFrame = 0;
  playing = false;
  speed = 1;
  fps = 24;
  playbackMode: "concurrent" | "sequential" = "concurrent";

  /** Inline banner text; null when nothing needs explaining. */
  guidance: string | null = null;

  /** Bump after any mutation; fetches tagged with an older revision
   * are stale and must be dropped. */
  touch(): number {
    this.revision += 1;
    return this.revision;
  }

  isStale(revision: number): boolean {
    return revision !== this.revision;
  }

  selectedCount(): number {
    return this.clips.reduce((n, clip) => n + (clip.selected ? 1 : 0), 0);
  }

  selectedClips(): ClipEntry[] {
    return this.clips.filter((clip) => clip.selected);
  }

  /** The two clips Diff compares; only meaningful when exactly two are
   * selected. */
  diffPair(): [ClipEntry, ClipEntry] | null {
    const picked = this.selectedClips();
    return picked.length === 2 ? [picked[0], picked[1]] : null;
  }

  /**
   * Ask for a camera lens. Diff needs exactly two selected clips: with
   * any other count the request shows a guidance banner and the lens
   * stays (or reverts to) Overlay. Returns whether the lens was set.
   */
  requestCameraLens(lens: CameraLens): boolean {
    if (lens === "diff") {
      const count = this.selectedCount();
      if (count !== 2) {
        this.guidance = `Diff compares exactly two clips — ${count} selected. Pick two and try again.`;
        this.cameraLens = "overlay";
        this.touch();
        return false;
      }
    }
    this.guidance = null;
    this.cameraLens = lens;
    this.touch();
    return true;
  }

  /**
   * Toggle a clip's selection. If Diff was active and the count moves
   * off two, the lens reverts to Overlay with a banner — mirroring the
   * server, which does the same on its side.
   */
  setSelected(index: number, selected: boolean): void {
    const clip = this.clips[index];
    if (!clip || clip.selected === selected) return;
    clip.selected = selected;
    if (this.cameraLens === "diff" && this.selectedCount() !== 2) {
      this.cameraLens = "overlay";
      this.guidance = "Diff turned off: it needs exactly two selected clips.";
    }
    this.touch();
  }

  /** Note a server-side diff revert (PUT /timeline said so). */
  noteDiffReverted(): void {
    if (this.cameraLens === "diff") {
      this.cameraLens = "overlay";
      this.guidance = "Diff turned off: it needs exactly two selected clips.";
      this.touch();
    }
  }

  clearGuidance(): void {
    if (this.guidance !== null) {
      this.guidance = null;
      this.touch();
    }
  }
}
