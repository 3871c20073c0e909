import { describe, expect, it } from "vitest";

import { BarDragController, OffsetCommit } from "../src/timeline.js";

function recorder(): { puts: OffsetCommit[]; commit: (c: OffsetCommit) => void } {
  const puts: OffsetCommit[] = [];
  return { puts, commit: (c) => puts.push(c) };
}

describe("bar dragging", () => {
  it("issues exactly one PUT of round(dx/ppf) per gesture", () => {
    const { puts, commit } = recorder();
    const drag = new BarDragController(() => 4, commit);

    drag.begin(1, 3, 100);
    drag.move(118);
    drag.move(129);
    const offset = drag.end(137); // dx = 37px at 4 px/frame -> 9 frames

    expect(offset).toBe(12);
    expect(puts).toEqual([{ row: 1, offset: 12 }]);
  });

  it("stays silent when the drag rounds to zero frames", () => {
    const { puts, commit } = recorder();
    const drag = new BarDragController(() => 4, commit);

    drag.begin(0, 5, 200);
    drag.move(201);
    expect(drag.end(201)).toBeNull(); // 0.25 frames -> 0

    expect(puts).toEqual([]);
  });

  it("handles leftward drags with negative offsets", () => {
    const { puts, commit } = recorder();
    const drag = new BarDragController(() => 2.5, commit);

    drag.begin(2, 0, 400);
    drag.end(380); // dx = -20px at 2.5 px/frame -> -8 frames

    expect(puts).toEqual([{ row: 2, offset: -8 }]);
  });

  it("each gesture is measured from its own start", () => {
    const { puts, commit } = recorder();
    const drag = new BarDragController(() => 10, commit);

    drag.begin(0, 0, 0);
    drag.end(100); // +10 frames
    drag.begin(0, 10, 500);
    drag.end(450); // -5 frames from the new base

    expect(puts).toEqual([
      { row: 0, offset: 10 },
      { row: 0, offset: 5 },
    ]);
  });

  it("cancel drops the gesture without a PUT", () => {
    const { puts, commit } = recorder();
    const drag = new BarDragController(() => 4, commit);

    drag.begin(1, 7, 50);
    drag.move(150);
    drag.cancel();
    expect(drag.end(150)).toBeNull();

    expect(puts).toEqual([]);
    expect(drag.active).toBe(false);
  });

  it("tracks preview displacement while active", () => {
    const { commit } = recorder();
    const drag = new BarDragController(() => 4, commit);

    expect(drag.previewDx).toBe(0);
    drag.begin(0, 0, 10);
    drag.move(34);
    expect(drag.previewDx).toBe(24);
    expect(drag.activeRow).toBe(0);
    drag.end(34);
    expect(drag.previewDx).toBe(0);
    expect(drag.activeRow).toBe(-1);
  });

  it("uses the pixels-per-frame in force at release time", () => {
    const { puts, commit } = recorder();
    let ppf = 4;
    const drag = new BarDragController(() => ppf, commit);

    drag.begin(0, 0, 0);
    ppf = 8; // zoom changed mid-drag
    drag.end(40); // 40px at 8 px/frame -> 5 frames

    expect(puts).toEqual([{ row: 0, offset: 5 }]);
  });
});
