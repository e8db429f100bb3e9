/** Box geometry in native image pixels.
 *
 * All coordinates are integers in the frame's own pixel grid — never
 * CSS pixels — so saved ground truth is resolution-exact no matter how
 * the view is zoomed.
 */

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Wire form used by the backend: [x, y, w, h]. */
export type BoxTuple = [number, number, number, number];

export type BoxKind = 'face' | 'eye';

/** An in-progress drag: anchor is where the mouse went down, cursor is
 * where it is now. Either corner may be the top-left. */
export interface BoxDraft {
  anchor: [number, number];
  cursor: [number, number];
  kind: BoxKind;
}

/** Smallest box considered a deliberate mark rather than a slipped click. */
export const MIN_BOX_PX = 4;

/** Turn a drag into a positive-extent integer box, or null when the
 * result would be under MIN_BOX_PX in either dimension. */
export function normalizeDraft(draft: BoxDraft): Box | null {
  const x0 = Math.round(Math.min(draft.anchor[0], draft.cursor[0]));
  const y0 = Math.round(Math.min(draft.anchor[1], draft.cursor[1]));
  const x1 = Math.round(Math.max(draft.anchor[0], draft.cursor[0]));
  const y1 = Math.round(Math.max(draft.anchor[1], draft.cursor[1]));
  const box = { x: x0, y: y0, w: x1 - x0, h: y1 - y0 };
  if (box.w < MIN_BOX_PX || box.h < MIN_BOX_PX) {
    return null;
  }
  return box;
}

/** Keep a box inside a width x height frame (shrinking, never moving
 * the top-left out of frame). */
export function clampBox(box: Box, width: number, height: number): Box {
  const x = Math.min(Math.max(box.x, 0), Math.max(width - 1, 0));
  const y = Math.min(Math.max(box.y, 0), Math.max(height - 1, 0));
  return {
    x,
    y,
    w: Math.max(Math.min(box.w, width - x), 1),
    h: Math.max(Math.min(box.h, height - y), 1),
  };
}

export function toTuple(box: Box): BoxTuple {
  return [box.x, box.y, box.w, box.h];
}

export function fromTuple(t: BoxTuple): Box {
  return { x: t[0], y: t[1], w: t[2], h: t[3] };
}

export function boxesEqual(a: Box, b: Box): boolean {
  return a.x === b.x && a.y === b.y && a.w === b.w && a.h === b.h;
}

/** Map a point in the displayed (CSS-scaled) element back to integer
 * image pixels. The display is assumed to show the whole frame. */
export function displayToImage(
  px: number,
  py: number,
  displayW: number,
  displayH: number,
  imageW: number,
  imageH: number,
): [number, number] {
  const x = Math.round((px / displayW) * imageW);
  const y = Math.round((py / displayH) * imageH);
  return [
    Math.min(Math.max(x, 0), imageW),
    Math.min(Math.max(y, 0), imageH),
  ];
}
