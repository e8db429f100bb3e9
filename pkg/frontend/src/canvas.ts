/** Frame rendering against a small drawing-surface interface.
 *
 * The interface keeps layout/render logic testable without a DOM: the
 * browser provides a CanvasRenderingContext2D-backed surface, tests a
 * recording one. All coordinates given to the surface are native image
 * pixels; display scaling is the surface's concern.
 */

import type { FrameResult, GroundTruthRecord } from './api.js';
import type { Box, BoxDraft } from './boxes.js';
import { fromTuple, normalizeDraft } from './boxes.js';

export type BoxStyle = 'face' | 'eye' | 'overlay-face' | 'overlay-eye' | 'draft';

export interface Surface {
  /** Reset for a frame of the given pixel size (also draws the image). */
  begin(width: number, height: number): void;
  box(b: Box, style: BoxStyle): void;
  /** Small status badge (e.g. "no detections") over the frame. */
  badge(text: string): void;
  /** Legend naming the visible box layers. */
  legend(entries: string[]): void;
}

export interface RenderInput {
  width: number;
  height: number;
  record: GroundTruthRecord;
  overlay: FrameResult | null;
  draft: BoxDraft | null;
}

/** Draw one frame's annotation state: the human's boxes, optionally the
 * detector overlay in its own styles, and the live drag rectangle. */
export function render(input: RenderInput, surface: Surface): void {
  surface.begin(input.width, input.height);

  const rec = input.record;
  if (rec.face_present && rec.face_box) {
    surface.box(fromTuple(rec.face_box), 'face');
  }
  if (rec.eyes_present && rec.eye_boxes) {
    for (const t of rec.eye_boxes) {
      surface.box(fromTuple(t), 'eye');
    }
  }

  if (input.overlay !== null) {
    const det = input.overlay;
    for (const d of det.faces) {
      surface.box(fromTuple(d.rect), 'overlay-face');
    }
    for (const d of det.eyes) {
      surface.box(fromTuple(d.rect), 'overlay-eye');
    }
    if (det.faces.length === 0 && det.eyes.length === 0) {
      surface.badge('no detections');
    }
    surface.legend(['annotation', 'detector']);
  }

  if (input.draft !== null) {
    const live = normalizeDraft(input.draft);
    if (live !== null) {
      surface.box(live, 'draft');
    }
  }
}
