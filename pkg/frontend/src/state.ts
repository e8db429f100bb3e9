/** Annotation session state: which frame is shown, the locally edited
 * record, and its relation to what the server has acknowledged.
 *
 * Pure application logic — no DOM access — so the whole annotate/save/
 * navigate workflow is testable headlessly and the browser layer stays
 * a thin shell.
 */

import type {
  ApiClient,
  FrameInfo,
  FrameResult,
  GroundTruthRecord,
} from './api.js';
import { ApiError } from './api.js';
import type { BoxDraft, BoxTuple } from './boxes.js';
import { normalizeDraft, toTuple } from './boxes.js';

export const MAX_EYE_BOXES = 2;

export interface FrameView {
  frame_id: string;
  image_url: string;
  /** Local, editable record (always present; starts from the saved
   * annotation or an all-absent default). */
  record: GroundTruthRecord;
  /** Live detector output for visual comparison; never saved. */
  overlay: FrameResult | null;
}

export interface NavResult {
  ok: boolean;
  /** 'dirty': unsaved edits block the move until forced.
   *  'unknown-frame': jump target does not exist; view unchanged. */
  reason?: 'dirty' | 'unknown-frame';
  /** True when a next/prev step wrapped around the frame list. */
  wrapped?: boolean;
}

export interface CommitResult {
  ok: boolean;
  reason?: 'too-small' | 'eye-cap';
}

export interface SaveResult {
  ok: boolean;
  /** True when there was nothing to save. */
  noop?: boolean;
  /** Server or network error message, verbatim where available. */
  message?: string;
  /** True for transport failures where retrying may help. */
  retryable?: boolean;
}

export interface OverlayResult {
  ok: boolean;
  message?: string;
}

function defaultRecord(frameId: string): GroundTruthRecord {
  return { frame_id: frameId, face_present: false, eyes_present: false };
}

function cloneRecord(rec: GroundTruthRecord): GroundTruthRecord {
  const out: GroundTruthRecord = {
    frame_id: rec.frame_id,
    face_present: rec.face_present,
    eyes_present: rec.eyes_present,
  };
  if (rec.face_box) {
    out.face_box = [...rec.face_box] as BoxTuple;
  }
  if (rec.eye_boxes) {
    out.eye_boxes = rec.eye_boxes.map((b) => [...b] as BoxTuple);
  }
  return out;
}

function recordsEqual(a: GroundTruthRecord, b: GroundTruthRecord): boolean {
  return JSON.stringify(wireRecord(a)) === JSON.stringify(wireRecord(b));
}

/** Canonical wire form: boxes only ride along with their presence flag,
 * and empty eye lists are omitted entirely. */
export function wireRecord(rec: GroundTruthRecord): GroundTruthRecord {
  const out: GroundTruthRecord = {
    frame_id: rec.frame_id,
    face_present: rec.face_present,
    eyes_present: rec.eyes_present,
  };
  if (rec.face_present && rec.face_box) {
    out.face_box = rec.face_box;
  }
  if (rec.eyes_present && rec.eye_boxes && rec.eye_boxes.length > 0) {
    out.eye_boxes = rec.eye_boxes;
  }
  return out;
}

export class Session {
  private index = 0;
  private viewState: FrameView;
  /** Last server-acknowledged record, or null when the frame has never
   * been saved. Dirtiness is defined against this baseline. */
  private acked: GroundTruthRecord | null = null;

  private constructor(
    private readonly api: ApiClient,
    readonly frames: FrameInfo[],
    firstView: FrameView,
    firstAcked: GroundTruthRecord | null,
  ) {
    this.viewState = firstView;
    this.acked = firstAcked;
  }

  static async load(api: ApiClient): Promise<Session> {
    const frames = await api.listFrames();
    if (frames.length === 0) {
      throw new Error('the backend reports no frames to annotate');
    }
    const first = frames[0]!;
    const acked = first.annotated
      ? await api.getAnnotation(first.frame_id)
      : null;
    const view: FrameView = {
      frame_id: first.frame_id,
      image_url: api.imageUrl(first.frame_id),
      record: acked ? cloneRecord(acked) : defaultRecord(first.frame_id),
      overlay: null,
    };
    return new Session(api, frames, view, acked);
  }

  get view(): FrameView {
    return this.viewState;
  }

  get currentIndex(): number {
    return this.index;
  }

  /** True exactly when local edits differ from the last acknowledged
   * record (or, for never-saved frames, from the pristine default). */
  get dirty(): boolean {
    const baseline = this.acked ?? defaultRecord(this.viewState.frame_id);
    return !recordsEqual(this.viewState.record, baseline);
  }

  /** Count of frames the server has an annotation for. */
  get progress(): number {
    return this.frames.filter((f) => f.annotated).length;
  }

  private async open(index: number): Promise<void> {
    const info = this.frames[index]!;
    this.index = index;
    this.acked = info.annotated
      ? await this.api.getAnnotation(info.frame_id)
      : null;
    this.viewState = {
      frame_id: info.frame_id,
      image_url: this.api.imageUrl(info.frame_id),
      record: this.acked
        ? cloneRecord(this.acked)
        : defaultRecord(info.frame_id),
      overlay: null,
    };
  }

  async navigate(
    direction: 'next' | 'prev',
    opts: { force?: boolean } = {},
  ): Promise<NavResult> {
    if (this.dirty && !opts.force) {
      return { ok: false, reason: 'dirty' };
    }
    const n = this.frames.length;
    const step = direction === 'next' ? 1 : -1;
    const target = (this.index + step + n) % n;
    const wrapped =
      (direction === 'next' && target === 0 && n > 1) ||
      (direction === 'prev' && target === n - 1 && n > 1);
    await this.open(target);
    return { ok: true, wrapped };
  }

  async jump(
    frameId: string,
    opts: { force?: boolean } = {},
  ): Promise<NavResult> {
    const target = this.frames.findIndex((f) => f.frame_id === frameId);
    if (target < 0) {
      return { ok: false, reason: 'unknown-frame' };
    }
    if (this.dirty && !opts.force) {
      return { ok: false, reason: 'dirty' };
    }
    await this.open(target);
    return { ok: true };
  }

  /** Commit a finished drag: a face draft replaces the face box, an eye
   * draft appends (two at most). Presence flags follow the boxes. */
  commitBox(draft: BoxDraft): CommitResult {
    const box = normalizeDraft(draft);
    if (box === null) {
      return { ok: false, reason: 'too-small' };
    }
    const rec = this.viewState.record;
    if (draft.kind === 'face') {
      rec.face_box = toTuple(box);
      rec.face_present = true;
    } else {
      const eyes = rec.eye_boxes ?? [];
      if (eyes.length >= MAX_EYE_BOXES) {
        return { ok: false, reason: 'eye-cap' };
      }
      eyes.push(toTuple(box));
      rec.eye_boxes = eyes;
      rec.eyes_present = true;
    }
    return { ok: true };
  }

  /** Flip face presence. Turning it off drops the face box: the backend
   * schema rejects a box without its presence flag. */
  toggleFacePresent(): void {
    const rec = this.viewState.record;
    rec.face_present = !rec.face_present;
    if (!rec.face_present) {
      delete rec.face_box;
    }
  }

  toggleEyesPresent(): void {
    const rec = this.viewState.record;
    rec.eyes_present = !rec.eyes_present;
    if (!rec.eyes_present) {
      delete rec.eye_boxes;
    }
  }

  async save(): Promise<SaveResult> {
    if (!this.dirty) {
      return { ok: true, noop: true };
    }
    const payload = wireRecord(this.viewState.record);
    try {
      await this.api.putAnnotation(this.viewState.frame_id, payload);
    } catch (err) {
      if (err instanceof ApiError) {
        // the server's field-level message, shown verbatim; edits stay
        return { ok: false, message: err.message, retryable: err.status >= 500 };
      }
      const message = err instanceof Error ? err.message : String(err);
      return { ok: false, message, retryable: true };
    }
    this.acked = cloneRecord(this.viewState.record);
    this.frames[this.index]!.annotated = true;
    return { ok: true };
  }

  /** Fetch (or hide) the live detector overlay. Purely visual: the
   * annotation record is never touched. */
  async toggleOverlay(sf: number): Promise<OverlayResult> {
    if (this.viewState.overlay !== null) {
      this.viewState.overlay = null;
      return { ok: true };
    }
    try {
      this.viewState.overlay = await this.api.getDetections(
        this.viewState.frame_id,
        sf,
      );
    } catch (err) {
      this.viewState.overlay = null;
      const message = err instanceof Error ? err.message : String(err);
      return { ok: false, message };
    }
    return { ok: true };
  }
}
