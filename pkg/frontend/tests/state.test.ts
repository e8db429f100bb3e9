import { beforeEach, describe, expect, it } from 'vitest';

import {
  ApiClient,
  ApiError,
  FrameInfo,
  FrameResult,
  GroundTruthRecord,
} from '../src/api.js';
import { BoxDraft } from '../src/boxes.js';
import { Session, wireRecord } from '../src/state.js';

function face(anchor: [number, number], cursor: [number, number]): BoxDraft {
  return { anchor, cursor, kind: 'face' };
}

function eye(anchor: [number, number], cursor: [number, number]): BoxDraft {
  return { anchor, cursor, kind: 'eye' };
}

const SAMPLE_DETECTIONS: FrameResult = {
  frame_id: 't0',
  faces: [{ rect: [10, 10, 50, 50], score: 12, sf_context: 1, angle_context: 0 }],
  eyes: [],
  face_present: true,
  eyes_present: false,
  elapsed: { downsample: 0, integral: 0, face_scan: 1, eye_scan: 0, tilt_extra: 0 },
};

class FakeApi implements ApiClient {
  frames: FrameInfo[] = [
    { frame_id: 't0', annotated: true },
    { frame_id: 't1', annotated: false },
    { frame_id: 't2', annotated: false },
  ];

  store = new Map<string, GroundTruthRecord>([
    [
      't0',
      {
        frame_id: 't0',
        face_present: true,
        face_box: [10, 10, 40, 40],
        eyes_present: false,
      },
    ],
  ]);

  putError: Error | null = null;
  detectionsError: Error | null = null;
  putLog: GroundTruthRecord[] = [];

  async listFrames(): Promise<FrameInfo[]> {
    return this.frames.map((f) => ({ ...f }));
  }

  imageUrl(frameId: string): string {
    return `/api/frames/${frameId}/image`;
  }

  async getAnnotation(frameId: string): Promise<GroundTruthRecord | null> {
    const rec = this.store.get(frameId);
    return rec ? structuredClone(rec) : null;
  }

  async putAnnotation(frameId: string, record: GroundTruthRecord): Promise<void> {
    if (this.putError) {
      throw this.putError;
    }
    this.putLog.push(structuredClone(record));
    this.store.set(frameId, structuredClone(record));
  }

  async getDetections(): Promise<FrameResult> {
    if (this.detectionsError) {
      throw this.detectionsError;
    }
    return structuredClone(SAMPLE_DETECTIONS);
  }
}

let api: FakeApi;

beforeEach(() => {
  api = new FakeApi();
});

describe('Session.load', () => {
  it('opens the first frame with its saved annotation', async () => {
    const s = await Session.load(api);
    expect(s.view.frame_id).toBe('t0');
    expect(s.view.record.face_box).toEqual([10, 10, 40, 40]);
    expect(s.view.image_url).toBe('/api/frames/t0/image');
    expect(s.dirty).toBe(false);
  });

  it('rejects an empty frame list', async () => {
    api.frames = [];
    await expect(Session.load(api)).rejects.toThrow(/no frames/);
  });
});

describe('dirtiness', () => {
  it('tracks divergence from the acknowledged record, not edit count', async () => {
    const s = await Session.load(api);
    expect(s.dirty).toBe(false);
    s.toggleEyesPresent();
    expect(s.dirty).toBe(true);
    s.toggleEyesPresent(); // back to the acknowledged state
    expect(s.dirty).toBe(false);
  });

  it('is clean on a never-saved frame until something changes', async () => {
    const s = await Session.load(api);
    await s.navigate('next');
    expect(s.view.frame_id).toBe('t1');
    expect(s.dirty).toBe(false);
    expect(s.commitBox(face([0, 0], [30, 30])).ok).toBe(true);
    expect(s.dirty).toBe(true);
  });
});

describe('navigate', () => {
  it('steps forward and wraps with a cue', async () => {
    const s = await Session.load(api);
    expect((await s.navigate('next')).wrapped).toBe(false);
    expect(s.view.frame_id).toBe('t1');
    await s.navigate('next');
    const wrap = await s.navigate('next');
    expect(wrap).toEqual({ ok: true, wrapped: true });
    expect(s.view.frame_id).toBe('t0');
  });

  it('steps backward with wrap from the first frame', async () => {
    const s = await Session.load(api);
    const wrap = await s.navigate('prev');
    expect(wrap.wrapped).toBe(true);
    expect(s.view.frame_id).toBe('t2');
  });

  it('blocks on unsaved edits until forced', async () => {
    const s = await Session.load(api);
    s.toggleEyesPresent();
    expect(await s.navigate('next')).toEqual({ ok: false, reason: 'dirty' });
    expect(s.view.frame_id).toBe('t0'); // view unchanged
    const forced = await s.navigate('next', { force: true });
    expect(forced.ok).toBe(true);
    expect(s.view.frame_id).toBe('t1');
    expect(s.dirty).toBe(false); // abandoned edits are gone
  });

  it('jumps by frame id and rejects unknown targets', async () => {
    const s = await Session.load(api);
    expect(await s.jump('t2')).toEqual({ ok: true });
    expect(s.view.frame_id).toBe('t2');
    expect(await s.jump('nope')).toEqual({ ok: false, reason: 'unknown-frame' });
    expect(s.view.frame_id).toBe('t2');
  });
});

describe('commitBox', () => {
  it('face draft replaces the face box and forces presence', async () => {
    const s = await Session.load(api);
    await s.navigate('next');
    expect(s.view.record.face_present).toBe(false);
    expect(s.commitBox(face([100, 80], [220, 200])).ok).toBe(true);
    expect(s.view.record.face_present).toBe(true);
    expect(s.view.record.face_box).toEqual([100, 80, 120, 120]);
    s.commitBox(face([0, 0], [50, 50]));
    expect(s.view.record.face_box).toEqual([0, 0, 50, 50]); // replaced
  });

  it('eye drafts append up to the two-eye cap', async () => {
    const s = await Session.load(api);
    expect(s.commitBox(eye([10, 10], [20, 20])).ok).toBe(true);
    expect(s.commitBox(eye([30, 10], [40, 20])).ok).toBe(true);
    expect(s.view.record.eye_boxes).toHaveLength(2);
    expect(s.view.record.eyes_present).toBe(true);
    expect(s.commitBox(eye([50, 10], [60, 20]))).toEqual({
      ok: false,
      reason: 'eye-cap',
    });
    expect(s.view.record.eye_boxes).toHaveLength(2);
  });

  it('rejects undersized drags without touching the record', async () => {
    const s = await Session.load(api);
    const before = structuredClone(s.view.record);
    expect(s.commitBox(face([5, 5], [7, 40]))).toEqual({
      ok: false,
      reason: 'too-small',
    });
    expect(s.view.record).toEqual(before);
  });
});

describe('presence toggles', () => {
  it('dropping presence also drops the boxes (closed schema)', async () => {
    const s = await Session.load(api);
    s.commitBox(eye([10, 10], [20, 20]));
    s.toggleFacePresent();
    expect(s.view.record.face_present).toBe(false);
    expect(s.view.record.face_box).toBeUndefined();
    s.toggleEyesPresent();
    expect(s.view.record.eye_boxes).toBeUndefined();
  });
});

describe('save', () => {
  it('is a no-op when clean', async () => {
    const s = await Session.load(api);
    expect(await s.save()).toEqual({ ok: true, noop: true });
    expect(api.putLog).toHaveLength(0);
  });

  it('stores the record, clears dirty and advances progress', async () => {
    const s = await Session.load(api);
    await s.navigate('next');
    s.commitBox(face([4, 4], [44, 44]));
    expect(s.progress).toBe(1);
    const result = await s.save();
    expect(result).toEqual({ ok: true });
    expect(s.dirty).toBe(false);
    expect(s.progress).toBe(2);
    expect(api.store.get('t1')?.face_box).toEqual([4, 4, 40, 40]);
  });

  it('keeps edits and surfaces the message on a 400', async () => {
    const s = await Session.load(api);
    s.toggleEyesPresent();
    api.putError = new ApiError(400, 't0: eye_boxes given but eyes_present is false');
    const result = await s.save();
    expect(result.ok).toBe(false);
    expect(result.message).toMatch(/eyes_present/);
    expect(result.retryable).toBe(false);
    expect(s.dirty).toBe(true); // edits retained
  });

  it('marks transport failures retryable', async () => {
    const s = await Session.load(api);
    s.toggleEyesPresent();
    api.putError = new TypeError('fetch failed');
    const result = await s.save();
    expect(result.ok).toBe(false);
    expect(result.retryable).toBe(true);
    expect(s.dirty).toBe(true);
  });
});

describe('detector overlay', () => {
  it('toggles on and off without touching the annotation', async () => {
    const s = await Session.load(api);
    const payloadBefore = JSON.stringify(wireRecord(s.view.record));
    expect(await s.toggleOverlay(2)).toEqual({ ok: true });
    expect(s.view.overlay?.faces).toHaveLength(1);
    expect(JSON.stringify(wireRecord(s.view.record))).toBe(payloadBefore);
    expect(s.dirty).toBe(false);
    expect(await s.toggleOverlay(2)).toEqual({ ok: true });
    expect(s.view.overlay).toBeNull();
  });

  it('reports backend failures and stays off', async () => {
    const s = await Session.load(api);
    api.detectionsError = new ApiError(503, 'server started without a face cascade');
    const result = await s.toggleOverlay(1);
    expect(result.ok).toBe(false);
    expect(result.message).toMatch(/cascade/);
    expect(s.view.overlay).toBeNull();
  });

  it('clears when navigating away', async () => {
    const s = await Session.load(api);
    await s.toggleOverlay(2);
    await s.navigate('next');
    expect(s.view.overlay).toBeNull();
  });
});

describe('wireRecord', () => {
  it('strips boxes that lost their presence flag and empty lists', () => {
    const rec: GroundTruthRecord = {
      frame_id: 'x',
      face_present: false,
      face_box: [1, 2, 10, 10],
      eyes_present: true,
      eye_boxes: [],
    };
    expect(wireRecord(rec)).toEqual({
      frame_id: 'x',
      face_present: false,
      eyes_present: true,
    });
  });
});
