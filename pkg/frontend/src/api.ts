/** Typed client for the annotation backend's JSON API.
 *
 * Endpoints (all relative to one origin):
 *   GET  /api/frames                 -> [{frame_id, annotated}]
 *   GET  /api/frames/{id}/image      -> PNG bytes
 *   GET  /api/annotations/{id}       -> GroundTruthRecord | 404
 *   POST /api/annotations/{id}       -> 204 | 400 {"error": msg}
 *   GET  /api/detections/{id}?sf=k   -> FrameResult
 */

import type { BoxTuple } from './boxes.js';

export interface FrameInfo {
  frame_id: string;
  annotated: boolean;
}

/** Ground truth for one frame, exactly as the backend stores it. The
 * schema is closed: a box is only legal alongside its presence flag. */
export interface GroundTruthRecord {
  frame_id: string;
  face_present: boolean;
  face_box?: BoxTuple;
  eyes_present: boolean;
  eye_boxes?: BoxTuple[];
}

export interface Detection {
  rect: BoxTuple;
  score: number;
  sf_context: number;
  angle_context: number;
}

export interface FrameResult {
  frame_id: string;
  faces: Detection[];
  eyes: Detection[];
  face_present: boolean;
  eyes_present: boolean;
  elapsed: Record<string, number>;
}

/** Non-2xx response, carrying the server's error message when the body
 * had one. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function errorMessage(resp: Response): Promise<string> {
  try {
    const body: unknown = await resp.json();
    if (
      typeof body === 'object' &&
      body !== null &&
      typeof (body as { error?: unknown }).error === 'string'
    ) {
      return (body as { error: string }).error;
    }
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `${resp.status} ${resp.statusText}`;
}

async function expectOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    throw new ApiError(resp.status, await errorMessage(resp));
  }
  return resp;
}

export interface ApiClient {
  listFrames(): Promise<FrameInfo[]>;
  imageUrl(frameId: string): string;
  /** null when the frame has no annotation yet (404). */
  getAnnotation(frameId: string): Promise<GroundTruthRecord | null>;
  putAnnotation(frameId: string, record: GroundTruthRecord): Promise<void>;
  getDetections(frameId: string, sf: number): Promise<FrameResult>;
}

export class HttpApi implements ApiClient {
  constructor(private readonly base: string = '') {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async listFrames(): Promise<FrameInfo[]> {
    const resp = await expectOk(await fetch(this.url('/api/frames')));
    return (await resp.json()) as FrameInfo[];
  }

  imageUrl(frameId: string): string {
    return this.url(`/api/frames/${encodeURIComponent(frameId)}/image`);
  }

  async getAnnotation(frameId: string): Promise<GroundTruthRecord | null> {
    const resp = await fetch(
      this.url(`/api/annotations/${encodeURIComponent(frameId)}`),
    );
    if (resp.status === 404) {
      return null;
    }
    await expectOk(resp);
    return (await resp.json()) as GroundTruthRecord;
  }

  async putAnnotation(
    frameId: string,
    record: GroundTruthRecord,
  ): Promise<void> {
    const resp = await fetch(
      this.url(`/api/annotations/${encodeURIComponent(frameId)}`),
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(record),
      },
    );
    await expectOk(resp);
  }

  async getDetections(frameId: string, sf: number): Promise<FrameResult> {
    const resp = await expectOk(
      await fetch(
        this.url(
          `/api/detections/${encodeURIComponent(frameId)}?sf=${sf}`,
        ),
      ),
    );
    return (await resp.json()) as FrameResult;
  }
}
