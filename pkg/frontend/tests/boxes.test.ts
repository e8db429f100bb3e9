import { describe, expect, it } from 'vitest';

import {
  Box,
  BoxDraft,
  clampBox,
  displayToImage,
  fromTuple,
  normalizeDraft,
  toTuple,
} from '../src/boxes.js';

function faceDraft(
  anchor: [number, number],
  cursor: [number, number],
): BoxDraft {
  return { anchor, cursor, kind: 'face' };
}

describe('normalizeDraft', () => {
  it('turns a down-right drag into x/y/w/h', () => {
    expect(normalizeDraft(faceDraft([100, 80], [220, 200]))).toEqual({
      x: 100,
      y: 80,
      w: 120,
      h: 120,
    });
  });

  it('is symmetric under mirrored drags', () => {
    const forward = normalizeDraft(faceDraft([10, 20], [50, 70]));
    const backward = normalizeDraft(faceDraft([50, 70], [10, 20]));
    const mixed = normalizeDraft(faceDraft([50, 20], [10, 70]));
    expect(backward).toEqual(forward);
    expect(mixed).toEqual(forward);
  });

  it('rejects drags under 4 px in either dimension', () => {
    expect(normalizeDraft(faceDraft([10, 10], [13, 50]))).toBeNull();
    expect(normalizeDraft(faceDraft([10, 10], [50, 13]))).toBeNull();
    expect(normalizeDraft(faceDraft([10, 10], [10, 10]))).toBeNull();
  });

  it('accepts exactly 4x4', () => {
    expect(normalizeDraft(faceDraft([10, 10], [14, 14]))).toEqual({
      x: 10,
      y: 10,
      w: 4,
      h: 4,
    });
  });

  it('rounds fractional cursor positions to integers', () => {
    const box = normalizeDraft(faceDraft([10.4, 9.6], [20.5, 20.2]));
    expect(box).toEqual({ x: 10, y: 10, w: 11, h: 10 });
  });
});

describe('clampBox', () => {
  it('shrinks a box hanging off the frame edge', () => {
    expect(clampBox({ x: 90, y: 50, w: 30, h: 10 }, 100, 60)).toEqual({
      x: 90,
      y: 50,
      w: 10,
      h: 10,
    });
  });

  it('leaves an interior box alone', () => {
    const box: Box = { x: 5, y: 6, w: 20, h: 21 };
    expect(clampBox(box, 100, 100)).toEqual(box);
  });
});

describe('tuple round trip', () => {
  it('preserves all four components', () => {
    const box: Box = { x: 1, y: 2, w: 3, h: 4 };
    expect(fromTuple(toTuple(box))).toEqual(box);
    expect(toTuple(box)).toEqual([1, 2, 3, 4]);
  });
});

describe('displayToImage', () => {
  it('is exact when the display shows the image 1:1', () => {
    expect(displayToImage(37, 12, 320, 240, 320, 240)).toEqual([37, 12]);
  });

  it('undoes a 2x CSS zoom without drift', () => {
    // every even display coordinate maps back to the exact image pixel
    for (let px = 0; px <= 640; px += 2) {
      expect(displayToImage(px, 0, 640, 480, 320, 240)[0]).toBe(px / 2);
    }
  });

  it('clamps to the frame bounds', () => {
    expect(displayToImage(-5, 999, 100, 100, 100, 100)).toEqual([0, 100]);
  });
});
