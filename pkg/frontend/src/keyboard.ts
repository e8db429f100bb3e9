/** Keyboard-first workflow: one mapping table from key to action.
 *
 * Arrows step through frames, F/E flip the presence flags, S saves,
 * O toggles the detector overlay, 1/2 pick the drawing tool, Escape
 * abandons the current drag. The dispatcher lives in the browser shell;
 * this module only decides what a key means.
 */

import type { BoxKind } from './boxes.js';

export type KeyAction =
  | { kind: 'navigate'; direction: 'next' | 'prev' }
  | { kind: 'toggle-face' }
  | { kind: 'toggle-eyes' }
  | { kind: 'save' }
  | { kind: 'toggle-overlay' }
  | { kind: 'set-tool'; tool: BoxKind }
  | { kind: 'cancel-draft' };

const BINDINGS: Record<string, KeyAction> = {
  ArrowRight: { kind: 'navigate', direction: 'next' },
  ArrowDown: { kind: 'navigate', direction: 'next' },
  ArrowLeft: { kind: 'navigate', direction: 'prev' },
  ArrowUp: { kind: 'navigate', direction: 'prev' },
  f: { kind: 'toggle-face' },
  e: { kind: 'toggle-eyes' },
  s: { kind: 'save' },
  o: { kind: 'toggle-overlay' },
  '1': { kind: 'set-tool', tool: 'face' },
  '2': { kind: 'set-tool', tool: 'eye' },
  Escape: { kind: 'cancel-draft' },
};

/** The action bound to a keyboard event key, or null for unbound keys
 * (letters are case-insensitive so Shift doesn't change meaning). */
export function actionForKey(key: string): KeyAction | null {
  return BINDINGS[key] ?? BINDINGS[key.toLowerCase()] ?? null;
}

/** Lines for the on-screen shortcut help. */
export function shortcutHelp(): string[] {
  return [
    'arrows: prev/next frame',
    'F: toggle face present',
    'E: toggle eyes present',
    '1/2: draw face/eye boxes',
    'S: save',
    'O: detector overlay',
    'Esc: cancel drag',
  ];
}
