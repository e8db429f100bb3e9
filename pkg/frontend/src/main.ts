/** Browser shell: wires the session state to the DOM.
 *
 * Everything with logic worth testing lives in state/boxes/canvas/
 * keyboard; this file only binds events, draws, and shows status.
 */

import { HttpApi } from './api.js';
import type { BoxDraft, BoxKind } from './boxes.js';
import { displayToImage } from './boxes.js';
import type { BoxStyle, Surface } from './canvas.js';
import { render } from './canvas.js';
import { actionForKey, shortcutHelp } from './keyboard.js';
import { Session } from './state.js';

const BOX_COLORS: Record<BoxStyle, { stroke: string; dash: number[] }> = {
  face: { stroke: '#33bbff', dash: [] },
  eye: { stroke: '#ffcc33', dash: [] },
  'overlay-face': { stroke: '#ff5555', dash: [6, 4] },
  'overlay-eye': { stroke: '#55dd55', dash: [6, 4] },
  draft: { stroke: '#ffffff', dash: [4, 3] },
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

class CanvasSurface implements Surface {
  private readonly ctx: CanvasRenderingContext2D;
  image: HTMLImageElement | null = null;

  constructor(private readonly canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext('2d');
    if (!ctx) {
      throw new Error('2d canvas context unavailable');
    }
    this.ctx = ctx;
  }

  begin(width: number, height: number): void {
    this.canvas.width = width;
    this.canvas.height = height;
    this.ctx.clearRect(0, 0, width, height);
    if (this.image) {
      this.ctx.drawImage(this.image, 0, 0);
    }
  }

  box(b: { x: number; y: number; w: number; h: number }, style: BoxStyle): void {
    const { stroke, dash } = BOX_COLORS[style];
    this.ctx.beginPath();
    this.ctx.rect(b.x, b.y, b.w, b.h);
    this.ctx.setLineDash(dash);
    this.ctx.strokeStyle = stroke;
    this.ctx.lineWidth = 2;
    this.ctx.stroke();
    this.ctx.setLineDash([]);
  }

  badge(text: string): void {
    this.ctx.font = '14px sans-serif';
    this.ctx.fillStyle = 'rgba(0,0,0,0.7)';
    const w = this.ctx.measureText(text).width + 12;
    this.ctx.fillRect(8, 8, w, 22);
    this.ctx.fillStyle = '#ffffff';
    this.ctx.fillText(text, 14, 24);
  }

  legend(entries: string[]): void {
    const colors = ['#33bbff', '#ff5555'];
    this.ctx.font = '12px sans-serif';
    entries.forEach((label, i) => {
      const y = this.canvas.height - 12 - 18 * (entries.length - 1 - i);
      this.ctx.fillStyle = colors[i % colors.length]!;
      this.ctx.fillRect(8, y - 10, 12, 12);
      this.ctx.fillStyle = '#ffffff';
      this.ctx.fillText(label, 26, y);
    });
  }
}

async function boot(): Promise<void> {
  const api = new HttpApi('');
  const session = await Session.load(api);

  const canvas = el<HTMLCanvasElement>('frame');
  const surface = new CanvasSurface(canvas);
  const status = el<HTMLSpanElement>('status');
  const banner = el<HTMLDivElement>('banner');
  const sfInput = el<HTMLInputElement>('sf');
  el<HTMLDivElement>('help').textContent = shortcutHelp().join('  ·  ');

  let tool: BoxKind = 'face';
  let draft: BoxDraft | null = null;

  function notify(message: string, isError = false): void {
    banner.textContent = message;
    banner.className = isError ? 'banner error' : 'banner';
  }

  function redraw(): void {
    render(
      {
        width: canvas.width || surface.image?.naturalWidth || 1,
        height: canvas.height || surface.image?.naturalHeight || 1,
        record: session.view.record,
        overlay: session.view.overlay,
        draft,
      },
      surface,
    );
    const dirtyMark = session.dirty ? ' — unsaved edits' : '';
    status.textContent =
      `${session.view.frame_id}  (${session.currentIndex + 1}/` +
      `${session.frames.length}, ${session.progress} annotated)` +
      `  tool: ${tool}${dirtyMark}`;
  }

  function showFrame(): void {
    const img = new Image();
    img.onload = () => {
      surface.image = img;
      canvas.width = img.naturalWidth;
      canvas.height = img.naturalHeight;
      redraw();
    };
    img.onerror = () => notify('failed to load frame image', true);
    img.src = session.view.image_url;
  }

  function pointer(ev: MouseEvent): [number, number] {
    const rect = canvas.getBoundingClientRect();
    return displayToImage(
      ev.clientX - rect.left,
      ev.clientY - rect.top,
      rect.width,
      rect.height,
      canvas.width,
      canvas.height,
    );
  }

  canvas.addEventListener('mousedown', (ev) => {
    const p = pointer(ev);
    draft = { anchor: p, cursor: p, kind: tool };
    redraw();
  });
  canvas.addEventListener('mousemove', (ev) => {
    if (draft) {
      draft.cursor = pointer(ev);
      redraw();
    }
  });
  canvas.addEventListener('mouseup', (ev) => {
    if (!draft) {
      return;
    }
    draft.cursor = pointer(ev);
    const result = session.commitBox(draft);
    if (!result.ok) {
      notify(
        result.reason === 'eye-cap'
          ? 'two eye boxes at most — delete one first (toggle E)'
          : 'box too small (under 4×4 px)',
        true,
      );
    } else {
      notify('');
    }
    draft = null;
    redraw();
  });

  async function navigate(direction: 'next' | 'prev'): Promise<void> {
    let result = await session.navigate(direction);
    if (!result.ok && result.reason === 'dirty') {
      if (!window.confirm('Discard unsaved edits on this frame?')) {
        return;
      }
      result = await session.navigate(direction, { force: true });
    }
    if (result.wrapped) {
      notify(direction === 'next' ? 'wrapped to first frame' : 'wrapped to last frame');
    } else {
      notify('');
    }
    draft = null;
    showFrame();
  }

  document.addEventListener('keydown', (ev) => {
    if (ev.target instanceof HTMLInputElement) {
      return;
    }
    const action = actionForKey(ev.key);
    if (!action) {
      return;
    }
    ev.preventDefault();
    void (async () => {
      switch (action.kind) {
        case 'navigate':
          await navigate(action.direction);
          break;
        case 'toggle-face':
          session.toggleFacePresent();
          break;
        case 'toggle-eyes':
          session.toggleEyesPresent();
          break;
        case 'save': {
          const saved = await session.save();
          if (saved.ok) {
            notify(saved.noop ? 'nothing to save' : 'saved');
          } else {
            notify(
              (saved.retryable ? 'save failed (will retry on S): ' : 'rejected: ') +
                (saved.message ?? 'unknown error'),
              true,
            );
          }
          break;
        }
        case 'toggle-overlay': {
          const sf = Number(sfInput.value) || 1;
          const res = await session.toggleOverlay(sf);
          if (!res.ok) {
            notify(`overlay unavailable: ${res.message ?? ''}`, true);
          }
          break;
        }
        case 'set-tool':
          tool = action.tool;
          break;
        case 'cancel-draft':
          draft = null;
          break;
      }
      redraw();
    })();
  });

  showFrame();
}

boot().catch((err) => {
  const banner = document.getElementById('banner');
  if (banner) {
    banner.textContent = `failed to start: ${err instanceof Error ? err.message : err}`;
    banner.className = 'banner error';
  }
});
