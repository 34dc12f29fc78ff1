// Pointer input -> stroke frames. Coordinates are normalised to [0, 1]
// against the canvas bounding rect; timestamps are milliseconds since the
// first event of the current canvas frame (reset by clear()), so the very
// first pointer-down always carries t = 0.

import {
  OutboundFrame,
  canvasClear,
  strokeBegin,
  strokeEnd,
  strokePoint,
} from './protocol.js';

export interface CanvasLike {
  getBoundingClientRect(): { left: number; top: number; width: number; height: number };
}

export interface PointerLike {
  clientX: number;
  clientY: number;
}

export class StrokeCapture {
  private drawing = false;
  private epoch: number | null = null;

  constructor(
    private readonly canvas: CanvasLike,
    private readonly emit: (frame: OutboundFrame) => void,
    private readonly now: () => number = () => performance.now(),
  ) {}

  get isDrawing(): boolean {
    return this.drawing;
  }

  pointerDown(ev: PointerLike): void {
    if (this.drawing) return; // e.g. second touch while drawing
    this.drawing = true;
    const [x, y] = this.normalise(ev);
    this.emit(strokeBegin(x, y, this.elapsed()));
  }

  pointerMove(ev: PointerLike): void {
    if (!this.drawing) return; // hover, not a stroke
    const [x, y] = this.normalise(ev);
    this.emit(strokePoint(x, y, this.elapsed()));
  }

  pointerUp(): void {
    if (!this.drawing) return;
    this.drawing = false;
    this.emit(strokeEnd(this.elapsed()));
  }

  clear(): void {
    this.drawing = false;
    this.epoch = null;
    this.emit(canvasClear());
  }

  private elapsed(): number {
    const t = this.now();
    if (this.epoch === null) this.epoch = t;
    return t - this.epoch;
  }

  private normalise(ev: PointerLike): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const x = rect.width > 0 ? (ev.clientX - rect.left) / rect.width : 0;
    const y = rect.height > 0 ? (ev.clientY - rect.top) / rect.height : 0;
    return [clamp01(x), clamp01(y)];
  }
}

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}
