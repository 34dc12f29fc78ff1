// Wire schema shared with the engine: one JSON object per WebSocket text
// frame. Outbound builders below are the only way the UI constructs
// frames, so every message matches the engine's parser exactly.

export interface StrokeBeginFrame {
  type: 'stroke_begin';
  x: number;
  y: number;
  t: number;
}

export interface StrokePointFrame {
  type: 'stroke_point';
  x: number;
  y: number;
  t: number;
}

export interface StrokeEndFrame {
  type: 'stroke_end';
  t: number;
}

export interface CanvasClearFrame {
  type: 'canvas_clear';
}

export type CommandName =
  | 'record'
  | 'stop_record'
  | 'randomise'
  | 'train'
  | 'run'
  | 'stop'
  | 'clear';

export interface CommandFrame {
  type: 'command';
  name: CommandName;
}

export interface SetLatentFrame {
  type: 'set_latent';
  dim: number;
  value: number;
}

export type OutboundFrame =
  | StrokeBeginFrame
  | StrokePointFrame
  | StrokeEndFrame
  | CanvasClearFrame
  | CommandFrame
  | SetLatentFrame;

export type EngineMode = 'idle' | 'recording' | 'training' | 'running';

export interface StateFrame {
  type: 'state';
  mode: EngineMode;
  latent: number[];
  example_count: number;
}

export interface RejectedFrame {
  type: 'rejected';
  reason: string;
}

export interface TrainedFrame {
  type: 'trained';
  loss: number;
}

export type InboundFrame = StateFrame | RejectedFrame | TrainedFrame;

export const LATENT_DIMS = 16;

const COMMAND_NAMES: readonly string[] = [
  'record', 'stop_record', 'randomise', 'train', 'run', 'stop', 'clear',
];

export function strokeBegin(x: number, y: number, t: number): StrokeBeginFrame {
  return { type: 'stroke_begin', x, y, t };
}

export function strokePoint(x: number, y: number, t: number): StrokePointFrame {
  return { type: 'stroke_point', x, y, t };
}

export function strokeEnd(t: number): StrokeEndFrame {
  return { type: 'stroke_end', t };
}

export function canvasClear(): CanvasClearFrame {
  return { type: 'canvas_clear' };
}

export function command(name: CommandName): CommandFrame {
  return { type: 'command', name };
}

export function setLatent(dim: number, value: number): SetLatentFrame {
  return { type: 'set_latent', dim, value };
}

export function isOutboundFrame(value: unknown): value is OutboundFrame {
  if (typeof value !== 'object' || value === null) return false;
  const frame = value as Record<string, unknown>;
  switch (frame.type) {
    case 'stroke_begin':
    case 'stroke_point':
      return isUnit(frame.x) && isUnit(frame.y) && isFiniteNumber(frame.t);
    case 'stroke_end':
      return isFiniteNumber(frame.t);
    case 'canvas_clear':
      return true;
    case 'command':
      return typeof frame.name === 'string' && COMMAND_NAMES.includes(frame.name);
    case 'set_latent':
      return (
        typeof frame.dim === 'number' &&
        Number.isInteger(frame.dim) &&
        frame.dim >= 0 &&
        frame.dim < LATENT_DIMS &&
        isFiniteNumber(frame.value) &&
        (frame.value as number) >= -1 &&
        (frame.value as number) <= 1
      );
    default:
      return false;
  }
}

export function parseInbound(text: string): InboundFrame | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== 'object' || doc === null) return null;
  const frame = doc as Record<string, unknown>;
  if (
    frame.type === 'state' &&
    ['idle', 'recording', 'training', 'running'].includes(frame.mode as string) &&
    Array.isArray(frame.latent) &&
    frame.latent.length === LATENT_DIMS &&
    frame.latent.every(isFiniteNumber) &&
    typeof frame.example_count === 'number'
  ) {
    return frame as unknown as StateFrame;
  }
  if (frame.type === 'rejected' && typeof frame.reason === 'string') {
    return frame as unknown as RejectedFrame;
  }
  if (frame.type === 'trained' && isFiniteNumber(frame.loss)) {
    return frame as unknown as TrainedFrame;
  }
  return null;
}

function isFiniteNumber(value: unknown): value is number {
  return typeof value === 'number' && Number.isFinite(value);
}

function isUnit(value: unknown): value is number {
  return isFiniteNumber(value) && value >= 0 && value <= 1;
}
