// WebSocket client with short-lived send buffering: frames produced while
// the connection is down are replayed in order on reconnect if they are
// younger than MAX_BUFFER_AGE_MS, otherwise dropped with a warning.

import { OutboundFrame } from './protocol.js';

export const MAX_BUFFER_AGE_MS = 5000;

export interface SocketLike {
  readonly readyState: number;
  send(data: string): void;
}

const OPEN = 1;

export class BufferedSender {
  private buffer: Array<{ at: number; text: string }> = [];

  constructor(
    private readonly onDrop: (count: number) => void,
    private readonly now: () => number = () => Date.now(),
  ) {}

  private socket: SocketLike | null = null;

  attach(socket: SocketLike | null): void {
    this.socket = socket;
    if (socket !== null && socket.readyState === OPEN) this.flush();
  }

  send(frame: OutboundFrame): void {
    const text = JSON.stringify(frame);
    if (this.socket !== null && this.socket.readyState === OPEN) {
      this.socket.send(text);
      return;
    }
    this.buffer.push({ at: this.now(), text });
  }

  flush(): void {
    if (this.socket === null || this.socket.readyState !== OPEN) return;
    const cutoff = this.now() - MAX_BUFFER_AGE_MS;
    const fresh = this.buffer.filter((item) => item.at >= cutoff);
    const dropped = this.buffer.length - fresh.length;
    this.buffer = [];
    if (dropped > 0) this.onDrop(dropped);
    for (const item of fresh) this.socket.send(item.text);
  }

  get pending(): number {
    return this.buffer.length;
  }
}
