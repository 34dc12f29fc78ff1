// Wires the canvas, control panel, and WebSocket together. The page is
// served next to a running engine; pass ?ws=ws://host:port to point at a
// different one.

import { ControlPanel, PanelElements } from './controlPanel.js';
import { LATENT_DIMS, parseInbound } from './protocol.js';
import { BufferedSender } from './socket.js';
import { StrokeCapture } from './strokeCapture.js';

const RECONNECT_DELAY_MS = 1000;

function engineUrl(): string {
  const override = new URLSearchParams(window.location.search).get('ws');
  if (override) return override;
  return `ws://${window.location.hostname || '127.0.0.1'}:8765`;
}

function buildSliders(host: HTMLElement): HTMLInputElement[] {
  const sliders: HTMLInputElement[] = [];
  for (let dim = 0; dim < LATENT_DIMS; dim++) {
    const row = document.createElement('label');
    row.className = 'slider-row';
    const caption = document.createElement('span');
    caption.textContent = `z${dim}`;
    const slider = document.createElement('input');
    slider.type = 'range';
    slider.min = '-1';
    slider.max = '1';
    slider.step = '0.01';
    slider.value = '0';
    row.append(caption, slider);
    host.appendChild(row);
    sliders.push(slider);
  }
  return sliders;
}

function drawInk(ctx: CanvasRenderingContext2D, canvas: HTMLCanvasElement) {
  let last: [number, number] | null = null;
  return {
    begin(ev: PointerEvent) {
      last = [ev.offsetX, ev.offsetY];
    },
    extend(ev: PointerEvent) {
      if (!last) return;
      ctx.strokeStyle = '#e8e8f0';
      ctx.lineWidth = 2.5;
      ctx.lineCap = 'round';
      ctx.beginPath();
      ctx.moveTo(last[0], last[1]);
      ctx.lineTo(ev.offsetX, ev.offsetY);
      ctx.stroke();
      last = [ev.offsetX, ev.offsetY];
    },
    end() {
      last = null;
    },
    wipe() {
      ctx.clearRect(0, 0, canvas.width, canvas.height);
      last = null;
    },
  };
}

function main(): void {
  const canvas = document.getElementById('sketch') as HTMLCanvasElement;
  const ctx = canvas.getContext('2d');
  if (!ctx) throw new Error('2D canvas not supported');

  const elements: PanelElements = {
    modeBadge: document.getElementById('mode-badge')!,
    exampleCount: document.getElementById('example-count')!,
    recordButton: document.getElementById('btn-record') as HTMLButtonElement,
    runButton: document.getElementById('btn-run') as HTMLButtonElement,
    trainButton: document.getElementById('btn-train') as HTMLButtonElement,
    randomiseButton: document.getElementById('btn-randomise') as HTMLButtonElement,
    clearButton: document.getElementById('btn-clear') as HTMLButtonElement,
    sliders: buildSliders(document.getElementById('sliders')!),
    toastArea: document.getElementById('toasts')!,
  };

  const sender = new BufferedSender((dropped) =>
    panel.warn(`connection lost: dropped ${dropped} stale frame(s)`),
  );
  const panel = new ControlPanel(elements, (frame) => sender.send(frame));
  const capture = new StrokeCapture(canvas, (frame) => sender.send(frame));
  const ink = drawInk(ctx, canvas);

  canvas.addEventListener('pointerdown', (ev) => {
    canvas.setPointerCapture(ev.pointerId);
    ink.begin(ev);
    capture.pointerDown(ev);
  });
  canvas.addEventListener('pointermove', (ev) => {
    ink.extend(ev);
    capture.pointerMove(ev);
  });
  canvas.addEventListener('pointerup', () => {
    ink.end();
    capture.pointerUp();
  });
  document.getElementById('btn-wipe')!.addEventListener('click', () => {
    ink.wipe();
    capture.clear();
  });

  const status = document.getElementById('connection')!;
  function connect(): void {
    const socket = new WebSocket(engineUrl());
    socket.addEventListener('open', () => {
      status.textContent = 'connected';
      status.dataset.state = 'up';
      sender.attach(socket);
    });
    socket.addEventListener('message', (ev) => {
      const frame = parseInbound(String(ev.data));
      if (frame === null) {
        console.warn('malformed engine frame', ev.data);
        return;
      }
      if (frame.type === 'state') panel.applyState(frame);
      else if (frame.type === 'rejected') panel.applyRejected(frame.reason);
      else panel.applyTrained(frame.loss);
    });
    socket.addEventListener('close', () => {
      status.textContent = 'reconnecting…';
      status.dataset.state = 'down';
      sender.attach(null);
      setTimeout(connect, RECONNECT_DELAY_MS);
    });
  }
  connect();
}

main();
