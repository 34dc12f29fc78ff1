// Right-hand panel: transport buttons, mode badge, example counter, and
// the 16 latent sliders. The panel holds no truth of its own — one state
// snapshot from the engine fully reconstructs it.

import {
  CommandName,
  EngineMode,
  LATENT_DIMS,
  OutboundFrame,
  StateFrame,
  command,
  setLatent,
} from './protocol.js';

export interface PanelElements {
  modeBadge: HTMLElement;
  exampleCount: HTMLElement;
  recordButton: HTMLButtonElement;
  runButton: HTMLButtonElement;
  trainButton: HTMLButtonElement;
  randomiseButton: HTMLButtonElement;
  clearButton: HTMLButtonElement;
  sliders: HTMLInputElement[];
  toastArea: HTMLElement;
}

const TOAST_LIFETIME_MS = 4000;

export class ControlPanel {
  private mode: EngineMode = 'idle';

  constructor(
    private readonly el: PanelElements,
    private readonly emit: (frame: OutboundFrame) => void,
  ) {
    if (el.sliders.length !== LATENT_DIMS) {
      throw new Error(`panel needs ${LATENT_DIMS} sliders, got ${el.sliders.length}`);
    }
    el.recordButton.addEventListener('click', () => {
      this.sendCommand(this.mode === 'recording' ? 'stop_record' : 'record');
    });
    el.runButton.addEventListener('click', () => {
      this.sendCommand(this.mode === 'running' ? 'stop' : 'run');
    });
    el.trainButton.addEventListener('click', () => this.sendCommand('train'));
    el.randomiseButton.addEventListener('click', () => this.sendCommand('randomise'));
    el.clearButton.addEventListener('click', () => this.sendCommand('clear'));
    el.sliders.forEach((slider, dim) => {
      slider.addEventListener('input', () => {
        this.emit(setLatent(dim, Number(slider.value)));
      });
    });
  }

  sendCommand(name: CommandName): void {
    this.emit(command(name));
  }

  applyState(frame: StateFrame): void {
    this.mode = frame.mode;
    this.el.modeBadge.textContent = frame.mode;
    this.el.modeBadge.dataset.mode = frame.mode;
    this.el.exampleCount.textContent = String(frame.example_count);
    frame.latent.forEach((value, dim) => {
      this.el.sliders[dim].value = String(value);
    });

    const mode = frame.mode;
    // record doubles as stop-record while recording; anywhere else it is
    // only usable from idle
    this.el.recordButton.textContent = mode === 'recording' ? 'stop recording' : 'record';
    this.el.recordButton.disabled = !(mode === 'idle' || mode === 'recording');
    // run doubles as stop while running, and needs examples to start
    this.el.runButton.textContent = mode === 'running' ? 'stop' : 'run';
    this.el.runButton.disabled =
      mode === 'running' ? false : mode !== 'idle' || frame.example_count === 0;
    this.el.trainButton.disabled = mode !== 'idle' || frame.example_count === 0;
    this.el.randomiseButton.disabled = false;
    this.el.clearButton.disabled = false;
  }

  applyRejected(reason: string): void {
    this.toast(`rejected: ${reason}`, 'warn');
  }

  applyTrained(loss: number): void {
    this.toast(`mapper trained (loss ${loss.toExponential(2)})`, 'info');
  }

  warn(message: string): void {
    this.toast(message, 'warn');
  }

  toast(message: string, kind: 'info' | 'warn'): void {
    const node = this.el.toastArea.ownerDocument.createElement('div');
    node.className = `toast toast-${kind}`;
    node.textContent = message;
    this.el.toastArea.appendChild(node);
    setTimeout(() => node.remove(), TOAST_LIFETIME_MS);
  }
}
