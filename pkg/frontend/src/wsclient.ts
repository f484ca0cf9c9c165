// Thin WebSocket wrapper: dispatches inbound traffic into the store,
// queues a bounded number of commands while disconnected, reconnects
// with a fixed backoff.  The socket implementation is injectable so
// the same code runs in the browser and under node tests.

import { Command, parseServerMsg } from './protocol.js';
import { ConsoleStore } from './state.js';

export interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export interface WebSocketCtor {
  new (url: string): WebSocketLike;
}

const OPEN = 1;

export interface ClientOptions {
  WebSocketImpl?: WebSocketCtor;
  reconnectMs?: number;
  maxQueuedCommands?: number;
}

export class ConsoleClient {
  readonly store: ConsoleStore;
  private url: string;
  private ws: WebSocketLike | null = null;
  private ctor: WebSocketCtor;
  private reconnectMs: number;
  private maxQueued: number;
  private queue: Command[] = [];
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;

  constructor(url: string, store: ConsoleStore, options: ClientOptions = {}) {
    this.url = url;
    this.store = store;
    const impl = options.WebSocketImpl ?? (globalThis as { WebSocket?: WebSocketCtor }).WebSocket;
    if (!impl) throw new Error('no WebSocket implementation available');
    this.ctor = impl;
    this.reconnectMs = options.reconnectMs ?? 2000;
    this.maxQueued = options.maxQueuedCommands ?? 16;
  }

  connect(): void {
    this.closedByUser = false;
    this.store.setConnection('connecting');
    const ws = new this.ctor(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.store.setConnection('open');
      const queued = this.queue.splice(0, this.queue.length);
      for (const command of queued) this.send(command);
    };
    ws.onmessage = (event) => {
      try {
        this.store.apply(parseServerMsg(String(event.data)));
      } catch {
        // ignore malformed frames; the server also reports errors in-band
      }
    };
    ws.onerror = () => {
      /* onclose always follows */
    };
    ws.onclose = () => {
      this.store.setConnection('closed');
      if (!this.closedByUser && this.reconnectMs > 0) {
        this.reconnectTimer = setTimeout(() => this.connect(), this.reconnectMs);
      }
    };
  }

  /** Send now, or queue up to the bound while disconnected. */
  send(command: Command): boolean {
    if (this.ws && this.ws.readyState === OPEN) {
      this.ws.send(JSON.stringify(command));
      return true;
    }
    if (this.queue.length >= this.maxQueued) {
      this.store.noteDroppedCommand();
      return false;
    }
    this.queue.push(command);
    return true;
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer) clearTimeout(this.reconnectTimer);
    this.ws?.close();
  }
}
