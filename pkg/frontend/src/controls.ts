// Control-panel logic: slider/preset/pose changes become commands,
// clamped client-side exactly like the server clamps them, and
// coalesced so at most one set_motions goes out per communication
// cycle.

import { clampMotion, Command, MotionInfo } from './protocol.js';
import { ConsoleStore } from './state.js';
import { ConsoleClient } from './wsclient.js';

export class CommandPanel {
  private client: ConsoleClient;
  private store: ConsoleStore;
  private cycleMs: number;
  private pendingMotions: Record<string, number> = {};
  private flushTimer: ReturnType<typeof setTimeout> | null = null;
  private lastFlushMs = -Infinity;
  private now: () => number;

  constructor(client: ConsoleClient, cycleMs = 10, now: () => number = () => Date.now()) {
    this.client = client;
    this.store = client.store;
    this.cycleMs = cycleMs;
    this.now = now;
  }

  private motionTable(): Record<string, MotionInfo> | null {
    return this.store.state.hello?.motions ?? null;
  }

  /** Slider moved: clamp, surface a notice when the value was cut. */
  setMotion(id: number, value: number): number {
    const { value: clamped, clamped: wasClamped } = clampMotion(id, value, this.motionTable());
    if (wasClamped) {
      this.store.noteClamp(`motion ${id}: ${value} clamped to ${clamped}`);
    }
    this.pendingMotions[String(id)] = clamped;
    this.scheduleFlush();
    return clamped;
  }

  selectPreset(name: string): void {
    this.client.send({ type: 'set_emotion', name });
  }

  setNeck(yaw: number, pitch: number, roll: number): void {
    const y = this.clampAndNote(29, yaw);
    const p = this.clampAndNote(30, pitch);
    const r = this.clampAndNote(31, roll);
    this.client.send({ type: 'set_neck', yaw: y, pitch: p, roll: r });
  }

  setEyes(yawLeft: number, yawRight: number, pitch: number): void {
    this.client.send({
      type: 'set_eyes',
      yaw_left: this.clampAndNote(1, yawLeft),
      yaw_right: this.clampAndNote(2, yawRight),
      pitch: this.clampAndNote(3, pitch),
    });
  }

  playTone(position: number, durationS = 0.5): void {
    this.client.send({ type: 'play_tone', position, duration_s: durationS });
  }

  private clampAndNote(id: number, value: number): number {
    const { value: clamped, clamped: wasClamped } = clampMotion(id, value, this.motionTable());
    if (wasClamped) this.store.noteClamp(`motion ${id}: ${value} clamped to ${clamped}`);
    return clamped;
  }

  /** Coalesce slider updates; at most one set_motions per cycle. */
  private scheduleFlush(): void {
    if (this.flushTimer) return;
    const wait = Math.max(0, this.lastFlushMs + this.cycleMs - this.now());
    this.flushTimer = setTimeout(() => this.flush(), wait);
  }

  flush(): void {
    if (this.flushTimer) {
      clearTimeout(this.flushTimer);
      this.flushTimer = null;
    }
    if (Object.keys(this.pendingMotions).length === 0) return;
    const targets = this.pendingMotions;
    this.pendingMotions = {};
    this.lastFlushMs = this.now();
    const command: Command = { type: 'set_motions', targets };
    this.client.send(command);
  }
}
