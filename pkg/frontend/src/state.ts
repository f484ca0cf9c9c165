// Central state store: every WebSocket callback lands here, the UI
// only ever renders from this one object.

import {
  CameraPointsMsg,
  HelloMsg,
  MOTOR_COUNT,
  ServerMsg,
  motorsToMotions,
} from './protocol.js';

export const STALE_AFTER_MS = 1000;

export interface MeterState {
  rmsLeft: number;
  rmsRight: number;
  peakLeft: number;
  peakRight: number;
  lastUpdateMs: number | null;
}

export interface ConsoleState {
  connection: 'connecting' | 'open' | 'closed';
  hello: HelloMsg | null;
  positions: number[];
  motions: Record<number, number>;
  meters: MeterState;
  cameraPoints: { left: Map<number, [number, number]>; right: Map<number, [number, number]> };
  disparity: number | null;
  lastError: string | null;
  droppedCommands: number;
  clampNotices: string[];
}

export type Listener = (state: ConsoleState) => void;

function freshState(): ConsoleState {
  return {
    connection: 'connecting',
    hello: null,
    positions: new Array(MOTOR_COUNT).fill(0),
    motions: motorsToMotions(new Array(MOTOR_COUNT).fill(0)),
    meters: { rmsLeft: 0, rmsRight: 0, peakLeft: 0, peakRight: 0, lastUpdateMs: null },
    cameraPoints: { left: new Map(), right: new Map() },
    disparity: null,
    lastError: null,
    droppedCommands: 0,
    clampNotices: [],
  };
}

export class ConsoleStore {
  state: ConsoleState = freshState();
  private listeners: Listener[] = [];
  private now: () => number;

  constructor(now: () => number = () => Date.now()) {
    this.now = now;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  setConnection(connection: ConsoleState['connection']): void {
    this.state.connection = connection;
    this.emit();
  }

  noteDroppedCommand(): void {
    this.state.droppedCommands += 1;
    this.emit();
  }

  noteClamp(notice: string): void {
    this.state.clampNotices.push(notice);
    if (this.state.clampNotices.length > 8) this.state.clampNotices.shift();
    this.emit();
  }

  /** True when no audio has arrived for longer than the staleness bound. */
  metersStale(): boolean {
    const last = this.state.meters.lastUpdateMs;
    return last !== null && this.now() - last > STALE_AFTER_MS;
  }

  apply(msg: ServerMsg): void {
    switch (msg.type) {
      case 'hello':
        this.state.hello = msg;
        break;
      case 'joint_states':
        this.state.positions = msg.positions;
        this.state.motions = motorsToMotions(msg.positions);
        break;
      case 'audio_levels': {
        const meters = this.state.meters;
        meters.rmsLeft = msg.rms_left;
        meters.rmsRight = msg.rms_right;
        meters.peakLeft = Math.max(meters.peakLeft, msg.rms_left);
        meters.peakRight = Math.max(meters.peakRight, msg.rms_right);
        meters.lastUpdateMs = this.now();
        break;
      }
      case 'camera_points':
        this.applyCameraPoints(msg);
        break;
      case 'error':
        this.state.lastError = msg.message;
        break;
    }
    this.emit();
  }

  private applyCameraPoints(msg: CameraPointsMsg): void {
    const side = this.state.cameraPoints[msg.eye];
    side.clear();
    for (const [id, u, v] of msg.points) side.set(id, [u, v]);
    const left = this.state.cameraPoints.left.get(1);
    const right = this.state.cameraPoints.right.get(1);
    this.state.disparity = left && right ? left[0] - right[0] : null;
  }
}
